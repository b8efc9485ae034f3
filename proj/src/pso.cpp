#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "objective_kernel.hpp"
#include "offload/decision.hpp"
#include "offload/rng.hpp"

namespace offload {

namespace {

// One particle, self-contained: its own RNG stream (derived from the solver
// seed and the particle index) makes the update schedule-independent, so the
// OpenMP path reproduces the serial path bit for bit.
struct Particle {
  Rng rng;
  std::vector<double> position;
  std::vector<double> velocity;
  std::vector<int> mapping;
  std::vector<int> best_mapping;
  double best_value = 0.0;
  double value = 0.0;
  std::vector<double> scratch;

  explicit Particle(Rng stream) : rng(std::move(stream)) {}
};

// Velocities get the full attraction span plus headroom; tighter clamps make
// the swarm stall on small discrete spaces.
double velocity_limit(int max_index) { return 1.5 * static_cast<double>(max_index); }

void discretize(const std::vector<double>& position, std::vector<int>& mapping, int max_index) {
  for (std::size_t t = 0; t < position.size(); ++t) {
    const int idx = static_cast<int>(std::lround(position[t]));
    mapping[t] = std::clamp(idx, 0, max_index);
  }
}

void init_particle(Particle& p, const AssignmentProblem& problem, double penalty) {
  const std::size_t tasks = problem.task_count();
  const int max_index = static_cast<int>(problem.server_count()) - 1;
  const double v_max = velocity_limit(max_index);
  p.position.resize(tasks);
  p.velocity.resize(tasks);
  p.mapping.resize(tasks);
  for (std::size_t t = 0; t < tasks; ++t) {
    p.position[t] = p.rng.uniform(0.0, static_cast<double>(max_index));
  }
  for (std::size_t t = 0; t < tasks; ++t) {
    p.velocity[t] = p.rng.uniform(-v_max, v_max);
  }
  discretize(p.position, p.mapping, max_index);
  p.value = detail::objective_kernel(problem, p.mapping.data(), p.scratch, penalty);
  p.best_mapping = p.mapping;
  p.best_value = p.value;
}

void step_particle(Particle& p, const AssignmentProblem& problem, const PsoConfig& config,
                   const std::vector<int>& global_best) {
  const int max_index = static_cast<int>(problem.server_count()) - 1;
  const double v_max = velocity_limit(max_index);
  const double upper = static_cast<double>(max_index);
  for (std::size_t t = 0; t < p.position.size(); ++t) {
    const double r1 = p.rng.u01();
    const double r2 = p.rng.u01();
    // Attraction measures from the discretized coordinate, so a particle
    // whose rounded position already matches its targets stops drifting.
    const double here = static_cast<double>(p.mapping[t]);
    double v = config.inertia * p.velocity[t] +
               config.cognitive * r1 * (p.best_mapping[t] - here) +
               config.social * r2 * (global_best[t] - here);
    v = std::clamp(v, -v_max, v_max);
    double next = p.position[t] + v;
    // Reflecting walls: bounce instead of saturating at the box edge.
    if (next < 0.0) {
      next = -next;
      v = -v;
    }
    if (next > upper) {
      next = 2.0 * upper - next;
      v = -v;
    }
    p.velocity[t] = v;
    p.position[t] = std::clamp(next, 0.0, upper);
  }
  discretize(p.position, p.mapping, max_index);
  p.value = detail::objective_kernel(problem, p.mapping.data(), p.scratch, config.infeasible_penalty);
  if (p.value < p.best_value) {
    p.best_value = p.value;
    p.best_mapping = p.mapping;
  }
}

}  // namespace

Assignment solve_pso(const AssignmentProblem& problem, const PsoConfig& config, ExecMode exec) {
  // The graded penalty only steers the swarm if it dominates every feasible
  // objective; the worst feasible objective is bounded by piling everything
  // onto the weakest server.
  double total_demand = 0.0;
  for (double d : problem.demands()) total_demand += d;
  double min_capacity = problem.servers().front().capacity;
  for (const ServerDescriptor& s : problem.servers()) {
    min_capacity = std::min(min_capacity, s.capacity);
  }
  if (config.infeasible_penalty <= total_demand / min_capacity) {
    throw std::invalid_argument("pso: infeasible_penalty must exceed the worst feasible objective");
  }

  const Rng root(config.rng_seed);
  std::vector<Particle> swarm;
  swarm.reserve(static_cast<std::size_t>(config.particles));
  for (int p = 0; p < config.particles; ++p) {
    swarm.emplace_back(root.substream(static_cast<std::uint64_t>(p)));
  }

  const auto count = static_cast<std::int64_t>(swarm.size());
  const bool parallel = exec == ExecMode::Parallel;

#pragma omp parallel for schedule(static) if (parallel)
  for (std::int64_t p = 0; p < count; ++p) {
    init_particle(swarm[static_cast<std::size_t>(p)], problem, config.infeasible_penalty);
  }

  // Global best reduces in particle-index order with strict improvement, so
  // the result does not depend on the evaluation schedule.
  std::vector<int> global_best = swarm.front().best_mapping;
  double global_value = swarm.front().best_value;
  for (const Particle& p : swarm) {
    if (p.best_value < global_value) {
      global_value = p.best_value;
      global_best = p.best_mapping;
    }
  }

  for (int iter = 0; iter < config.iterations; ++iter) {
#pragma omp parallel for schedule(static) if (parallel)
    for (std::int64_t p = 0; p < count; ++p) {
      step_particle(swarm[static_cast<std::size_t>(p)], problem, config, global_best);
    }
    for (const Particle& p : swarm) {
      if (p.best_value < global_value) {
        global_value = p.best_value;
        global_best = p.best_mapping;
      }
    }
  }

  return Assignment{std::move(global_best), global_value};
}

}  // namespace offload
