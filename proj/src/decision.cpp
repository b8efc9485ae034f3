#include "offload/decision.hpp"

#include <algorithm>
#include <chrono>
#include <stdexcept>

#include "objective_kernel.hpp"

namespace offload {

PsoConfig::PsoConfig(int particles_, int iterations_, double inertia_, double cognitive_,
                     double social_, std::uint64_t rng_seed_, double infeasible_penalty_)
    : particles(particles_),
      iterations(iterations_),
      inertia(inertia_),
      cognitive(cognitive_),
      social(social_),
      rng_seed(rng_seed_),
      infeasible_penalty(infeasible_penalty_) {
  if (particles < 1) throw std::invalid_argument("pso: particles must be >= 1");
  if (iterations < 1) throw std::invalid_argument("pso: iterations must be >= 1");
  if (infeasible_penalty <= 0.0) throw std::invalid_argument("pso: infeasible_penalty must be > 0");
}

const char* to_string(SolverKind k) {
  switch (k) {
    case SolverKind::BruteForce: return "brute-force";
    case SolverKind::Pso: return "pso";
    case SolverKind::Greedy: return "greedy";
  }
  return "?";
}

const char* to_string(CandidateVerdict v) {
  switch (v) {
    case CandidateVerdict::Ok: return "ok";
    case CandidateVerdict::Unavailable: return "unavailable";
    case CandidateVerdict::OutOfRange: return "out_of_range";
    case CandidateVerdict::OverUtilization: return "over_utilization";
    case CandidateVerdict::OverThreshold: return "over_threshold";
    case CandidateVerdict::StayTooShort: return "stay_too_short";
  }
  return "?";
}

CandidateEvaluation evaluate_candidate(const OffloadRequest& request,
                                       const ServerDescriptor& server,
                                       const RttEstimate& estimates,
                                       const PenaltyWeights& weights,
                                       double utilization_cap) {
  CandidateEvaluation eval;
  if (server.status != ServerStatus::Available) {
    eval.verdict = CandidateVerdict::Unavailable;
    return eval;
  }
  const auto it = estimates.find(server.id);
  if (it == estimates.end()) {
    throw std::invalid_argument("missing RTT estimate for available server '" + server.id + "'");
  }
  if (it->second <= 0.0) {
    throw std::invalid_argument("RTT estimate for server '" + server.id + "' must be > 0");
  }
  eval.predicted_rtt_ms = it->second;
  const std::optional<double> dist_cost = distance_cost(request.vehicle, server, weights);
  if (!dist_cost) {
    eval.verdict = CandidateVerdict::OutOfRange;
    return eval;
  }
  eval.distance_cost_ms = *dist_cost;
  eval.direction_cost_ms = direction_cost(request.vehicle, server, weights);
  eval.total_cost_ms = *eval.predicted_rtt_ms + *eval.direction_cost_ms + *eval.distance_cost_ms;
  eval.stay_time_ms = stay_time_ms(request.vehicle, server);
  if (server.utilization >= utilization_cap) {
    eval.verdict = CandidateVerdict::OverUtilization;
    return eval;
  }
  if (*eval.total_cost_ms > request.service.max_rtt_ms) {
    eval.verdict = CandidateVerdict::OverThreshold;
    return eval;
  }
  if (*eval.stay_time_ms < *eval.total_cost_ms) {
    eval.verdict = CandidateVerdict::StayTooShort;
    return eval;
  }
  return eval;
}

std::vector<CostedServer> feasible_servers(const OffloadRequest& request,
                                           const std::vector<ServerDescriptor>& servers,
                                           const RttEstimate& estimates,
                                           const PenaltyWeights& weights,
                                           double utilization_cap) {
  std::vector<CostedServer> result;
  for (const ServerDescriptor& server : servers) {
    const CandidateEvaluation eval =
        evaluate_candidate(request, server, estimates, weights, utilization_cap);
    if (eval.verdict == CandidateVerdict::Ok) {
      result.push_back({server.id, *eval.total_cost_ms});
    }
  }
  std::sort(result.begin(), result.end(), [](const CostedServer& a, const CostedServer& b) {
    if (a.total_cost_ms != b.total_cost_ms) return a.total_cost_ms < b.total_cost_ms;
    return a.server_id < b.server_id;
  });
  return result;
}

DecisionRecord decide_single(const OffloadRequest& request,
                             const std::vector<ServerDescriptor>& servers,
                             const RttEstimate& estimates, const PenaltyWeights& weights,
                             double utilization_cap) {
  const std::vector<CostedServer> candidates =
      feasible_servers(request, servers, estimates, weights, utilization_cap);
  if (candidates.empty()) {
    return DecisionRecord::for_local(request);
  }
  const CostedServer& best = candidates.front();
  const ServerDescriptor* server = nullptr;
  for (const ServerDescriptor& s : servers) {
    if (s.id == best.server_id) {
      server = &s;
      break;
    }
  }
  const double rtt = estimates.at(best.server_id);
  const double dir_cost = direction_cost(request.vehicle, *server, weights);
  const double dist_cost = distance_cost(request.vehicle, *server, weights).value();
  return DecisionRecord::for_server(request, best.server_id, rtt, dir_cost, dist_cost);
}

double objective(const AssignmentProblem& problem, const std::vector<int>& mapping,
                 double infeasible_penalty) {
  if (mapping.size() != problem.task_count()) {
    throw std::invalid_argument("mapping must cover all tasks");
  }
  for (const int s : mapping) {
    if (s < 0 || static_cast<std::size_t>(s) >= problem.server_count()) {
      throw std::invalid_argument("mapping entry out of server range");
    }
  }
  std::vector<double> sums;
  return detail::objective_kernel(problem, mapping.data(), sums, infeasible_penalty);
}

TimingStats measure_solver(const AssignmentProblem& problem, SolverKind kind, int repetitions,
                           const PsoConfig& pso_config, ExecMode exec,
                           const BruteForceOptions& bf_options) {
  if (repetitions < 1) {
    throw std::invalid_argument("measure_solver: repetitions must be >= 1");
  }
  TimingStats stats;
  stats.repetitions = repetitions;
  double total = 0.0;
  for (int rep = 0; rep < repetitions; ++rep) {
    const auto start = std::chrono::steady_clock::now();
    volatile double sink = 0.0;  // keep the solve from being optimized out
    switch (kind) {
      case SolverKind::BruteForce: sink = solve_brute_force(problem, bf_options).objective; break;
      case SolverKind::Pso: sink = solve_pso(problem, pso_config, exec).objective; break;
      case SolverKind::Greedy: sink = solve_greedy(problem).objective; break;
    }
    (void)sink;
    const auto end = std::chrono::steady_clock::now();
    const double ms = std::chrono::duration<double, std::milli>(end - start).count();
    total += ms;
    if (rep == 0) {
      stats.min_ms = stats.max_ms = ms;
    } else {
      stats.min_ms = std::min(stats.min_ms, ms);
      stats.max_ms = std::max(stats.max_ms, ms);
    }
  }
  stats.mean_ms = total / repetitions;
  return stats;
}

}  // namespace offload
