#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "offload/decision.hpp"
#include "offload/experiments.hpp"
#include "offload/rng.hpp"

using namespace offload;

namespace {

std::vector<ServerDescriptor> unit_servers(std::size_t count, double capacity = 1.0) {
  std::vector<ServerDescriptor> servers;
  for (std::size_t s = 0; s < count; ++s) {
    servers.emplace_back("srv-" + std::to_string(s), Vec2{0, 0}, 1.0, capacity);
  }
  return servers;
}

// Test-local oracle: literal nested enumeration over all mappings, strict
// improvement so ties resolve to the lexicographically smallest mapping. Kept
// separate from the library's search on purpose.
Assignment oracle_enumerate(const AssignmentProblem& problem) {
  const std::size_t tasks = problem.task_count();
  const std::size_t servers = problem.server_count();
  std::vector<int> mapping(tasks, 0);
  Assignment best;
  bool found = false;
  while (true) {
    bool ok = true;
    for (std::size_t t = 0; t < tasks && ok; ++t) {
      ok = problem.feasible(t, static_cast<std::size_t>(mapping[t]));
    }
    if (ok) {
      const double value = objective(problem, mapping);
      if (!found || value < best.objective) {
        best.objective = value;
        best.mapping = mapping;
        found = true;
      }
    }
    std::size_t t = tasks;
    while (t-- > 0) {
      if (++mapping[t] < static_cast<int>(servers)) break;
      mapping[t] = 0;
      if (t == 0) return best;
    }
  }
}

AssignmentProblem random_partial_problem(Rng& rng, std::size_t tasks, std::size_t servers) {
  std::vector<double> demands(tasks);
  for (double& d : demands) d = rng.uniform(1.0, 10.0);
  std::vector<ServerDescriptor> descs;
  for (std::size_t s = 0; s < servers; ++s) {
    descs.emplace_back("srv-" + std::to_string(s), Vec2{0, 0}, 1.0, rng.uniform(0.5, 2.0));
  }
  std::vector<std::uint8_t> feasible(tasks * servers, 0);
  for (std::size_t t = 0; t < tasks; ++t) {
    bool any = false;
    for (std::size_t s = 0; s < servers; ++s) {
      feasible[t * servers + s] = rng.u01() < 0.7 ? 1 : 0;
      any = any || feasible[t * servers + s];
    }
    if (!any) {
      feasible[t * servers + static_cast<std::size_t>(rng.uniform_int(
                                 0, static_cast<std::int64_t>(servers) - 1))] = 1;
    }
  }
  return AssignmentProblem(std::move(demands), std::move(descs), std::move(feasible));
}

}  // namespace

TEST_CASE("brute force on the worked examples") {
  SUBCASE("one server takes everything") {
    const AssignmentProblem problem({1.0, 2.0, 3.0}, unit_servers(1));
    const Assignment a = solve_brute_force(problem);
    CHECK(a.mapping == std::vector<int>{0, 0, 0});
    CHECK(a.objective == 6.0);
  }
  SUBCASE("two tasks across two servers split") {
    const AssignmentProblem problem({3.0, 5.0}, unit_servers(2));
    const Assignment a = solve_brute_force(problem);
    CHECK(a.objective == 5.0);
    CHECK(a.mapping == std::vector<int>{0, 1});  // lexicographically smallest optimum
  }
  SUBCASE("three equal tasks spread out") {
    const AssignmentProblem problem({2.0, 2.0, 2.0}, unit_servers(3));
    const Assignment a = solve_brute_force(problem);
    CHECK(a.objective == 2.0);
    CHECK(a.mapping == std::vector<int>{0, 1, 2});
  }
}

TEST_CASE("brute force enumeration cap") {
  const AssignmentProblem problem({1.0, 1.0, 1.0, 1.0}, unit_servers(3));
  BruteForceOptions options;
  options.enumeration_cap = 80.0;  // 3^4 = 81 exceeds it
  CHECK_THROWS_WITH_AS(static_cast<void>(solve_brute_force(problem, options)),
                       "instance too large for exhaustive search", std::invalid_argument);
}

TEST_CASE("all brute force modes agree with the oracle") {
  Rng rng(314);
  for (int trial = 0; trial < 60; ++trial) {
    const std::size_t tasks = static_cast<std::size_t>(rng.uniform_int(1, 5));
    const std::size_t servers = static_cast<std::size_t>(rng.uniform_int(1, 4));
    const AssignmentProblem problem = random_partial_problem(rng, tasks, servers);
    const Assignment expected = oracle_enumerate(problem);

    for (const BruteForceMode mode : {BruteForceMode::Plain, BruteForceMode::PlainParallel,
                                      BruteForceMode::Pruned, BruteForceMode::Auto}) {
      BruteForceOptions options;
      options.mode = mode;
      const Assignment got = solve_brute_force(problem, options);
      CHECK(got.mapping == expected.mapping);
      CHECK(got.objective == expected.objective);
    }
  }
}

TEST_CASE("brute force optimum never loses to random feasible mappings") {
  Rng rng(2718);
  const AssignmentProblem problem = random_partial_problem(rng, 6, 4);
  const Assignment best = solve_brute_force(problem);
  for (int i = 0; i < 1000; ++i) {
    std::vector<int> mapping(problem.task_count());
    for (std::size_t t = 0; t < mapping.size(); ++t) {
      int s;
      do {
        s = static_cast<int>(rng.uniform_int(0, static_cast<std::int64_t>(problem.server_count()) - 1));
      } while (!problem.feasible(t, static_cast<std::size_t>(s)));
      mapping[t] = s;
    }
    CHECK(objective(problem, mapping) >= best.objective);
  }
}

TEST_CASE("greedy follows longest-processing-time order") {
  SUBCASE("optimal on the easy split") {
    const AssignmentProblem problem({3.0, 5.0}, unit_servers(2));
    const Assignment a = solve_greedy(problem);
    CHECK(a.objective == 5.0);
  }
  SUBCASE("classic adversarial instance shows the gap") {
    const AssignmentProblem problem({3.0, 3.0, 2.0, 2.0, 2.0}, unit_servers(2));
    const Assignment greedy = solve_greedy(problem);
    const Assignment best = solve_brute_force(problem);
    CHECK(greedy.objective == 7.0);
    CHECK(best.objective == 6.0);
  }
  SUBCASE("single server") {
    const AssignmentProblem problem({1.0, 4.0, 2.0}, unit_servers(1));
    CHECK(solve_greedy(problem).mapping == std::vector<int>{0, 0, 0});
  }
  SUBCASE("respects feasibility") {
    const AssignmentProblem problem({9.0, 1.0}, unit_servers(2), {0, 1, 1, 1});
    const Assignment a = solve_greedy(problem);
    CHECK(a.mapping == std::vector<int>{1, 0});
    CHECK(a.objective == 9.0);
  }
}

TEST_CASE("pso with one server matches brute force trivially") {
  const AssignmentProblem problem({1.0, 2.0, 3.0}, unit_servers(1));
  PsoConfig config;
  config.rng_seed = 9;
  const Assignment a = solve_pso(problem, config, ExecMode::Serial);
  CHECK(a.mapping == std::vector<int>{0, 0, 0});
  CHECK(a.objective == 6.0);
}

TEST_CASE("pso finds the optimum on the pinned 5x3 instance") {
  Rng rng(42);
  const AssignmentProblem problem = generate_random_problem(rng, 5, 3);
  PsoConfig config;
  config.rng_seed = 42;
  const Assignment pso = solve_pso(problem, config, ExecMode::Serial);
  const Assignment bf = solve_brute_force(problem);
  CHECK(pso.objective == bf.objective);
}

TEST_CASE("pso and greedy never beat brute force") {
  Rng rng(161803);
  for (int trial = 0; trial < 40; ++trial) {
    const std::size_t tasks = static_cast<std::size_t>(rng.uniform_int(1, 6));
    const std::size_t servers = static_cast<std::size_t>(rng.uniform_int(1, 4));
    const AssignmentProblem problem = random_partial_problem(rng, tasks, servers);
    const Assignment bf = solve_brute_force(problem);
    PsoConfig config;
    config.rng_seed = rng.next_u64();
    CHECK(solve_pso(problem, config, ExecMode::Serial).objective >= bf.objective);
    CHECK(solve_greedy(problem).objective >= bf.objective);
  }
}

TEST_CASE("pso determinism: same seed bit-identical, different seed may differ") {
  Rng rng(55);
  const AssignmentProblem problem = generate_random_problem(rng, 8, 5);
  PsoConfig config;
  config.rng_seed = 1234;
  const Assignment a = solve_pso(problem, config, ExecMode::Serial);
  const Assignment b = solve_pso(problem, config, ExecMode::Serial);
  CHECK(a == b);
}

TEST_CASE("pso validates the penalty against the worst feasible objective") {
  const AssignmentProblem problem({5.0, 5.0}, unit_servers(2));
  PsoConfig config;
  config.infeasible_penalty = 5.0;  // worst feasible objective is 10
  CHECK_THROWS_AS(static_cast<void>(solve_pso(problem, config)), std::invalid_argument);
}

TEST_CASE("rescaling demands and capacities preserves the chosen mapping") {
  // Powers of two keep the arithmetic exact, so the tie-break cannot drift.
  Rng rng(90210);
  for (int trial = 0; trial < 30; ++trial) {
    const std::size_t tasks = static_cast<std::size_t>(rng.uniform_int(2, 6));
    const std::size_t servers = static_cast<std::size_t>(rng.uniform_int(2, 4));
    const AssignmentProblem base = random_partial_problem(rng, tasks, servers);
    const Assignment expected = solve_brute_force(base);

    for (const double factor : {2.0, 4.0, 0.5}) {
      std::vector<double> demands = base.demands();
      for (double& d : demands) d *= factor;
      std::vector<ServerDescriptor> servers_scaled = base.servers();
      std::vector<std::uint8_t> feasible;
      for (std::size_t t = 0; t < tasks; ++t) {
        for (std::size_t s = 0; s < servers; ++s) {
          feasible.push_back(base.feasible(t, s) ? 1 : 0);
        }
      }
      const AssignmentProblem demand_scaled(demands, base.servers(), feasible);
      const Assignment a = solve_brute_force(demand_scaled);
      CHECK(a.mapping == expected.mapping);
      CHECK(a.objective == expected.objective * factor);

      for (ServerDescriptor& s : servers_scaled) {
        s = ServerDescriptor(s.id, s.position, s.comm_range_m, s.capacity * factor, s.status,
                             s.host, s.port, s.utilization);
      }
      const AssignmentProblem both_scaled(demands, servers_scaled, feasible);
      const Assignment b = solve_brute_force(both_scaled);
      CHECK(b.mapping == expected.mapping);
      CHECK(b.objective == expected.objective);
    }
  }
}

TEST_CASE("bench: one task on one server has gap exactly zero everywhere") {
  BenchOptions options;
  options.tasks = 1;
  options.servers = 1;
  options.instances = 5;
  options.seed = 3;
  const BenchReport report = run_bench(options);
  REQUIRE(report.solvers.size() == 3);
  for (const SolverBenchResult& r : report.solvers) {
    REQUIRE(r.gaps.size() == 5);
    for (const double g : r.gaps) {
      CHECK(g == 0.0);
    }
    CHECK(r.optimum_hits == 5);
    CHECK(r.mean_gap == 0.0);
    CHECK(r.median_gap == 0.0);
  }
}

TEST_CASE("bench: serial and parallel instance scheduling agree") {
  BenchOptions options;
  options.tasks = 5;
  options.servers = 3;
  options.instances = 12;
  options.seed = 17;
  options.exec = ExecMode::Parallel;
  const BenchReport parallel = run_bench(options);
  options.exec = ExecMode::Serial;
  const BenchReport serial = run_bench(options);
  REQUIRE(parallel.solvers.size() == serial.solvers.size());
  for (std::size_t k = 0; k < parallel.solvers.size(); ++k) {
    CHECK(parallel.solvers[k].objectives == serial.solvers[k].objectives);
    CHECK(parallel.solvers[k].gaps == serial.solvers[k].gaps);
  }
}

TEST_CASE("measure_solver reports sane wall-clock statistics") {
  const AssignmentProblem problem({3.0, 5.0}, unit_servers(2));
  const TimingStats stats = measure_solver(problem, SolverKind::BruteForce, 3);
  CHECK(stats.repetitions == 3);
  CHECK(stats.min_ms >= 0.0);
  CHECK(stats.min_ms <= stats.mean_ms);
  CHECK(stats.mean_ms <= stats.max_ms);
  CHECK_THROWS_AS(measure_solver(problem, SolverKind::Greedy, 0), std::invalid_argument);
}
