#include <algorithm>
#include <numeric>
#include <stdexcept>
#include <vector>

#include "objective_kernel.hpp"
#include "offload/decision.hpp"

namespace offload {

Assignment solve_greedy(const AssignmentProblem& problem) {
  const std::size_t tasks = problem.task_count();
  const std::size_t servers = problem.server_count();

  std::vector<std::size_t> order(tasks);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (problem.demands()[a] != problem.demands()[b]) {
      return problem.demands()[a] > problem.demands()[b];
    }
    return a < b;
  });

  std::vector<double> sums(servers, 0.0);
  std::vector<int> mapping(tasks, -1);
  for (const std::size_t task : order) {
    const double demand = problem.demands()[task];
    int best = -1;
    double best_load = 0.0;
    for (std::size_t s = 0; s < servers; ++s) {
      if (!problem.feasible(task, s)) continue;
      const double load = (sums[s] + demand) / problem.servers()[s].capacity;
      if (best < 0 || load < best_load) {
        best = static_cast<int>(s);
        best_load = load;
      }
    }
    if (best < 0) {
      throw std::runtime_error("greedy: task " + std::to_string(task) + " has no feasible server");
    }
    sums[static_cast<std::size_t>(best)] += demand;
    mapping[task] = best;
  }

  Assignment result;
  result.mapping = std::move(mapping);
  std::vector<double> scratch;
  result.objective = detail::objective_kernel(problem, result.mapping.data(), scratch,
                                              kDefaultInfeasiblePenalty);
  return result;
}

}  // namespace offload
