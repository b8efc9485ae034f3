#pragma once

#include <algorithm>
#include <vector>

#include "offload/domain.hpp"

namespace offload::detail {

// Single source of truth for mapping fitness. Per-server demand sums
// accumulate in task order and are divided by capacity once, so any two code
// paths scoring the same mapping produce bit-identical doubles. Infeasible
// mappings get a graded penalty: base penalty plus one per violating task.
inline double objective_kernel(const AssignmentProblem& problem, const int* mapping,
                               std::vector<double>& sums, double infeasible_penalty) {
  const std::size_t servers = problem.server_count();
  sums.assign(servers, 0.0);
  int violations = 0;
  for (std::size_t t = 0; t < problem.task_count(); ++t) {
    const auto s = static_cast<std::size_t>(mapping[t]);
    if (!problem.feasible(t, s)) {
      ++violations;
    }
    sums[s] += problem.demands()[t];
  }
  if (violations > 0) {
    return infeasible_penalty + violations;
  }
  double max_load = 0.0;
  for (std::size_t s = 0; s < servers; ++s) {
    max_load = std::max(max_load, sums[s] / problem.servers()[s].capacity);
  }
  return max_load;
}

}  // namespace offload::detail
