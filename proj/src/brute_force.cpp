#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <vector>

#include "objective_kernel.hpp"
#include "offload/decision.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace offload {

namespace {

bool mapping_feasible(const AssignmentProblem& problem, const int* mapping) {
  for (std::size_t t = 0; t < problem.task_count(); ++t) {
    if (!problem.feasible(t, static_cast<std::size_t>(mapping[t]))) {
      return false;
    }
  }
  return true;
}

// Task 0 is the most significant digit, so index order equals lexicographic
// order of the decoded mappings.
void decode_mapping(std::uint64_t index, std::size_t tasks, std::size_t servers,
                    std::vector<int>& out) {
  out.resize(tasks);
  for (std::size_t t = tasks; t-- > 0;) {
    out[t] = static_cast<int>(index % servers);
    index /= servers;
  }
}

bool advance_odometer(std::vector<int>& mapping, int servers) {
  for (std::size_t t = mapping.size(); t-- > 0;) {
    if (++mapping[t] < servers) {
      return true;
    }
    mapping[t] = 0;
  }
  return false;
}

struct ChunkBest {
  double value = std::numeric_limits<double>::infinity();
  std::uint64_t index = 0;
  bool found = false;
};

ChunkBest scan_range(const AssignmentProblem& problem, std::uint64_t begin, std::uint64_t end) {
  ChunkBest best;
  const int servers = static_cast<int>(problem.server_count());
  std::vector<int> mapping;
  decode_mapping(begin, problem.task_count(), problem.server_count(), mapping);
  std::vector<double> sums;
  for (std::uint64_t index = begin; index < end; ++index) {
    if (mapping_feasible(problem, mapping.data())) {
      const double value = detail::objective_kernel(problem, mapping.data(), sums, kDefaultInfeasiblePenalty);
      if (!best.found || value < best.value) {
        best.value = value;
        best.index = index;
        best.found = true;
      }
    }
    advance_odometer(mapping, servers);
  }
  return best;
}

Assignment solve_plain(const AssignmentProblem& problem, std::uint64_t space, bool parallel) {
  ChunkBest best;
  if (!parallel) {
    best = scan_range(problem, 0, space);
  } else {
#ifdef _OPENMP
    const int threads = omp_get_max_threads();
#else
    const int threads = 1;
#endif
    const std::uint64_t chunk_count = std::min<std::uint64_t>(space, static_cast<std::uint64_t>(threads) * 8);
    const std::uint64_t chunk_size = (space + chunk_count - 1) / chunk_count;
    std::vector<ChunkBest> chunk_best(chunk_count);
#pragma omp parallel for schedule(dynamic)
    for (std::int64_t c = 0; c < static_cast<std::int64_t>(chunk_count); ++c) {
      const std::uint64_t begin = static_cast<std::uint64_t>(c) * chunk_size;
      const std::uint64_t end = std::min(space, begin + chunk_size);
      chunk_best[static_cast<std::size_t>(c)] = scan_range(problem, begin, end);
    }
    // Chunks merge in index order, so the winner matches the serial scan.
    for (const ChunkBest& cb : chunk_best) {
      if (!cb.found) continue;
      if (!best.found || cb.value < best.value ||
          (cb.value == best.value && cb.index < best.index)) {
        best = cb;
      }
    }
  }
  if (!best.found) {
    throw std::logic_error("no feasible mapping found");  // excluded by problem invariants
  }
  Assignment result;
  decode_mapping(best.index, problem.task_count(), problem.server_count(), result.mapping);
  std::vector<double> sums;
  result.objective = detail::objective_kernel(problem, result.mapping.data(), sums, kDefaultInfeasiblePenalty);
  return result;
}

// Value search over tasks sorted by descending demand. Symmetric servers
// (equal capacity, identical feasibility column) are only tried once per
// distinct current load, and branches that cannot beat the incumbent are cut.
// Only the optimal value matters here; the mapping is rebuilt afterwards.
class ValueSearch {
 public:
  explicit ValueSearch(const AssignmentProblem& problem) : problem_(problem) {
    const std::size_t tasks = problem.task_count();
    const std::size_t servers = problem.server_count();
    candidates_.assign(tasks, {});
    order_.resize(tasks);
    std::iota(order_.begin(), order_.end(), std::size_t{0});
    std::sort(order_.begin(), order_.end(), [&](std::size_t a, std::size_t b) {
      if (problem.demands()[a] != problem.demands()[b]) {
        return problem.demands()[a] > problem.demands()[b];
      }
      return a < b;
    });

    class_of_.resize(servers);
    for (std::size_t s = 0; s < servers; ++s) {
      class_of_[s] = s;
      for (std::size_t r = 0; r < s; ++r) {
        if (same_class(r, s)) {
          class_of_[s] = r;
          break;
        }
      }
    }

    double total_demand = 0.0;
    for (double d : problem.demands()) total_demand += d;
    double total_capacity = 0.0;
    for (const ServerDescriptor& s : problem.servers()) total_capacity += s.capacity;
    floor_ = total_demand / total_capacity;

    sums_.assign(servers, 0.0);
  }

  double run(double incumbent) {
    incumbent_ = incumbent;
    dive(0, 0.0);
    return incumbent_;
  }

 private:
  bool same_class(std::size_t a, std::size_t b) const {
    if (problem_.servers()[a].capacity != problem_.servers()[b].capacity) return false;
    for (std::size_t t = 0; t < problem_.task_count(); ++t) {
      if (problem_.feasible(t, a) != problem_.feasible(t, b)) return false;
    }
    return true;
  }

  void dive(std::size_t depth, double partial_max) {
    if (std::max(partial_max, floor_) >= incumbent_) {
      return;
    }
    if (depth == problem_.task_count()) {
      incumbent_ = partial_max;
      return;
    }
    const std::size_t task = order_[depth];
    const double demand = problem_.demands()[task];
    const std::size_t servers = problem_.server_count();

    // Best-fit-first ordering converges on a tight incumbent quickly. Each
    // depth owns its candidate buffer; deeper calls must not disturb it.
    std::vector<std::pair<double, std::size_t>>& candidates = candidates_[depth];
    candidates.clear();
    for (std::size_t s = 0; s < servers; ++s) {
      if (!problem_.feasible(task, s)) continue;
      bool skip = false;
      for (std::size_t r = class_of_[s]; r < s && !skip; ++r) {
        skip = class_of_[r] == class_of_[s] && sums_[r] == sums_[s];
      }
      if (skip) continue;
      const double load = (sums_[s] + demand) / problem_.servers()[s].capacity;
      candidates.emplace_back(load, s);
    }
    std::sort(candidates.begin(), candidates.end());
    for (const auto& [load, s] : candidates) {
      if (std::max(load, partial_max) >= incumbent_) continue;
      const double saved = sums_[s];  // restore exactly; -= would leave rounding dirt
      sums_[s] = saved + demand;
      dive(depth + 1, std::max(partial_max, load));
      sums_[s] = saved;
    }
  }

  const AssignmentProblem& problem_;
  std::vector<std::size_t> order_;
  std::vector<std::size_t> class_of_;
  std::vector<double> sums_;
  std::vector<std::vector<std::pair<double, std::size_t>>> candidates_;
  double floor_ = 0.0;
  double incumbent_ = std::numeric_limits<double>::infinity();
};

// Depth-first walk in original task order with strict-improvement acceptance:
// the first optimum it completes is the lexicographically smallest one, and
// partial sums accumulate in task order so leaf values match the shared
// objective bit for bit.
class LexSearch {
 public:
  explicit LexSearch(const AssignmentProblem& problem) : problem_(problem) {
    sums_.assign(problem.server_count(), 0.0);
    current_.assign(problem.task_count(), 0);
  }

  bool run(double bound, Assignment& out) {
    bound_ = bound;
    found_ = false;
    dive(0, 0.0);
    if (found_) {
      out.mapping = best_mapping_;
      out.objective = best_value_;
    }
    return found_;
  }

 private:
  void dive(std::size_t depth, double partial_max) {
    if (partial_max >= bound_) {
      return;
    }
    if (depth == problem_.task_count()) {
      best_value_ = partial_max;
      best_mapping_ = current_;
      bound_ = partial_max;
      found_ = true;
      return;
    }
    const double demand = problem_.demands()[depth];
    for (std::size_t s = 0; s < problem_.server_count(); ++s) {
      if (!problem_.feasible(depth, s)) continue;
      const double load = (sums_[s] + demand) / problem_.servers()[s].capacity;
      const double next_max = std::max(partial_max, load);
      if (next_max >= bound_) continue;
      const double saved = sums_[s];  // restore exactly; -= would leave rounding dirt
      sums_[s] = saved + demand;
      current_[depth] = static_cast<int>(s);
      dive(depth + 1, next_max);
      sums_[s] = saved;
    }
  }

  const AssignmentProblem& problem_;
  std::vector<double> sums_;
  std::vector<int> current_;
  std::vector<int> best_mapping_;
  double best_value_ = 0.0;
  double bound_ = std::numeric_limits<double>::infinity();
  bool found_ = false;
};

Assignment solve_pruned(const AssignmentProblem& problem) {
  const double greedy_value = solve_greedy(problem).objective;
  ValueSearch value_search(problem);
  // Slack above the value-phase result absorbs summation-order rounding; the
  // lex phase recomputes exact objectives underneath it.
  const double value = value_search.run(greedy_value * (1.0 + 1e-12) + 1e-12);
  const double bound = value * (1.0 + 1e-9) + 1e-9;
  Assignment result;
  LexSearch lex(problem);
  if (!lex.run(bound, result) && !lex.run(std::numeric_limits<double>::infinity(), result)) {
    throw std::logic_error("no feasible mapping found");  // excluded by problem invariants
  }
  return result;
}

}  // namespace

Assignment solve_brute_force(const AssignmentProblem& problem, const BruteForceOptions& options) {
  const double space_d =
      std::pow(static_cast<double>(problem.server_count()), static_cast<double>(problem.task_count()));
  if (space_d > options.enumeration_cap) {
    throw std::invalid_argument("instance too large for exhaustive search");
  }

  BruteForceMode mode = options.mode;
  if (mode == BruteForceMode::Auto) {
    mode = space_d <= 4096.0 ? BruteForceMode::Plain : BruteForceMode::Pruned;
  }
  if (mode == BruteForceMode::Pruned) {
    return solve_pruned(problem);
  }
  if (space_d > 1e15) {
    throw std::invalid_argument("instance too large for plain enumeration");
  }
  const auto space = static_cast<std::uint64_t>(space_d);
  return solve_plain(problem, space, mode == BruteForceMode::PlainParallel);
}

}  // namespace offload
