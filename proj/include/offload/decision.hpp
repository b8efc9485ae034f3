#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "offload/domain.hpp"
#include "offload/geometry.hpp"

namespace offload {

// Whether a solver kernel runs its inner evaluation loop serially or with
// OpenMP. Both paths produce bit-identical results; the serial path is the
// reference the tests compare against.
enum class ExecMode { Serial, Parallel };

inline constexpr double kDefaultInfeasiblePenalty = 1.0e9;

struct PsoConfig {
  int particles = 10;
  int iterations = 80;
  double inertia = 0.5;
  double cognitive = 1.5;
  double social = 1.5;
  std::uint64_t rng_seed = 0;
  double infeasible_penalty = kDefaultInfeasiblePenalty;

  PsoConfig() = default;
  PsoConfig(int particles, int iterations, double inertia, double cognitive, double social,
            std::uint64_t rng_seed, double infeasible_penalty = kDefaultInfeasiblePenalty);

  friend bool operator==(const PsoConfig&, const PsoConfig&) = default;
};

// Predicted RTT per server id for one service. std::map keeps iteration in id
// order, which is also the tie-break order used everywhere.
using RttEstimate = std::map<std::string, double>;

struct CostedServer {
  std::string server_id;
  double total_cost_ms = 0.0;
  friend bool operator==(const CostedServer&, const CostedServer&) = default;
};

// First feasibility gate a server fails for a given request, Ok if none.
enum class CandidateVerdict {
  Ok,
  Unavailable,
  OutOfRange,
  OverUtilization,
  OverThreshold,
  StayTooShort,
};

const char* to_string(CandidateVerdict v);

// Full per-server evaluation detail; cost fields are filled as far as the
// gate chain got.
struct CandidateEvaluation {
  CandidateVerdict verdict = CandidateVerdict::Ok;
  std::optional<double> predicted_rtt_ms;
  std::optional<double> direction_cost_ms;
  std::optional<double> distance_cost_ms;
  std::optional<double> total_cost_ms;
  std::optional<double> stay_time_ms;
};

CandidateEvaluation evaluate_candidate(const OffloadRequest& request,
                                       const ServerDescriptor& server,
                                       const RttEstimate& estimates,
                                       const PenaltyWeights& weights,
                                       double utilization_cap = 1.0);

// Servers that pass every feasibility gate for this request, cheapest first:
// available in the registry snapshot, within range, predicted to stay in range
// long enough, under the utilization cap, and with total predicted cost
// (RTT + direction penalty + distance penalty) within the service threshold.
std::vector<CostedServer> feasible_servers(const OffloadRequest& request,
                                           const std::vector<ServerDescriptor>& servers,
                                           const RttEstimate& estimates,
                                           const PenaltyWeights& weights,
                                           double utilization_cap = 1.0);

// Cheapest feasible server, or local execution when none qualifies.
DecisionRecord decide_single(const OffloadRequest& request,
                             const std::vector<ServerDescriptor>& servers,
                             const RttEstimate& estimates, const PenaltyWeights& weights,
                             double utilization_cap = 1.0);

// Max server load (assigned demand / capacity) induced by a mapping. Mappings
// that violate the feasibility matrix get a graded penalty: infeasible_penalty
// plus one per violation, which gives search heuristics a slope back toward
// feasibility.
double objective(const AssignmentProblem& problem, const std::vector<int>& mapping,
                 double infeasible_penalty = kDefaultInfeasiblePenalty);

enum class BruteForceMode {
  Auto,           // pruned search, plain loop for tiny spaces
  Plain,          // serial lexicographic enumeration (the reference)
  PlainParallel,  // same enumeration, chunked across OpenMP threads
  Pruned,         // depth-first implicit enumeration, same result, much faster
};

struct BruteForceOptions {
  double enumeration_cap = 1.0e8;  // upper bound on servers^tasks
  BruteForceMode mode = BruteForceMode::Auto;
};

// Global optimum over all feasible mappings; ties resolved toward the
// lexicographically smallest mapping. Every mode returns the identical
// assignment. Throws when servers^tasks exceeds the cap.
Assignment solve_brute_force(const AssignmentProblem& problem, const BruteForceOptions& options = {});

// Global-best PSO over a tasks-dimensional box [0, servers-1]^tasks, positions
// rounded to the nearest server index for fitness evaluation. Deterministic
// for a fixed seed in both exec modes.
Assignment solve_pso(const AssignmentProblem& problem, const PsoConfig& config,
                     ExecMode exec = ExecMode::Parallel);

// Longest-processing-time list scheduling: tasks in descending demand order,
// each placed on the feasible server that minimizes the resulting load.
Assignment solve_greedy(const AssignmentProblem& problem);

enum class SolverKind { BruteForce, Pso, Greedy };

const char* to_string(SolverKind k);

struct TimingStats {
  int repetitions = 0;
  double mean_ms = 0.0;
  double min_ms = 0.0;
  double max_ms = 0.0;
};

// Wall-clock statistics over repeated runs of one solver on one problem.
// Problem construction happens outside the timed region by design.
TimingStats measure_solver(const AssignmentProblem& problem, SolverKind kind, int repetitions,
                           const PsoConfig& pso_config = {}, ExecMode exec = ExecMode::Parallel,
                           const BruteForceOptions& bf_options = {});

}  // namespace offload
