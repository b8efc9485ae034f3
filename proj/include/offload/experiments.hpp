#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "offload/decision.hpp"
#include "offload/rng.hpp"
#include "offload/trace_io.hpp"

namespace offload {

// Exit codes shared by every command.
inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitRuntime = 2;

// Random min-max assignment instance: demands uniform in [1, 10] on unit
// capacity servers, every pair feasible. This is the workload the solver
// benchmarks and regression tests run on.
AssignmentProblem generate_random_problem(Rng& rng, std::size_t tasks, std::size_t servers);

struct RunOptions {
  std::string scenario_path;
  std::string out_dir;
  OutputFormat format = OutputFormat::Csv;
  std::optional<std::uint64_t> seed_override;
};

// Simulate a scenario and write trace, candidates, status timeline, and
// summary into the output directory.
int cmd_run(const RunOptions& options, std::ostream& out, std::ostream& err);

// Parse and validate a scenario file, reporting diagnostics.
int cmd_validate(const std::string& scenario_path, std::ostream& out, std::ostream& err);

struct BenchOptions {
  std::size_t tasks = 10;
  std::size_t servers = 10;
  std::size_t instances = 100;
  std::uint64_t seed = 0;
  bool run_pso = true;
  bool run_greedy = true;
  bool run_bf = true;
  double bf_cap = 1.0e8;
  int repetitions = 1;
  ExecMode exec = ExecMode::Parallel;
  std::string out_dir;  // empty: table on stdout only
  OutputFormat format = OutputFormat::Csv;
};

struct SolverBenchResult {
  SolverKind kind = SolverKind::Pso;
  std::vector<double> objectives;  // per instance
  std::vector<double> gaps;        // vs brute force, when available
  double mean_gap = 0.0;
  double max_gap = 0.0;
  double median_gap = 0.0;
  std::size_t optimum_hits = 0;
  TimingStats timing;  // aggregated over instances
};

struct BenchReport {
  std::vector<double> bf_objectives;
  std::vector<SolverBenchResult> solvers;
};

// Run the solver comparison; deterministic per (seed, sizes) because every
// instance owns an RNG substream and results aggregate in instance order.
BenchReport run_bench(const BenchOptions& options);

int cmd_bench(const BenchOptions& options, std::ostream& out, std::ostream& err);

struct FailureDrillOptions {
  std::string scenario_path;
  std::string out_dir;
  OutputFormat format = OutputFormat::Csv;
  std::optional<std::uint64_t> seed_override;
};

struct FailureReportRow {
  std::string server_id;
  TimeMs fail_at_ms = 0;
  TimeMs detected_at_ms = 0;        // registry transition to failed
  TimeMs detection_latency_ms = 0;  // detected_at - fail_at
  std::size_t stale_decisions = 0;  // decisions aimed at the server inside the blind window
  TimeMs stale_window_ms = 0;       // span covered by those decisions
  std::string first_target_after_detection;  // "local", server id, or "" when the trace ends first
};

std::vector<FailureReportRow> analyze_failures(const DecisionTrace& trace);

// Run a scenario with a failure schedule and report detection latency and
// redirection behavior per failure event.
int cmd_failure_drill(const FailureDrillOptions& options, std::ostream& out, std::ostream& err);

struct WeightPair {
  double w_direction = 0.0;
  double w_distance = 0.0;
};

struct PenaltyStudyOptions {
  std::string scenario_path;
  std::string out_dir;
  OutputFormat format = OutputFormat::Csv;
  std::vector<WeightPair> sweep;  // always augmented with direction-only and distance-only
};

// Re-run the scenario once per weight pair and emit (tick, position, chosen
// target) rows for plotting decision maps.
int cmd_penalty_study(const PenaltyStudyOptions& options, std::ostream& out, std::ostream& err);

}  // namespace offload
