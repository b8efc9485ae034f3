// Acceptance suite: one line per criterion, nonzero exit if any fails.
// Workload sizes, seeds, and tolerances are pinned here.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <sys/wait.h>
#include <unistd.h>
#include <filesystem>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "offload/decision.hpp"
#include "offload/detection.hpp"
#include "offload/experiments.hpp"
#include "offload/geometry.hpp"
#include "offload/rng.hpp"
#include "offload/scenario_io.hpp"
#include "offload/simulator.hpp"
#include "offload/trace_io.hpp"

namespace fs = std::filesystem;
using namespace offload;

namespace {

const std::string kScenarios = OFFLOAD_SCENARIO_DIR;
const std::string kCli = OFFLOAD_CLI_PATH;
constexpr std::uint64_t kSeed = 20250809;

int failures = 0;

void report(int index, const std::string& name, bool pass, const std::string& detail) {
  std::cout << "[" << index << "] " << (pass ? "PASS" : "FAIL") << "  " << name << ": " << detail
            << std::endl;
  if (!pass) ++failures;
}

void run_criterion(int index, const std::string& name,
                   const std::function<std::pair<bool, std::string>()>& body) {
  const auto start = std::chrono::steady_clock::now();
  bool pass = false;
  std::string detail;
  try {
    std::tie(pass, detail) = body();
  } catch (const std::exception& e) {
    detail = std::string("exception: ") + e.what();
  }
  const double sec =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  std::ostringstream out;
  out << detail << " (" << std::fixed << std::setprecision(1) << sec << " s)";
  report(index, name, pass, out.str());
}

LoadedScenario load(const std::string& name) { return load_scenario(kScenarios + "/" + name); }

// --- criterion 1: PSO accuracy vs brute force on 10x10 ---------------------

std::pair<bool, std::string> criterion_accuracy() {
  Rng root(kSeed);
  BruteForceOptions bf_options;
  bf_options.enumeration_cap = 1e10;  // 10^10 mappings, searched implicitly
  std::vector<double> gaps;
  for (int i = 0; i < 100; ++i) {
    Rng instance = root.substream(static_cast<std::uint64_t>(i));
    const AssignmentProblem problem = generate_random_problem(instance, 10, 10);
    PsoConfig config;  // paper settings: 10 particles, 80 iterations, 0.5/1.5/1.5
    config.rng_seed = instance.seed();
    const double bf = solve_brute_force(problem, bf_options).objective;
    const double pso = solve_pso(problem, config, ExecMode::Serial).objective;
    gaps.push_back((pso - bf) / bf);
  }
  std::sort(gaps.begin(), gaps.end());
  double mean = 0.0;
  for (const double g : gaps) mean += g;
  mean /= static_cast<double>(gaps.size());
  const double median = (gaps[49] + gaps[50]) / 2.0;

  std::ostringstream detail;
  detail << "mean gap " << mean * 100.0 << "% (limit 2%), median " << median * 100.0 << "%";
  return {mean <= 0.02 && median == 0.0, detail.str()};
}

// --- criterion 2: oracle dominance on small instances ----------------------

std::pair<bool, std::string> criterion_dominance() {
  Rng root(kSeed ^ 0xabcdef);
  std::size_t pso_hits = 0;
  std::size_t dominance_violations = 0;
  const int instances = 500;
  for (int i = 0; i < instances; ++i) {
    Rng instance = root.substream(static_cast<std::uint64_t>(i));
    const std::size_t servers = static_cast<std::size_t>(instance.uniform_int(1, 4));
    const std::size_t tasks = static_cast<std::size_t>(instance.uniform_int(1, 8));
    const AssignmentProblem problem = generate_random_problem(instance, tasks, servers);
    PsoConfig config;
    config.rng_seed = instance.seed();
    const double bf = solve_brute_force(problem).objective;
    const double pso = solve_pso(problem, config, ExecMode::Serial).objective;
    const double greedy = solve_greedy(problem).objective;
    if (pso < bf || greedy < bf) ++dominance_violations;
    if (pso == bf) ++pso_hits;
  }
  std::ostringstream detail;
  detail << "dominance violations " << dominance_violations << "/500, pso optimum hits "
         << pso_hits << "/500 (floor 450)";
  return {dominance_violations == 0 && pso_hits >= 450, detail.str()};
}

// --- criterion 3: near-linear PSO scaling in task count --------------------

std::pair<bool, std::string> criterion_scaling() {
  Rng root(kSeed ^ 0x5ca1e);
  Rng small_rng = root.substream(1);
  Rng large_rng = root.substream(2);
  const AssignmentProblem small = generate_random_problem(small_rng, 100, 15);
  const AssignmentProblem large = generate_random_problem(large_rng, 1000, 15);
  PsoConfig config;
  config.rng_seed = root.seed();
  const TimingStats t_small = measure_solver(small, SolverKind::Pso, 5, config, ExecMode::Serial);
  const TimingStats t_large = measure_solver(large, SolverKind::Pso, 5, config, ExecMode::Serial);
  const double ratio = t_large.mean_ms / t_small.mean_ms;
  std::ostringstream detail;
  detail << "100 tasks: " << t_small.mean_ms << " ms, 1000 tasks: " << t_large.mean_ms
         << " ms, ratio " << ratio << " (limit 15)";
  return {ratio <= 15.0, detail.str()};
}

// --- criterion 4: threshold and fallback structure --------------------------

std::pair<bool, std::string> criterion_threshold() {
  const LoadedScenario scenario = load("twin_line.scn");
  const DecisionTrace trace = run_scenario(scenario.config);
  const double threshold = scenario.config.services.at(0).max_rtt_ms;

  if (trace.records.size() != 10000) {
    return {false, "expected 10000 records, got " + std::to_string(trace.records.size())};
  }

  // Rebuild the decision from raw positions and sampled RTTs and compare.
  std::size_t violations = 0;
  std::size_t local_count = 0;
  std::size_t offloaded = 0;
  const PenaltyWeights& weights = scenario.config.weights;
  for (std::size_t tick = 0; tick < trace.records.size(); ++tick) {
    const DecisionRecord& record = trace.records[tick];
    const VehicleState& vehicle = record.request.vehicle;

    std::string expected;
    double expected_cost = 0.0;
    for (const ServerDescriptor& server : scenario.config.servers) {
      const CandidateRow* row = nullptr;
      for (std::size_t c = tick * scenario.config.servers.size();
           c < (tick + 1) * scenario.config.servers.size(); ++c) {
        if (trace.candidates[c].server_id == server.id) row = &trace.candidates[c];
      }
      if (!row || !row->predicted_rtt_ms) {
        continue;
      }
      if (distance(vehicle.position, server.position) > server.comm_range_m) continue;
      const double dir = direction_cost(vehicle, server, weights);
      const double dist = *distance_cost(vehicle, server, weights);
      const double total = *row->predicted_rtt_ms + dir + dist;
      if (total > threshold) continue;
      if (stay_time_ms(vehicle, server) < total) continue;
      if (expected.empty() || total < expected_cost ||
          (total == expected_cost && server.id < expected)) {
        expected = server.id;
        expected_cost = total;
      }
    }

    if (expected.empty()) {
      if (!record.target.is_local()) ++violations;
      ++local_count;
    } else {
      if (record.target.is_local() || record.target.server_id != expected ||
          record.total_cost_ms != expected_cost || record.total_cost_ms > threshold) {
        ++violations;
      }
      ++offloaded;
    }
  }
  std::ostringstream detail;
  detail << "violations " << violations << "/10000 (offloaded " << offloaded << ", local "
         << local_count << ")";
  return {violations == 0 && offloaded > 0 && local_count > 0, detail.str()};
}

// --- criterion 5: prediction-vs-measurement divergence ----------------------

std::pair<bool, std::string> criterion_divergence() {
  const LoadedScenario scenario = load("twin_line.scn");

  const auto incorrect_offloaded = [&](const ScenarioConfig& config) {
    const DecisionTrace trace = run_scenario(config);
    std::size_t offloaded = 0;
    std::size_t incorrect = 0;
    for (const DecisionRecord& record : trace.records) {
      if (record.target.is_local()) continue;
      ++offloaded;
      const DecisionRecord labelled = classify(record, scenario.outcome_policy);
      if (*labelled.outcome == Outcome::Incorrect) ++incorrect;
    }
    return std::make_pair(offloaded, incorrect);
  };

  const auto [noisy_offloaded, noisy_incorrect] = incorrect_offloaded(scenario.config);

  ScenarioConfig clean = scenario.config;
  clean.rtt_model.noise_per_service.at("object_recognition") = NoiseFactor(1.0, 1.0);
  const auto [clean_offloaded, clean_incorrect] = incorrect_offloaded(clean);

  std::ostringstream detail;
  detail << "noise<=3.0: " << noisy_incorrect << "/" << noisy_offloaded
         << " offloaded incorrect; noise=1.0: " << clean_incorrect << "/" << clean_offloaded;
  return {noisy_offloaded > 0 && noisy_incorrect > 0 && clean_offloaded > 0 &&
              clean_incorrect == 0,
          detail.str()};
}

// --- criterion 6: penalty argmax invariances --------------------------------

std::pair<bool, std::string> criterion_penalty_argmax() {
  const LoadedScenario scenario = load("ellipse_penalty.scn");

  std::size_t direction_mismatches = 0;
  std::size_t distance_mismatches = 0;
  std::size_t locals = 0;

  ScenarioConfig direction_only = scenario.config;
  direction_only.weights = PenaltyWeights(1.0, 0.0, scenario.config.weights.scale_ms);
  for (const DecisionRecord& record : run_scenario(direction_only).records) {
    if (record.target.is_local()) {
      ++locals;
      continue;
    }
    std::string expected;
    double best_cos = 0.0;
    for (const ServerDescriptor& server : scenario.config.servers) {
      if (distance(record.request.vehicle.position, server.position) > server.comm_range_m) continue;
      const double cos_sim = cosine_similarity(record.request.vehicle.direction,
                                               server.position - record.request.vehicle.position);
      if (expected.empty() || cos_sim > best_cos || (cos_sim == best_cos && server.id < expected)) {
        best_cos = cos_sim;
        expected = server.id;
      }
    }
    if (record.target.server_id != expected) ++direction_mismatches;
  }

  ScenarioConfig distance_only = scenario.config;
  distance_only.weights = PenaltyWeights(0.0, 1.0, scenario.config.weights.scale_ms);
  for (const DecisionRecord& record : run_scenario(distance_only).records) {
    if (record.target.is_local()) {
      ++locals;
      continue;
    }
    std::string expected;
    double best_distance = 0.0;
    for (const ServerDescriptor& server : scenario.config.servers) {
      const double d = distance(record.request.vehicle.position, server.position);
      if (d > server.comm_range_m) continue;
      if (expected.empty() || d < best_distance || (d == best_distance && server.id < expected)) {
        best_distance = d;
        expected = server.id;
      }
    }
    if (record.target.server_id != expected) ++distance_mismatches;
  }

  std::ostringstream detail;
  detail << "direction-only mismatches " << direction_mismatches << ", distance-only mismatches "
         << distance_mismatches << ", local fallbacks " << locals << " (all must be 0)";
  return {direction_mismatches == 0 && distance_mismatches == 0 && locals == 0, detail.str()};
}

// --- criterion 7: failure drill windows -------------------------------------

std::pair<bool, std::string> criterion_failure_drill() {
  std::ostringstream detail;
  bool pass = true;

  const auto check_drill = [&](const std::string& file, TimeMs expected_window,
                               TimeMs recovery_visible_at) {
    const LoadedScenario scenario = load(file);
    const DecisionTrace trace = run_scenario(scenario.config);
    const std::vector<FailureReportRow> rows = analyze_failures(trace);
    if (rows.size() != 1) {
      pass = false;
      detail << file << ": expected 1 failure row, got " << rows.size() << "; ";
      return;
    }
    const FailureReportRow& row = rows.front();
    const TimeMs tick = trace.decision_interval_ms;
    if (std::llabs(row.stale_window_ms - expected_window) > tick) pass = false;
    // Blind until detection, then never chosen before the restart is visible.
    for (const DecisionRecord& record : trace.records) {
      if (!record.target.is_local() && record.target.server_id == row.server_id &&
          record.request.issued_at_ms >= row.detected_at_ms &&
          record.request.issued_at_ms < recovery_visible_at) {
        pass = false;
        detail << file << ": stale target after detection at " << record.request.issued_at_ms
               << " ms; ";
      }
    }
    detail << file << ": window " << row.stale_window_ms << " ms (expected " << expected_window
           << " +/- " << tick << "), latency " << row.detection_latency_ms << " ms, "
           << row.stale_decisions << " stale, next target " << row.first_target_after_detection
           << "; ";
  };

  check_drill("failure_orchestrator.scn", 30000, 60000);  // recovery visible at trace end
  check_drill("failure_customapi.scn", 2000, 34000);
  return {pass, detail.str()};
}

// --- criterion 8: byte-identical reruns --------------------------------------

std::pair<bool, std::string> criterion_determinism() {
  const fs::path base =
      fs::temp_directory_path() / ("offload-acceptance-" + std::to_string(::getpid()));
  fs::remove_all(base);
  fs::create_directories(base);

  const auto shell = [](const std::string& command) {
    const int status = std::system((command + " > /dev/null 2>&1").c_str());
    return WEXITSTATUS(status);
  };
  const auto same_bytes = [](const fs::path& a, const fs::path& b) {
    return read_file(a.string()) == read_file(b.string());
  };

  struct Step {
    std::string name;
    std::string args;
    std::vector<std::string> compare;  // artifacts that must be byte-identical
  };
  const std::vector<Step> steps = {
      {"run", "run --scenario " + kScenarios + "/twin_line.scn",
       {"trace.csv", "candidates.csv", "status.csv", "summary.json"}},
      {"run-jsonl", "run --format json-lines --scenario " + kScenarios + "/twin_line.scn",
       {"trace.jsonl", "candidates.jsonl", "status.jsonl", "summary.json"}},
      {"bench", "bench --tasks 4 --servers 3 --instances 20 --seed 7", {"bench_gaps.csv"}},
      {"failure-drill", "failure-drill --scenario " + kScenarios + "/failure_customapi.scn",
       {"drill.csv", "trace.csv", "status.csv"}},
      {"penalty-study",
       "penalty-study --weights 0.5:0.5 --scenario " + kScenarios + "/ellipse_penalty.scn",
       {"penalty_study.csv"}},
  };

  bool pass = true;
  std::ostringstream detail;
  for (const Step& step : steps) {
    const fs::path out_a = base / (step.name + "-a");
    const fs::path out_b = base / (step.name + "-b");
    const std::string command = kCli + " " + step.args + " --out ";
    if (shell(command + out_a.string()) != 0 || shell(command + out_b.string()) != 0) {
      pass = false;
      detail << step.name << " exited nonzero; ";
      continue;
    }
    for (const std::string& artifact : step.compare) {
      if (!same_bytes(out_a / artifact, out_b / artifact)) {
        pass = false;
        detail << step.name << "/" << artifact << " differs; ";
      }
    }
  }
  if (pass) {
    detail << "all rerun artifacts byte-identical across " << steps.size() << " commands";
  }
  fs::remove_all(base);
  return {pass, detail.str()};
}

}  // namespace

int main() {
  std::cout.precision(10);
  run_criterion(1, "pso accuracy vs brute force (100x 10 tasks x 10 servers)", criterion_accuracy);
  run_criterion(2, "oracle dominance and optimum hits (500 small instances)", criterion_dominance);
  run_criterion(3, "pso scaling shape (1000 vs 100 tasks at 15 servers)", criterion_scaling);
  run_criterion(4, "threshold/fallback structure (10000-tick two-server trace)",
                criterion_threshold);
  run_criterion(5, "prediction-vs-measurement divergence", criterion_divergence);
  run_criterion(6, "penalty argmax invariances on the elliptical loop", criterion_penalty_argmax);
  run_criterion(7, "failure drill stale windows", criterion_failure_drill);
  run_criterion(8, "byte-identical reruns of every command", criterion_determinism);

  if (failures > 0) {
    std::cout << failures << " criterion(s) failed" << std::endl;
    return 1;
  }
  std::cout << "all acceptance criteria passed" << std::endl;
  return 0;
}
