#include "offload/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <iomanip>
#include <map>
#include <ostream>
#include <sstream>

#include <json.hpp>

#include "offload/detection.hpp"
#include "offload/scenario_io.hpp"
#include "offload/simulator.hpp"

namespace offload {

namespace fs = std::filesystem;
using ordered_json = nlohmann::ordered_json;

AssignmentProblem generate_random_problem(Rng& rng, std::size_t tasks, std::size_t servers) {
  std::vector<double> demands(tasks);
  for (double& d : demands) {
    d = rng.uniform(1.0, 10.0);
  }
  std::vector<ServerDescriptor> descs;
  descs.reserve(servers);
  for (std::size_t s = 0; s < servers; ++s) {
    descs.emplace_back("srv-" + std::to_string(s), Vec2{0.0, 0.0}, 1.0, 1.0);
  }
  return AssignmentProblem(std::move(demands), std::move(descs));
}

namespace {

const char* extension(OutputFormat format) {
  return format == OutputFormat::Csv ? ".csv" : ".jsonl";
}

void ensure_dir(const std::string& dir) {
  if (!dir.empty()) {
    fs::create_directories(dir);
  }
}

std::string join(const std::string& dir, const std::string& file) {
  return (fs::path(dir) / file).string();
}

LoadedScenario load_with_override(const std::string& path,
                                  const std::optional<std::uint64_t>& seed_override) {
  LoadedScenario scenario = load_scenario(path);
  if (seed_override) {
    scenario.config.rng_seed = *seed_override;
    scenario.config.pso.rng_seed = *seed_override;
  }
  return scenario;
}

}  // namespace

int cmd_validate(const std::string& scenario_path, std::ostream& out, std::ostream& err) {
  try {
    const LoadedScenario scenario = load_scenario(scenario_path);
    out << "OK: " << scenario_path << " (" << scenario.config.servers.size() << " servers, "
        << scenario.config.services.size() << " services, "
        << scenario.config.duration_ms / scenario.config.decision_interval_ms << " ticks)\n";
    return kExitOk;
  } catch (const ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  }
}

int cmd_run(const RunOptions& options, std::ostream& out, std::ostream& err) {
  LoadedScenario scenario;
  try {
    scenario = load_with_override(options.scenario_path, options.seed_override);
  } catch (const ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  }
  try {
    DecisionTrace trace = run_scenario(scenario.config);
    for (DecisionRecord& record : trace.records) {
      record = classify(record, scenario.outcome_policy);
    }
    const TraceReport report = trace_report(trace, scenario.outcome_policy);

    ensure_dir(options.out_dir);
    write_file(join(options.out_dir, std::string("trace") + extension(options.format)),
               format_trace(trace, options.format));
    write_file(join(options.out_dir, std::string("candidates") + extension(options.format)),
               format_candidates(trace, options.format));
    write_file(join(options.out_dir, std::string("status") + extension(options.format)),
               format_status_timeline(trace, options.format));
    write_file(join(options.out_dir, "summary.json"), format_summary(report));

    char rate[16];
    std::snprintf(rate, sizeof(rate), "%.4f", report.success_rate);
    out << "trace: " << trace.records.size() << " records, success rate " << rate << ", timeouts "
        << report.timeouts << "\n";
    return kExitOk;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitRuntime;
  }
}

BenchReport run_bench(const BenchOptions& options) {
  if (options.instances == 0 || options.tasks == 0 || options.servers == 0) {
    throw std::invalid_argument("bench: tasks, servers, and instances must be positive");
  }
  const Rng root(options.seed);
  BenchReport report;

  std::vector<SolverKind> kinds;
  if (options.run_bf) kinds.push_back(SolverKind::BruteForce);
  if (options.run_pso) kinds.push_back(SolverKind::Pso);
  if (options.run_greedy) kinds.push_back(SolverKind::Greedy);

  const auto count = static_cast<std::int64_t>(options.instances);
  std::vector<std::vector<double>> objectives(kinds.size(), std::vector<double>(options.instances));
  std::vector<std::vector<double>> times(kinds.size(), std::vector<double>(options.instances));

  BruteForceOptions bf_options;
  bf_options.enumeration_cap = options.bf_cap;

  // Instances are independent; each derives its own RNG substream, so the
  // parallel schedule cannot influence any result. Serial mode trades speed
  // for uncontended wall-clock numbers.
  const bool parallel_instances = options.exec == ExecMode::Parallel;
#pragma omp parallel for schedule(dynamic) if (parallel_instances)
  for (std::int64_t i = 0; i < count; ++i) {
    Rng instance_rng = root.substream(static_cast<std::uint64_t>(i));
    const AssignmentProblem problem =
        generate_random_problem(instance_rng, options.tasks, options.servers);
    PsoConfig pso;
    pso.rng_seed = instance_rng.seed();
    for (std::size_t k = 0; k < kinds.size(); ++k) {
      const TimingStats timing = measure_solver(problem, kinds[k], options.repetitions, pso,
                                                ExecMode::Serial, bf_options);
      times[k][static_cast<std::size_t>(i)] = timing.mean_ms;
      switch (kinds[k]) {
        case SolverKind::BruteForce:
          objectives[k][static_cast<std::size_t>(i)] = solve_brute_force(problem, bf_options).objective;
          break;
        case SolverKind::Pso:
          objectives[k][static_cast<std::size_t>(i)] =
              solve_pso(problem, pso, ExecMode::Serial).objective;
          break;
        case SolverKind::Greedy:
          objectives[k][static_cast<std::size_t>(i)] = solve_greedy(problem).objective;
          break;
      }
    }
  }

  const std::vector<double>* bf = nullptr;
  for (std::size_t k = 0; k < kinds.size(); ++k) {
    if (kinds[k] == SolverKind::BruteForce) {
      report.bf_objectives = objectives[k];
      bf = &report.bf_objectives;
    }
  }

  for (std::size_t k = 0; k < kinds.size(); ++k) {
    SolverBenchResult result;
    result.kind = kinds[k];
    result.objectives = objectives[k];
    if (bf) {
      result.gaps.resize(options.instances);
      for (std::size_t i = 0; i < options.instances; ++i) {
        result.gaps[i] = (result.objectives[i] - (*bf)[i]) / (*bf)[i];
        if (result.objectives[i] == (*bf)[i]) {
          ++result.optimum_hits;
        }
      }
      result.mean_gap = 0.0;
      result.max_gap = 0.0;
      for (const double g : result.gaps) {
        result.mean_gap += g;
        result.max_gap = std::max(result.max_gap, g);
      }
      result.mean_gap /= static_cast<double>(options.instances);
      std::vector<double> sorted = result.gaps;
      std::sort(sorted.begin(), sorted.end());
      const std::size_t mid = sorted.size() / 2;
      result.median_gap = sorted.size() % 2 == 1
                              ? sorted[mid]
                              : (sorted[mid - 1] + sorted[mid]) / 2.0;
    }
    result.timing.repetitions = static_cast<int>(options.instances);
    double total = 0.0;
    for (std::size_t i = 0; i < options.instances; ++i) {
      const double ms = times[k][i];
      total += ms;
      if (i == 0) {
        result.timing.min_ms = result.timing.max_ms = ms;
      } else {
        result.timing.min_ms = std::min(result.timing.min_ms, ms);
        result.timing.max_ms = std::max(result.timing.max_ms, ms);
      }
    }
    result.timing.mean_ms = total / static_cast<double>(options.instances);
    report.solvers.push_back(std::move(result));
  }
  return report;
}

int cmd_bench(const BenchOptions& options, std::ostream& out, std::ostream& err) {
  try {
    if (options.run_bf) {
      const double space = std::pow(static_cast<double>(options.servers),
                                    static_cast<double>(options.tasks));
      if (space > options.bf_cap) {
        err << "error: brute force needs servers^tasks <= " << fmt_double(options.bf_cap)
            << "; drop it from --solvers or raise --bf-cap\n";
        return kExitUsage;
      }
    }
    const BenchReport report = run_bench(options);

    const auto fixed3 = [](double v) {
      char buf[32];
      std::snprintf(buf, sizeof(buf), "%.3f", v);
      return std::string(buf);
    };
    out << "solver        mean_gap_pct  max_gap_pct  optimum_hits  mean_ms      min_ms       max_ms\n";
    for (const SolverBenchResult& r : report.solvers) {
      std::ostringstream row;
      row << std::left << std::setw(14) << to_string(r.kind);
      if (r.gaps.empty()) {
        row << std::setw(14) << "-" << std::setw(13) << "-" << std::setw(14) << "-";
      } else {
        row << std::setw(14) << fixed3(r.mean_gap * 100.0) << std::setw(13)
            << fixed3(r.max_gap * 100.0) << std::setw(14)
            << (std::to_string(r.optimum_hits) + "/" + std::to_string(r.objectives.size()));
      }
      row << std::setw(13) << fixed3(r.timing.mean_ms) << std::setw(13)
          << fixed3(r.timing.min_ms) << fixed3(r.timing.max_ms);
      out << row.str() << "\n";
    }

    if (!options.out_dir.empty()) {
      ensure_dir(options.out_dir);
      // Objectives and gaps are reproducible and live apart from wall-clock
      // stats, which vary run to run.
      std::ostringstream gaps;
      if (options.format == OutputFormat::Csv) {
        gaps << "instance,solver,objective,gap_vs_bf\n";
        for (const SolverBenchResult& r : report.solvers) {
          for (std::size_t i = 0; i < r.objectives.size(); ++i) {
            gaps << i << ',' << to_string(r.kind) << ',' << fmt_double(r.objectives[i]) << ','
                 << (r.gaps.empty() ? std::string{} : fmt_double(r.gaps[i])) << '\n';
          }
        }
      } else {
        for (const SolverBenchResult& r : report.solvers) {
          for (std::size_t i = 0; i < r.objectives.size(); ++i) {
            ordered_json j;
            j["instance"] = i;
            j["solver"] = to_string(r.kind);
            j["objective"] = r.objectives[i];
            j["gap_vs_bf"] = r.gaps.empty() ? ordered_json(nullptr) : ordered_json(r.gaps[i]);
            gaps << j.dump() << '\n';
          }
        }
      }
      write_file(join(options.out_dir, std::string("bench_gaps") + extension(options.format)),
                 gaps.str());

      std::ostringstream timings;
      if (options.format == OutputFormat::Csv) {
        timings << "solver,mean_ms,min_ms,max_ms\n";
        for (const SolverBenchResult& r : report.solvers) {
          timings << to_string(r.kind) << ',' << fmt_double(r.timing.mean_ms) << ','
                  << fmt_double(r.timing.min_ms) << ',' << fmt_double(r.timing.max_ms) << '\n';
        }
      } else {
        for (const SolverBenchResult& r : report.solvers) {
          ordered_json j;
          j["solver"] = to_string(r.kind);
          j["mean_ms"] = r.timing.mean_ms;
          j["min_ms"] = r.timing.min_ms;
          j["max_ms"] = r.timing.max_ms;
          timings << j.dump() << '\n';
        }
      }
      write_file(join(options.out_dir, std::string("bench_timings") + extension(options.format)),
                 timings.str());
    }
    return kExitOk;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitRuntime;
  }
}

std::vector<FailureReportRow> analyze_failures(const DecisionTrace& trace) {
  std::vector<FailureReportRow> rows;
  // Failure onsets: timeline entries where a server's actual status turns
  // Failed. The registry acknowledgement is the next entry for that server
  // showing Failed in the registry view, unless the server recovers first.
  std::map<std::string, ServerStatus> last_actual;
  for (std::size_t i = 0; i < trace.status_timeline.size(); ++i) {
    const StatusChange& change = trace.status_timeline[i];
    const auto previous = last_actual.find(change.server_id);
    const bool onset = change.actual == ServerStatus::Failed &&
                       (previous == last_actual.end() || previous->second != ServerStatus::Failed);
    last_actual[change.server_id] = change.actual;
    if (!onset) continue;

    FailureReportRow row;
    row.server_id = change.server_id;
    row.fail_at_ms = change.time_ms;
    row.detected_at_ms = -1;
    for (std::size_t j = i; j < trace.status_timeline.size(); ++j) {
      const StatusChange& later = trace.status_timeline[j];
      if (later.server_id != change.server_id) continue;
      if (later.registry == ServerStatus::Failed) {
        row.detected_at_ms = later.time_ms;
        break;
      }
      if (later.time_ms > change.time_ms && later.actual != ServerStatus::Failed) {
        break;  // recovered before the registry ever noticed
      }
    }
    if (row.detected_at_ms < 0) continue;  // undetected within the trace
    row.detection_latency_ms = row.detected_at_ms - row.fail_at_ms;

    TimeMs first_stale = -1;
    TimeMs last_stale = -1;
    for (const DecisionRecord& r : trace.records) {
      if (r.target.is_local() || r.target.server_id != change.server_id) continue;
      if (r.request.issued_at_ms >= row.fail_at_ms && r.request.issued_at_ms < row.detected_at_ms) {
        ++row.stale_decisions;
        if (first_stale < 0) first_stale = r.request.issued_at_ms;
        last_stale = r.request.issued_at_ms;
      }
    }
    row.stale_window_ms =
        row.stale_decisions == 0 ? 0 : last_stale - first_stale + trace.decision_interval_ms;

    for (const DecisionRecord& r : trace.records) {
      if (r.request.issued_at_ms >= row.detected_at_ms) {
        row.first_target_after_detection = r.target.is_local() ? "local" : r.target.server_id;
        break;
      }
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

int cmd_failure_drill(const FailureDrillOptions& options, std::ostream& out, std::ostream& err) {
  LoadedScenario scenario;
  try {
    scenario = load_with_override(options.scenario_path, options.seed_override);
    if (scenario.config.failures.events.empty()) {
      err << "error: " << options.scenario_path << ": failure drill needs a nonempty failure schedule\n";
      return kExitUsage;
    }
  } catch (const ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  }
  try {
    const DecisionTrace trace = run_scenario(scenario.config);
    const std::vector<FailureReportRow> rows = analyze_failures(trace);

    out << "server        fail_at_ms  detected_at_ms  latency_ms  stale_decisions  stale_window_ms  first_target_after\n";
    for (const FailureReportRow& r : rows) {
      out << std::left << std::setw(14) << r.server_id << std::setw(12) << r.fail_at_ms
          << std::setw(16) << r.detected_at_ms << std::setw(12) << r.detection_latency_ms
          << std::setw(17) << r.stale_decisions << std::setw(17) << r.stale_window_ms
          << (r.first_target_after_detection.empty() ? "-" : r.first_target_after_detection)
          << "\n";
    }

    if (!options.out_dir.empty()) {
      ensure_dir(options.out_dir);
      std::ostringstream drill;
      if (options.format == OutputFormat::Csv) {
        drill << "server_id,fail_at_ms,detected_at_ms,detection_latency_ms,stale_decisions,"
                 "stale_window_ms,first_target_after_detection\n";
        for (const FailureReportRow& r : rows) {
          drill << r.server_id << ',' << r.fail_at_ms << ',' << r.detected_at_ms << ','
                << r.detection_latency_ms << ',' << r.stale_decisions << ',' << r.stale_window_ms
                << ',' << r.first_target_after_detection << '\n';
        }
      } else {
        for (const FailureReportRow& r : rows) {
          ordered_json j;
          j["server_id"] = r.server_id;
          j["fail_at_ms"] = r.fail_at_ms;
          j["detected_at_ms"] = r.detected_at_ms;
          j["detection_latency_ms"] = r.detection_latency_ms;
          j["stale_decisions"] = r.stale_decisions;
          j["stale_window_ms"] = r.stale_window_ms;
          j["first_target_after_detection"] = r.first_target_after_detection;
          drill << j.dump() << '\n';
        }
      }
      write_file(join(options.out_dir, std::string("drill") + extension(options.format)),
                 drill.str());
      write_file(join(options.out_dir, std::string("trace") + extension(options.format)),
                 format_trace(trace, options.format));
      write_file(join(options.out_dir, std::string("status") + extension(options.format)),
                 format_status_timeline(trace, options.format));
    }
    return kExitOk;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitRuntime;
  }
}

int cmd_penalty_study(const PenaltyStudyOptions& options, std::ostream& out, std::ostream& err) {
  LoadedScenario scenario;
  try {
    scenario = load_scenario(options.scenario_path);
    if (scenario.config.servers.size() < 2) {
      err << "error: " << options.scenario_path << ": penalty study needs at least two servers\n";
      return kExitUsage;
    }
  } catch (const ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  }
  try {
    struct Column {
      std::string label;
      WeightPair pair;
    };
    std::vector<Column> columns;
    columns.push_back({"direction_only", {1.0, 0.0}});
    columns.push_back({"distance_only", {0.0, 1.0}});
    columns.push_back(
        {"scenario", {scenario.config.weights.w_direction, scenario.config.weights.w_distance}});
    for (const WeightPair& pair : options.sweep) {
      char label[48];
      std::snprintf(label, sizeof(label), "w%.4g_%.4g", pair.w_direction, pair.w_distance);
      columns.push_back({label, pair});
    }

    std::ostringstream rows;
    if (options.format == OutputFormat::Csv) {
      rows << "label,w_direction,w_distance,tick,time_ms,x_m,y_m,dir_x,dir_y,chosen_target\n";
    }
    for (const Column& column : columns) {
      ScenarioConfig config = scenario.config;
      config.weights = PenaltyWeights(column.pair.w_direction, column.pair.w_distance,
                                      scenario.config.weights.scale_ms);
      const DecisionTrace trace = run_scenario(config);
      for (const DecisionRecord& r : trace.records) {
        const TimeMs t = r.request.issued_at_ms;
        const std::string target = r.target.is_local() ? "local" : r.target.server_id;
        if (options.format == OutputFormat::Csv) {
          rows << column.label << ',' << fmt_double(column.pair.w_direction) << ','
               << fmt_double(column.pair.w_distance) << ',' << t / trace.decision_interval_ms << ','
               << t << ',' << fmt_double(r.request.vehicle.position.x) << ','
               << fmt_double(r.request.vehicle.position.y) << ','
               << fmt_double(r.request.vehicle.direction.x) << ','
               << fmt_double(r.request.vehicle.direction.y) << ',' << target << '\n';
        } else {
          ordered_json j;
          j["label"] = column.label;
          j["w_direction"] = column.pair.w_direction;
          j["w_distance"] = column.pair.w_distance;
          j["tick"] = t / trace.decision_interval_ms;
          j["time_ms"] = t;
          j["x_m"] = r.request.vehicle.position.x;
          j["y_m"] = r.request.vehicle.position.y;
          j["dir_x"] = r.request.vehicle.direction.x;
          j["dir_y"] = r.request.vehicle.direction.y;
          j["chosen_target"] = target;
          rows << j.dump() << '\n';
        }
      }
      char line[96];
      std::snprintf(line, sizeof(line), "%s: w_direction=%.4g w_distance=%.4g",
                    column.label.c_str(), column.pair.w_direction, column.pair.w_distance);
      out << line << "\n";
    }

    ensure_dir(options.out_dir);
    write_file(join(options.out_dir, std::string("penalty_study") + extension(options.format)),
               rows.str());
    return kExitOk;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitRuntime;
  }
}

}  // namespace offload
