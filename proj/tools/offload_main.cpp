#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "offload/experiments.hpp"

namespace {

offload::OutputFormat parse_format(const std::string& value) {
  return offload::output_format_from_string(value);
}

std::vector<offload::WeightPair> parse_weight_list(const std::string& spec) {
  // "0.6:0.4,0.2:0.8" -> pairs
  std::vector<offload::WeightPair> pairs;
  std::istringstream in(spec);
  std::string token;
  while (std::getline(in, token, ',')) {
    const auto colon = token.find(':');
    if (colon == std::string::npos) {
      throw CLI::ValidationError("--weights", "expected W_DIR:W_DIST pairs separated by commas");
    }
    offload::WeightPair pair;
    try {
      pair.w_direction = std::stod(token.substr(0, colon));
      pair.w_distance = std::stod(token.substr(colon + 1));
    } catch (const std::exception&) {
      throw CLI::ValidationError("--weights", "expected numbers in W_DIR:W_DIST, got '" + token + "'");
    }
    pairs.push_back(pair);
  }
  return pairs;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Mobility-aware computation offloading simulator and solver bench"};
  app.require_subcommand(1);

  std::string scenario_path;
  std::string out_dir = "out";
  std::string format_str = "csv";
  std::uint64_t seed = 0;
  bool seed_set = false;

  auto* run = app.add_subcommand("run", "Simulate a scenario and write the decision trace");
  run->add_option("--scenario", scenario_path, "Scenario file path")->required();
  run->add_option("--out", out_dir, "Output directory");
  run->add_option("--format", format_str, "Output format: csv | json-lines");
  run->add_option("--seed", seed, "Override the scenario RNG seed")->each([&](const std::string&) {
    seed_set = true;
  });

  auto* validate = app.add_subcommand("validate", "Parse and validate a scenario file");
  validate->add_option("--scenario", scenario_path, "Scenario file path")->required();

  offload::BenchOptions bench_options;
  std::string solvers = "bf,pso,greedy";
  bool bench_serial = false;
  auto* bench = app.add_subcommand("bench", "Compare solvers on random assignment instances");
  bench->add_option("--tasks", bench_options.tasks, "Tasks per instance");
  bench->add_option("--servers", bench_options.servers, "Servers per instance");
  bench->add_option("--instances", bench_options.instances, "Number of random instances");
  bench->add_option("--seed", bench_options.seed, "Instance generator seed");
  bench->add_option("--solvers", solvers, "Comma-separated subset of bf,pso,greedy");
  bench->add_option("--bf-cap", bench_options.bf_cap, "Enumeration cap for brute force");
  bench->add_option("--repetitions", bench_options.repetitions, "Timing repetitions per instance");
  bench->add_flag("--serial", bench_serial, "Disable OpenMP in solver kernels");
  bench->add_option("--out", bench_options.out_dir, "Directory for gap/timing artifacts");
  bench->add_option("--format", format_str, "Output format: csv | json-lines");

  auto* drill = app.add_subcommand("failure-drill", "Report failure detection and redirection");
  drill->add_option("--scenario", scenario_path, "Scenario file path")->required();
  drill->add_option("--out", out_dir, "Output directory");
  drill->add_option("--format", format_str, "Output format: csv | json-lines");
  drill->add_option("--seed", seed, "Override the scenario RNG seed")->each([&](const std::string&) {
    seed_set = true;
  });

  std::string weight_spec;
  auto* study = app.add_subcommand("penalty-study", "Decision maps under swept penalty weights");
  study->add_option("--scenario", scenario_path, "Scenario file path")->required();
  study->add_option("--out", out_dir, "Output directory");
  study->add_option("--format", format_str, "Output format: csv | json-lines");
  study->add_option("--weights", weight_spec, "Extra W_DIR:W_DIST pairs, comma separated");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : offload::kExitUsage;
  }

  try {
    if (run->parsed()) {
      offload::RunOptions options;
      options.scenario_path = scenario_path;
      options.out_dir = out_dir;
      options.format = parse_format(format_str);
      if (seed_set) options.seed_override = seed;
      return offload::cmd_run(options, std::cout, std::cerr);
    }
    if (validate->parsed()) {
      return offload::cmd_validate(scenario_path, std::cout, std::cerr);
    }
    if (bench->parsed()) {
      bench_options.format = parse_format(format_str);
      bench_options.exec = bench_serial ? offload::ExecMode::Serial : offload::ExecMode::Parallel;
      bench_options.run_bf = solvers.find("bf") != std::string::npos;
      bench_options.run_pso = solvers.find("pso") != std::string::npos;
      bench_options.run_greedy = solvers.find("greedy") != std::string::npos;
      if (!bench_options.run_bf && !bench_options.run_pso && !bench_options.run_greedy) {
        std::cerr << "error: --solvers selects none of bf, pso, greedy\n";
        return offload::kExitUsage;
      }
      return offload::cmd_bench(bench_options, std::cout, std::cerr);
    }
    if (drill->parsed()) {
      offload::FailureDrillOptions options;
      options.scenario_path = scenario_path;
      options.out_dir = out_dir;
      options.format = parse_format(format_str);
      if (seed_set) options.seed_override = seed;
      return offload::cmd_failure_drill(options, std::cout, std::cerr);
    }
    if (study->parsed()) {
      offload::PenaltyStudyOptions options;
      options.scenario_path = scenario_path;
      options.out_dir = out_dir;
      options.format = parse_format(format_str);
      if (!weight_spec.empty()) {
        options.sweep = parse_weight_list(weight_spec);
      }
      return offload::cmd_penalty_study(options, std::cout, std::cerr);
    }
  } catch (const CLI::ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return offload::kExitUsage;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return offload::kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return offload::kExitRuntime;
  }
  return offload::kExitUsage;
}
