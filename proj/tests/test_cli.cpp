#include <doctest.h>

#include <cstdlib>
#include <sys/wait.h>
#include <filesystem>
#include <fstream>
#include <string>

#include "offload/trace_io.hpp"

namespace fs = std::filesystem;

namespace {

const std::string kCli = OFFLOAD_CLI_PATH;
const std::string kScenarios = OFFLOAD_SCENARIO_DIR;

int run_cli(const std::string& args) {
  const std::string command = kCli + " " + args + " > /dev/null 2>&1";
  const int status = std::system(command.c_str());
  return WEXITSTATUS(status);
}

struct TempDir {
  fs::path path;
  TempDir() : path(fs::temp_directory_path() / ("offload-cli-" + std::to_string(std::rand()))) {
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
};

}  // namespace

TEST_CASE("cli: validate accepts the bundled scenarios") {
  for (const char* name : {"minimal.scn", "twin_line.scn", "ellipse_penalty.scn",
                           "failure_orchestrator.scn", "failure_customapi.scn"}) {
    CHECK(run_cli("validate --scenario " + kScenarios + "/" + std::string(name)) == 0);
  }
}

TEST_CASE("cli: validate rejects a malformed file with exit code 1") {
  TempDir tmp;
  const fs::path bad = tmp.path / "bad.scn";
  std::ofstream(bad) << "[scenario]\ndecision_interval_ms = verymuch\nduration_ms = 10\n";
  CHECK(run_cli("validate --scenario " + bad.string()) == 1);
  CHECK(run_cli("validate --scenario " + (tmp.path / "missing.scn").string()) == 1);
}

TEST_CASE("cli: run writes trace artifacts; rows match duration/interval") {
  TempDir tmp;
  const std::string out = (tmp.path / "out").string();
  REQUIRE(run_cli("run --scenario " + kScenarios + "/minimal.scn --out " + out) == 0);
  CHECK(fs::exists(out + "/trace.csv"));
  CHECK(fs::exists(out + "/candidates.csv"));
  CHECK(fs::exists(out + "/status.csv"));
  CHECK(fs::exists(out + "/summary.json"));

  const std::string trace = offload::read_file(out + "/trace.csv");
  std::size_t rows = 0;
  for (const char c : trace) rows += c == '\n' ? 1 : 0;
  CHECK(rows == 1 + 5);  // header + duration/interval records
}

TEST_CASE("cli: unknown flags and missing subcommand fail with exit code 1") {
  CHECK(run_cli("") == 1);
  CHECK(run_cli("run") == 1);                       // missing --scenario
  CHECK(run_cli("frobnicate --scenario x") == 1);   // unknown subcommand
}

TEST_CASE("cli: failure-drill requires a failure schedule") {
  TempDir tmp;
  CHECK(run_cli("failure-drill --scenario " + kScenarios + "/twin_line.scn --out " +
                (tmp.path / "out").string()) == 1);
  CHECK(run_cli("failure-drill --scenario " + kScenarios + "/failure_customapi.scn --out " +
                (tmp.path / "out2").string()) == 0);
}

TEST_CASE("cli: penalty-study requires at least two servers") {
  TempDir tmp;
  CHECK(run_cli("penalty-study --scenario " + kScenarios + "/minimal.scn --out " +
                (tmp.path / "out").string()) == 1);
}

TEST_CASE("cli: json-lines format emits parsable records") {
  TempDir tmp;
  const std::string out = (tmp.path / "out").string();
  REQUIRE(run_cli("run --scenario " + kScenarios + "/minimal.scn --out " + out +
                  " --format json-lines") == 0);
  const auto records = offload::parse_trace_jsonl(offload::read_file(out + "/trace.jsonl"));
  CHECK(records.size() == 5);
}
