#include <doctest.h>

#include <cmath>
#include <stdexcept>

#include "offload/decision.hpp"
#include "offload/rng.hpp"

using namespace offload;

namespace {

// Zero-penalty weights make total cost equal the raw RTT estimate, which is
// what the threshold examples are phrased in.
const PenaltyWeights kNoPenalty(0.0, 0.0, 0.0);

OffloadRequest request_with_threshold(double max_rtt_ms) {
  const VehicleState vehicle("v", {0, 0}, {1, 0}, 10.0);
  const ServiceSpec service("obj", Criticality::High, max_rtt_ms, 140000, 1.0, 560.0);
  return OffloadRequest(vehicle, service, 0);
}

ServerDescriptor near_server(const std::string& id, double range = 10000.0) {
  return ServerDescriptor(id, {100, 0}, range, 1.0);
}

}  // namespace

TEST_CASE("feasible servers: single candidate under threshold") {
  const auto request = request_with_threshold(590.0);
  const std::vector<ServerDescriptor> servers{near_server("s1")};
  const auto result = feasible_servers(request, servers, {{"s1", 550.0}}, kNoPenalty);
  REQUIRE(result.size() == 1);
  CHECK(result[0].server_id == "s1");
  CHECK(result[0].total_cost_ms == 550.0);
}

TEST_CASE("feasible servers: out of range excluded") {
  const auto request = request_with_threshold(590.0);
  const std::vector<ServerDescriptor> servers{
      ServerDescriptor("s1", {500, 0}, 100.0, 1.0),
      ServerDescriptor("s2", {-900, 0}, 200.0, 1.0),
  };
  CHECK(feasible_servers(request, servers, {{"s1", 500.0}, {"s2", 500.0}}, kNoPenalty).empty());
}

TEST_CASE("feasible servers: over threshold excluded") {
  const auto request = request_with_threshold(590.0);
  const std::vector<ServerDescriptor> servers{near_server("s1")};
  CHECK(feasible_servers(request, servers, {{"s1", 610.0}}, kNoPenalty).empty());
}

TEST_CASE("feasible servers: failed server skipped, sorted by cost then id") {
  const auto request = request_with_threshold(590.0);
  std::vector<ServerDescriptor> servers{near_server("s1"), near_server("s2"), near_server("s3")};
  servers[2].status = ServerStatus::Failed;
  const auto result = feasible_servers(
      request, servers, {{"s1", 550.0}, {"s2", 540.0}, {"s3", 100.0}}, kNoPenalty);
  REQUIRE(result.size() == 2);
  CHECK(result[0].server_id == "s2");
  CHECK(result[1].server_id == "s1");
}

TEST_CASE("feasible servers: missing estimate for an available server is an error") {
  const auto request = request_with_threshold(590.0);
  const std::vector<ServerDescriptor> servers{near_server("s1")};
  CHECK_THROWS_AS(feasible_servers(request, servers, {}, kNoPenalty), std::invalid_argument);
}

TEST_CASE("feasible servers: stay time must cover the predicted cost") {
  // Moving straight away from a small circle: exit in ~50 ms, cost 550 ms.
  const VehicleState vehicle("v", {0, 0}, {1, 0}, 10.0);
  const ServiceSpec service("obj", Criticality::High, 590.0, 140000, 1.0, 560.0);
  const OffloadRequest request(vehicle, service, 0);
  const std::vector<ServerDescriptor> servers{ServerDescriptor("s1", {-0.2, 0}, 0.5, 1.0)};
  CHECK(feasible_servers(request, servers, {{"s1", 550.0}}, kNoPenalty).empty());
}

TEST_CASE("feasible servers: utilization cap cuts candidates") {
  const auto request = request_with_threshold(590.0);
  std::vector<ServerDescriptor> servers{near_server("s1")};
  servers[0].utilization = 0.95;
  CHECK(feasible_servers(request, servers, {{"s1", 500.0}}, kNoPenalty, 0.9).empty());
  CHECK(feasible_servers(request, servers, {{"s1", 500.0}}, kNoPenalty, 1.0).size() == 1);
}

TEST_CASE("decide_single picks the cheapest feasible server") {
  const auto request = request_with_threshold(590.0);
  const std::vector<ServerDescriptor> servers{near_server("s1"), near_server("s2")};
  const DecisionRecord record =
      decide_single(request, servers, {{"s1", 550.0}, {"s2", 575.0}}, kNoPenalty);
  CHECK(record.target == Target::server("s1"));
  CHECK(record.total_cost_ms == 550.0);
  CHECK(record.predicted_rtt_ms == 550.0);
}

TEST_CASE("decide_single falls back to local when all violate the threshold") {
  const auto request = request_with_threshold(590.0);
  const std::vector<ServerDescriptor> servers{near_server("s1"), near_server("s2")};
  const DecisionRecord record =
      decide_single(request, servers, {{"s1", 600.0}, {"s2", 640.0}}, kNoPenalty);
  CHECK(record.target.is_local());
  CHECK(record.total_cost_ms == 560.0);
}

TEST_CASE("decide_single breaks cost ties by ascending server id") {
  const auto request = request_with_threshold(590.0);
  const std::vector<ServerDescriptor> servers{near_server("s2"), near_server("s1")};
  const DecisionRecord record =
      decide_single(request, servers, {{"s1", 550.0}, {"s2", 550.0}}, kNoPenalty);
  CHECK(record.target == Target::server("s1"));
}

TEST_CASE("decide_single returns local exactly when no server is feasible") {
  Rng rng(77);
  const PenaltyWeights weights(0.625, 0.375, 100.0);
  for (int trial = 0; trial < 300; ++trial) {
    const double heading = rng.uniform(0.0, 6.28318);
    const VehicleState vehicle("v", {rng.uniform(-500, 500), rng.uniform(-500, 500)},
                               {std::cos(heading), std::sin(heading)}, rng.uniform(1.0, 30.0));
    const ServiceSpec service("obj", Criticality::High, rng.uniform(450.0, 700.0), 0, 1.0, 560.0);
    const OffloadRequest request(vehicle, service, 0);
    std::vector<ServerDescriptor> servers;
    RttEstimate estimates;
    for (int s = 0; s < 4; ++s) {
      const std::string id = "s" + std::to_string(s);
      servers.emplace_back(id, Vec2{rng.uniform(-600, 600), rng.uniform(-600, 600)},
                           rng.uniform(50.0, 500.0), 1.0);
      estimates[id] = rng.uniform(400.0, 750.0);
    }
    const auto feasible = feasible_servers(request, servers, estimates, weights);
    const DecisionRecord record = decide_single(request, servers, estimates, weights);
    CHECK(record.target.is_local() == feasible.empty());
    if (!feasible.empty()) {
      CHECK(record.target.server_id == feasible.front().server_id);
      CHECK(record.total_cost_ms == feasible.front().total_cost_ms);
      CHECK(record.total_cost_ms <= service.max_rtt_ms);
    }
  }
}

TEST_CASE("objective: split beats stacking on the worked example") {
  const std::vector<ServerDescriptor> servers{ServerDescriptor("a", {0, 0}, 1.0, 1.0),
                                              ServerDescriptor("b", {0, 0}, 1.0, 1.0)};
  const AssignmentProblem problem({3.0, 5.0}, servers);

  CHECK(objective(problem, {0, 1}) == 5.0);
  CHECK(objective(problem, {1, 0}) == 5.0);
  CHECK(objective(problem, {0, 0}) == 8.0);
  CHECK(objective(problem, {1, 1}) == 8.0);
}

TEST_CASE("objective: graded penalty for infeasible mappings") {
  const std::vector<ServerDescriptor> servers{ServerDescriptor("a", {0, 0}, 1.0, 1.0),
                                              ServerDescriptor("b", {0, 0}, 1.0, 1.0)};
  const AssignmentProblem problem({3.0, 5.0}, servers, {1, 0, 1, 1});
  CHECK(objective(problem, {1, 1}) == kDefaultInfeasiblePenalty + 1.0);
  CHECK(objective(problem, {0, 0}) == 8.0);
  CHECK(objective(problem, {0, 1}, 42.0) == 5.0);  // feasible: penalty plays no part
  CHECK_THROWS_AS(objective(problem, {0}), std::invalid_argument);
  CHECK_THROWS_AS(objective(problem, {0, 5}), std::invalid_argument);
}

TEST_CASE("capacity scales the load") {
  const std::vector<ServerDescriptor> servers{ServerDescriptor("a", {0, 0}, 1.0, 2.0),
                                              ServerDescriptor("b", {0, 0}, 1.0, 1.0)};
  const AssignmentProblem problem({3.0, 5.0}, servers);
  CHECK(objective(problem, {0, 0}) == 4.0);   // 8 demand on capacity 2
  CHECK(objective(problem, {0, 1}) == 5.0);   // max(1.5, 5)
  CHECK(objective(problem, {1, 0}) == 3.0);   // max(3, 2.5)
}
