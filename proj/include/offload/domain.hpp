#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "offload/vec2.hpp"

namespace offload {

// Simulation time and latencies are milliseconds: integer for timestamps,
// double for costs and round-trip times.
using TimeMs = std::int64_t;

// Measured RTT assigned to requests whose target server died before the
// response came back. Finite so it serializes everywhere; far beyond any
// realistic latency so it always classifies as incorrect.
inline constexpr double kRttTimeoutMs = 1.0e9;

enum class ServerStatus { Available, Failed, Recovering };

enum class Criticality { Low, Medium, High };

const char* to_string(ServerStatus s);
const char* to_string(Criticality c);
ServerStatus server_status_from_string(const std::string& s);
Criticality criticality_from_string(const std::string& s);

// The mobile client requesting offloading.
struct VehicleState {
  std::string id;
  Vec2 position;    // meters
  Vec2 direction;   // unit vector; unconstrained while stationary
  double speed_mps = 0.0;

  VehicleState() = default;
  VehicleState(std::string id, Vec2 position, Vec2 direction, double speed_mps);

  friend bool operator==(const VehicleState&, const VehicleState&) = default;
};

// One backend target. `host`/`port` are carried opaquely for the vehicle to
// contact after a decision; they play no role in the decision itself.
struct ServerDescriptor {
  std::string id;
  Vec2 position;            // meters
  double comm_range_m = 0.0;
  double capacity = 0.0;    // abstract compute units per second
  ServerStatus status = ServerStatus::Available;
  std::string host;
  int port = 0;
  double utilization = 0.0; // fraction of capacity already committed

  ServerDescriptor() = default;
  ServerDescriptor(std::string id, Vec2 position, double comm_range_m, double capacity,
                   ServerStatus status = ServerStatus::Available, std::string host = "",
                   int port = 0, double utilization = 0.0);

  friend bool operator==(const ServerDescriptor&, const ServerDescriptor&) = default;
};

// A vehicle function that may be offloaded.
struct ServiceSpec {
  std::string name;
  Criticality criticality = Criticality::Low;
  double max_rtt_ms = 0.0;
  std::uint64_t payload_bytes = 0;
  double compute_demand = 0.0;  // abstract compute units
  double local_rtt_ms = 0.0;    // cost of running on the vehicle instead

  ServiceSpec() = default;
  ServiceSpec(std::string name, Criticality criticality, double max_rtt_ms,
              std::uint64_t payload_bytes, double compute_demand, double local_rtt_ms);

  friend bool operator==(const ServiceSpec&, const ServiceSpec&) = default;
};

struct OffloadRequest {
  VehicleState vehicle;
  ServiceSpec service;
  TimeMs issued_at_ms = 0;

  OffloadRequest() = default;
  OffloadRequest(VehicleState vehicle, ServiceSpec service, TimeMs issued_at_ms);

  friend bool operator==(const OffloadRequest&, const OffloadRequest&) = default;
};

// Where a request was sent: a named server, or local execution.
struct Target {
  static Target local() { return Target{}; }
  static Target server(std::string id);

  bool is_local() const { return server_id.empty(); }
  std::string server_id;  // empty means local

  friend bool operator==(const Target&, const Target&) = default;
};

enum class Outcome { Successful, Incorrect };

const char* to_string(Outcome o);
Outcome outcome_from_string(const std::string& s);

// One offloading decision, optionally enriched after execution (measured RTT)
// and classification (outcome + penalty score).
struct DecisionRecord {
  OffloadRequest request;
  Target target;
  double predicted_rtt_ms = 0.0;
  double direction_cost_ms = 0.0;
  double distance_cost_ms = 0.0;
  double total_cost_ms = 0.0;  // predicted_rtt + penalties for servers, local_rtt for local
  std::optional<double> measured_rtt_ms;
  std::optional<Outcome> outcome;
  double penalty_score = 0.0;  // set by classification when the outcome is Incorrect

  DecisionRecord() = default;

  // Server decision: total cost is the sum of the three components.
  static DecisionRecord for_server(OffloadRequest request, std::string server_id,
                                   double predicted_rtt_ms, double direction_cost_ms,
                                   double distance_cost_ms);

  // Local fallback: total cost is the service's local RTT, no penalties.
  static DecisionRecord for_local(OffloadRequest request);

  DecisionRecord with_measurement(double measured_ms) const;

  friend bool operator==(const DecisionRecord&, const DecisionRecord&) = default;
};

// Batch of task demands against candidate servers. Feasibility is decided
// upstream (range, stay time, thresholds); solvers only read the matrix.
class AssignmentProblem {
 public:
  AssignmentProblem(std::vector<double> demands, std::vector<ServerDescriptor> servers,
                    std::vector<std::uint8_t> feasible);

  // All pairs feasible.
  AssignmentProblem(std::vector<double> demands, std::vector<ServerDescriptor> servers);

  std::size_t task_count() const { return demands_.size(); }
  std::size_t server_count() const { return servers_.size(); }
  const std::vector<double>& demands() const { return demands_; }
  const std::vector<ServerDescriptor>& servers() const { return servers_; }
  bool feasible(std::size_t task, std::size_t server) const {
    return feasible_[task * servers_.size() + server] != 0;
  }

  friend bool operator==(const AssignmentProblem&, const AssignmentProblem&) = default;

 private:
  std::vector<double> demands_;
  std::vector<ServerDescriptor> servers_;
  std::vector<std::uint8_t> feasible_;  // row-major tasks x servers
};

// A task -> server mapping scored by the max server load it induces.
struct Assignment {
  std::vector<int> mapping;
  double objective = 0.0;

  friend bool operator==(const Assignment&, const Assignment&) = default;
};

}  // namespace offload
