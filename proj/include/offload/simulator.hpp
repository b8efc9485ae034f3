#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "offload/decision.hpp"
#include "offload/domain.hpp"
#include "offload/geometry.hpp"
#include "offload/rng.hpp"
#include "offload/vec2.hpp"

namespace offload {

struct LineTrajectory {
  Vec2 start;
  Vec2 direction;  // normalized on construction
  double speed_mps = 0.0;

  LineTrajectory() = default;
  LineTrajectory(Vec2 start, Vec2 direction, double speed_mps);

  friend bool operator==(const LineTrajectory&, const LineTrajectory&) = default;
};

// Constant angular speed, counterclockwise. Tangential speed varies along the
// arc; the vehicle state exposes the analytic tangent.
struct EllipseTrajectory {
  Vec2 center;
  double semi_major_m = 0.0;
  double semi_minor_m = 0.0;
  double angular_speed_rad_s = 0.0;
  double phase_rad = 0.0;

  EllipseTrajectory() = default;
  EllipseTrajectory(Vec2 center, double semi_major_m, double semi_minor_m,
                    double angular_speed_rad_s, double phase_rad);

  friend bool operator==(const EllipseTrajectory&, const EllipseTrajectory&) = default;
};

using Trajectory = std::variant<LineTrajectory, EllipseTrajectory>;

// Vehicle kinematics at time t: trajectory position plus the analytic tangent
// as direction and speed.
VehicleState vehicle_at(const Trajectory& trajectory, TimeMs t, const std::string& vehicle_id);

enum class DistributionKind { Uniform, TruncNormal };

struct RttDistribution {
  DistributionKind kind = DistributionKind::Uniform;
  double lo_ms = 0.0;
  double hi_ms = 0.0;
  double mean_ms = 0.0;    // TruncNormal only
  double stddev_ms = 0.0;  // TruncNormal only; 0 collapses to the mean

  static RttDistribution uniform(double lo_ms, double hi_ms);
  static RttDistribution trunc_normal(double mean_ms, double stddev_ms, double lo_ms, double hi_ms);

  double sample(Rng& rng) const;

  friend bool operator==(const RttDistribution&, const RttDistribution&) = default;
};

// Multiplicative factor applied to a predicted RTT when the request actually
// executes; lo == hi pins the factor.
struct NoiseFactor {
  double lo = 1.0;
  double hi = 1.0;

  NoiseFactor() = default;
  NoiseFactor(double lo, double hi);

  double sample(Rng& rng) const;

  friend bool operator==(const NoiseFactor&, const NoiseFactor&) = default;
};

// Per-service latency model: predicted RTTs are drawn from the bounded
// distribution, and measurements deviate from predictions by the noise factor.
struct RttModel {
  std::map<std::string, RttDistribution> per_service;
  std::map<std::string, NoiseFactor> noise_per_service;

  friend bool operator==(const RttModel&, const RttModel&) = default;
};

// Sample a predicted RTT for (service, server). The draw is per server so that
// concurrent candidates see independent predictions.
double sample_predicted_rtt(const RttModel& model, const ServiceSpec& service,
                            const ServerDescriptor& server, Rng& rng);

enum class FailureEventKind { Fail, Recover };

struct FailureEvent {
  TimeMs at_ms = 0;
  std::string server_id;
  FailureEventKind kind = FailureEventKind::Fail;

  friend bool operator==(const FailureEvent&, const FailureEvent&) = default;
};

enum class DetectionProfileKind { Orchestrator, CustomApi };

// How long the decision layer's registry lags behind reality. The
// orchestrator profile mirrors control-plane update intervals (slow failure
// marking, fixed restart time); the custom API profile models a dedicated
// failure-notification endpoint.
struct DetectionProfile {
  DetectionProfileKind kind = DetectionProfileKind::Orchestrator;
  TimeMs detect_delay_ms = 30000;
  TimeMs recover_delay_ms = 15000;

  static DetectionProfile orchestrator(TimeMs mark_unavailable_delay_ms = 30000,
                                       TimeMs restart_delay_ms = 15000);
  static DetectionProfile custom_api(TimeMs detect_delay_ms, TimeMs recover_delay_ms);

  friend bool operator==(const DetectionProfile&, const DetectionProfile&) = default;
};

struct FailureSchedule {
  std::vector<FailureEvent> events;  // must be time-ordered
  DetectionProfile detection;

  FailureSchedule() = default;
  FailureSchedule(std::vector<FailureEvent> events, DetectionProfile detection);

  friend bool operator==(const FailureSchedule&, const FailureSchedule&) = default;
};

struct ScenarioConfig {
  std::string name;
  std::string vehicle_id = "vehicle";
  std::vector<ServerDescriptor> servers;
  std::vector<ServiceSpec> services;
  Trajectory trajectory;
  RttModel rtt_model;
  PenaltyWeights weights;
  TimeMs decision_interval_ms = 5;
  TimeMs duration_ms = 5;
  PsoConfig pso;
  FailureSchedule failures;
  std::uint64_t rng_seed = 0;
  double utilization_cap = 1.0;

  void validate() const;  // throws std::invalid_argument naming the bad field

  friend bool operator==(const ScenarioConfig&, const ScenarioConfig&) = default;
};

// Per-tick, per-server decision inputs, kept alongside the chosen decision so
// traces can be audited and plotted without re-running the scenario.
struct CandidateRow {
  std::int64_t tick = 0;
  TimeMs time_ms = 0;
  std::string service;
  std::string server_id;
  ServerStatus registry_status = ServerStatus::Available;
  std::optional<double> predicted_rtt_ms;  // absent when no estimate was drawn
  std::optional<double> direction_cost_ms;
  std::optional<double> distance_cost_ms;
  std::optional<double> total_cost_ms;
  std::optional<double> stay_time_ms;
  CandidateVerdict verdict = CandidateVerdict::Ok;

  friend bool operator==(const CandidateRow&, const CandidateRow&) = default;
};

struct StatusChange {
  TimeMs time_ms = 0;
  std::string server_id;
  ServerStatus actual = ServerStatus::Available;
  ServerStatus registry = ServerStatus::Available;

  friend bool operator==(const StatusChange&, const StatusChange&) = default;
};

struct DecisionTrace {
  std::vector<DecisionRecord> records;
  std::vector<CandidateRow> candidates;
  std::vector<StatusChange> status_timeline;
  TimeMs decision_interval_ms = 0;

  friend bool operator==(const DecisionTrace&, const DecisionTrace&) = default;
};

// Execute a decision: apply measurement noise to the predicted RTT, or charge
// the local RTT exactly. A target that is not actually serving at dispatch
// time (`target_serving == false`) yields the timeout sentinel and a forced
// Incorrect outcome; the scenario loop additionally times out requests whose
// target fails mid-flight.
DecisionRecord execute(const DecisionRecord& decision, const RttModel& model, Rng& rng,
                       bool target_serving = true);

// Fixed-step synchronous simulation: per tick, refresh the failure registry,
// advance the vehicle, sample predictions, decide, execute. Fully
// deterministic for a given config.
DecisionTrace run_scenario(const ScenarioConfig& config);

// Assemble a batch assignment problem the way the decision layer sees it:
// spatial penalties and thresholds shape the feasibility matrix, while the
// fitness stays pure min-max load.
AssignmentProblem build_assignment_problem(const VehicleState& vehicle,
                                           const std::vector<ServiceSpec>& services,
                                           const std::vector<ServerDescriptor>& servers,
                                           const std::map<std::string, RttEstimate>& estimates,
                                           const PenaltyWeights& weights,
                                           double utilization_cap = 1.0);

}  // namespace offload
