#include "offload/domain.hpp"

#include <cmath>
#include <utility>

namespace offload {

namespace {

void require(bool ok, const std::string& message) {
  if (!ok) {
    throw std::invalid_argument(message);
  }
}

}  // namespace

const char* to_string(ServerStatus s) {
  switch (s) {
    case ServerStatus::Available: return "available";
    case ServerStatus::Failed: return "failed";
    case ServerStatus::Recovering: return "recovering";
  }
  return "?";
}

const char* to_string(Criticality c) {
  switch (c) {
    case Criticality::Low: return "low";
    case Criticality::Medium: return "medium";
    case Criticality::High: return "high";
  }
  return "?";
}

const char* to_string(Outcome o) {
  return o == Outcome::Successful ? "successful" : "incorrect";
}

ServerStatus server_status_from_string(const std::string& s) {
  if (s == "available") return ServerStatus::Available;
  if (s == "failed") return ServerStatus::Failed;
  if (s == "recovering") return ServerStatus::Recovering;
  throw std::invalid_argument("unknown server status '" + s + "'");
}

Criticality criticality_from_string(const std::string& s) {
  if (s == "low") return Criticality::Low;
  if (s == "medium") return Criticality::Medium;
  if (s == "high") return Criticality::High;
  throw std::invalid_argument("unknown criticality '" + s + "'");
}

Outcome outcome_from_string(const std::string& s) {
  if (s == "successful") return Outcome::Successful;
  if (s == "incorrect") return Outcome::Incorrect;
  throw std::invalid_argument("unknown outcome '" + s + "'");
}

VehicleState::VehicleState(std::string id_, Vec2 position_, Vec2 direction_, double speed_mps_)
    : id(std::move(id_)), position(position_), direction(direction_), speed_mps(speed_mps_) {
  require(speed_mps >= 0.0, "vehicle '" + id + "': speed must be >= 0");
  if (speed_mps > 0.0) {
    require(std::abs(norm(direction) - 1.0) <= 1e-9,
            "vehicle '" + id + "': direction must be a unit vector while moving");
  }
}

ServerDescriptor::ServerDescriptor(std::string id_, Vec2 position_, double comm_range_m_,
                                   double capacity_, ServerStatus status_, std::string host_,
                                   int port_, double utilization_)
    : id(std::move(id_)),
      position(position_),
      comm_range_m(comm_range_m_),
      capacity(capacity_),
      status(status_),
      host(std::move(host_)),
      port(port_),
      utilization(utilization_) {
  require(!id.empty(), "server id must be nonempty");
  require(comm_range_m > 0.0, "server '" + id + "': comm_range_m must be > 0");
  require(capacity > 0.0, "server '" + id + "': capacity must be > 0");
  require(utilization >= 0.0 && utilization <= 1.0,
          "server '" + id + "': utilization must be within [0, 1]");
}

ServiceSpec::ServiceSpec(std::string name_, Criticality criticality_, double max_rtt_ms_,
                         std::uint64_t payload_bytes_, double compute_demand_,
                         double local_rtt_ms_)
    : name(std::move(name_)),
      criticality(criticality_),
      max_rtt_ms(max_rtt_ms_),
      payload_bytes(payload_bytes_),
      compute_demand(compute_demand_),
      local_rtt_ms(local_rtt_ms_) {
  require(!name.empty(), "service name must be nonempty");
  require(max_rtt_ms > 0.0, "service '" + name + "': max_rtt_ms must be > 0");
  require(compute_demand > 0.0, "service '" + name + "': compute_demand must be > 0");
  require(local_rtt_ms >= 0.0, "service '" + name + "': local_rtt_ms must be >= 0");
}

OffloadRequest::OffloadRequest(VehicleState vehicle_, ServiceSpec service_, TimeMs issued_at_ms_)
    : vehicle(std::move(vehicle_)), service(std::move(service_)), issued_at_ms(issued_at_ms_) {
  require(issued_at_ms >= 0, "request issued_at_ms must be >= 0");
}

Target Target::server(std::string id) {
  if (id.empty()) {
    throw std::invalid_argument("server target needs a nonempty id");
  }
  Target t;
  t.server_id = std::move(id);
  return t;
}

DecisionRecord DecisionRecord::for_server(OffloadRequest request, std::string server_id,
                                          double predicted_rtt_ms, double direction_cost_ms,
                                          double distance_cost_ms) {
  require(predicted_rtt_ms > 0.0, "predicted_rtt_ms must be > 0");
  require(direction_cost_ms >= 0.0 && distance_cost_ms >= 0.0, "penalty costs must be >= 0");
  DecisionRecord r;
  r.request = std::move(request);
  r.target = Target::server(std::move(server_id));
  r.predicted_rtt_ms = predicted_rtt_ms;
  r.direction_cost_ms = direction_cost_ms;
  r.distance_cost_ms = distance_cost_ms;
  r.total_cost_ms = predicted_rtt_ms + direction_cost_ms + distance_cost_ms;
  return r;
}

DecisionRecord DecisionRecord::for_local(OffloadRequest request) {
  DecisionRecord r;
  r.predicted_rtt_ms = request.service.local_rtt_ms;
  r.total_cost_ms = request.service.local_rtt_ms;
  r.request = std::move(request);
  r.target = Target::local();
  return r;
}

DecisionRecord DecisionRecord::with_measurement(double measured_ms) const {
  require(measured_ms >= 0.0, "measured_rtt_ms must be >= 0");
  DecisionRecord r = *this;
  r.measured_rtt_ms = measured_ms;
  return r;
}

AssignmentProblem::AssignmentProblem(std::vector<double> demands,
                                     std::vector<ServerDescriptor> servers,
                                     std::vector<std::uint8_t> feasible)
    : demands_(std::move(demands)), servers_(std::move(servers)), feasible_(std::move(feasible)) {
  require(!demands_.empty(), "assignment problem needs at least one task");
  require(!servers_.empty(), "assignment problem needs at least one server");
  require(feasible_.size() == demands_.size() * servers_.size(),
          "feasibility matrix must be tasks x servers");
  for (std::size_t t = 0; t < demands_.size(); ++t) {
    require(demands_[t] > 0.0, "task " + std::to_string(t) + ": demand must be > 0");
    bool any = false;
    for (std::size_t s = 0; s < servers_.size(); ++s) {
      any = any || this->feasible(t, s);
    }
    require(any, "task " + std::to_string(t) + " has no feasible server");
  }
}

AssignmentProblem::AssignmentProblem(std::vector<double> demands,
                                     std::vector<ServerDescriptor> servers)
    : AssignmentProblem(demands, servers,
                        std::vector<std::uint8_t>(demands.size() * servers.size(), 1)) {}

}  // namespace offload
