#include "offload/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <stdexcept>

namespace offload {

LineTrajectory::LineTrajectory(Vec2 start_, Vec2 direction_, double speed_mps_)
    : start(start_), direction(normalized(direction_)), speed_mps(speed_mps_) {
  if (speed_mps <= 0.0) {
    throw std::invalid_argument("line trajectory: speed_mps must be > 0");
  }
}

EllipseTrajectory::EllipseTrajectory(Vec2 center_, double semi_major_m_, double semi_minor_m_,
                                     double angular_speed_rad_s_, double phase_rad_)
    : center(center_),
      semi_major_m(semi_major_m_),
      semi_minor_m(semi_minor_m_),
      angular_speed_rad_s(angular_speed_rad_s_),
      phase_rad(phase_rad_) {
  if (!(semi_minor_m > 0.0) || semi_major_m < semi_minor_m) {
    throw std::invalid_argument("ellipse trajectory: require semi_major_m >= semi_minor_m > 0");
  }
  if (angular_speed_rad_s <= 0.0) {
    throw std::invalid_argument("ellipse trajectory: angular_speed_rad_s must be > 0");
  }
}

VehicleState vehicle_at(const Trajectory& trajectory, TimeMs t, const std::string& vehicle_id) {
  if (t < 0) {
    throw std::invalid_argument("vehicle_at: time must be >= 0");
  }
  const double seconds = static_cast<double>(t) / 1000.0;
  if (const auto* line = std::get_if<LineTrajectory>(&trajectory)) {
    const Vec2 pos = line->start + line->direction * (line->speed_mps * seconds);
    return VehicleState(vehicle_id, pos, line->direction, line->speed_mps);
  }
  const auto& e = std::get<EllipseTrajectory>(trajectory);
  const double theta = e.phase_rad + e.angular_speed_rad_s * seconds;
  const Vec2 pos = e.center + Vec2{e.semi_major_m * std::cos(theta), e.semi_minor_m * std::sin(theta)};
  const Vec2 tangent{-e.semi_major_m * std::sin(theta) * e.angular_speed_rad_s,
                     e.semi_minor_m * std::cos(theta) * e.angular_speed_rad_s};
  const double speed = norm(tangent);
  return VehicleState(vehicle_id, pos, normalized(tangent), speed);
}

RttDistribution RttDistribution::uniform(double lo_ms, double hi_ms) {
  if (!(lo_ms > 0.0) || !(lo_ms < hi_ms)) {
    throw std::invalid_argument("rtt distribution: require 0 < lo_ms < hi_ms");
  }
  RttDistribution d;
  d.kind = DistributionKind::Uniform;
  d.lo_ms = lo_ms;
  d.hi_ms = hi_ms;
  return d;
}

RttDistribution RttDistribution::trunc_normal(double mean_ms, double stddev_ms, double lo_ms,
                                              double hi_ms) {
  if (!(lo_ms > 0.0) || !(lo_ms < hi_ms)) {
    throw std::invalid_argument("rtt distribution: require 0 < lo_ms < hi_ms");
  }
  if (stddev_ms < 0.0) {
    throw std::invalid_argument("rtt distribution: stddev_ms must be >= 0");
  }
  if (mean_ms < lo_ms || mean_ms > hi_ms) {
    throw std::invalid_argument("rtt distribution: mean_ms must lie within [lo_ms, hi_ms]");
  }
  RttDistribution d;
  d.kind = DistributionKind::TruncNormal;
  d.lo_ms = lo_ms;
  d.hi_ms = hi_ms;
  d.mean_ms = mean_ms;
  d.stddev_ms = stddev_ms;
  return d;
}

double RttDistribution::sample(Rng& rng) const {
  if (kind == DistributionKind::Uniform) {
    return rng.uniform(lo_ms, hi_ms);
  }
  if (stddev_ms == 0.0) {
    return mean_ms;
  }
  double x;
  do {
    x = rng.normal(mean_ms, stddev_ms);
  } while (x < lo_ms || x > hi_ms);
  return x;
}

NoiseFactor::NoiseFactor(double lo_, double hi_) : lo(lo_), hi(hi_) {
  if (!(lo > 0.0) || hi < lo) {
    throw std::invalid_argument("noise factor: require 0 < lo <= hi");
  }
}

double NoiseFactor::sample(Rng& rng) const {
  if (lo == hi) {
    return lo;
  }
  return rng.uniform(lo, hi);
}

double sample_predicted_rtt(const RttModel& model, const ServiceSpec& service,
                            const ServerDescriptor& server, Rng& rng) {
  (void)server;  // one distribution per service; servers draw independently
  const auto it = model.per_service.find(service.name);
  if (it == model.per_service.end()) {
    throw std::invalid_argument("rtt model: no distribution for service '" + service.name + "'");
  }
  return it->second.sample(rng);
}

DetectionProfile DetectionProfile::orchestrator(TimeMs mark_unavailable_delay_ms,
                                                TimeMs restart_delay_ms) {
  if (mark_unavailable_delay_ms < 0 || restart_delay_ms < 0) {
    throw std::invalid_argument("detection profile: delays must be >= 0");
  }
  DetectionProfile p;
  p.kind = DetectionProfileKind::Orchestrator;
  p.detect_delay_ms = mark_unavailable_delay_ms;
  p.recover_delay_ms = restart_delay_ms;
  return p;
}

DetectionProfile DetectionProfile::custom_api(TimeMs detect_delay_ms, TimeMs recover_delay_ms) {
  if (detect_delay_ms < 500 || detect_delay_ms > 2000) {
    throw std::invalid_argument("detection profile: custom API detect delay must be within [500, 2000] ms");
  }
  if (recover_delay_ms < 0) {
    throw std::invalid_argument("detection profile: recover delay must be >= 0");
  }
  DetectionProfile p;
  p.kind = DetectionProfileKind::CustomApi;
  p.detect_delay_ms = detect_delay_ms;
  p.recover_delay_ms = recover_delay_ms;
  return p;
}

FailureSchedule::FailureSchedule(std::vector<FailureEvent> events_, DetectionProfile detection_)
    : events(std::move(events_)), detection(detection_) {
  for (std::size_t i = 0; i < events.size(); ++i) {
    if (events[i].at_ms < 0) {
      throw std::invalid_argument("failure schedule: event times must be >= 0");
    }
    if (i > 0 && events[i].at_ms < events[i - 1].at_ms) {
      throw std::invalid_argument("failure schedule: events must be time-ordered");
    }
  }
}

void ScenarioConfig::validate() const {
  if (decision_interval_ms <= 0) {
    throw std::invalid_argument("scenario: decision_interval_ms must be > 0");
  }
  if (duration_ms < decision_interval_ms) {
    throw std::invalid_argument("scenario: duration_ms must be >= decision_interval_ms");
  }
  if (utilization_cap <= 0.0) {
    throw std::invalid_argument("scenario: utilization_cap must be > 0");
  }
  if (servers.empty()) {
    throw std::invalid_argument("scenario: at least one server is required");
  }
  if (services.empty()) {
    throw std::invalid_argument("scenario: at least one service is required");
  }
  std::set<std::string> ids;
  for (const ServerDescriptor& s : servers) {
    if (!ids.insert(s.id).second) {
      throw std::invalid_argument("scenario: duplicate server id '" + s.id + "'");
    }
  }
  std::set<std::string> names;
  for (const ServiceSpec& s : services) {
    if (!names.insert(s.name).second) {
      throw std::invalid_argument("scenario: duplicate service name '" + s.name + "'");
    }
    if (rtt_model.per_service.find(s.name) == rtt_model.per_service.end()) {
      throw std::invalid_argument("scenario: service '" + s.name + "' has no rtt distribution");
    }
    if (rtt_model.noise_per_service.find(s.name) == rtt_model.noise_per_service.end()) {
      throw std::invalid_argument("scenario: service '" + s.name + "' has no noise factor");
    }
  }
  for (const FailureEvent& e : failures.events) {
    if (ids.find(e.server_id) == ids.end()) {
      throw std::invalid_argument("scenario: failure event references unknown server '" +
                                  e.server_id + "'");
    }
  }
}

namespace {

struct Transition {
  TimeMs at_ms;
  ServerStatus status;
};

struct ServerTimeline {
  ServerStatus initial = ServerStatus::Available;
  std::vector<Transition> actual;
  std::vector<Transition> registry;
  std::vector<TimeMs> fail_times;

  ServerStatus actual_at(TimeMs t) const { return status_at(actual, t); }
  ServerStatus registry_at(TimeMs t) const { return status_at(registry, t); }

  bool fails_within(TimeMs after, double horizon_ms) const {
    for (const TimeMs f : fail_times) {
      if (f > after && static_cast<double>(f - after) <= horizon_ms) {
        return true;
      }
    }
    return false;
  }

 private:
  ServerStatus status_at(const std::vector<Transition>& list, TimeMs t) const {
    ServerStatus current = initial;
    for (const Transition& tr : list) {
      if (tr.at_ms > t) break;
      current = tr.status;
    }
    return current;
  }
};

// A new control-plane event supersedes transitions that have not fired yet.
void push_transition(std::vector<Transition>& list, TimeMs event_time, TimeMs at_ms,
                     ServerStatus status) {
  while (!list.empty() && list.back().at_ms >= event_time && list.back().at_ms >= at_ms) {
    list.pop_back();
  }
  list.push_back({at_ms, status});
}

std::map<std::string, ServerTimeline> build_timelines(const ScenarioConfig& config) {
  std::map<std::string, ServerTimeline> timelines;
  for (const ServerDescriptor& s : config.servers) {
    timelines[s.id].initial = s.status;
  }
  const DetectionProfile& det = config.failures.detection;
  for (const FailureEvent& e : config.failures.events) {
    ServerTimeline& tl = timelines[e.server_id];
    const ServerStatus current = tl.actual_at(e.at_ms);
    if (e.kind == FailureEventKind::Fail) {
      if (current == ServerStatus::Failed) {
        throw std::invalid_argument("failure schedule: server '" + e.server_id +
                                    "' fails while already failed");
      }
      push_transition(tl.actual, e.at_ms, e.at_ms, ServerStatus::Failed);
      push_transition(tl.registry, e.at_ms, e.at_ms + det.detect_delay_ms, ServerStatus::Failed);
      tl.fail_times.push_back(e.at_ms);
    } else {
      if (current != ServerStatus::Failed) {
        throw std::invalid_argument("failure schedule: server '" + e.server_id +
                                    "' recovers while not failed");
      }
      // Recovery is noticed immediately, but the server only serves again
      // after the restart delay.
      push_transition(tl.actual, e.at_ms, e.at_ms, ServerStatus::Recovering);
      push_transition(tl.actual, e.at_ms, e.at_ms + det.recover_delay_ms, ServerStatus::Available);
      push_transition(tl.registry, e.at_ms, e.at_ms, ServerStatus::Recovering);
      push_transition(tl.registry, e.at_ms, e.at_ms + det.recover_delay_ms, ServerStatus::Available);
    }
  }
  return timelines;
}

}  // namespace

DecisionRecord execute(const DecisionRecord& decision, const RttModel& model, Rng& rng,
                       bool target_serving) {
  if (decision.target.is_local()) {
    // On-vehicle execution has no network leg; the local RTT is charged as is.
    return decision.with_measurement(decision.request.service.local_rtt_ms);
  }
  if (!target_serving) {
    DecisionRecord timed_out = decision.with_measurement(kRttTimeoutMs);
    timed_out.outcome = Outcome::Incorrect;
    return timed_out;
  }
  const auto it = model.noise_per_service.find(decision.request.service.name);
  if (it == model.noise_per_service.end()) {
    throw std::invalid_argument("rtt model: no noise factor for service '" +
                                decision.request.service.name + "'");
  }
  return decision.with_measurement(decision.predicted_rtt_ms * it->second.sample(rng));
}

DecisionTrace run_scenario(const ScenarioConfig& config) {
  config.validate();
  const std::map<std::string, ServerTimeline> timelines = build_timelines(config);

  Rng rng(config.rng_seed);
  DecisionTrace trace;
  trace.decision_interval_ms = config.decision_interval_ms;

  const std::int64_t ticks = config.duration_ms / config.decision_interval_ms;
  std::vector<ServerDescriptor> registry = config.servers;

  for (std::int64_t tick = 0; tick < ticks; ++tick) {
    const TimeMs now = tick * config.decision_interval_ms;
    for (std::size_t i = 0; i < registry.size(); ++i) {
      registry[i].status = timelines.at(config.servers[i].id).registry_at(now);
    }
    const VehicleState vehicle = vehicle_at(config.trajectory, now, config.vehicle_id);

    for (const ServiceSpec& service : config.services) {
      RttEstimate estimates;
      for (const ServerDescriptor& server : registry) {
        if (server.status == ServerStatus::Available) {
          estimates[server.id] = sample_predicted_rtt(config.rtt_model, service, server, rng);
        }
      }
      const OffloadRequest request(vehicle, service, now);

      for (const ServerDescriptor& server : registry) {
        const CandidateEvaluation eval =
            evaluate_candidate(request, server, estimates, config.weights, config.utilization_cap);
        CandidateRow row;
        row.tick = tick;
        row.time_ms = now;
        row.service = service.name;
        row.server_id = server.id;
        row.registry_status = server.status;
        row.predicted_rtt_ms = eval.predicted_rtt_ms;
        row.direction_cost_ms = eval.direction_cost_ms;
        row.distance_cost_ms = eval.distance_cost_ms;
        row.total_cost_ms = eval.total_cost_ms;
        row.stay_time_ms = eval.stay_time_ms;
        row.verdict = eval.verdict;
        trace.candidates.push_back(std::move(row));
      }

      DecisionRecord decision =
          decide_single(request, registry, estimates, config.weights, config.utilization_cap);
      bool serving = true;
      if (!decision.target.is_local()) {
        serving = timelines.at(decision.target.server_id).actual_at(now) == ServerStatus::Available;
      }
      DecisionRecord executed = execute(decision, config.rtt_model, rng, serving);
      if (!executed.target.is_local() && *executed.measured_rtt_ms != kRttTimeoutMs &&
          timelines.at(executed.target.server_id).fails_within(now, *executed.measured_rtt_ms)) {
        // Target died mid-flight; the response never arrives.
        executed.measured_rtt_ms = kRttTimeoutMs;
        executed.outcome = Outcome::Incorrect;
      }
      trace.records.push_back(std::move(executed));
    }
  }

  // Status timeline: initial state per server, then every change of either view.
  for (const ServerDescriptor& server : config.servers) {
    const ServerTimeline& tl = timelines.at(server.id);
    std::set<TimeMs> change_times{0};
    for (const Transition& tr : tl.actual) change_times.insert(tr.at_ms);
    for (const Transition& tr : tl.registry) change_times.insert(tr.at_ms);
    for (const TimeMs t : change_times) {
      trace.status_timeline.push_back({t, server.id, tl.actual_at(t), tl.registry_at(t)});
    }
  }
  std::sort(trace.status_timeline.begin(), trace.status_timeline.end(),
            [](const StatusChange& a, const StatusChange& b) {
              if (a.time_ms != b.time_ms) return a.time_ms < b.time_ms;
              return a.server_id < b.server_id;
            });

  return trace;
}

AssignmentProblem build_assignment_problem(const VehicleState& vehicle,
                                           const std::vector<ServiceSpec>& services,
                                           const std::vector<ServerDescriptor>& servers,
                                           const std::map<std::string, RttEstimate>& estimates,
                                           const PenaltyWeights& weights,
                                           double utilization_cap) {
  std::vector<double> demands;
  demands.reserve(services.size());
  std::vector<std::uint8_t> feasible(services.size() * servers.size(), 0);
  for (std::size_t t = 0; t < services.size(); ++t) {
    demands.push_back(services[t].compute_demand);
    const auto est = estimates.find(services[t].name);
    if (est == estimates.end()) {
      throw std::invalid_argument("no RTT estimates for service '" + services[t].name + "'");
    }
    const OffloadRequest request(vehicle, services[t], 0);
    for (std::size_t s = 0; s < servers.size(); ++s) {
      const CandidateEvaluation eval =
          evaluate_candidate(request, servers[s], est->second, weights, utilization_cap);
      feasible[t * servers.size() + s] = eval.verdict == CandidateVerdict::Ok ? 1 : 0;
    }
  }
  return AssignmentProblem(std::move(demands), servers, std::move(feasible));
}

}  // namespace offload
