#include "offload/scenario_io.hpp"

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <vector>

namespace offload {

std::string fmt_double(double value) {
  char buffer[40];
  std::snprintf(buffer, sizeof(buffer), "%.17g", value);
  return buffer;
}

namespace {

std::string trim(const std::string& s) {
  const auto begin = s.find_first_not_of(" \t\r");
  if (begin == std::string::npos) return "";
  const auto end = s.find_last_not_of(" \t\r");
  return s.substr(begin, end - begin + 1);
}

struct Entry {
  std::string value;
  int line = 0;
  mutable bool used = false;
};

struct Section {
  std::string name;
  int line = 0;
  std::map<std::string, Entry> entries;
  const std::string* origin = nullptr;

  [[noreturn]] void fail(const std::string& message) const {
    throw ParseError(*origin + ":" + std::to_string(line) + ": [" + name + "] " + message);
  }

  [[noreturn]] void fail_key(const std::string& key, const Entry& entry,
                             const std::string& message) const {
    throw ParseError(*origin + ":" + std::to_string(entry.line) + ": [" + name + "] key '" + key +
                     "': " + message);
  }

  const Entry* find(const std::string& key) const {
    const auto it = entries.find(key);
    if (it == entries.end()) return nullptr;
    it->second.used = true;
    return &it->second;
  }

  const Entry& require(const std::string& key) const {
    const Entry* e = find(key);
    if (!e) fail("missing required key '" + key + "'");
    return *e;
  }

  double get_double(const std::string& key) const { return parse_double(key, require(key)); }

  double get_double_or(const std::string& key, double fallback) const {
    const Entry* e = find(key);
    return e ? parse_double(key, *e) : fallback;
  }

  std::int64_t get_int(const std::string& key) const { return parse_int(key, require(key)); }

  std::int64_t get_int_or(const std::string& key, std::int64_t fallback) const {
    const Entry* e = find(key);
    return e ? parse_int(key, *e) : fallback;
  }

  std::string get_string(const std::string& key) const { return require(key).value; }

  std::string get_string_or(const std::string& key, const std::string& fallback) const {
    const Entry* e = find(key);
    return e ? e->value : fallback;
  }

  Vec2 get_vec2(const std::string& key) const {
    const Entry& e = require(key);
    std::istringstream in(e.value);
    double x, y;
    if (!(in >> x >> y) || !(in >> std::ws).eof()) {
      fail_key(key, e, "expected two numbers, got '" + e.value + "'");
    }
    return {x, y};
  }

  double parse_double(const std::string& key, const Entry& e) const {
    char* end = nullptr;
    const double v = std::strtod(e.value.c_str(), &end);
    if (end == e.value.c_str() || *end != '\0') {
      fail_key(key, e, "expected a number, got '" + e.value + "'");
    }
    return v;
  }

  std::int64_t parse_int(const std::string& key, const Entry& e) const {
    char* end = nullptr;
    const long long v = std::strtoll(e.value.c_str(), &end, 10);
    if (end == e.value.c_str() || *end != '\0') {
      fail_key(key, e, "expected an integer, got '" + e.value + "'");
    }
    return v;
  }

  void reject_unknown_keys() const {
    for (const auto& [key, entry] : entries) {
      if (!entry.used) {
        throw ParseError(*origin + ":" + std::to_string(entry.line) + ": [" + name +
                         "] unknown key '" + key + "'");
      }
    }
  }
};

std::vector<Section> tokenize(const std::string& text, const std::string& origin) {
  std::vector<Section> sections;
  std::istringstream in(text);
  std::string raw;
  int line_number = 0;
  while (std::getline(in, raw)) {
    ++line_number;
    const std::string line = trim(raw);
    if (line.empty() || line.front() == '#') continue;
    if (line.front() == '[') {
      if (line.back() != ']') {
        throw ParseError(origin + ":" + std::to_string(line_number) + ": unterminated section header");
      }
      Section section;
      section.name = trim(line.substr(1, line.size() - 2));
      section.line = line_number;
      section.origin = &origin;
      if (section.name.empty()) {
        throw ParseError(origin + ":" + std::to_string(line_number) + ": empty section name");
      }
      sections.push_back(std::move(section));
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ParseError(origin + ":" + std::to_string(line_number) + ": expected 'key = value', got '" +
                       line + "'");
    }
    if (sections.empty()) {
      throw ParseError(origin + ":" + std::to_string(line_number) + ": key outside of any section");
    }
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty()) {
      throw ParseError(origin + ":" + std::to_string(line_number) + ": empty key");
    }
    if (!sections.back().entries.emplace(key, Entry{value, line_number}).second) {
      throw ParseError(origin + ":" + std::to_string(line_number) + ": duplicate key '" + key +
                       "' in [" + sections.back().name + "]");
    }
  }
  return sections;
}

RttDistribution parse_rtt(const Section& section, const std::string& key) {
  const Entry& e = section.require(key);
  std::istringstream in(e.value);
  std::string kind;
  in >> kind;
  if (kind == "uniform") {
    double lo, hi;
    if (!(in >> lo >> hi) || !(in >> std::ws).eof()) {
      section.fail_key(key, e, "expected 'uniform LO HI'");
    }
    return RttDistribution::uniform(lo, hi);
  }
  if (kind == "truncnormal") {
    double mean, stddev, lo, hi;
    if (!(in >> mean >> stddev >> lo >> hi) || !(in >> std::ws).eof()) {
      section.fail_key(key, e, "expected 'truncnormal MEAN STDDEV LO HI'");
    }
    return RttDistribution::trunc_normal(mean, stddev, lo, hi);
  }
  section.fail_key(key, e, "unknown distribution '" + kind + "' (uniform | truncnormal)");
}

NoiseFactor parse_noise(const Section& section, const std::string& key) {
  const Entry* e = section.find(key);
  if (!e) return NoiseFactor{};
  std::istringstream in(e->value);
  std::string kind;
  in >> kind;
  if (kind == "fixed") {
    double f;
    if (!(in >> f) || !(in >> std::ws).eof()) {
      section.fail_key(key, *e, "expected 'fixed FACTOR'");
    }
    return NoiseFactor(f, f);
  }
  if (kind == "uniform") {
    double lo, hi;
    if (!(in >> lo >> hi) || !(in >> std::ws).eof()) {
      section.fail_key(key, *e, "expected 'uniform LO HI'");
    }
    return NoiseFactor(lo, hi);
  }
  section.fail_key(key, *e, "unknown noise kind '" + kind + "' (fixed | uniform)");
}

OutcomePolicy::Level parse_level(const Section& section, const std::string& key,
                                 OutcomePolicy::Level fallback) {
  const Entry* e = section.find(key);
  if (!e) return fallback;
  std::istringstream in(e->value);
  OutcomePolicy::Level level;
  if (!(in >> level.tolerance_factor >> level.penalty_weight) || !(in >> std::ws).eof()) {
    section.fail_key(key, *e, "expected 'TOLERANCE PENALTY_WEIGHT'");
  }
  return level;
}

}  // namespace

LoadedScenario parse_scenario(const std::string& text, const std::string& origin) {
  const std::vector<Section> sections = tokenize(text, origin);

  LoadedScenario loaded;
  ScenarioConfig& config = loaded.config;
  const Section* scenario = nullptr;
  const Section* weights = nullptr;
  const Section* pso = nullptr;
  const Section* trajectory = nullptr;
  const Section* detection = nullptr;
  const Section* outcome = nullptr;
  std::vector<const Section*> services;
  std::vector<const Section*> servers;
  std::vector<const Section*> failures;

  const auto assign_unique = [&](const Section& s, const Section*& slot) {
    if (slot) s.fail("duplicate section");
    slot = &s;
  };
  for (const Section& s : sections) {
    if (s.name == "scenario") assign_unique(s, scenario);
    else if (s.name == "weights") assign_unique(s, weights);
    else if (s.name == "pso") assign_unique(s, pso);
    else if (s.name == "trajectory") assign_unique(s, trajectory);
    else if (s.name == "detection") assign_unique(s, detection);
    else if (s.name == "outcome_policy") assign_unique(s, outcome);
    else if (s.name == "service") services.push_back(&s);
    else if (s.name == "server") servers.push_back(&s);
    else if (s.name == "failure") failures.push_back(&s);
    else s.fail("unknown section");
  }
  if (!scenario) throw ParseError(origin + ":1: missing [scenario] section");
  if (!trajectory) throw ParseError(origin + ":1: missing [trajectory] section");
  if (services.empty()) throw ParseError(origin + ":1: at least one [service] section is required");
  if (servers.empty()) throw ParseError(origin + ":1: at least one [server] section is required");

  try {
    config.name = scenario->get_string_or("name", "");
    config.rng_seed = static_cast<std::uint64_t>(scenario->get_int_or("seed", 0));
    config.decision_interval_ms = scenario->get_int("decision_interval_ms");
    config.duration_ms = scenario->get_int("duration_ms");
    config.utilization_cap = scenario->get_double_or("utilization_cap", 1.0);
    config.vehicle_id = scenario->get_string_or("vehicle_id", "vehicle");
    scenario->reject_unknown_keys();

    if (weights) {
      config.weights = PenaltyWeights(weights->get_double("w_direction"),
                                      weights->get_double("w_distance"),
                                      weights->get_double("scale_ms"));
      weights->reject_unknown_keys();
    }

    config.pso = PsoConfig();
    config.pso.rng_seed = config.rng_seed;
    if (pso) {
      config.pso = PsoConfig(
          static_cast<int>(pso->get_int_or("particles", 10)),
          static_cast<int>(pso->get_int_or("iterations", 80)), pso->get_double_or("inertia", 0.5),
          pso->get_double_or("cognitive", 1.5), pso->get_double_or("social", 1.5),
          static_cast<std::uint64_t>(pso->get_int_or("seed", static_cast<std::int64_t>(config.rng_seed))),
          pso->get_double_or("infeasible_penalty", kDefaultInfeasiblePenalty));
      pso->reject_unknown_keys();
    }

    const std::string kind = trajectory->get_string("kind");
    if (kind == "line") {
      config.trajectory = LineTrajectory(trajectory->get_vec2("start"),
                                         trajectory->get_vec2("direction"),
                                         trajectory->get_double("speed_mps"));
    } else if (kind == "ellipse") {
      config.trajectory = EllipseTrajectory(
          trajectory->get_vec2("center"), trajectory->get_double("semi_major_m"),
          trajectory->get_double("semi_minor_m"), trajectory->get_double("angular_speed_rad_s"),
          trajectory->get_double_or("phase_rad", 0.0));
    } else {
      trajectory->fail("unknown trajectory kind '" + kind + "' (line | ellipse)");
    }
    trajectory->reject_unknown_keys();

    for (const Section* s : services) {
      ServiceSpec spec(s->get_string("name"), criticality_from_string(s->get_string("criticality")),
                       s->get_double("max_rtt_ms"),
                       static_cast<std::uint64_t>(s->get_int_or("payload_bytes", 0)),
                       s->get_double_or("compute_demand", 1.0), s->get_double("local_rtt_ms"));
      config.rtt_model.per_service.emplace(spec.name, parse_rtt(*s, "rtt"));
      config.rtt_model.noise_per_service.emplace(spec.name, parse_noise(*s, "noise"));
      config.services.push_back(std::move(spec));
      s->reject_unknown_keys();
    }

    for (const Section* s : servers) {
      config.servers.emplace_back(
          s->get_string("id"), s->get_vec2("position"), s->get_double("comm_range_m"),
          s->get_double_or("capacity", 1.0),
          server_status_from_string(s->get_string_or("status", "available")),
          s->get_string_or("host", ""), static_cast<int>(s->get_int_or("port", 0)),
          s->get_double_or("utilization", 0.0));
      s->reject_unknown_keys();
    }

    DetectionProfile profile = DetectionProfile::orchestrator();
    if (detection) {
      const std::string p = detection->get_string("profile");
      if (p == "orchestrator") {
        profile = DetectionProfile::orchestrator(detection->get_int_or("detect_ms", 30000),
                                                 detection->get_int_or("recover_ms", 15000));
      } else if (p == "custom-api") {
        profile = DetectionProfile::custom_api(detection->get_int("detect_ms"),
                                               detection->get_int("recover_ms"));
      } else {
        detection->fail("unknown profile '" + p + "' (orchestrator | custom-api)");
      }
      detection->reject_unknown_keys();
    }
    std::vector<FailureEvent> events;
    for (const Section* s : failures) {
      FailureEvent e;
      e.at_ms = s->get_int("at_ms");
      e.server_id = s->get_string("server");
      const std::string ev = s->get_string("event");
      if (ev == "fail") e.kind = FailureEventKind::Fail;
      else if (ev == "recover") e.kind = FailureEventKind::Recover;
      else s->fail("unknown event '" + ev + "' (fail | recover)");
      events.push_back(std::move(e));
      s->reject_unknown_keys();
    }
    config.failures = FailureSchedule(std::move(events), profile);

    if (outcome) {
      const OutcomePolicy defaults;
      loaded.outcome_policy = OutcomePolicy(parse_level(*outcome, "high", defaults.high),
                                            parse_level(*outcome, "medium", defaults.medium),
                                            parse_level(*outcome, "low", defaults.low));
      outcome->reject_unknown_keys();
    }

    config.validate();
  } catch (const ParseError&) {
    throw;
  } catch (const std::exception& e) {
    throw ParseError(origin + ": " + e.what());
  }
  return loaded;
}

LoadedScenario load_scenario(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw ParseError(path + ": cannot open file");
  }
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_scenario(buffer.str(), path);
}

namespace {

void write_rtt(std::ostringstream& out, const RttDistribution& d) {
  if (d.kind == DistributionKind::Uniform) {
    out << "rtt = uniform " << fmt_double(d.lo_ms) << " " << fmt_double(d.hi_ms) << "\n";
  } else {
    out << "rtt = truncnormal " << fmt_double(d.mean_ms) << " " << fmt_double(d.stddev_ms) << " "
        << fmt_double(d.lo_ms) << " " << fmt_double(d.hi_ms) << "\n";
  }
}

}  // namespace

std::string format_scenario(const LoadedScenario& loaded) {
  const ScenarioConfig& config = loaded.config;
  std::ostringstream out;
  out << "[scenario]\n";
  if (!config.name.empty()) out << "name = " << config.name << "\n";
  out << "seed = " << config.rng_seed << "\n";
  out << "decision_interval_ms = " << config.decision_interval_ms << "\n";
  out << "duration_ms = " << config.duration_ms << "\n";
  out << "utilization_cap = " << fmt_double(config.utilization_cap) << "\n";
  out << "vehicle_id = " << config.vehicle_id << "\n";

  out << "\n[weights]\n";
  out << "w_direction = " << fmt_double(config.weights.w_direction) << "\n";
  out << "w_distance = " << fmt_double(config.weights.w_distance) << "\n";
  out << "scale_ms = " << fmt_double(config.weights.scale_ms) << "\n";

  out << "\n[pso]\n";
  out << "particles = " << config.pso.particles << "\n";
  out << "iterations = " << config.pso.iterations << "\n";
  out << "inertia = " << fmt_double(config.pso.inertia) << "\n";
  out << "cognitive = " << fmt_double(config.pso.cognitive) << "\n";
  out << "social = " << fmt_double(config.pso.social) << "\n";
  out << "seed = " << config.pso.rng_seed << "\n";
  out << "infeasible_penalty = " << fmt_double(config.pso.infeasible_penalty) << "\n";

  out << "\n[trajectory]\n";
  if (const auto* line = std::get_if<LineTrajectory>(&config.trajectory)) {
    out << "kind = line\n";
    out << "start = " << fmt_double(line->start.x) << " " << fmt_double(line->start.y) << "\n";
    out << "direction = " << fmt_double(line->direction.x) << " " << fmt_double(line->direction.y)
        << "\n";
    out << "speed_mps = " << fmt_double(line->speed_mps) << "\n";
  } else {
    const auto& e = std::get<EllipseTrajectory>(config.trajectory);
    out << "kind = ellipse\n";
    out << "center = " << fmt_double(e.center.x) << " " << fmt_double(e.center.y) << "\n";
    out << "semi_major_m = " << fmt_double(e.semi_major_m) << "\n";
    out << "semi_minor_m = " << fmt_double(e.semi_minor_m) << "\n";
    out << "angular_speed_rad_s = " << fmt_double(e.angular_speed_rad_s) << "\n";
    out << "phase_rad = " << fmt_double(e.phase_rad) << "\n";
  }

  for (const ServiceSpec& s : config.services) {
    out << "\n[service]\n";
    out << "name = " << s.name << "\n";
    out << "criticality = " << to_string(s.criticality) << "\n";
    out << "max_rtt_ms = " << fmt_double(s.max_rtt_ms) << "\n";
    out << "payload_bytes = " << s.payload_bytes << "\n";
    out << "compute_demand = " << fmt_double(s.compute_demand) << "\n";
    out << "local_rtt_ms = " << fmt_double(s.local_rtt_ms) << "\n";
    write_rtt(out, config.rtt_model.per_service.at(s.name));
    const NoiseFactor& noise = config.rtt_model.noise_per_service.at(s.name);
    if (noise.lo == noise.hi) {
      out << "noise = fixed " << fmt_double(noise.lo) << "\n";
    } else {
      out << "noise = uniform " << fmt_double(noise.lo) << " " << fmt_double(noise.hi) << "\n";
    }
  }

  for (const ServerDescriptor& s : config.servers) {
    out << "\n[server]\n";
    out << "id = " << s.id << "\n";
    out << "position = " << fmt_double(s.position.x) << " " << fmt_double(s.position.y) << "\n";
    out << "comm_range_m = " << fmt_double(s.comm_range_m) << "\n";
    out << "capacity = " << fmt_double(s.capacity) << "\n";
    out << "status = " << to_string(s.status) << "\n";
    if (!s.host.empty()) out << "host = " << s.host << "\n";
    if (s.port != 0) out << "port = " << s.port << "\n";
    out << "utilization = " << fmt_double(s.utilization) << "\n";
  }

  for (const FailureEvent& e : config.failures.events) {
    out << "\n[failure]\n";
    out << "at_ms = " << e.at_ms << "\n";
    out << "server = " << e.server_id << "\n";
    out << "event = " << (e.kind == FailureEventKind::Fail ? "fail" : "recover") << "\n";
  }

  out << "\n[detection]\n";
  out << "profile = "
      << (config.failures.detection.kind == DetectionProfileKind::Orchestrator ? "orchestrator"
                                                                               : "custom-api")
      << "\n";
  out << "detect_ms = " << config.failures.detection.detect_delay_ms << "\n";
  out << "recover_ms = " << config.failures.detection.recover_delay_ms << "\n";

  const OutcomePolicy& policy = loaded.outcome_policy;
  out << "\n[outcome_policy]\n";
  out << "high = " << fmt_double(policy.high.tolerance_factor) << " "
      << fmt_double(policy.high.penalty_weight) << "\n";
  out << "medium = " << fmt_double(policy.medium.tolerance_factor) << " "
      << fmt_double(policy.medium.penalty_weight) << "\n";
  out << "low = " << fmt_double(policy.low.tolerance_factor) << " "
      << fmt_double(policy.low.penalty_weight) << "\n";
  return out.str();
}

void save_scenario(const LoadedScenario& scenario, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw std::runtime_error(path + ": cannot open for writing");
  }
  out << format_scenario(scenario);
}

}  // namespace offload
