#include "offload/trace_io.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "offload/scenario_io.hpp"

namespace offload {

using ordered_json = nlohmann::ordered_json;

OutputFormat output_format_from_string(const std::string& s) {
  if (s == "csv") return OutputFormat::Csv;
  if (s == "json-lines") return OutputFormat::JsonLines;
  throw std::invalid_argument("unknown format '" + s + "' (csv | json-lines)");
}

const char* to_string(OutputFormat f) {
  return f == OutputFormat::Csv ? "csv" : "json-lines";
}

namespace {

std::string csv_opt(const std::optional<double>& v) {
  return v ? fmt_double(*v) : std::string{};
}

ordered_json json_opt(const std::optional<double>& v) {
  return v ? ordered_json(*v) : ordered_json(nullptr);
}

ordered_json record_to_json(const DecisionRecord& r) {
  ordered_json j;
  j["time_ms"] = r.request.issued_at_ms;
  j["vehicle"] = {{"id", r.request.vehicle.id},
                  {"x_m", r.request.vehicle.position.x},
                  {"y_m", r.request.vehicle.position.y},
                  {"dir_x", r.request.vehicle.direction.x},
                  {"dir_y", r.request.vehicle.direction.y},
                  {"speed_mps", r.request.vehicle.speed_mps}};
  j["service"] = {{"name", r.request.service.name},
                  {"criticality", to_string(r.request.service.criticality)},
                  {"max_rtt_ms", r.request.service.max_rtt_ms},
                  {"payload_bytes", r.request.service.payload_bytes},
                  {"compute_demand", r.request.service.compute_demand},
                  {"local_rtt_ms", r.request.service.local_rtt_ms}};
  j["target"] = r.target.is_local() ? "local" : r.target.server_id;
  j["predicted_rtt_ms"] = r.predicted_rtt_ms;
  j["direction_cost_ms"] = r.direction_cost_ms;
  j["distance_cost_ms"] = r.distance_cost_ms;
  j["total_cost_ms"] = r.total_cost_ms;
  j["measured_rtt_ms"] = json_opt(r.measured_rtt_ms);
  j["outcome"] = r.outcome ? ordered_json(to_string(*r.outcome)) : ordered_json(nullptr);
  j["penalty_score"] = r.penalty_score;
  return j;
}

DecisionRecord record_from_json(const ordered_json& j) {
  const auto& v = j.at("vehicle");
  VehicleState vehicle(v.at("id").get<std::string>(),
                       {v.at("x_m").get<double>(), v.at("y_m").get<double>()},
                       {v.at("dir_x").get<double>(), v.at("dir_y").get<double>()},
                       v.at("speed_mps").get<double>());
  const auto& s = j.at("service");
  ServiceSpec service(s.at("name").get<std::string>(),
                      criticality_from_string(s.at("criticality").get<std::string>()),
                      s.at("max_rtt_ms").get<double>(), s.at("payload_bytes").get<std::uint64_t>(),
                      s.at("compute_demand").get<double>(), s.at("local_rtt_ms").get<double>());
  OffloadRequest request(std::move(vehicle), std::move(service), j.at("time_ms").get<TimeMs>());

  const std::string target = j.at("target").get<std::string>();
  DecisionRecord r;
  if (target == "local") {
    r = DecisionRecord::for_local(std::move(request));
  } else {
    r = DecisionRecord::for_server(std::move(request), target, j.at("predicted_rtt_ms").get<double>(),
                                   j.at("direction_cost_ms").get<double>(),
                                   j.at("distance_cost_ms").get<double>());
  }
  if (!j.at("measured_rtt_ms").is_null()) {
    r = r.with_measurement(j.at("measured_rtt_ms").get<double>());
  }
  if (!j.at("outcome").is_null()) {
    r.outcome = outcome_from_string(j.at("outcome").get<std::string>());
  }
  r.penalty_score = j.at("penalty_score").get<double>();
  return r;
}

}  // namespace

std::string format_trace(const DecisionTrace& trace, OutputFormat format) {
  std::ostringstream out;
  if (format == OutputFormat::Csv) {
    out << "time_ms,vehicle_id,vehicle_x_m,vehicle_y_m,vehicle_dir_x,vehicle_dir_y,"
           "vehicle_speed_mps,service,criticality,max_rtt_ms,payload_bytes,compute_demand,"
           "local_rtt_ms,target,predicted_rtt_ms,direction_cost_ms,distance_cost_ms,"
           "total_cost_ms,measured_rtt_ms,outcome,penalty_score\n";
    for (const DecisionRecord& r : trace.records) {
      out << r.request.issued_at_ms << ',' << r.request.vehicle.id << ','
          << fmt_double(r.request.vehicle.position.x) << ','
          << fmt_double(r.request.vehicle.position.y) << ','
          << fmt_double(r.request.vehicle.direction.x) << ','
          << fmt_double(r.request.vehicle.direction.y) << ','
          << fmt_double(r.request.vehicle.speed_mps) << ',' << r.request.service.name << ','
          << to_string(r.request.service.criticality) << ','
          << fmt_double(r.request.service.max_rtt_ms) << ',' << r.request.service.payload_bytes
          << ',' << fmt_double(r.request.service.compute_demand) << ','
          << fmt_double(r.request.service.local_rtt_ms) << ','
          << (r.target.is_local() ? "local" : r.target.server_id) << ','
          << fmt_double(r.predicted_rtt_ms) << ',' << fmt_double(r.direction_cost_ms) << ','
          << fmt_double(r.distance_cost_ms) << ',' << fmt_double(r.total_cost_ms) << ','
          << csv_opt(r.measured_rtt_ms) << ',' << (r.outcome ? to_string(*r.outcome) : "") << ','
          << fmt_double(r.penalty_score) << '\n';
    }
  } else {
    for (const DecisionRecord& r : trace.records) {
      out << record_to_json(r).dump() << '\n';
    }
  }
  return out.str();
}

std::string format_candidates(const DecisionTrace& trace, OutputFormat format) {
  std::ostringstream out;
  if (format == OutputFormat::Csv) {
    out << "tick,time_ms,service,server_id,registry_status,predicted_rtt_ms,direction_cost_ms,"
           "distance_cost_ms,total_cost_ms,stay_time_ms,verdict\n";
    for (const CandidateRow& c : trace.candidates) {
      out << c.tick << ',' << c.time_ms << ',' << c.service << ',' << c.server_id << ','
          << to_string(c.registry_status) << ',' << csv_opt(c.predicted_rtt_ms) << ','
          << csv_opt(c.direction_cost_ms) << ',' << csv_opt(c.distance_cost_ms) << ','
          << csv_opt(c.total_cost_ms) << ',' << csv_opt(c.stay_time_ms) << ','
          << to_string(c.verdict) << '\n';
    }
  } else {
    for (const CandidateRow& c : trace.candidates) {
      ordered_json j;
      j["tick"] = c.tick;
      j["time_ms"] = c.time_ms;
      j["service"] = c.service;
      j["server_id"] = c.server_id;
      j["registry_status"] = to_string(c.registry_status);
      j["predicted_rtt_ms"] = json_opt(c.predicted_rtt_ms);
      j["direction_cost_ms"] = json_opt(c.direction_cost_ms);
      j["distance_cost_ms"] = json_opt(c.distance_cost_ms);
      j["total_cost_ms"] = json_opt(c.total_cost_ms);
      j["stay_time_ms"] = json_opt(c.stay_time_ms);
      j["verdict"] = to_string(c.verdict);
      out << j.dump() << '\n';
    }
  }
  return out.str();
}

std::string format_status_timeline(const DecisionTrace& trace, OutputFormat format) {
  std::ostringstream out;
  if (format == OutputFormat::Csv) {
    out << "time_ms,server_id,actual_status,registry_status\n";
    for (const StatusChange& s : trace.status_timeline) {
      out << s.time_ms << ',' << s.server_id << ',' << to_string(s.actual) << ','
          << to_string(s.registry) << '\n';
    }
  } else {
    for (const StatusChange& s : trace.status_timeline) {
      ordered_json j;
      j["time_ms"] = s.time_ms;
      j["server_id"] = s.server_id;
      j["actual_status"] = to_string(s.actual);
      j["registry_status"] = to_string(s.registry);
      out << j.dump() << '\n';
    }
  }
  return out.str();
}

std::string format_summary(const TraceReport& report) {
  ordered_json j;
  j["records"] = report.total;
  j["successful"] = report.successful;
  j["incorrect"] = report.incorrect;
  j["timeouts"] = report.timeouts;
  j["success_rate"] = report.success_rate;
  ordered_json targets;
  for (const auto& [target, count] : report.per_target) {
    targets[target] = count;
  }
  j["per_target"] = std::move(targets);
  j["mean_predicted_rtt_ms"] = report.mean_predicted_rtt_ms;
  j["mean_measured_rtt_ms"] = report.mean_measured_rtt_ms;
  j["penalty_total"] = report.penalty_total;
  return j.dump(2) + "\n";
}

std::vector<DecisionRecord> parse_trace_jsonl(const std::string& text) {
  std::vector<DecisionRecord> records;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    records.push_back(record_from_json(ordered_json::parse(line)));
  }
  return records;
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw std::runtime_error(path + ": cannot open for writing");
  }
  out << content;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw std::runtime_error(path + ": cannot open file");
  }
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

}  // namespace offload
