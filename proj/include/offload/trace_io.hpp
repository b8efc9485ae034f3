#pragma once

#include <string>
#include <vector>

#include "offload/detection.hpp"
#include "offload/simulator.hpp"

namespace offload {

enum class OutputFormat { Csv, JsonLines };

OutputFormat output_format_from_string(const std::string& s);
const char* to_string(OutputFormat f);

// Decision records, one per line. CSV headers carry units; JSON lines use the
// same unit-suffixed field names.
std::string format_trace(const DecisionTrace& trace, OutputFormat format);

// Per-tick candidate audit rows.
std::string format_candidates(const DecisionTrace& trace, OutputFormat format);

// Actual vs registry status transitions.
std::string format_status_timeline(const DecisionTrace& trace, OutputFormat format);

// Aggregate report as a JSON document.
std::string format_summary(const TraceReport& report);

// Inverse of the JSON-lines trace emitter; used to audit written traces.
std::vector<DecisionRecord> parse_trace_jsonl(const std::string& text);

void write_file(const std::string& path, const std::string& content);
std::string read_file(const std::string& path);

}  // namespace offload
