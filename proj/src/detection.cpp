#include "offload/detection.hpp"

#include <stdexcept>

namespace offload {

OutcomePolicy::OutcomePolicy(Level high_, Level medium_, Level low_)
    : high(high_), medium(medium_), low(low_) {
  for (const Level* level : {&high, &medium, &low}) {
    if (level->tolerance_factor < 1.0) {
      throw std::invalid_argument("outcome policy: tolerance_factor must be >= 1");
    }
    if (level->penalty_weight < 0.0) {
      throw std::invalid_argument("outcome policy: penalty_weight must be >= 0");
    }
  }
  if (!(high.tolerance_factor <= medium.tolerance_factor &&
        medium.tolerance_factor <= low.tolerance_factor)) {
    throw std::invalid_argument(
        "outcome policy: tolerance must not decrease as criticality drops");
  }
}

const OutcomePolicy::Level& OutcomePolicy::level(Criticality c) const {
  switch (c) {
    case Criticality::High: return high;
    case Criticality::Medium: return medium;
    case Criticality::Low: return low;
  }
  return low;
}

DecisionRecord classify(const DecisionRecord& record, const OutcomePolicy& policy) {
  if (!record.measured_rtt_ms.has_value()) {
    throw std::invalid_argument("classify: record has no measured RTT");
  }
  const OutcomePolicy::Level& level = policy.level(record.request.service.criticality);
  const double measured = *record.measured_rtt_ms;
  const double limit = record.request.service.max_rtt_ms * level.tolerance_factor;

  DecisionRecord out = record;
  if (measured != kRttTimeoutMs && measured <= limit) {
    out.outcome = Outcome::Successful;
    out.penalty_score = 0.0;
  } else {
    out.outcome = Outcome::Incorrect;
    out.penalty_score =
        level.penalty_weight * (measured / record.request.service.max_rtt_ms - 1.0);
  }
  return out;
}

TraceReport trace_report(const DecisionTrace& trace, const OutcomePolicy& policy) {
  if (trace.records.empty()) {
    throw std::invalid_argument("empty trace");
  }
  TraceReport report;
  report.total = trace.records.size();
  double predicted_sum = 0.0;
  double measured_sum = 0.0;
  std::size_t measured_count = 0;
  for (const DecisionRecord& record : trace.records) {
    // classify() is idempotent, so re-labelling under the given policy is safe
    // whether or not the trace was labelled before.
    const DecisionRecord r = classify(record, policy);
    if (*r.outcome == Outcome::Successful) {
      ++report.successful;
    } else {
      ++report.incorrect;
    }
    const std::string key = r.target.is_local() ? "local" : r.target.server_id;
    ++report.per_target[key];
    predicted_sum += r.predicted_rtt_ms;
    if (r.measured_rtt_ms.has_value()) {
      if (*r.measured_rtt_ms == kRttTimeoutMs) {
        ++report.timeouts;
      } else {
        measured_sum += *r.measured_rtt_ms;
        ++measured_count;
      }
    }
    report.penalty_total += r.penalty_score;
  }
  report.success_rate = static_cast<double>(report.successful) / static_cast<double>(report.total);
  report.mean_predicted_rtt_ms = predicted_sum / static_cast<double>(report.total);
  report.mean_measured_rtt_ms =
      measured_count > 0 ? measured_sum / static_cast<double>(measured_count) : 0.0;
  return report;
}

}  // namespace offload
