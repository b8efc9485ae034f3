#pragma once

#include <map>
#include <string>

#include "offload/domain.hpp"
#include "offload/simulator.hpp"

namespace offload {

// Criticality-dependent acceptance: a measured RTT within
// max_rtt * tolerance_factor counts as successful; beyond it, the decision is
// incorrect and accrues a penalty proportional to the overshoot.
struct OutcomePolicy {
  struct Level {
    double tolerance_factor = 1.0;  // multiplier on max_rtt, >= 1
    double penalty_weight = 1.0;    // >= 0
    friend bool operator==(const Level&, const Level&) = default;
  };

  Level high{1.0, 3.0};
  Level medium{1.1, 2.0};
  Level low{1.25, 1.0};

  OutcomePolicy() = default;
  OutcomePolicy(Level high, Level medium, Level low);

  const Level& level(Criticality c) const;

  friend bool operator==(const OutcomePolicy&, const OutcomePolicy&) = default;
};

// Label a completed decision. Inclusive boundary: measured exactly at the
// tolerated limit is still successful. Timeouts are always incorrect.
// Idempotent; throws if the record has no measurement yet.
DecisionRecord classify(const DecisionRecord& record, const OutcomePolicy& policy);

struct TraceReport {
  std::size_t total = 0;
  std::size_t successful = 0;
  std::size_t incorrect = 0;
  std::size_t timeouts = 0;
  double success_rate = 0.0;
  std::map<std::string, std::size_t> per_target;  // "local" or server id
  double mean_predicted_rtt_ms = 0.0;
  double mean_measured_rtt_ms = 0.0;  // timeouts excluded from the mean
  double penalty_total = 0.0;

  friend bool operator==(const TraceReport&, const TraceReport&) = default;
};

// Aggregate statistics over a fully classified trace; throws on an empty
// trace or on unclassified records.
TraceReport trace_report(const DecisionTrace& trace, const OutcomePolicy& policy);

}  // namespace offload
