#pragma once

#include <optional>

#include "offload/domain.hpp"
#include "offload/vec2.hpp"

namespace offload {

// Relative weighting of the two spatial penalties. `scale_ms` converts a full
// unit penalty into milliseconds so penalties can be added to predicted RTTs.
struct PenaltyWeights {
  double w_direction = 0.625;
  double w_distance = 0.375;
  double scale_ms = 100.0;

  PenaltyWeights() = default;
  PenaltyWeights(double w_direction, double w_distance, double scale_ms);

  friend bool operator==(const PenaltyWeights&, const PenaltyWeights&) = default;
};

// Raw penalty term: 1 + cos(angle between vehicle heading and server bearing).
// Range [0, 2]; 2 when heading straight at the server. Throws on zero-length
// input ("undefined direction").
double direction_penalty(Vec2 vehicle_dir, Vec2 to_server);

// Weighted directional cost in milliseconds: 0 when moving straight toward the
// server, w_direction * scale_ms when moving straight away. A stationary
// vehicle has no directional preference, so its cost is 0.
double direction_cost(const VehicleState& vehicle, const ServerDescriptor& server,
                      const PenaltyWeights& weights);

// Weighted distance cost in milliseconds, normalized by the server's own
// communication range; nullopt when the vehicle is out of range.
std::optional<double> distance_cost(const VehicleState& vehicle, const ServerDescriptor& server,
                                    const PenaltyWeights& weights);

// Time in milliseconds until the vehicle leaves the server's communication
// circle under straight-line constant-velocity extrapolation. Infinity for a
// stationary vehicle. Throws if the vehicle is outside the range already.
double stay_time_ms(const VehicleState& vehicle, const ServerDescriptor& server);

}  // namespace offload
