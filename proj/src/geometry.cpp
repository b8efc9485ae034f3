#include "offload/geometry.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace offload {

PenaltyWeights::PenaltyWeights(double w_direction_, double w_distance_, double scale_ms_)
    : w_direction(w_direction_), w_distance(w_distance_), scale_ms(scale_ms_) {
  if (w_direction < 0.0 || w_direction > 1.0) {
    throw std::invalid_argument("w_direction must be within [0, 1]");
  }
  if (w_distance < 0.0 || w_distance > 1.0) {
    throw std::invalid_argument("w_distance must be within [0, 1]");
  }
  if (w_direction + w_distance > 1.0) {
    throw std::invalid_argument("w_direction + w_distance must be <= 1");
  }
  if (scale_ms < 0.0) {
    throw std::invalid_argument("scale_ms must be >= 0");
  }
}

double direction_penalty(Vec2 vehicle_dir, Vec2 to_server) {
  return 1.0 + cosine_similarity(vehicle_dir, to_server);
}

double direction_cost(const VehicleState& vehicle, const ServerDescriptor& server,
                      const PenaltyWeights& weights) {
  if (vehicle.speed_mps == 0.0) {
    return 0.0;
  }
  // (1 - cos)/2 rescales the penalty so that heading at the server is free and
  // heading away costs the full weighted scale.
  const double cos_sim = cosine_similarity(vehicle.direction, server.position - vehicle.position);
  return weights.w_direction * weights.scale_ms * (1.0 - cos_sim) / 2.0;
}

std::optional<double> distance_cost(const VehicleState& vehicle, const ServerDescriptor& server,
                                    const PenaltyWeights& weights) {
  const double d = distance(vehicle.position, server.position);
  if (d > server.comm_range_m) {
    return std::nullopt;
  }
  return weights.w_distance * weights.scale_ms * (d / server.comm_range_m);
}

double stay_time_ms(const VehicleState& vehicle, const ServerDescriptor& server) {
  const Vec2 w = server.position - vehicle.position;
  const double d = norm(w);
  if (d > server.comm_range_m) {
    throw std::invalid_argument("not in range: vehicle is outside the server's communication range");
  }
  if (vehicle.speed_mps == 0.0) {
    return std::numeric_limits<double>::infinity();
  }
  // Chord geometry: project the server offset onto the heading, then extend to
  // the circle boundary.
  const double along = dot(w, vehicle.direction);
  const double perp_sq = std::max(0.0, d * d - along * along);
  const double half_chord_sq = server.comm_range_m * server.comm_range_m - perp_sq;
  const double remaining_m = along + std::sqrt(std::max(0.0, half_chord_sq));
  return remaining_m / vehicle.speed_mps * 1000.0;
}

}  // namespace offload
