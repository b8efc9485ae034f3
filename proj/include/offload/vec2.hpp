#pragma once

#include <cmath>
#include <stdexcept>

namespace offload {

// Planar point/vector in meters. All geometry in this project is 2-D Cartesian.
struct Vec2 {
  double x = 0.0;
  double y = 0.0;

  friend constexpr Vec2 operator+(Vec2 a, Vec2 b) { return {a.x + b.x, a.y + b.y}; }
  friend constexpr Vec2 operator-(Vec2 a, Vec2 b) { return {a.x - b.x, a.y - b.y}; }
  friend constexpr Vec2 operator*(double s, Vec2 v) { return {s * v.x, s * v.y}; }
  friend constexpr Vec2 operator*(Vec2 v, double s) { return {s * v.x, s * v.y}; }
  friend constexpr bool operator==(Vec2 a, Vec2 b) { return a.x == b.x && a.y == b.y; }
};

constexpr double dot(Vec2 a, Vec2 b) { return a.x * b.x + a.y * b.y; }

inline double norm(Vec2 v) { return std::hypot(v.x, v.y); }

inline double distance(Vec2 a, Vec2 b) { return norm(a - b); }

inline Vec2 normalized(Vec2 v) {
  const double n = norm(v);
  if (n == 0.0) {
    throw std::invalid_argument("cannot normalize zero-length vector");
  }
  return {v.x / n, v.y / n};
}

// Cosine of the angle between two nonzero vectors.
inline double cosine_similarity(Vec2 a, Vec2 b) {
  const double na = norm(a);
  const double nb = norm(b);
  if (na == 0.0 || nb == 0.0) {
    throw std::invalid_argument("undefined direction: zero-length vector");
  }
  return dot(a, b) / (na * nb);
}

}  // namespace offload
