#pragma once

#include <array>
#include <cmath>

namespace poseplace {

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kTwoPi = 2.0 * kPi;

struct Vec3 {
  double x = 0.0, y = 0.0, z = 0.0;
};

inline Vec3 operator+(Vec3 a, Vec3 b) { return {a.x + b.x, a.y + b.y, a.z + b.z}; }
inline Vec3 operator-(Vec3 a, Vec3 b) { return {a.x - b.x, a.y - b.y, a.z - b.z}; }
inline Vec3 operator*(double s, Vec3 v) { return {s * v.x, s * v.y, s * v.z}; }
inline bool operator==(Vec3 a, Vec3 b) { return a.x == b.x && a.y == b.y && a.z == b.z; }

inline double dot(Vec3 a, Vec3 b) { return a.x * b.x + a.y * b.y + a.z * b.z; }
inline double norm(Vec3 v) { return std::sqrt(dot(v, v)); }
inline double horizontal_norm(Vec3 v) { return std::hypot(v.x, v.y); }

// Wraps to (-pi, pi]; -pi maps to pi.
inline double wrap_pi(double a) {
  double w = std::fmod(a + kPi, kTwoPi);
  if (w <= 0.0) w += kTwoPi;
  return w - kPi;
}

// Wraps to [0, 2*pi).
inline double wrap_two_pi(double a) {
  double w = std::fmod(a, kTwoPi);
  if (w < 0.0) w += kTwoPi;
  return w;
}

// Absolute circular distance in [0, pi].
inline double circular_distance(double a, double b) { return std::abs(wrap_pi(a - b)); }

// Rotates (x, y) by yaw about the z axis.
inline void rotate_xy(double yaw, double& x, double& y) {
  const double c = std::cos(yaw), s = std::sin(yaw);
  const double rx = c * x - s * y;
  y = s * x + c * y;
  x = rx;
}

inline Vec3 rotate_z(double yaw, Vec3 v) {
  rotate_xy(yaw, v.x, v.y);
  return v;
}

// Box with yaw rotation about the vertical axis through its center.
struct OrientedBox {
  Vec3 center;
  Vec3 size;    // full extents, all positive
  double yaw = 0.0;

  double z_lo() const { return center.z - 0.5 * size.z; }
  double z_hi() const { return center.z + 0.5 * size.z; }
  double top() const { return z_hi(); }

  // Footprint corners in world xy, counterclockwise.
  std::array<std::array<double, 2>, 4> footprint_corners() const;

  // True when the world point projects inside the (closed) footprint.
  bool contains_xy(double x, double y) const;
};

// Strictly positive volume intersection; touching faces do not collide.
bool check_collision(const OrientedBox& a, const OrientedBox& b);

}  // namespace poseplace
