#pragma once

// Independent reference models used by the tests. They share no code with
// the library beyond the plain vector types.

#include <array>
#include <cmath>
#include <random>

#include "tws/geometry.hpp"

namespace oracle {

using Mat4 = std::array<std::array<double, 4>, 4>;

inline Mat4 matrix(const tws::Pose& p) {
  const double w = p.orientation.w, x = p.orientation.x, y = p.orientation.y, z = p.orientation.z;
  Mat4 m{};
  m[0] = {1 - 2 * (y * y + z * z), 2 * (x * y - w * z), 2 * (x * z + w * y), p.position.x};
  m[1] = {2 * (x * y + w * z), 1 - 2 * (x * x + z * z), 2 * (y * z - w * x), p.position.y};
  m[2] = {2 * (x * z - w * y), 2 * (y * z + w * x), 1 - 2 * (x * x + y * y), p.position.z};
  m[3] = {0, 0, 0, 1};
  return m;
}

inline Mat4 mul(const Mat4& a, const Mat4& b) {
  Mat4 c{};
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j)
      for (int k = 0; k < 4; ++k) c[i][j] += a[i][k] * b[k][j];
  return c;
}

inline tws::Vec3 apply(const Mat4& m, const tws::Vec3& v) {
  return {m[0][0] * v.x + m[0][1] * v.y + m[0][2] * v.z + m[0][3],
          m[1][0] * v.x + m[1][1] * v.y + m[1][2] * v.z + m[1][3],
          m[2][0] * v.x + m[2][1] * v.y + m[2][2] * v.z + m[2][3]};
}

inline double uniform(std::mt19937_64& rng, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

inline tws::Vec3 random_vec(std::mt19937_64& rng, double r) {
  return {uniform(rng, -r, r), uniform(rng, -r, r), uniform(rng, -r, r)};
}

inline tws::Vec3 random_unit(std::mt19937_64& rng) {
  while (true) {
    const tws::Vec3 v = random_vec(rng, 1.0);
    const double n = tws::norm(v);
    if (n > 0.1 && n <= 1.0) return v / n;
  }
}

inline tws::Quat random_rotation(std::mt19937_64& rng) {
  return tws::Quat::from_axis_angle(random_unit(rng), uniform(rng, -M_PI, M_PI));
}

inline tws::Pose random_pose(std::mt19937_64& rng, double r = 100.0) {
  return {random_vec(rng, r), random_rotation(rng)};
}

/// Elevator model of the cabin by forward Euler on many micro-steps:
/// the cabin moves (g - 1) per unit of walked forward distance, the user
/// walks 1:1 relative to it.
struct Elevator {
  double gain;
  double cabin = 0.0;
  double inside = 0.0;

  void walk(double forward, int substeps) {
    const double h = forward / substeps;
    for (int i = 0; i < substeps; ++i) {
      inside += h;
      cabin += (gain - 1.0) * h;
    }
  }
  double world() const { return cabin + inside; }
};

}  // namespace oracle
