#pragma once

#include <cmath>

namespace molsmooth {

struct Vec3 {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;

  constexpr double& operator[](int c) noexcept { return c == 0 ? x : (c == 1 ? y : z); }
  constexpr double operator[](int c) const noexcept { return c == 0 ? x : (c == 1 ? y : z); }

  friend constexpr Vec3 operator+(Vec3 a, Vec3 b) noexcept { return {a.x + b.x, a.y + b.y, a.z + b.z}; }
  friend constexpr Vec3 operator-(Vec3 a, Vec3 b) noexcept { return {a.x - b.x, a.y - b.y, a.z - b.z}; }
  friend constexpr Vec3 operator*(double s, Vec3 a) noexcept { return {s * a.x, s * a.y, s * a.z}; }
  friend constexpr bool operator==(Vec3, Vec3) noexcept = default;
};

constexpr double dot(Vec3 a, Vec3 b) noexcept { return a.x * b.x + a.y * b.y + a.z * b.z; }
inline double norm(Vec3 a) noexcept { return std::sqrt(dot(a, a)); }

inline Vec3 normalized(Vec3 a) noexcept {
  const double n = norm(a);
  return n > 0.0 ? (1.0 / n) * a : a;
}

/// Axis-aligned scene volume in scene units.
struct Box {
  Vec3 min{0.0, 0.0, 0.0};
  Vec3 max{16.0, 9.0, 4.0};

  constexpr Vec3 extent() const noexcept { return max - min; }
  constexpr Vec3 center() const noexcept { return 0.5 * (min + max); }

  /// Affine map from the unit cube onto the box.
  constexpr Vec3 from_unit(Vec3 u) const noexcept {
    return {min.x + u.x * (max.x - min.x), min.y + u.y * (max.y - min.y),
            min.z + u.z * (max.z - min.z)};
  }

  constexpr bool contains(Vec3 p) const noexcept {
    return p.x >= min.x && p.x <= max.x && p.y >= min.y && p.y <= max.y && p.z >= min.z &&
           p.z <= max.z;
  }
};

}  // namespace molsmooth
