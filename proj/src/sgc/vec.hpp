#pragma once

#include <array>
#include <cmath>
#include <span>

namespace sgc {

using Vec2 = std::array<double, 2>;
using Vec3 = std::array<double, 3>;
using Vec4 = std::array<double, 4>;

inline double norm2(const Vec2& v) { return std::sqrt(v[0] * v[0] + v[1] * v[1]); }
inline double norm3(const Vec3& v) {
  return std::sqrt(v[0] * v[0] + v[1] * v[1] + v[2] * v[2]);
}

inline double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

inline double norm(std::span<const double> v) { return std::sqrt(dot(v, v)); }

inline bool all_finite(std::span<const double> v) {
  for (double x : v)
    if (!std::isfinite(x)) return false;
  return true;
}

/// Sign with sgn(0) = 0.
inline double sgn(double x) { return (x > 0.0) - (x < 0.0); }

}  // namespace sgc
