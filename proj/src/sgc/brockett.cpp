#include "sgc/brockett.hpp"

#include <cmath>

namespace sgc::brockett {

double sigma(const Vec3& x) { return std::sqrt(x[0] * x[0] + x[1] * x[1]); }

Vec3 rhs(const Vec3& x, const Vec2& u) {
  return {u[0], u[1], x[0] * u[1] - x[1] * u[0]};
}

double goal_q(const Vec3& x) {
  const double d = sigma(x) - std::abs(x[2]);
  return d * d + x[2] * x[2];
}

const char* branch_name(Branch b) {
  switch (b) {
    case Branch::Origin: return "origin";
    case Branch::PlaneX3Zero: return "plane_x3_zero";
    case Branch::AxisSigmaZero: return "axis_sigma_zero";
    case Branch::Generic: return "generic";
  }
  return "unknown";
}

Branch classify(const Vec3& x, double axis_eps, double plane_eps) {
  const bool on_axis = sigma(x) <= axis_eps;
  const bool on_plane = std::abs(x[2]) <= plane_eps;
  if (on_axis && on_plane) return Branch::Origin;
  if (on_plane) return Branch::PlaneX3Zero;
  if (on_axis) return Branch::AxisSigmaZero;
  return Branch::Generic;
}

double goal_q_dirderiv(const Vec3& x, const Vec3& h) {
  const double s = sigma(x);
  if (s == 0.0) return 4.0 * x[2] * h[2] - 2.0 * std::abs(x[2]) * std::sqrt(h[0] * h[0] + h[1] * h[1]);
  if (x[2] == 0.0) return 2.0 * x[0] * h[0] + 2.0 * x[1] * h[1] - 2.0 * std::abs(h[2]) * s;
  return 2.0 * x[0] * h[0] + 2.0 * x[1] * h[1] + 4.0 * x[2] * h[2] -
         2.0 * std::abs(x[2]) * (x[0] * h[0] + x[1] * h[1]) / s - 2.0 * sgn(x[2]) * s * h[2];
}

std::array<Vec3, 2> superdiff_extreme_points_plane(const Vec3& x) {
  if (x[2] != 0.0)
    throw std::domain_error("superdiff_extreme_points_plane: requires x3 == 0");
  const double s = sigma(x);
  return {Vec3{2.0 * x[0], 2.0 * x[1], 2.0 * s}, Vec3{2.0 * x[0], 2.0 * x[1], -2.0 * s}};
}

namespace {

inline Vec2 default_v() { return {1.0, 0.0}; }

Vec2 axis_direction(const VSelector& v_selector, double x3) {
  if (!v_selector) return default_v();
  const Vec2 v = v_selector(x3);
  if (std::abs(norm2(v) - 1.0) > 1e-9)
    throw std::invalid_argument("v_selector must return a unit vector");
  return v;
}

inline void factored_coeffs(const Vec3& x, double s, double& a, double& b) {
  a = 2.0 * (1.0 - std::abs(x[2]) / s);
  b = 2.0 * sgn(x[2]) * (s - 2.0 * std::abs(x[2]));
}

}  // namespace

GradUOmega grad_u_omega(const Vec3& x, const VSelector& v_selector) {
  const double s = sigma(x);
  if (s == 0.0 && x[2] == 0.0) return {{0.0, 0.0}, Branch::Origin};
  if (x[2] == 0.0) return {{2.0 * x[0], 2.0 * x[1]}, Branch::PlaneX3Zero};
  if (s == 0.0) {
    const Vec2 v = axis_direction(v_selector, x[2]);
    const double c = -2.0 * std::abs(x[2]);
    return {{c * v[0], c * v[1]}, Branch::AxisSigmaZero};
  }
  double a = 0.0, b = 0.0;
  factored_coeffs(x, s, a, b);
  return {{a * x[0] + b * x[1], a * x[1] - b * x[0]}, Branch::Generic};
}

Vec2 grad_u_omega_raw(const Vec3& x) {
  const double s = sigma(x);
  if (s == 0.0 || x[2] == 0.0)
    throw std::domain_error("grad_u_omega_raw: defined only for sigma != 0, x3 != 0");
  const double ax3 = std::abs(x[2]);
  const double sg = sgn(x[2]);
  return {2.0 * x[0] - 4.0 * x[1] * x[2] - 2.0 * ax3 * x[0] / s + 2.0 * sg * x[1] * s,
          2.0 * x[1] + 4.0 * x[0] * x[2] - 2.0 * ax3 * x[1] / s - 2.0 * sg * x[0] * s};
}

Vec2 control(const Vec3& x, const ControllerParams& params) {
  if (!(params.gamma > 0.0)) throw std::invalid_argument("ControllerParams: gamma must be > 0");
  const double s = sigma(x);
  switch (classify(x, params.axis_eps, params.plane_eps)) {
    case Branch::Origin:
      return {0.0, 0.0};
    case Branch::PlaneX3Zero:
      return {-params.gamma * x[0] / s, -params.gamma * x[1] / s};
    case Branch::AxisSigmaZero: {
      const Vec2 v = axis_direction(params.v_selector, x[2]);
      return {params.gamma * v[0], params.gamma * v[1]};
    }
    case Branch::Generic:
    default: {
      double a = 0.0, b = 0.0;
      factored_coeffs(x, s, a, b);
      const Vec2 g{a * x[0] + b * x[1], a * x[1] - b * x[0]};
      const double gn = norm2(g);
      if (gn < 1e-12)
        throw SingularGradientError("speed-gradient vanished on the generic branch");
      return {-params.gamma * g[0] / gn, -params.gamma * g[1] / gn};
    }
  }
}

ReducedRates reduced_rates(const Vec3& x, double gamma) {
  const double s = sigma(x);
  if (s == 0.0 || x[2] == 0.0)
    throw std::domain_error("reduced_rates: defined only on the generic branch");
  double a = 0.0, b = 0.0;
  factored_coeffs(x, s, a, b);
  const double gn = s * std::sqrt(a * a + b * b);
  return {-2.0 * gamma * s * s * (2.0 * x[2] - s) / gn, -2.0 * gamma * (s - x[2]) / gn};
}

}  // namespace sgc::brockett
