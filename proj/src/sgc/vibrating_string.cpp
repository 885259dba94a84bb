#include "sgc/vibrating_string.hpp"

#include <cmath>
#include <stdexcept>

namespace sgc::vibstring {

namespace {

void validate(const Params& p) {
  if (!(p.omega0 > 0.0) || !(p.K > 0.0) || !(p.gamma > 0.0) || !(p.h_star >= 0.0))
    throw std::invalid_argument(
        "vibstring::Params: require omega0 > 0, K > 0, gamma > 0, h_star >= 0");
}

}  // namespace

double hamiltonian(const Vec4& s, const Params& p) {
  validate(p);
  const double q2 = s[0] * s[0] + s[1] * s[1];
  const double p2 = s[2] * s[2] + s[3] * s[3];
  const double w2 = p.omega0 * p.omega0;
  return 0.5 * p2 + 0.5 * w2 * q2 + 0.25 * w2 * p.K * q2 * q2;
}

Vec4 rhs(const Vec4& s, const Vec2& u, const Params& p) {
  validate(p);
  const double stiff = p.omega0 * p.omega0 * (1.0 + p.K * (s[0] * s[0] + s[1] * s[1]));
  return {s[2], s[3], -stiff * s[0] + u[0], -stiff * s[1] + u[1]};
}

double goal(const Vec4& s, const Params& p) { return std::abs(hamiltonian(s, p) - p.h_star); }

Vec2 control(const Vec4& s, const Params& p) {
  const double sw = sgn(hamiltonian(s, p) - p.h_star);
  return {-p.gamma * sw * s[2], -p.gamma * sw * s[3]};
}

Vec2 control_smooth(const Vec4& s, const Params& p) {
  const double e = hamiltonian(s, p) - p.h_star;
  return {-p.gamma * e * s[2], -p.gamma * e * s[3]};
}

}  // namespace sgc::vibstring
