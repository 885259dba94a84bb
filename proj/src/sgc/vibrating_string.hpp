#pragma once

#include "sgc/vec.hpp"

namespace sgc::vibstring {

/// Single transverse mode of an undamped string with stiffening:
///   q' = p,  p' = -omega0^2 (1 + K (q1^2 + q2^2)) q + u,
/// state s = (q1, q2, p1, p2).
struct Params {
  double omega0 = 1.0;  // natural frequency
  double K = 1.0;       // nonlinear stiffness
  double gamma = 0.5;   // control gain
  double h_star = 0.0;  // target energy, >= 0
};

/// H = |p|^2/2 + omega0^2 |q|^2 / 2 + omega0^2 K |q|^4 / 4.
double hamiltonian(const Vec4& s, const Params& p);

Vec4 rhs(const Vec4& s, const Vec2& u, const Params& p);

/// Energy goal |H - H*|.
double goal(const Vec4& s, const Params& p);

/// Sign-switching energy law u = -gamma sgn(H - H*) p with sgn(0) = 0.
/// Along the closed loop dH/dt = -gamma sgn(H - H*) |p|^2.
Vec2 control(const Vec4& s, const Params& p);

/// Raw speed-gradient law for the smooth goal (H - H*)^2 / 2, shipped for
/// comparison runs: u = -gamma (H - H*) p.
Vec2 control_smooth(const Vec4& s, const Params& p);

}  // namespace sgc::vibstring
