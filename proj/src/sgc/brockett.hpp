#pragma once

#include <array>
#include <functional>
#include <stdexcept>

#include "sgc/vec.hpp"

namespace sgc::brockett {

/// State is (x1, x2, x3) with dynamics
///   x1' = u1,  x2' = u2,  x3' = x1 u2 - x2 u1,
/// the nonholonomic integrator. sigma(x) = sqrt(x1^2 + x2^2).
double sigma(const Vec3& x);
Vec3 rhs(const Vec3& x, const Vec2& u);

/// Control-Lyapunov goal Q(x) = (sigma(x) - |x3|)^2 + x3^2.
/// Nonnegative, zero only at the origin, nonsmooth on sigma = 0 and x3 = 0.
double goal_q(const Vec3& x);

/// The four analytic cases of the feedback and of the speed-gradient.
enum class Branch { Origin, PlaneX3Zero, AxisSigmaZero, Generic };
const char* branch_name(Branch b);
Branch classify(const Vec3& x, double axis_eps = 0.0, double plane_eps = 0.0);

/// Hadamard directional derivative Q'(x; h), branch selected by exact zero
/// tests on sigma(x) and x3:
///   generic:    2 x1 h1 + 2 x2 h2 + 4 x3 h3
///               - 2|x3|(x1 h1 + x2 h2)/sigma - 2 sgn(x3) sigma h3
///   x3 = 0:     2 x1 h1 + 2 x2 h2 - 2 |h3| sigma
///   sigma = 0:  4 x3 h3 - 2 |x3| sqrt(h1^2 + h2^2)
double goal_q_dirderiv(const Vec3& x, const Vec3& h);

/// Extreme points of the superdifferential of Q on the plane x3 = 0:
/// (2 x1, 2 x2, +-2 sigma). Their support minimum reproduces Q'(x; h).
std::array<Vec3, 2> superdiff_extreme_points_plane(const Vec3& x);

using VSelector = std::function<Vec2(double)>;  // x3 -> unit 2-vector for the axis case

struct GradUOmega {
  Vec2 g;
  Branch branch;
};

/// Speed-gradient g = grad_u omega(x, u) with its branch. The generic branch
/// uses the factored form
///   a = 2 (1 - |x3|/sigma),  b = 2 sgn(x3) (sigma - 2 |x3|),
///   g = (a x1 + b x2, a x2 - b x1),
/// algebraically equal to the raw partial derivatives but with fewer
/// cancellations; |g|^2 = sigma^2 (a^2 + b^2), and a, b cannot vanish
/// together when x3 != 0, so g != 0 off the axis.
GradUOmega grad_u_omega(const Vec3& x, const VSelector& v_selector = {});

/// Literal transcription of the generic-branch partial derivatives
///   dw/du1 = 2 x1 - 4 x2 x3 - 2 |x3| x1 / sigma + 2 sgn(x3) x2 sigma
///   dw/du2 = 2 x2 + 4 x1 x3 - 2 |x3| x2 / sigma - 2 sgn(x3) x1 sigma.
/// Kept as an independent oracle for the factored form; requires
/// sigma != 0 and x3 != 0.
Vec2 grad_u_omega_raw(const Vec3& x);

struct ControllerParams {
  double gamma = 0.1;
  VSelector v_selector;   // empty: constant (1, 0)
  double axis_eps = 0.0;  // sigma threshold for the axis case (0: exact)
  double plane_eps = 0.0; // |x3| threshold for the plane case (0: exact)
};

/// Normalized-descent feedback, |u| = gamma away from the origin:
///   origin:     (0, 0)
///   x3 = 0:     -gamma (x1, x2) / sigma
///   sigma = 0:  gamma v(x3)
///   generic:    -gamma g / |g|
Vec2 control(const Vec3& x, const ControllerParams& params);

/// A generic-branch |g| collapsed below this threshold; unreachable off the
/// axis, so hitting it indicates a defect upstream.
struct SingularGradientError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ReducedRates {
  double dx3_dt;
  double dsigma_dt;
};

/// Closed-form rates of x3 and sigma along the closed loop, generic branch
/// (stated for x3 > 0):
///   x3'    = -2 gamma sigma^2 (2 x3 - sigma) / |g|
///   sigma' = -2 gamma (sigma - x3) / |g|
ReducedRates reduced_rates(const Vec3& x, double gamma);

}  // namespace sgc::brockett
