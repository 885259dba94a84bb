#pragma once

#include <functional>
#include <span>
#include <stdexcept>
#include <vector>

namespace sgc::nonsmooth {

using ScalarField = std::function<double(std::span<const double>)>;

/// Step schedule for the one-sided quotients (f(x + a h) - f(x)) / a.
///
/// One-sided only: the directional derivative is a right-hand limit in the
/// step, and two-sided quotients are wrong on kinks. With `richardson` the
/// leading O(a) truncation term is eliminated pairwise before the
/// convergence test is applied.
struct FdSchedule {
  std::vector<double> alphas{1e-2, 1e-3, 1e-4, 1e-5};  // strictly decreasing, all > 0
  bool richardson = true;
  double rel_tol = 1e-6;
};

/// Difference quotients failed to settle; `spread` is the gap between the
/// last two estimates.
struct FdNonConvergence : std::runtime_error {
  double spread;
  explicit FdNonConvergence(double spread_);
};

/// f returned a non-finite value at some probe point.
struct FdEvaluationError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Numeric directional derivative f'(x; h) as the limit of one-sided
/// difference quotients over the schedule. Directions are used as given,
/// never normalized.
double fd_directional_derivative(const ScalarField& f, std::span<const double> x,
                                 std::span<const double> h, const FdSchedule& sched = {});

/// min over the vertex set of v . h. This equals the directional derivative
/// of a function whose superdifferential is the convex hull of `vertices`:
/// a linear function attains its minimum over a polytope at a vertex.
double support_min(std::span<const std::vector<double>> vertices, std::span<const double> h);

}  // namespace sgc::nonsmooth
