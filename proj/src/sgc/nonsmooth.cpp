#include "sgc/nonsmooth.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "sgc/vec.hpp"

namespace sgc::nonsmooth {

FdNonConvergence::FdNonConvergence(double spread_)
    : std::runtime_error("difference quotients did not converge (spread " +
                         std::to_string(spread_) + ")"),
      spread(spread_) {}

namespace {

void validate_schedule(const FdSchedule& sched) {
  const std::size_t min_size = sched.richardson ? 3 : 2;
  if (sched.alphas.size() < min_size)
    throw std::invalid_argument("FdSchedule: need at least " + std::to_string(min_size) +
                                " step sizes");
  double prev = std::numeric_limits<double>::infinity();
  for (double a : sched.alphas) {
    if (!(a > 0.0) || !(a < prev))
      throw std::invalid_argument("FdSchedule: alphas must be strictly decreasing and > 0");
    prev = a;
  }
  if (!(sched.rel_tol > 0.0)) throw std::invalid_argument("FdSchedule: rel_tol must be > 0");
}

}  // namespace

double fd_directional_derivative(const ScalarField& f, std::span<const double> x,
                                 std::span<const double> h, const FdSchedule& sched) {
  validate_schedule(sched);
  if (x.size() != h.size())
    throw std::invalid_argument("fd_directional_derivative: dimension mismatch");
  if (!all_finite(h)) throw std::invalid_argument("fd_directional_derivative: non-finite h");

  const double fx = f(x);
  if (!std::isfinite(fx)) throw FdEvaluationError("f(x) is not finite");

  std::vector<double> probe(x.begin(), x.end());
  std::vector<double> quotients;
  quotients.reserve(sched.alphas.size());
  for (double a : sched.alphas) {
    for (std::size_t i = 0; i < probe.size(); ++i) probe[i] = x[i] + a * h[i];
    const double fa = f(probe);
    if (!std::isfinite(fa)) throw FdEvaluationError("f(x + a h) is not finite");
    quotients.push_back((fa - fx) / a);
  }

  std::vector<double> estimates;
  if (sched.richardson) {
    // One-sided quotients expand in integer powers of the step, so Neville
    // extrapolation of (alpha_i, D_i) to alpha = 0 removes them order by
    // order; the diagonal holds successively higher-order estimates.
    const std::size_t n = quotients.size();
    std::vector<double> row = quotients;
    estimates.push_back(row.back());
    for (std::size_t j = 1; j < n; ++j) {
      for (std::size_t i = n - 1; i >= j; --i) {
        const double a_hi = sched.alphas[i - j];
        const double a_lo = sched.alphas[i];
        row[i] = (a_hi * row[i] - a_lo * row[i - 1]) / (a_hi - a_lo);
      }
      estimates.push_back(row.back());
    }
  } else {
    estimates = quotients;
  }

  const double last = estimates.back();
  const double spread = std::abs(last - estimates[estimates.size() - 2]);
  if (spread > sched.rel_tol * (1.0 + std::abs(last))) throw FdNonConvergence(spread);
  return last;
}

double support_min(std::span<const std::vector<double>> vertices, std::span<const double> h) {
  if (vertices.empty()) throw std::invalid_argument("support_min: empty vertex set");
  if (!all_finite(h)) throw std::invalid_argument("support_min: non-finite direction");
  double best = std::numeric_limits<double>::infinity();
  for (const auto& v : vertices) {
    if (v.size() != h.size()) throw std::invalid_argument("support_min: dimension mismatch");
    if (!all_finite(v)) throw std::invalid_argument("support_min: non-finite vertex");
    best = std::min(best, dot(v, h));
  }
  return best;
}

}  // namespace sgc::nonsmooth
