#include "sgc/speed_gradient.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "sgc/errors.hpp"
#include "sgc/vec.hpp"

namespace sgc::sg {

std::vector<double> control_from_gradient(const GoalEvaluation& eval,
                                          const PseudogradientLaw& law) {
  if (!(law.gamma > 0.0)) throw std::invalid_argument("PseudogradientLaw: gamma must be > 0");
  if (!all_finite(eval.g)) throw std::invalid_argument("control_from_gradient: non-finite g");
  const std::size_t m = eval.g.size();

  if (law.mode == DescentMode::Custom) {
    if (!law.custom_psi)
      throw std::invalid_argument("control_from_gradient: custom mode without custom_psi");
    std::vector<double> psi = law.custom_psi(eval);
    if (psi.size() != m)
      throw ContractViolation("custom psi returned a vector of wrong dimension");
    if (acute_angle_residual(eval.g, psi) > 0.0)
      throw ContractViolation("custom psi violates the acute-angle condition g . psi <= 0");
    for (double& c : psi) c *= law.gamma;
    return psi;
  }

  const double gn = norm(eval.g);
  std::vector<double> u(m, 0.0);
  if (law.mode == DescentMode::Raw) {
    for (std::size_t i = 0; i < m; ++i) u[i] = -law.gamma * eval.g[i];
    return u;
  }
  // Normalized descent.
  if (gn == 0.0) {
    if (!law.zero_policy.empty()) {
      if (law.zero_policy.size() != m)
        throw std::invalid_argument("zero_policy has wrong dimension");
      return law.zero_policy;
    }
    return u;
  }
  for (std::size_t i = 0; i < m; ++i) u[i] = -law.gamma * eval.g[i] / gn;
  return u;
}

double acute_angle_residual(std::span<const double> g, std::span<const double> psi) {
  if (g.size() != psi.size())
    throw std::invalid_argument("acute_angle_residual: dimension mismatch");
  if (!all_finite(g) || !all_finite(psi))
    throw std::invalid_argument("acute_angle_residual: non-finite input");
  return dot(g, psi);
}

DecreaseReport monitor_decrease(std::span<const double> qs, std::span<const double> ts,
                                double tol) {
  if (qs.size() != ts.size()) throw std::invalid_argument("monitor_decrease: length mismatch");
  for (std::size_t i = 1; i < ts.size(); ++i)
    if (!(ts[i] > ts[i - 1]))
      throw std::invalid_argument("monitor_decrease: timestamps must be strictly increasing");
  DecreaseReport report;
  for (std::size_t i = 1; i < qs.size(); ++i) {
    const double jump = qs[i] - qs[i - 1];
    if (jump > tol) {
      report.violation_times.push_back(ts[i]);
      report.max_violation = std::max(report.max_violation, jump);
    }
  }
  return report;
}

}  // namespace sgc::sg
