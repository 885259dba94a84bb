#pragma once

#include <functional>
#include <span>
#include <vector>

namespace sgc::sg {

enum class DescentMode { Normalized, Raw, Custom };

/// Goal value together with the speed-gradient g (the gradient in u of the
/// goal-rate bound) and the analytic branch that produced g. Branch ids are
/// plant-defined.
struct GoalEvaluation {
  double q = 0.0;
  std::vector<double> g;
  int branch = 0;
};

/// The finite-form pseudogradient law u = gamma * psi.
///
/// Normalized mode realizes psi = -g/|g|, so |u| = gamma whenever g != 0.
/// Raw mode is psi = -g. Custom mode evaluates a plant-supplied psi, which
/// must satisfy the acute-angle condition g . psi <= 0.
struct PseudogradientLaw {
  double gamma = 0.1;
  DescentMode mode = DescentMode::Normalized;
  std::vector<double> zero_policy;  // control when g = 0; empty means the zero vector
  std::function<std::vector<double>(const GoalEvaluation&)> custom_psi;
};

std::vector<double> control_from_gradient(const GoalEvaluation& eval,
                                          const PseudogradientLaw& law);

/// g . psi. Callers assert <= 0; with rho(s) = s the shipped plants satisfy
/// g . psi = -|g| exactly.
double acute_angle_residual(std::span<const double> g, std::span<const double> psi);

struct DecreaseReport {
  double max_violation = 0.0;
  std::vector<double> violation_times;
};

/// Flags every sample index where the goal increased by more than tol.
DecreaseReport monitor_decrease(std::span<const double> qs, std::span<const double> ts,
                                double tol);

}  // namespace sgc::sg
