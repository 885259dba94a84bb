#pragma once

#include <functional>
#include <stdexcept>

#include "sgc/vec.hpp"

namespace sgc::sg {

/// Grid scan certifying the nonvanishing-gradient assumption: a positive
/// lower bound a with |g(x)| >= a on {Q >= delta, |x| <= radius} minus the
/// excluded set C.
///
/// The lattice spans [-lattice_radius, lattice_radius] per axis with
/// `resolution` points; the admissible region is the Euclidean ball of
/// `radius`. By default lattice_radius == radius. Pinning the lattice while
/// varying radius/delta makes the bound monotone by set inclusion, which is
/// how the monotonicity suite uses it.
struct AssumptionScanSpec {
  double delta = 0.1;
  double radius = 1.0;
  int resolution = 41;            // points per axis, >= 2
  double lattice_radius = 0.0;    // <= 0: use radius
  std::function<bool(const Vec3&)> excluded;  // membership test for the set C
};

struct ScanResult {
  double a_lower_bound = 0.0;
  Vec3 argmin{0.0, 0.0, 0.0};
  long admissible_count = 0;
};

struct EmptyRegionError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Evaluator fills the goal value and |g| at a grid point.
using GoalGradNorm = std::function<void(const Vec3& x, double& q, double& g_norm)>;

ScanResult scan_assumption4(const GoalGradNorm& eval, const AssumptionScanSpec& spec);

}  // namespace sgc::sg
