#include "sgc/assumption_scan.hpp"

#include <cmath>
#include <vector>

namespace sgc::sg {

ScanResult scan_assumption4(const GoalGradNorm& eval, const AssumptionScanSpec& spec) {
  if (!eval) throw std::invalid_argument("scan_assumption4: missing evaluator");
  if (!(spec.delta > 0.0)) throw std::invalid_argument("scan_assumption4: delta must be > 0");
  if (!(spec.radius > 0.0)) throw std::invalid_argument("scan_assumption4: radius must be > 0");
  if (spec.resolution < 2)
    throw std::invalid_argument("scan_assumption4: resolution must be >= 2");

  const double R = spec.lattice_radius > 0.0 ? spec.lattice_radius : spec.radius;
  const int n = spec.resolution;
  std::vector<double> ticks(n);
  for (int i = 0; i < n; ++i) ticks[i] = -R + 2.0 * R * static_cast<double>(i) / (n - 1);

  ScanResult result;
  bool found = false;
  const double r2 = spec.radius * spec.radius;
  for (double x1 : ticks) {
    for (double x2 : ticks) {
      for (double x3 : ticks) {
        const Vec3 x{x1, x2, x3};
        if (x1 * x1 + x2 * x2 + x3 * x3 > r2) continue;
        if (spec.excluded && spec.excluded(x)) continue;
        double q = 0.0, gn = 0.0;
        eval(x, q, gn);
        if (q < spec.delta) continue;
        ++result.admissible_count;
        if (!found || gn < result.a_lower_bound) {
          result.a_lower_bound = gn;
          result.argmin = x;
          found = true;
        }
      }
    }
  }
  if (!found)
    throw EmptyRegionError("no grid point satisfies Q >= delta, |x| <= radius outside C");
  return result;
}

}  // namespace sgc::sg
