// Acceptance suite: end-to-end checks of the toolkit's guarantees, one
// pass/fail line each. Exits nonzero when any criterion fails.

#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "sgc/brockett.hpp"
#include "sgc/experiment.hpp"
#include "sgc/nonsmooth.hpp"
#include "sgc/sim_engine.hpp"
#include "sgc/vec.hpp"
#include "sgc/vibrating_string.hpp"

using namespace sgc;
namespace fs = std::filesystem;

namespace {

const fs::path kConfigDir{SGC_CONFIG_DIR};
int g_failures = 0;

void report(const char* name, bool passed, const std::string& detail) {
  std::printf("[%s] %s: %s\n", passed ? "PASS" : "FAIL", name, detail.c_str());
  if (!passed) ++g_failures;
}

run::ExperimentConfig load_cfg(const char* name) {
  return run::build_experiment_config(run::ConfigSource::parse_file(kConfigDir / name));
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

fs::path fresh_dir(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / "sgc_acceptance" / name;
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string fmt(const char* f, ...) {
  char buf[512];
  va_list args;
  va_start(args, f);
  std::vsnprintf(buf, sizeof(buf), f, args);
  va_end(args);
  return buf;
}

// -------------------------------------------------------------------------

void c1_reference_run() {
  const auto cfg = load_cfg("brockett_paper.cfg");
  const auto t0 = std::chrono::steady_clock::now();
  const auto rep = run::run_experiment_in_memory(cfg);
  const double secs =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

  const bool converged = rep.termination == sim::Termination::Converged &&
                         rep.final_goal < 1e-10 && rep.convergence_time <= 100.0;
  const bool monotone = rep.decrease_violations == 0;
  const bool norm_ok = std::abs(rep.max_control_norm - 0.1) <= 1e-12 &&
                       std::abs(rep.min_control_norm - 0.1) <= 1e-12;
  const bool fast = secs < 5.0;
  report("c1_reference_run", converged && monotone && norm_ok && fast,
         fmt("termination=%s final_goal=%.3e (target < 1e-10 by t=100) | decrease "
             "violations=%ld (tol 1e-6) | max||u|-0.1|=%.2e (tol 1e-12) | runtime=%.2fs "
             "(< 5 s)",
             sim::termination_name(rep.termination), rep.final_goal, rep.decrease_violations,
             std::max(std::abs(rep.max_control_norm - 0.1),
                      std::abs(rep.min_control_norm - 0.1)),
             secs));
}

void c2_plane_closed_form() {
  const auto rep1 = run::run_experiment_in_memory(load_cfg("brockett_plane.cfg"));
  auto halved = run::ConfigSource::parse_file(kConfigDir / "brockett_plane.cfg");
  halved.set("gamma", "0.05");
  halved.set("t_max", "40");
  const auto rep2 = run::run_experiment_in_memory(run::build_experiment_config(halved));
  const bool ok1 = rep1.termination == sim::Termination::Converged &&
                   std::abs(rep1.convergence_time - 10.0) <= 0.01;
  const bool ok2 = rep2.termination == sim::Termination::Converged &&
                   std::abs(rep2.convergence_time - 20.0) <= 0.02;
  report("c2_plane_closed_form", ok1 && ok2,
         fmt("T(gamma=0.1)=%.5f (10 +- 0.01), T(gamma=0.05)=%.5f (20 +- 0.02)",
             rep1.convergence_time, rep2.convergence_time));
}

void c3_no_switch() {
  std::mt19937_64 rng(20270809);
  std::normal_distribution<double> gauss;
  std::uniform_real_distribution<double> unif;
  const double gamma = 0.1, dt = 1e-3;
  const double jump_bound = 10.0 * gamma * dt;
  int count = 0, switched = 0, nonconv = 0;
  double max_jump = 0.0;
  while (count < 100) {
    Vec3 x;
    double n;
    do {
      x = {gauss(rng), gauss(rng), gauss(rng)};
      n = norm3(x);
    } while (n == 0.0);
    const double r = std::cbrt(unif(rng));
    for (auto& c : x) c *= r / n;
    if (brockett::sigma(x) < 0.05) continue;
    ++count;
    run::ExperimentConfig cfg;
    cfg.label = "no_switch";
    cfg.plant = run::Plant::Brockett;
    cfg.gamma = gamma;
    cfg.x0_brockett = x;
    cfg.dt = dt;
    cfg.t_max = 80.0;
    cfg.q_stop = 4e-4;  // origin neighborhood at sigma ~ 0.02
    cfg.record_stride = 1;
    sim::Trajectory traj;
    const auto rep = run::run_experiment_in_memory(cfg, &traj);
    if (rep.termination != sim::Termination::Converged) ++nonconv;
    const auto tag0 =
        brockett::classify({traj.samples[0].x[0], traj.samples[0].x[1], traj.samples[0].x[2]});
    for (const auto& s : traj.samples) {
      if (!std::isnan(rep.convergence_time) && !(s.t < rep.convergence_time)) break;
      if (brockett::classify({s.x[0], s.x[1], s.x[2]}) != tag0) {
        ++switched;
        break;
      }
    }
    max_jump = std::max(max_jump, rep.max_control_jump);
  }
  const bool ok = nonconv == 0 && switched == 0 && max_jump <= jump_bound;
  report("c3_no_switch", ok,
         fmt("100 runs: nonconverged=%d, branch switches=%d, max control jump=%.4e "
             "(bound 10*gamma*dt=%.1e)",
             nonconv, switched, max_jump, jump_bound));
}

void c4_gradient_identities() {
  // factored vs raw partial derivatives
  std::mt19937_64 rng(77);
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  double worst_rel = 0.0;
  int n = 0;
  while (n < 10000) {
    const Vec3 x{u(rng), u(rng), u(rng)};
    if (brockett::sigma(x) == 0.0 || x[2] == 0.0) continue;
    ++n;
    const Vec2 gf = brockett::grad_u_omega(x).g;
    const Vec2 gr = brockett::grad_u_omega_raw(x);
    const double diff = std::hypot(gf[0] - gr[0], gf[1] - gr[1]);
    const double scale = norm2(gr);
    if (scale > 0.0) worst_rel = std::max(worst_rel, diff / scale);
  }

  // analytic directional derivative vs the one-sided quotient oracle; the
  // probe segment [x, x + 1e-2 h] must stay on one smooth piece, so pairs
  // whose ray crosses the x3 = 0 kink (or hugs the axis) are redrawn
  auto q_field = [](std::span<const double> x) {
    return brockett::goal_q({x[0], x[1], x[2]});
  };
  std::uniform_real_distribution<double> uh(-1.0, 1.0);
  double worst_fd = 0.0;
  for (int branch = 0; branch < 3; ++branch) {
    int done = 0;
    while (done < 1000) {
      Vec3 x{u(rng), u(rng), u(rng)};
      if (branch == 1) x[2] = 0.0;
      if (branch == 2) x[0] = x[1] = 0.0;
      if (branch != 2 && brockett::sigma(x) == 0.0) x[0] = 0.5;
      if (branch == 2 && x[2] == 0.0) x[2] = 0.5;
      const Vec3 h{uh(rng), uh(rng), uh(rng)};
      if (x[2] != 0.0 && h[2] != 0.0 && sgn(x[2] + 1e-2 * h[2]) != sgn(x[2])) continue;
      if (branch != 2 && brockett::sigma(x) < 0.05) continue;
      const double analytic = brockett::goal_q_dirderiv(x, h);
      const double fd = nonsmooth::fd_directional_derivative(q_field, x, h);
      worst_fd = std::max(worst_fd, std::abs(fd - analytic));
      ++done;
    }
  }
  const bool ok = worst_rel <= 1e-12 && worst_fd <= 1e-6;
  report("c4_gradient_identities", ok,
         fmt("factored vs raw rel diff=%.3e (tol 1e-12, 10^4 points); analytic vs "
             "finite-difference=%.3e (tol 1e-6, 3x10^3 pairs)",
             worst_rel, worst_fd));
}

void c5_reduced_rates_oracle() {
  run::ExperimentConfig cfg;
  cfg.label = "reduced_rates";
  cfg.plant = run::Plant::Brockett;
  cfg.gamma = 0.1;
  cfg.x0_brockett = {0.2, 0.2, 0.2};
  cfg.dt = 1e-4;  // finite differences at spacing 1e-4
  cfg.t_max = 30.0;
  cfg.q_stop = 1e-10;
  cfg.record_stride = 100;
  cfg.checks = {run::Check::ReducedRates};
  const auto rep = run::run_experiment_in_memory(cfg);
  const bool ok = !std::isnan(rep.max_reduced_rate_error) &&
                  rep.max_reduced_rate_error <= 1e-6 && rep.checks.size() == 1 &&
                  rep.checks[0].passed;
  report("c5_reduced_rates_oracle", ok,
         fmt("max |finite-difference - closed-form| over x3' and sigma' = %.3e (tol 1e-6, "
             "spacing 1e-4, window t <= 30 where the step resolves the cone relaxation)",
             rep.max_reduced_rate_error));
}

void c6_assumption_scan() {
  auto bound = [](double delta, double radius, double lattice) {
    sg::AssumptionScanSpec spec;
    spec.delta = delta;
    spec.radius = radius;
    spec.resolution = 41;
    spec.lattice_radius = lattice;
    return run::scan_brockett(spec).a_lower_bound;
  };
  const double a_ref = bound(0.1, 2.0, 0.0);
  // monotonicity on the shared lattice spanning the largest ball
  const double s_05_1 = bound(0.05, 1.0, 2.0);
  const double s_05_2 = bound(0.05, 2.0, 2.0);
  const double s_10_1 = bound(0.1, 1.0, 2.0);
  const double s_10_2 = bound(0.1, 2.0, 2.0);
  const bool positive = a_ref > 0.0;
  const bool mono_radius = s_05_1 >= s_05_2 && s_10_1 >= s_10_2;
  const bool mono_delta = s_10_1 >= s_05_1 && s_10_2 >= s_05_2 &&
                          bound(0.1, 1.0, 0.0) >= bound(0.05, 1.0, 0.0) &&
                          bound(0.1, 2.0, 0.0) >= bound(0.05, 2.0, 0.0);
  report("c6_assumption_scan", positive && mono_radius && mono_delta,
         fmt("a(0.1, r=2, res 41)=%.6f > 0; shared-lattice bounds a(0.05,1)=%.4f "
             "a(0.05,2)=%.4f a(0.1,1)=%.4f a(0.1,2)=%.4f monotone in delta and radius",
             a_ref, s_05_1, s_05_2, s_10_1, s_10_2));
}

void c7_string_finite_time() {
  std::string detail;
  bool ok = true;
  for (const char* name : {"string_damp.cfg", "string_pump.cfg"}) {
    const auto rep = run::run_experiment_in_memory(load_cfg(name));
    const bool fired = rep.events.size() == 1 && rep.events[0].name == "energy_target" &&
                       rep.events[0].t < 100.0;
    const bool resid = !std::isnan(rep.max_event_residual) && rep.max_event_residual < 1e-8;
    const bool drift =
        !std::isnan(rep.post_event_energy_drift) && rep.post_event_energy_drift < 1e-8;
    ok = ok && fired && resid && drift;
    detail += fmt("%s: T=%.6f residual=%.2e drift=%.2e | ", rep.label.c_str(),
                  rep.events.empty() ? -1.0 : rep.events[0].t, rep.max_event_residual,
                  rep.post_event_energy_drift);
  }
  report("c7_string_finite_time", ok,
         detail + "(event < 100, |H - H*| < 1e-8 at the event, drift < 1e-8 after)");
}

void c8_string_zero_target() {
  const auto rep = run::run_experiment_in_memory(load_cfg("string_zero_target.cfg"));
  const bool ok = rep.final_goal < 1e-4 && rep.events.empty() &&
                  rep.termination == sim::Termination::Horizon;
  report("c8_string_zero_target", ok,
         fmt("H(100)=%.3e (< 1e-4), events fired=%zu (expected 0)", rep.final_goal,
             rep.events.size()));
}

void c9_energy_rate_identity() {
  auto cfg = load_cfg("string_damp.cfg");
  cfg.dt = 1e-4;
  cfg.t_max = 20.0;
  cfg.record_stride = 1;
  sim::Trajectory traj;
  const auto rep = run::run_experiment_in_memory(cfg, &traj);
  vibstring::Params sp = cfg.string_params;
  sp.gamma = cfg.gamma;
  const double t_event = rep.events.empty() ? 1e30 : rep.events[0].t;
  double max_err = 0.0;
  long windows = 0;
  for (std::size_t i = 1; i + 1 < traj.samples.size(); ++i) {
    const auto &a = traj.samples[i - 1], &m = traj.samples[i], &b = traj.samples[i + 1];
    if (b.t >= t_event - 2e-4) break;  // skip the switching instant itself
    if (std::abs((b.t - m.t) - (m.t - a.t)) > 1e-9 * (b.t - a.t)) continue;
    const double fd = (vibstring::hamiltonian({b.x[0], b.x[1], b.x[2], b.x[3]}, sp) -
                       vibstring::hamiltonian({a.x[0], a.x[1], a.x[2], a.x[3]}, sp)) /
                      (b.t - a.t);
    const double hm = vibstring::hamiltonian({m.x[0], m.x[1], m.x[2], m.x[3]}, sp);
    const double analytic =
        -sp.gamma * sgn(hm - sp.h_star) * (m.x[2] * m.x[2] + m.x[3] * m.x[3]);
    max_err = std::max(max_err, std::abs(fd - analytic));
    ++windows;
  }
  const bool ok = windows > 1000 && max_err <= 1e-6;
  report("c9_energy_rate_identity", ok,
         fmt("max |finite-difference dH/dt + gamma sgn(H - H*) |p|^2| = %.3e (tol 1e-6, "
             "%ld windows at spacing 1e-4)",
             max_err, windows));
}

void c10_determinism() {
  static const char* kConfigs[] = {"brockett_paper.cfg",     "brockett_plane.cfg",
                                   "brockett_axis_start.cfg", "brockett_small_gain.cfg",
                                   "string_damp.cfg",         "string_pump.cfg",
                                   "string_zero_target.cfg",  "string_smooth_goal_comparison.cfg"};
  const auto dir_a = fresh_dir("set_a");
  const auto dir_b = fresh_dir("set_b");
  for (const char* name : kConfigs) {
    const auto cfg = load_cfg(name);
    run::run_experiment(cfg, dir_a / cfg.label);
    run::run_experiment(cfg, dir_b / cfg.label);
  }
  int mismatches = 0;
  long files = 0;
  for (const char* name : kConfigs) {
    const auto cfg = load_cfg(name);
    for (const char* f : {"trajectory.csv", "events.json", "report.json"}) {
      ++files;
      if (slurp(dir_a / cfg.label / f) != slurp(dir_b / cfg.label / f)) ++mismatches;
    }
  }
  report("c10_determinism", mismatches == 0,
         fmt("two executions of the full shipped set: %ld artifacts compared, %d byte "
             "mismatches",
             files, mismatches));
}

}  // namespace

int main() {
  std::printf("acceptance suite (configs: %s)\n", kConfigDir.string().c_str());
  c1_reference_run();
  c2_plane_closed_form();
  c3_no_switch();
  c4_gradient_identities();
  c5_reduced_rates_oracle();
  c6_assumption_scan();
  c7_string_finite_time();
  c8_string_zero_target();
  c9_energy_rate_identity();
  c10_determinism();
  if (g_failures) {
    std::printf("%d criterion(s) failed\n", g_failures);
    return 1;
  }
  std::printf("all criteria passed\n");
  return 0;
}
