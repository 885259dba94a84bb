#include "sgc/sim_engine.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <stdexcept>

#include "sgc/vec.hpp"

namespace sgc::sim {

const char* termination_name(Termination t) {
  switch (t) {
    case Termination::Converged: return "converged";
    case Termination::Horizon: return "horizon";
    case Termination::EventStop: return "event_stop";
    case Termination::EnteredC: return "entered_C";
    case Termination::SolverFailure: return "solver_failure";
    case Termination::EnergyBlowup: return "energy_blowup";
  }
  return "unknown";
}

namespace {

void validate_system(const ClosedLoopSystem& sys) {
  if (sys.state_dim <= 0 || sys.control_dim <= 0)
    throw std::invalid_argument("ClosedLoopSystem: dimensions must be positive");
  if (!sys.rhs || !sys.controller || !sys.goal)
    throw std::invalid_argument("ClosedLoopSystem: rhs, controller and goal are required");
}

/// RK4 stepping with preallocated stage buffers and an optional control latch.
class Integrator {
 public:
  explicit Integrator(const ClosedLoopSystem& sys)
      : sys_(sys),
        k1_(sys.state_dim),
        k2_(sys.state_dim),
        k3_(sys.state_dim),
        k4_(sys.state_dim),
        stage_(sys.state_dim),
        u_(sys.control_dim) {}

  void set_latched(bool latched) { latched_ = latched; }
  bool latched() const { return latched_; }

  void control(std::span<const double> x, std::span<double> u) const {
    if (latched_) {
      std::fill(u.begin(), u.end(), 0.0);
      return;
    }
    sys_.controller(x, u);
  }

  void deriv(std::span<const double> x, std::span<double> dx) {
    control(x, u_);
    sys_.rhs(x, u_, dx);
  }

  void step(std::span<const double> x, double h, std::span<double> out) {
    const int n = sys_.state_dim;
    deriv(x, k1_);
    for (int i = 0; i < n; ++i) stage_[i] = x[i] + 0.5 * h * k1_[i];
    deriv(stage_, k2_);
    for (int i = 0; i < n; ++i) stage_[i] = x[i] + 0.5 * h * k2_[i];
    deriv(stage_, k3_);
    for (int i = 0; i < n; ++i) stage_[i] = x[i] + h * k3_[i];
    deriv(stage_, k4_);
    for (int i = 0; i < n; ++i)
      out[i] = x[i] + h / 6.0 * (k1_[i] + 2.0 * k2_[i] + 2.0 * k3_[i] + k4_[i]);
  }

 private:
  const ClosedLoopSystem& sys_;
  bool latched_ = false;
  State k1_, k2_, k3_, k4_, stage_, u_;
};

bool sign_change(double fa, double fb) {
  if (fa > 0.0) return fb <= 0.0;
  if (fa < 0.0) return fb >= 0.0;
  return false;  // starting exactly on the surface is not a crossing
}

constexpr int kMaxBisect = 200;

/// Bisection on the step fraction for a general indicator; fa = f(0) must be
/// nonzero and f must reach the other sign at fraction `hi`. Returns the
/// fraction on the crossed side of the bracket.
double bisect_fraction(Integrator& integ, std::span<const double> x0, double h,
                       const std::function<double(std::span<const double>)>& f, double fa,
                       double hi, double time_tol, State& scratch) {
  double lo = 0.0;
  int iter = 0;
  while ((hi - lo) * h > time_tol && iter++ < kMaxBisect) {
    const double mid = 0.5 * (lo + hi);
    integ.step(x0, mid * h, scratch);
    const double fm = f(scratch);
    if (sign_change(fa, fm))
      hi = mid;
    else
      lo = mid;
  }
  return hi;
}

/// Deterministic minimum search for the goal over one step: a coarse scan
/// bracketing the minimum followed by golden-section refinement.
void minimize_goal_over_step(Integrator& integ, const ClosedLoopSystem& sys,
                             std::span<const double> x0, double h, double qa, double qb,
                             double& s_min, double& q_min, State& scratch) {
  constexpr int kScan = 32;
  double best_s = 0.0, best_q = qa;
  if (qb < best_q) {
    best_s = 1.0;
    best_q = qb;
  }
  std::array<double, kScan + 1> qs{};
  qs[0] = qa;
  qs[kScan] = qb;
  for (int i = 1; i < kScan; ++i) {
    const double s = static_cast<double>(i) / kScan;
    integ.step(x0, s * h, scratch);
    qs[i] = sys.goal(scratch);
    if (qs[i] < best_q) {
      best_q = qs[i];
      best_s = s;
    }
  }
  int k = static_cast<int>(std::lround(best_s * kScan));
  double lo = std::max(0, k - 1) / static_cast<double>(kScan);
  double hi = std::min(kScan, k + 1) / static_cast<double>(kScan);

  const double invphi = (std::sqrt(5.0) - 1.0) / 2.0;
  double c = hi - invphi * (hi - lo);
  double d = lo + invphi * (hi - lo);
  auto eval = [&](double s) {
    integ.step(x0, s * h, scratch);
    return sys.goal(scratch);
  };
  double qc = eval(c), qd = eval(d);
  for (int iter = 0; iter < 90 && (hi - lo) > 1e-14; ++iter) {
    if (qc < qd) {
      hi = d;
      d = c;
      qd = qc;
      c = hi - invphi * (hi - lo);
      qc = eval(c);
    } else {
      lo = c;
      c = d;
      qc = qd;
      d = lo + invphi * (hi - lo);
      qd = eval(d);
    }
    if (qc < best_q) {
      best_q = qc;
      best_s = c;
    }
    if (qd < best_q) {
      best_q = qd;
      best_s = d;
    }
  }
  s_min = best_s;
  q_min = best_q;
}

}  // namespace

State step_rk4(const ClosedLoopSystem& sys, std::span<const double> x, double dt) {
  validate_system(sys);
  if (!(dt > 0.0)) throw std::invalid_argument("step_rk4: dt must be > 0");
  if (static_cast<int>(x.size()) != sys.state_dim)
    throw std::invalid_argument("step_rk4: state dimension mismatch");
  Integrator integ(sys);
  State out(sys.state_dim);
  integ.step(x, dt, out);
  return out;
}

EventHit locate_event(const ClosedLoopSystem& sys, const EventSpec& spec,
                      std::span<const double> s_before, double t_before, double dt) {
  validate_system(sys);
  if (!spec.indicator) throw std::invalid_argument("locate_event: missing indicator");
  if (!(spec.tolerance > 0.0)) throw std::invalid_argument("locate_event: tolerance must be > 0");
  Integrator integ(sys);
  State after(sys.state_dim), scratch(sys.state_dim);
  integ.step(s_before, dt, after);
  const double fa = spec.indicator(s_before);
  const double fb = spec.indicator(after);
  if (!sign_change(fa, fb))
    throw std::invalid_argument("locate_event: indicator does not change sign across the step");
  const double s =
      bisect_fraction(integ, s_before, dt, spec.indicator, fa, 1.0, spec.tolerance, scratch);
  State xe(sys.state_dim);
  integ.step(s_before, s * dt, xe);
  return {t_before + s * dt, std::move(xe)};
}

Trajectory simulate(const ClosedLoopSystem& sys, std::span<const double> x0,
                    const SimConfig& cfg) {
  validate_system(sys);
  if (static_cast<int>(x0.size()) != sys.state_dim)
    throw std::invalid_argument("simulate: x0 dimension mismatch");
  if (!all_finite(x0)) throw std::invalid_argument("simulate: x0 must be finite");
  if (!(cfg.dt > 0.0) || !(cfg.t_max > 0.0) || !(cfg.dt < cfg.t_max))
    throw std::invalid_argument("simulate: require 0 < dt < t_max");
  if (cfg.record_stride < 1 || cfg.observer_stride < 1)
    throw std::invalid_argument("simulate: strides must be >= 1");
  for (const auto& ev : cfg.events) {
    if (!ev.indicator) throw std::invalid_argument("simulate: event without indicator");
    if (!(ev.tolerance > 0.0)) throw std::invalid_argument("simulate: event tolerance must be > 0");
  }

  Integrator integ(sys);
  Trajectory traj;
  State x(x0.begin(), x0.end());
  State xnew(sys.state_dim), scratch(sys.state_dim);
  State u(sys.control_dim);
  double t = 0.0;
  const double time_eps = cfg.dt * 1e-9;
  const double dip_guard = cfg.dip_guard >= 0.0 ? cfg.dip_guard : 1e4 * cfg.q_stop;

  auto goal_at = [&](std::span<const double> s) { return sys.goal(s); };

  auto record = [&](double ts, std::span<const double> xs, double qs, bool clamp_control) {
    if (!traj.samples.empty() && !(ts > traj.samples.back().t)) return;
    Sample smp;
    smp.t = ts;
    smp.x.assign(xs.begin(), xs.end());
    if (clamp_control)
      smp.u.assign(sys.control_dim, 0.0);
    else {
      integ.control(xs, u);
      smp.u.assign(u.begin(), u.end());
    }
    smp.q = qs;
    traj.samples.push_back(std::move(smp));
  };

  auto observe = [&](double ts, std::span<const double> xs, double qs) {
    if (!cfg.observer) return;
    integ.control(xs, u);
    cfg.observer(ts, xs, u, qs);
  };

  double q = goal_at(x);
  if (!std::isfinite(q)) {
    record(0.0, x, q, false);
    traj.termination = Termination::SolverFailure;
    traj.final_time = 0.0;
    return traj;
  }
  record(0.0, x, q, cfg.q_stop > 0.0 && q < cfg.q_stop);
  observe(0.0, x, q);
  if (cfg.q_stop > 0.0 && q < cfg.q_stop) {
    traj.termination = Termination::Converged;
    traj.convergence_time = 0.0;
    traj.final_time = 0.0;
    return traj;
  }

  std::vector<double> f_prev(cfg.events.size());
  std::vector<bool> event_active(cfg.events.size(), true);
  auto refresh_indicators = [&]() {
    for (std::size_t i = 0; i < cfg.events.size(); ++i)
      if (event_active[i]) f_prev[i] = cfg.events[i].indicator(x);
  };
  refresh_indicators();

  auto q_indicator = [&](std::span<const double> s) { return goal_at(s) - cfg.q_stop; };

  while (true) {
    const double remaining = cfg.t_max - t;
    if (remaining <= time_eps) {
      traj.termination = Termination::Horizon;
      break;
    }
    const double h = std::min(cfg.dt, remaining);
    integ.step(x, h, xnew);
    if (!all_finite(xnew)) {
      record(t, x, q, false);  // last good state
      traj.termination = Termination::SolverFailure;
      break;
    }
    const double qa = q;
    const double qb = goal_at(xnew);
    if (!std::isfinite(qb)) {
      record(t, x, q, false);
      traj.termination = Termination::SolverFailure;
      break;
    }

    // Convergence: endpoint crossing of q_stop, else a within-step dip when
    // the goal failed to decrease near the target set.
    double conv_s = -1.0;
    if (cfg.q_stop > 0.0) {
      if (qb < cfg.q_stop) {
        conv_s = bisect_fraction(integ, x, h, q_indicator, qa - cfg.q_stop, 1.0, 1e-10, scratch);
      } else if (qb >= qa && std::min(qa, qb) <= dip_guard) {
        double s_min = 0.0, q_min = qa;
        minimize_goal_over_step(integ, sys, x, h, qa, qb, s_min, q_min, scratch);
        if (q_min < cfg.q_stop && s_min > 0.0)
          conv_s =
              bisect_fraction(integ, x, h, q_indicator, qa - cfg.q_stop, s_min, 1e-10, scratch);
      }
    }

    // User events, earliest first.
    struct Hit {
      double s;
      std::size_t idx;
    };
    std::vector<Hit> hits;
    for (std::size_t i = 0; i < cfg.events.size(); ++i) {
      if (!event_active[i]) continue;
      const auto& ev = cfg.events[i];
      const double fb = ev.indicator(xnew);
      if (sign_change(f_prev[i], fb)) {
        const double s =
            bisect_fraction(integ, x, h, ev.indicator, f_prev[i], 1.0, ev.tolerance, scratch);
        hits.push_back({s, i});
      } else if (ev.grazing_guard > 0.0 &&
                 std::min(std::abs(f_prev[i]), std::abs(fb)) <= ev.grazing_guard) {
        constexpr int kScan = 32;
        double s_hit = -1.0;
        for (int k = 1; k < kScan; ++k) {
          const double s = static_cast<double>(k) / kScan;
          integ.step(x, s * h, scratch);
          if (sign_change(f_prev[i], ev.indicator(scratch))) {
            s_hit = s;
            break;
          }
        }
        if (s_hit > 0.0) {
          const double s = bisect_fraction(integ, x, h, ev.indicator, f_prev[i], s_hit,
                                           ev.tolerance, scratch);
          hits.push_back({s, i});
        }
      }
      f_prev[i] = fb;
    }
    std::sort(hits.begin(), hits.end(), [](const Hit& a, const Hit& b) {
      return a.s != b.s ? a.s < b.s : a.idx < b.idx;
    });

    bool restarted = false;
    for (const Hit& hit : hits) {
      if (conv_s >= 0.0 && conv_s < hit.s) break;
      const auto& ev = cfg.events[hit.idx];
      State xe(sys.state_dim);
      integ.step(x, hit.s * h, xe);
      const double te = t + hit.s * h;
      const double qe = goal_at(xe);
      traj.events.push_back({ev.name, te, xe});
      if (ev.action == EventAction::RecordOnly) {
        record(te, xe, qe, false);
        continue;
      }
      if (ev.action == EventAction::Stop) {
        record(te, xe, qe, false);
        traj.termination = Termination::EventStop;
        traj.final_time = te;
        return traj;
      }
      // LatchControlZero: restart integration from the event state with the
      // control permanently zero; the event is disabled for the rest of the run.
      integ.set_latched(true);
      event_active[hit.idx] = false;
      record(te, xe, qe, true);
      observe(te, xe, qe);
      x = xe;
      t = te;
      q = qe;
      refresh_indicators();
      restarted = true;
      break;
    }
    if (restarted) continue;

    if (conv_s >= 0.0) {
      State xe(sys.state_dim);
      integ.step(x, conv_s * h, xe);
      const double te = t + conv_s * h;
      const double qe = goal_at(xe);
      traj.events.push_back({"converged", te, xe});
      record(te, xe, qe, true);  // control clamps to zero once the goal is reached
      traj.termination = Termination::Converged;
      traj.convergence_time = te;
      traj.final_time = te;
      return traj;
    }

    x = xnew;
    t += h;
    q = qb;
    ++traj.steps;

    if (cfg.guard) {
      if (auto forced = cfg.guard(t, x)) {
        record(t, x, q, false);
        traj.termination = *forced;
        break;
      }
    }

    const bool at_end = cfg.t_max - t <= time_eps;
    if (traj.steps % cfg.record_stride == 0 || at_end) record(t, x, q, false);
    if (traj.steps % cfg.observer_stride == 0) observe(t, x, q);
  }

  traj.final_time = t;
  return traj;
}

}  // namespace sgc::sim
