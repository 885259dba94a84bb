#pragma once

#include <functional>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace sgc::sim {

using State = std::vector<double>;

/// A plant closed with its feedback: rhs(x, u), controller(x) and the goal.
struct ClosedLoopSystem {
  int state_dim = 0;
  int control_dim = 0;
  std::function<void(std::span<const double> x, std::span<const double> u,
                     std::span<double> dxdt)>
      rhs;
  std::function<void(std::span<const double> x, std::span<double> u)> controller;
  std::function<double(std::span<const double> x)> goal;
};

enum class EventAction { Stop, LatchControlZero, RecordOnly };

/// Switching surface monitored during integration. Fires when the indicator
/// changes sign across a step; the instant is then localized by bisection on
/// the step fraction down to `tolerance` in time.
///
/// With `grazing_guard > 0`, steps whose endpoint indicator magnitude stays
/// within the guard are additionally scanned for an interior sign excursion.
/// Discontinuous feedback makes the surface sticky for stage-sampled RK4
/// (stages straddle the surface and the mixed step undershoots), so a
/// transversal crossing can hide inside one step without flipping the
/// endpoint sign.
struct EventSpec {
  std::string name;
  std::function<double(std::span<const double>)> indicator;
  EventAction action = EventAction::RecordOnly;
  double tolerance = 1e-10;
  double grazing_guard = 0.0;
};

enum class Termination {
  Converged,
  Horizon,
  EventStop,
  EnteredC,
  SolverFailure,
  EnergyBlowup,
};
const char* termination_name(Termination t);

/// Plant-specific failure surface checked after every accepted step.
using Guard = std::function<std::optional<Termination>(double t, std::span<const double> x)>;

/// Streaming hook for fine-grained monitors, called every `observer_stride`
/// accepted steps (plus t = 0). Samples recorded in the trajectory use
/// `record_stride` independently.
using Observer =
    std::function<void(double t, std::span<const double> x, std::span<const double> u, double q)>;

struct SimConfig {
  double dt = 1e-3;
  double t_max = 100.0;
  /// Convergence threshold on the goal; the run stops (and the control is
  /// clamped to zero) once the goal drops below it. <= 0 disables.
  double q_stop = 1e-10;
  /// Within-step minimum search is attempted when the goal fails to decrease
  /// across a step while below this guard. Needed for transversal arrivals,
  /// where the goal dips under q_stop strictly inside one step. < 0: 1e4 * q_stop.
  double dip_guard = -1.0;
  long record_stride = 1;
  std::vector<EventSpec> events;
  Guard guard;
  Observer observer;
  long observer_stride = 1;
};

struct Sample {
  double t;
  State x;
  State u;
  double q;
};

struct EventRecord {
  std::string name;
  double t;
  State state;
};

struct Trajectory {
  std::vector<Sample> samples;  // first sample at t = 0, times strictly increasing
  std::vector<EventRecord> events;
  Termination termination = Termination::Horizon;
  double final_time = 0.0;
  double convergence_time = std::numeric_limits<double>::quiet_NaN();
  long steps = 0;
};

/// One classical RK4 step; the control is re-evaluated at every stage state.
State step_rk4(const ClosedLoopSystem& sys, std::span<const double> x, double dt);

struct EventHit {
  double t;
  State state;
};

/// Localizes a sign change of spec.indicator inside [t_before, t_before + dt]
/// by bisection over partial RK4 steps from s_before. Throws
/// std::invalid_argument when the indicator does not change sign.
EventHit locate_event(const ClosedLoopSystem& sys, const EventSpec& spec,
                      std::span<const double> s_before, double t_before, double dt);

Trajectory simulate(const ClosedLoopSystem& sys, std::span<const double> x0,
                    const SimConfig& cfg);

}  // namespace sgc::sim
