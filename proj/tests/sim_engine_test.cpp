#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstring>

#include "sgc/brockett.hpp"
#include "sgc/sim_engine.hpp"
#include "sgc/vec.hpp"
#include "sgc/vibrating_string.hpp"

using namespace sgc;
using namespace sgc::sim;

namespace {

ClosedLoopSystem brockett_loop(double gamma) {
  brockett::ControllerParams p;
  p.gamma = gamma;
  ClosedLoopSystem sys;
  sys.state_dim = 3;
  sys.control_dim = 2;
  sys.rhs = [](std::span<const double> x, std::span<const double> u, std::span<double> dx) {
    const Vec3 d = brockett::rhs({x[0], x[1], x[2]}, {u[0], u[1]});
    std::copy(d.begin(), d.end(), dx.begin());
  };
  sys.controller = [p](std::span<const double> x, std::span<double> u) {
    const Vec2 c = brockett::control({x[0], x[1], x[2]}, p);
    u[0] = c[0];
    u[1] = c[1];
  };
  sys.goal = [](std::span<const double> x) { return brockett::goal_q({x[0], x[1], x[2]}); };
  return sys;
}

ClosedLoopSystem string_loop(vibstring::Params sp) {
  ClosedLoopSystem sys;
  sys.state_dim = 4;
  sys.control_dim = 2;
  sys.rhs = [sp](std::span<const double> x, std::span<const double> u, std::span<double> dx) {
    const Vec4 d = vibstring::rhs({x[0], x[1], x[2], x[3]}, {u[0], u[1]}, sp);
    std::copy(d.begin(), d.end(), dx.begin());
  };
  sys.controller = [sp](std::span<const double> x, std::span<double> u) {
    const Vec2 c = vibstring::control({x[0], x[1], x[2], x[3]}, sp);
    u[0] = c[0];
    u[1] = c[1];
  };
  sys.goal = [sp](std::span<const double> x) {
    return vibstring::goal({x[0], x[1], x[2], x[3]}, sp);
  };
  return sys;
}

}  // namespace

TEST_CASE("rk4 reproduces the radial plane flow to machine precision") {
  const auto sys = brockett_loop(0.1);
  const auto x1 = step_rk4(sys, std::vector<double>{1.0, 0.0, 0.0}, 0.1);
  CHECK(std::abs(x1[0] - 0.99) <= 1e-12);
  CHECK(x1[1] == 0.0);
  CHECK(x1[2] == 0.0);
}

TEST_CASE("rk4 energy drift of the unforced string is tiny") {
  vibstring::Params sp{1.0, 1.0, 0.5, 0.0};
  ClosedLoopSystem sys = string_loop(sp);
  sys.controller = [](std::span<const double>, std::span<double> u) { u[0] = u[1] = 0.0; };
  const std::vector<double> s0{1.0, 0.0, 0.0, 0.0};
  const double h0 = vibstring::hamiltonian({1.0, 0.0, 0.0, 0.0}, sp);
  const auto s1 = step_rk4(sys, s0, 1e-3);
  const double h1 = vibstring::hamiltonian({s1[0], s1[1], s1[2], s1[3]}, sp);
  CHECK(std::abs(h1 - h0) < 1e-10);
}

TEST_CASE("zero field leaves the state unchanged") {
  ClosedLoopSystem sys;
  sys.state_dim = 2;
  sys.control_dim = 1;
  sys.rhs = [](std::span<const double>, std::span<const double>, std::span<double> dx) {
    dx[0] = dx[1] = 0.0;
  };
  sys.controller = [](std::span<const double>, std::span<double> u) { u[0] = 0.0; };
  sys.goal = [](std::span<const double>) { return 1.0; };
  const auto out = step_rk4(sys, std::vector<double>{3.0, -4.0}, 0.5);
  CHECK(out[0] == 3.0);
  CHECK(out[1] == -4.0);
}

TEST_CASE("event localization on a linear indicator") {
  // state == time: x' = 1
  ClosedLoopSystem sys;
  sys.state_dim = 1;
  sys.control_dim = 1;
  sys.rhs = [](std::span<const double>, std::span<const double>, std::span<double> dx) {
    dx[0] = 1.0;
  };
  sys.controller = [](std::span<const double>, std::span<double> u) { u[0] = 0.0; };
  sys.goal = [](std::span<const double>) { return 1.0; };

  EventSpec ev;
  ev.name = "crossing";
  ev.indicator = [](std::span<const double> x) { return 1.0 - x[0]; };
  const auto hit = locate_event(sys, ev, std::vector<double>{0.9}, 0.9, 0.2);
  CHECK(std::abs(hit.t - 1.0) <= 1e-10);
  CHECK(std::abs(hit.state[0] - 1.0) <= 1e-10);

  // indicator positive over the whole step: precondition violation
  const auto bad = locate_event;
  CHECK_THROWS_AS(bad(sys, ev, std::vector<double>{0.1}, 0.1, 0.2), std::invalid_argument);
}

TEST_CASE("plane start converges at sigma(0)/gamma") {
  const auto sys = brockett_loop(0.1);
  SimConfig cfg;
  cfg.dt = 1e-3;
  cfg.t_max = 100.0;
  cfg.q_stop = 1e-10;
  cfg.record_stride = 10;
  const auto traj = simulate(sys, std::vector<double>{1.0, 0.0, 0.0}, cfg);
  CHECK(traj.termination == Termination::Converged);
  CHECK(std::abs(traj.convergence_time - 10.0) <= 0.01);
  const auto& last = traj.samples.back();
  CHECK(norm(last.x) < 1e-3);
  CHECK(last.q < 1e-10);
  CHECK(last.u == std::vector<double>{0.0, 0.0});  // control clamps at convergence
}

TEST_CASE("trajectory bookkeeping invariants") {
  const auto sys = brockett_loop(0.1);
  SimConfig cfg;
  cfg.dt = 1e-3;
  cfg.t_max = 2.0;
  cfg.q_stop = 1e-10;
  cfg.record_stride = 7;
  const auto traj = simulate(sys, std::vector<double>{0.3, 0.1, 0.2}, cfg);
  REQUIRE(!traj.samples.empty());
  CHECK(traj.samples.front().t == 0.0);
  for (std::size_t i = 1; i < traj.samples.size(); ++i)
    CHECK(traj.samples[i].t > traj.samples[i - 1].t);
  CHECK(traj.termination == Termination::Horizon);
  CHECK(traj.samples.back().t == doctest::Approx(2.0).epsilon(1e-12));
}

TEST_CASE("simulation is deterministic bit for bit") {
  const auto sys = brockett_loop(0.1);
  SimConfig cfg;
  cfg.dt = 1e-3;
  cfg.t_max = 3.0;
  cfg.record_stride = 3;
  const auto a = simulate(sys, std::vector<double>{0.2, 0.2, 0.2}, cfg);
  const auto b = simulate(sys, std::vector<double>{0.2, 0.2, 0.2}, cfg);
  REQUIRE(a.samples.size() == b.samples.size());
  for (std::size_t i = 0; i < a.samples.size(); ++i) {
    CHECK(std::memcmp(a.samples[i].x.data(), b.samples[i].x.data(), 3 * sizeof(double)) == 0);
    CHECK(std::memcmp(a.samples[i].u.data(), b.samples[i].u.data(), 2 * sizeof(double)) == 0);
    CHECK(a.samples[i].q == b.samples[i].q);
  }
}

TEST_CASE("halving the step improves smooth-segment accuracy at fourth order") {
  vibstring::Params sp{1.0, 1.0, 0.5, 0.25};
  const auto sys = string_loop(sp);
  auto terminal = [&](double dt) {
    SimConfig cfg;
    cfg.dt = dt;
    cfg.t_max = 1.0;  // well before the energy target event
    cfg.q_stop = 0.0;
    cfg.record_stride = static_cast<long>(std::llround(1.0 / dt));
    const auto traj = simulate(sys, std::vector<double>{1.0, 0.0, 0.0, 0.0}, cfg);
    return traj.samples.back().x;
  };
  const auto c = terminal(4e-3);
  const auto m = terminal(2e-3);
  const auto f = terminal(1e-3);
  double e1 = 0.0, e2 = 0.0;
  for (int i = 0; i < 4; ++i) {
    e1 += (c[i] - m[i]) * (c[i] - m[i]);
    e2 += (m[i] - f[i]) * (m[i] - f[i]);
  }
  CHECK(std::sqrt(e1) / std::sqrt(e2) >= 8.0);
}

TEST_CASE("latch event zeroes the control and freezes the energy") {
  vibstring::Params sp{1.0, 1.0, 0.5, 0.25};
  const auto sys = string_loop(sp);
  SimConfig cfg;
  cfg.dt = 1e-3;
  cfg.t_max = 20.0;
  cfg.q_stop = 0.0;
  cfg.record_stride = 10;
  EventSpec ev;
  ev.name = "energy_target";
  ev.indicator = [sp](std::span<const double> x) {
    return vibstring::hamiltonian({x[0], x[1], x[2], x[3]}, sp) - sp.h_star;
  };
  ev.action = EventAction::LatchControlZero;
  ev.grazing_guard = 0.1;
  cfg.events.push_back(ev);
  const auto traj = simulate(sys, std::vector<double>{1.0, 0.0, 0.0, 0.0}, cfg);
  REQUIRE(traj.events.size() == 1);
  const auto& hit = traj.events[0];
  CHECK(std::abs(vibstring::hamiltonian({hit.state[0], hit.state[1], hit.state[2],
                                         hit.state[3]},
                                        sp) -
                 sp.h_star) < 1e-8);
  for (const auto& s : traj.samples) {
    if (s.t < hit.t) continue;
    CHECK(s.u[0] == 0.0);
    CHECK(s.u[1] == 0.0);
    const double h = vibstring::hamiltonian({s.x[0], s.x[1], s.x[2], s.x[3]}, sp);
    CHECK(std::abs(h - sp.h_star) < 1e-8);
  }
  CHECK(traj.termination == Termination::Horizon);
}

TEST_CASE("stop events terminate the run at the located instant") {
  const auto sys = brockett_loop(0.1);
  SimConfig cfg;
  cfg.dt = 1e-3;
  cfg.t_max = 50.0;
  cfg.q_stop = 0.0;
  EventSpec ev;
  ev.name = "sigma_level";
  ev.indicator = [](std::span<const double> x) {
    return brockett::sigma({x[0], x[1], x[2]}) - 0.5;
  };
  ev.action = EventAction::Stop;
  cfg.events.push_back(ev);
  const auto traj = simulate(sys, std::vector<double>{1.0, 0.0, 0.0}, cfg);
  CHECK(traj.termination == Termination::EventStop);
  // plane flow: sigma(t) = 1 - 0.1 t crosses 0.5 at t = 5
  CHECK(traj.final_time == doctest::Approx(5.0).epsilon(1e-9));
}

TEST_CASE("guards force plant-specific terminations") {
  const auto sys = brockett_loop(0.1);
  SimConfig cfg;
  cfg.dt = 1e-3;
  cfg.t_max = 10.0;
  cfg.q_stop = 0.0;
  cfg.guard = [](double t, std::span<const double>) -> std::optional<Termination> {
    if (t >= 1.0) return Termination::EnteredC;
    return std::nullopt;
  };
  const auto traj = simulate(sys, std::vector<double>{1.0, 0.0, 0.0}, cfg);
  CHECK(traj.termination == Termination::EnteredC);
  CHECK(traj.final_time == doctest::Approx(1.0));
}

TEST_CASE("non-finite dynamics terminate as solver failure") {
  ClosedLoopSystem sys;
  sys.state_dim = 1;
  sys.control_dim = 1;
  sys.rhs = [](std::span<const double> x, std::span<const double>, std::span<double> dx) {
    dx[0] = x[0] > 0.5 ? std::nan("") : 1.0;
  };
  sys.controller = [](std::span<const double>, std::span<double> u) { u[0] = 0.0; };
  sys.goal = [](std::span<const double>) { return 1.0; };
  SimConfig cfg;
  cfg.dt = 0.1;
  cfg.t_max = 10.0;
  cfg.q_stop = 0.0;
  const auto traj = simulate(sys, std::vector<double>{0.0}, cfg);
  CHECK(traj.termination == Termination::SolverFailure);
  CHECK(traj.final_time < 1.0);
}

TEST_CASE("config validation") {
  const auto sys = brockett_loop(0.1);
  SimConfig cfg;
  cfg.dt = 0.0;
  CHECK_THROWS_AS(simulate(sys, std::vector<double>{1.0, 0.0, 0.0}, cfg),
                  std::invalid_argument);
  cfg.dt = 1.0;
  cfg.t_max = 0.5;
  CHECK_THROWS_AS(simulate(sys, std::vector<double>{1.0, 0.0, 0.0}, cfg),
                  std::invalid_argument);
  cfg.t_max = 10.0;
  cfg.record_stride = 0;
  CHECK_THROWS_AS(simulate(sys, std::vector<double>{1.0, 0.0, 0.0}, cfg),
                  std::invalid_argument);
  cfg.record_stride = 1;
  CHECK_THROWS_AS(simulate(sys, std::vector<double>{1.0, 0.0}, cfg), std::invalid_argument);
}

TEST_CASE("a start already inside the stop set converges immediately") {
  const auto sys = brockett_loop(0.1);
  SimConfig cfg;
  cfg.dt = 1e-3;
  cfg.t_max = 1.0;
  cfg.q_stop = 1e-10;
  const auto traj = simulate(sys, std::vector<double>{0.0, 0.0, 0.0}, cfg);
  CHECK(traj.termination == Termination::Converged);
  CHECK(traj.convergence_time == 0.0);
  REQUIRE(traj.samples.size() == 1);
  CHECK(traj.samples[0].u == std::vector<double>{0.0, 0.0});
}
