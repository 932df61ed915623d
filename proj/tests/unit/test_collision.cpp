#include <cmath>

#include <doctest.h>

#include "navslip/collision.hpp"

using namespace navslip;

namespace {

GapOdeOptions tol(double t) {
  GapOdeOptions o;
  o.abs_tol = o.rel_tol = t;
  return o;
}

}  // namespace

TEST_CASE("drag laws: values, signs, derivative, parsing") {
  const DragLaw lg{DragKind::log, 2.0, 0.0}, inv{DragKind::inverse, 2.0, 0.0}, no{DragKind::none, 1.0, 0.0};
  CHECK(lg.value(0.01) == doctest::Approx(-2.0 * std::log(100.0)));
  CHECK(inv.value(0.01) == doctest::Approx(-200.0));
  CHECK(no.value(0.01) == 0.0);
  for (double h : {1e-6, 0.1, 0.5, 0.99, 2.0}) {
    CHECK(lg.value(h) <= 0.0);
    CHECK(inv.value(h) <= 0.0);
    for (const DragLaw* d : {&lg, &inv}) {
      const double e = 1e-7 * h;
      CHECK(d->derivative(h) == doctest::Approx((d->value(h + e) - d->value(h - e)) / (2 * e)).epsilon(1e-6));
    }
  }
  const DragLaw floored{DragKind::inverse, 1.0, 1e-3};
  CHECK(floored.value(1e-6) == doctest::Approx(-1e3));
  CHECK(drag_kind_from_string("inverse") == DragKind::inverse);
  CHECK_THROWS_AS(drag_kind_from_string("quadratic"), InvalidInput);
  CHECK_THROWS_AS((DragLaw{DragKind::log, 0.0, 0.0}).validate(), InvalidInput);
  CHECK(gap_acceleration(1.0, 2.0, 9.81) == doctest::Approx(-4.905));
}

TEST_CASE("gap ODE without drag: free-fall closed form and energy") {
  const double a = -2.0, h0 = 1.0;
  const auto r = integrate_gap_ode({0.0, h0, 0.0}, {DragKind::none, 1.0, 0.0}, a, 10.0);
  REQUIRE(r.outcome == GapOutcome::contact);
  REQUIRE(r.contact_time);
  CHECK(std::abs(*r.contact_time - std::sqrt(2.0 * h0 / std::abs(a))) < 1e-8);
  for (const auto& s : r.samples) CHECK(std::abs(0.5 * s.hdot * s.hdot - a * s.h - (-a * h0)) < 1e-9);
  // rising start: reaches the apex and comes back
  const auto up = integrate_gap_ode({0.0, 0.5, 1.0}, {DragKind::none, 1.0, 0.0}, -1.0, 10.0);
  CHECK(up.outcome == GapOutcome::contact);
  CHECK(*up.contact_time == doctest::Approx(1.0 + std::sqrt(2.0)).epsilon(1e-9));
}

TEST_CASE("gap ODE, inverse drag: no contact, positive envelope") {
  const double a = -1e-5;
  const auto r = integrate_gap_ode({0.0, 1.0, 0.0}, {DragKind::inverse, 1.0, 0.0}, a, 1e6);
  CHECK(r.outcome == GapOutcome::reached_end);
  CHECK_FALSE(r.contact_time);
  CHECK(r.samples.back().t == doctest::Approx(1e6));
  // first integral hdot + ln h = a t (h0 = 1, hdot0 = 0), and hdot <= 0, so h >= exp(a t)
  for (const auto& s : r.samples) {
    CHECK(s.h > 0.0);
    CHECK(s.hdot <= 1e-12);
    CHECK(std::abs(s.hdot + std::log(s.h) - a * s.t) < 1e-6);
    CHECK(s.h >= std::exp(a * s.t) * (1.0 - 1e-6));
  }
  CHECK(r.min_h > 0.0);
}

TEST_CASE("gap ODE, log drag: finite contact, stable under refinement, monotone in |a|") {
  const double a = -1e-5;
  const DragLaw law{DragKind::log, 1.0, 0.0};
  const auto r1 = integrate_gap_ode({0.0, 1.0, 0.0}, law, a, 1e6, tol(1e-12));
  const auto r2 = integrate_gap_ode({0.0, 1.0, 0.0}, law, a, 1e6, tol(5e-13));
  REQUIRE(r1.outcome == GapOutcome::contact);
  REQUIRE(r2.outcome == GapOutcome::contact);
  CHECK(std::abs(*r1.contact_time - *r2.contact_time) < 1e-6);
  // first integral hdot = kappa (h ln h - h + 1) + a t
  for (const auto& s : r1.samples) CHECK(std::abs(s.hdot - (s.h * std::log(s.h) - s.h + 1.0) - a * s.t) < 1e-8);
  // at contact h ln h - h -> 0, so hdot(t_c) ~ 1 + a t_c; t_c is near 1/|a|
  CHECK(*r1.contact_time == doctest::Approx(1e5).epsilon(1e-4));
  double prev = 1e300;
  for (double aa : {-1e-5, -2e-5, -4e-5}) {
    const auto r = integrate_gap_ode({0.0, 1.0, 0.0}, law, aa, 1e6);
    REQUIRE(r.contact_time);
    CHECK(*r.contact_time < prev);
    prev = *r.contact_time;
  }
  // bit-for-bit reproducible
  const auto r3 = integrate_gap_ode({0.0, 1.0, 0.0}, law, a, 1e6, tol(1e-12));
  CHECK(*r3.contact_time == *r1.contact_time);
}

TEST_CASE("gap ODE: step limit and invalid input") {
  GapOdeOptions o;
  o.max_steps = 3;
  const auto r = integrate_gap_ode({0.0, 1.0, 0.0}, {DragKind::log, 1.0, 0.0}, -1e-5, 1e6, o);
  CHECK(r.outcome == GapOutcome::underflow);
  CHECK_FALSE(r.contact_time);
  CHECK_THROWS_AS(integrate_gap_ode({0.0, -1.0, 0.0}, {}, -1.0, 1.0), InvalidInput);
  CHECK_THROWS_AS(integrate_gap_ode({0.0, 1.0, 0.0}, {}, -1.0, 0.0), InvalidInput);
}

TEST_CASE("contact_time on simulated trajectories") {
  const Cavity cav = Cavity::rectangle(2.0, 2.0);
  const SolidShape disk{0.25, 2.0};
  auto params = [](double g) {
    SimParams p;
    p.rho_F = 1.0;
    p.rho_S = 2.0;
    p.mu_F = 0.05;
    p.beta_S = p.beta_Omega = 0.5;
    p.delta = 0.05;
    p.N = 12;
    p.dt = 0.02;
    p.g = Vec2(0.0, g);
    return p;
  };
  const Placement start{{1.0, 0.55}, 0.0};
  SUBCASE("neutral buoyancy: no event") {
    SimParams p = params(9.81);
    p.rho_S = 1.0;
    const GalerkinModel m(cav, disk, p);
    const auto tr = run_simulation(m, start, rest_coefficients(m.basis()), 0.2);
    CHECK_FALSE(contact_time(tr, p.delta).event);
  }
  SUBCASE("heavy disk: event inside the bracketing steps, earlier for larger g") {
    double prev = 1e300;
    for (double g : {5.0, 9.81, 20.0}) {
      const GalerkinModel m(cav, disk, params(g));
      const auto tr = run_simulation(m, start, rest_coefficients(m.basis()), 2.0);
      REQUIRE(tr.termination == Termination::collision_approach);
      const auto ce = contact_time(tr, 0.05);
      REQUIRE(ce.event);
      CHECK(ce.bracket_hi - ce.bracket_lo == doctest::Approx(0.02));
      CHECK(ce.guard_time >= ce.bracket_lo);
      CHECK(ce.guard_time <= ce.bracket_hi);
      // direct scan: last accepted gap above the guard, the rejected one below
      CHECK(tr.steps.back().gap > 0.1);
      CHECK(tr.event_gap < 0.1);
      if (ce.extrapolated) CHECK(*ce.extrapolated > ce.guard_time);
      CHECK(ce.guard_time < prev);
      prev = ce.guard_time;
    }
  }
}
