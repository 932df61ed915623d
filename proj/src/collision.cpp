#include "navslip/collision.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <boost/numeric/odeint.hpp>
#include <fmt/format.h>

namespace navslip {

namespace odeint = boost::numeric::odeint;
namespace ublas = boost::numeric::ublas;

double DragLaw::value(double h) const {
  const double x = std::max(h, std::max(h_min, std::numeric_limits<double>::min()));
  switch (kind) {
    case DragKind::log:
      return -kappa * std::abs(std::log(x));
    case DragKind::inverse:
      return -kappa / x;
    case DragKind::none:
      return 0.0;
  }
  return 0.0;
}

double DragLaw::derivative(double h) const {
  const double floor = std::max(h_min, std::numeric_limits<double>::min());
  if (h < floor) return 0.0;
  switch (kind) {
    case DragKind::log:
      return h < 1.0 ? kappa / h : -kappa / h;
    case DragKind::inverse:
      return kappa / (h * h);
    case DragKind::none:
      return 0.0;
  }
  return 0.0;
}

void DragLaw::validate() const {
  if (!(kappa > 0.0) || !std::isfinite(kappa)) throw InvalidInput(fmt::format("drag kappa must be > 0 (got {})", kappa));
  if (!(h_min >= 0.0)) throw InvalidInput(fmt::format("drag h_min must be >= 0 (got {})", h_min));
}

const char* to_string(DragKind kind) {
  switch (kind) {
    case DragKind::log:
      return "log";
    case DragKind::inverse:
      return "inverse";
    case DragKind::none:
      return "none";
  }
  return "?";
}

DragKind drag_kind_from_string(const std::string& s) {
  if (s == "log") return DragKind::log;
  if (s == "inverse") return DragKind::inverse;
  if (s == "none") return DragKind::none;
  throw InvalidInput(fmt::format("unknown drag law '{}' (expected log, inverse or none)", s));
}

const char* to_string(GapOutcome outcome) {
  switch (outcome) {
    case GapOutcome::reached_end:
      return "reached_end";
    case GapOutcome::contact:
      return "contact";
    case GapOutcome::underflow:
      return "underflow";
  }
  return "?";
}

void GapOdeOptions::validate() const {
  if (!(abs_tol > 0.0) || !(rel_tol > 0.0)) throw InvalidInput("gap ODE tolerances must be positive");
  if (!(h_contact > 0.0)) throw InvalidInput("h_contact must be positive");
  if (!(min_step > 0.0) || max_steps < 1) throw InvalidInput("gap ODE step limits must be positive");
}

double gap_acceleration(double rho_F, double rho_S, double g) {
  if (!(rho_S > 0.0) || !(rho_F > 0.0)) throw InvalidInput("densities must be positive");
  return (rho_F - rho_S) / rho_S * std::abs(g);
}

GapTrajectory integrate_gap_ode(const GapState& initial, const DragLaw& law, double a, double T_end,
                                const GapOdeOptions& opt) {
  law.validate();
  opt.validate();
  if (!(initial.h > 0.0) || !std::isfinite(initial.hdot)) throw InvalidInput("gap ODE: need h0 > 0 and finite hdot0");
  if (!(T_end > initial.t) || !std::isfinite(a)) throw InvalidInput("gap ODE: need T_end > t0 and finite a");

  using State = ublas::vector<double>;
  using Matrix = ublas::matrix<double>;
  auto rhs = [&](const State& x, State& dx, double) {
    dx(0) = x(1);
    dx(1) = x(1) * law.value(x(0)) + a;
  };
  auto jac = [&](const State& x, Matrix& J, double, State& dfdt) {
    J(0, 0) = 0.0;
    J(0, 1) = 1.0;
    J(1, 0) = x(1) * law.derivative(x(0));
    J(1, 1) = law.value(x(0));
    dfdt(0) = dfdt(1) = 0.0;
  };
  auto system = std::make_pair(rhs, jac);

  GapTrajectory out;
  out.samples.push_back(initial);
  out.min_h = initial.h;
  if (initial.h <= opt.h_contact) {
    out.outcome = GapOutcome::contact;
    out.contact_time = initial.t;
    return out;
  }

  auto stepper = odeint::make_dense_output<odeint::rosenbrock4<double>>(opt.abs_tol, opt.rel_tol);
  State x(2);
  x(0) = initial.h;
  x(1) = initial.hdot;
  const double dt0 = 1e-6 * std::max(1.0, T_end - initial.t);
  stepper.initialize(x, initial.t, std::min(dt0, 1e-3));
  State y(2);
  while (out.steps < opt.max_steps) {
    const auto [t0, t1] = stepper.do_step(system);
    ++out.steps;
    const State& s = stepper.current_state();
    if (!std::isfinite(s(0)) || !std::isfinite(s(1)) ||
        stepper.current_time_step() < opt.min_step * std::max(1.0, std::abs(t1))) {
      out.outcome = GapOutcome::underflow;
      out.message = fmt::format("step size underflow at t = {} (h = {})", t1, s(0));
      return out;
    }
    const double t_end = std::min(t1, T_end);
    if (t_end < t1) stepper.calc_state(t_end, y);
    const State& e = t_end < t1 ? y : s;
    if (e(0) <= opt.h_contact) {
      // bisection on the dense output for h(t) = h_contact
      double lo = t0, hi = t_end;
      for (int it = 0; it < 200 && hi - lo > 4.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, hi); ++it) {
        const double mid = 0.5 * (lo + hi);
        stepper.calc_state(mid, y);
        (y(0) > opt.h_contact ? lo : hi) = mid;
      }
      stepper.calc_state(hi, y);
      out.samples.push_back({hi, y(0), y(1)});
      out.min_h = std::min(out.min_h, y(0));
      out.outcome = GapOutcome::contact;
      out.contact_time = hi;
      return out;
    }
    out.samples.push_back({t_end, e(0), e(1)});
    out.min_h = std::min(out.min_h, e(0));
    if (t1 >= T_end) {
      out.outcome = GapOutcome::reached_end;
      return out;
    }
  }
  out.outcome = GapOutcome::underflow;
  out.message = fmt::format("step limit {} reached at t = {}", opt.max_steps, out.samples.back().t);
  return out;
}

ContactEstimate contact_time(const Trajectory& tr, double delta) {
  ContactEstimate ce;
  if (tr.steps.empty()) return ce;
  std::vector<std::pair<double, double>> g;
  for (const auto& s : tr.steps) g.emplace_back(s.state.t, s.gap);
  if (tr.termination == Termination::collision_approach) g.emplace_back(tr.event_time, tr.event_gap);
  const double guard = 2.0 * delta;
  for (std::size_t k = 1; k < g.size(); ++k) {
    if (g[k].second > guard) continue;
    const auto [ta, ga] = g[k - 1];
    const auto [tb, gb] = g[k];
    ce.event = true;
    ce.bracket_lo = ta;
    ce.bracket_hi = tb;
    ce.guard_time = ga == gb ? tb : ta + (ga - guard) / (ga - gb) * (tb - ta);
    break;
  }
  if (!ce.event || g.size() < 3) return ce;
  // quadratic through the last three samples, first root after the last one
  const auto [t0, g0] = g[g.size() - 3];
  const auto [t1, g1] = g[g.size() - 2];
  const auto [t2, g2] = g[g.size() - 1];
  const double d01 = (g1 - g0) / (t1 - t0), d12 = (g2 - g1) / (t2 - t1);
  const double c2 = (d12 - d01) / (t2 - t0);
  // g(t) = g2 + b (t - t2) + c2 (t - t2)^2
  const double b = d12 + c2 * (t2 - t1);
  std::optional<double> root;
  if (std::abs(c2) < 1e-300) {
    if (b < 0.0) root = t2 - g2 / b;
  } else {
    const double disc = b * b - 4.0 * c2 * g2;
    if (disc >= 0.0) {
      const double q = std::sqrt(disc);
      for (double s : {(-b - q) / (2.0 * c2), (-b + q) / (2.0 * c2)})
        if (s >= 0.0 && (!root || t2 + s < *root)) root = t2 + s;
    }
  }
  ce.extrapolated = root;
  return ce;
}

}  // namespace navslip
