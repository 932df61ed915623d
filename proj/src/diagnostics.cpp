#include "navslip/diagnostics.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

#include "navslip/connect.hpp"
#include "navslip/quadrature.hpp"

namespace navslip {

namespace {

using Values = Eigen::Matrix<double, 2, Eigen::Dynamic>;
using Grads = Eigen::Matrix<double, 4, Eigen::Dynamic>;

double trapezoid(const std::vector<double>& t, const std::vector<double>& f) {
  double s = 0.0;
  for (std::size_t k = 1; k < t.size(); ++k) s += 0.5 * (t[k] - t[k - 1]) * (f[k] + f[k - 1]);
  return s;
}

std::vector<double> times(const Trajectory& tr) {
  std::vector<double> t;
  t.reserve(tr.steps.size());
  for (const auto& s : tr.steps) t.push_back(s.state.t);
  return t;
}

Mat2 sym(const Mat2& g) { return 0.5 * (g + g.transpose()); }

// u and its Jacobian from basis samples.
Jet2 combine(const Values& v, const Grads& g, const Eigen::VectorXd& a) {
  Jet2 j;
  j.value = v * a;
  const Eigen::Vector4d d = g * a;
  j.grad << d(0), d(1), d(2), d(3);
  return j;
}

}  // namespace

// ---------------------------------------------------------------------------
// energy

EnergyReport energy_report(const Trajectory& trajectory, double abs_tol, double c_dt) {
  EnergyReport r;
  if (trajectory.steps.empty()) return r;
  const double ke0 = trajectory.steps.front().ledger.kinetic;
  double dissipated = 0.0, work = 0.0, max_dt = 0.0;
  for (std::size_t k = 0; k < trajectory.steps.size(); ++k) {
    const auto& s = trajectory.steps[k];
    if (k > 0) {
      const double dt = s.state.t - trajectory.steps[k - 1].state.t;
      max_dt = std::max(max_dt, dt);
      dissipated += dt * s.ledger.dissipation();
      work += dt * s.ledger.gravity_work;
    }
    r.t.push_back(s.state.t);
    r.ledger.push_back(s.ledger);
    r.lhs.push_back(s.ledger.kinetic + dissipated);
    r.rhs.push_back(ke0 + work);
  }
  r.tolerance = abs_tol * std::max(1.0, ke0) + c_dt * max_dt;
  r.min_slack = r.rhs[0] - r.lhs[0];
  for (std::size_t k = 0; k < r.lhs.size(); ++k) {
    const double slack = r.rhs[k] - r.lhs[k];
    r.min_slack = std::min(r.min_slack, slack);
    if (slack < -r.tolerance) r.holds = false;
  }
  r.final_slack = r.rhs.back() - r.lhs.back();
  return r;
}

// ---------------------------------------------------------------------------
// weak formulation

ResidualReport weak_residual(const GalerkinModel& model, const Trajectory& trajectory, const SpaceTimeTest& test,
                             double trace_tol) {
  if (trajectory.steps.empty()) throw InvalidInput("weak_residual: empty trajectory");
  if (!test.fluid || !test.fluid_dt || !test.solid || !test.solid_dt)
    throw InvalidInput("weak_residual: incomplete test function");
  const Basis& basis = model.basis();
  const SimParams& p = model.params();
  const SolidShape& shape = model.shape();
  const double L = basis.cavity().extents[0], H = basis.cavity().extents[1];
  int points = p.cavity_points;
  if (points <= 0) points = std::max(64, 4 * std::max(basis.max_i(), basis.max_j()) + 16);
  const auto gx = gauss_legendre(points, 0.0, L), gy = gauss_legendre(points, 0.0, H);

  // basis on the fixed cavity nodes, once
  const int M = points * points;
  std::vector<Values> cv(M);
  std::vector<Grads> cg(M);
  std::vector<Vec2> cx(M);
  std::vector<double> cw(M);
  for (int a = 0; a < points; ++a)
    for (int b = 0; b < points; ++b) {
      const int q = a * points + b;
      cx[q] = {gx.nodes[a], gy.nodes[b]};
      cw[q] = gx.weights[a] * gy.weights[b];
      basis.evaluate(cx[q], &cv[q], &cg[q]);
    }
  // walls: node, weight, unit tangent
  struct WallNode {
    Vec2 x, tau;
    double w;
    Values v;
  };
  std::vector<WallNode> wall;
  for (int a = 0; a < points; ++a) {
    wall.push_back({{0.0, gy.nodes[a]}, {0.0, 1.0}, gy.weights[a], {}});
    wall.push_back({{L, gy.nodes[a]}, {0.0, 1.0}, gy.weights[a], {}});
    wall.push_back({{gx.nodes[a], 0.0}, {1.0, 0.0}, gx.weights[a], {}});
    wall.push_back({{gx.nodes[a], H}, {1.0, 0.0}, gx.weights[a], {}});
  }
  for (auto& wn : wall) basis.evaluate(wn.x, &wn.v, nullptr);

  const double rF = p.rho_F, rS = p.rho_S, mu = p.mu_F;
  const Vec2 g = p.g;
  const std::size_t K = trajectory.steps.size();
  std::vector<double> t(K);
  std::vector<WeakResidualTerms> at(K);
  ResidualReport rep;
  Values v;
  Grads gr;

  for (std::size_t k = 0; k < K; ++k) {
    const auto& st = trajectory.steps[k].state;
    t[k] = st.t;
    const Eigen::VectorXd& a = st.alpha;
    const RigidField& uS = st.rigid;
    const RigidField phS = test.solid(st.t), phS_t = test.solid_dt(st.t);
    WeakResidualTerms& T = at[k];

    // fluid integrand f(x), integrated as cavity minus solid
    auto fluid_terms = [&](const Jet2& u, const Vec2& x, double w, double sign) {
      const Jet2 ph = test.fluid(st.t, x);
      const Vec2 ph_t = test.fluid_dt(st.t, x);
      T.time_fluid -= sign * w * rF * u.value.dot(ph_t);
      T.convection -= sign * w * rF * u.value.dot(ph.grad * u.value);
      const Mat2 Du = sym(u.grad), Dp = sym(ph.grad);
      T.viscous += sign * w * 2.0 * mu * (Du.array() * Dp.array()).sum();
      T.gravity += sign * w * rF * g.dot(ph.value);
    };
    for (int q = 0; q < M; ++q) fluid_terms(combine(cv[q], cg[q], a), cx[q], cw[q], 1.0);
    for (const auto& nd : solid_quadrature(st.placement, shape, p.solid_order)) {
      basis.evaluate(nd.x, &v, &gr);
      fluid_terms(combine(v, gr, a), nd.x, nd.weight, -1.0);
      T.time_solid -= nd.weight * rS * uS(nd.x).dot(phS_t(nd.x));
      T.gravity += nd.weight * rS * g.dot(phS(nd.x));
      if (k == 0) {
        const Jet2 ph0 = test.fluid(st.t, nd.x);
        T.initial += nd.weight * (rF * (v * a).dot(ph0.value) - rS * uS(nd.x).dot(phS(nd.x)));
      }
    }
    if (k == 0)
      for (int q = 0; q < M; ++q) T.initial -= cw[q] * rF * (cv[q] * a).dot(test.fluid(st.t, cx[q]).value);

    for (const auto& wn : wall) {
      const Vec2 u = wn.v * a;
      T.wall_slip += wn.w / (2.0 * p.beta_Omega) * u.dot(wn.tau) * test.fluid(st.t, wn.x).value.dot(wn.tau);
    }
    double trace_scale = 0.0;
    for (const auto& bn : boundary_quadrature(st.placement, shape, p.solid_order)) {
      basis.evaluate(bn.x, &v, nullptr);
      const Vec2 u = v * a;
      const Vec2 ph = test.fluid(st.t, bn.x).value, ps = phS(bn.x);
      const double du = cross(u - uS(bn.x), bn.normal), dp = cross(ph - ps, bn.normal);
      T.interface_slip += bn.weight / (2.0 * p.beta_S) * du * dp;
      rep.trace_defect = std::max(rep.trace_defect, std::abs((ph - ps).dot(bn.normal)));
      trace_scale = std::max(trace_scale, std::max(ph.norm(), ps.norm()));
    }
    if (rep.trace_defect > trace_tol * trace_scale && rep.trace_defect > 1e-14)
      throw IncompatibleData(fmt::format("weak_residual: normal traces of phi_F and phi_S differ by {} at t = {}",
                                         rep.trace_defect, st.t),
                             rep.trace_defect);
  }

  auto integrate = [&](double WeakResidualTerms::*m) {
    std::vector<double> f(K);
    for (std::size_t k = 0; k < K; ++k) f[k] = at[k].*m;
    return trapezoid(t, f);
  };
  WeakResidualTerms& R = rep.terms;
  R.time_fluid = integrate(&WeakResidualTerms::time_fluid);
  R.time_solid = integrate(&WeakResidualTerms::time_solid);
  R.convection = integrate(&WeakResidualTerms::convection);
  R.viscous = integrate(&WeakResidualTerms::viscous);
  R.wall_slip = integrate(&WeakResidualTerms::wall_slip);
  R.interface_slip = integrate(&WeakResidualTerms::interface_slip);
  // body force enters with a minus sign: -int rho (-g) . phi
  R.gravity = integrate(&WeakResidualTerms::gravity);
  R.initial = at[0].initial;
  rep.residual = R.total();
  rep.samples = static_cast<int>(K);
  rep.cavity_points = points;
  rep.solid_order = p.solid_order;
  return rep;
}

double mass_residual(const Trajectory& trajectory, const SolidShape& shape, const ScalarTest& psi, int order) {
  if (trajectory.steps.empty()) throw InvalidInput("mass_residual: empty trajectory");
  const std::size_t K = trajectory.steps.size();
  std::vector<double> f(K);
  for (std::size_t k = 0; k < K; ++k) {
    const auto& st = trajectory.steps[k].state;
    double s = 0.0;
    for (const auto& nd : solid_quadrature(st.placement, shape, order))
      s += nd.weight * (psi.dt(st.t, nd.x) + st.rigid(nd.x).dot(psi.grad(st.t, nd.x)));
    f[k] = s;
  }
  const auto& s0 = trajectory.steps.front().state;
  double initial = 0.0;
  for (const auto& nd : solid_quadrature(s0.placement, shape, order)) initial += nd.weight * psi.value(s0.t, nd.x);
  return -trapezoid(times(trajectory), f) - initial;
}

// ---------------------------------------------------------------------------
// decay quantities

double fit_slope(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2) throw InvalidInput("fit_slope: need two or more (x, y) pairs");
  const double m = static_cast<double>(x.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!(x[i] > 0.0) || !(y[i] > 0.0)) throw InvalidInput("fit_slope: values must be positive");
    mx += std::log(x[i]) / m;
    my += std::log(y[i]) / m;
  }
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double dx = std::log(x[i]) - mx;
    sxy += dx * (std::log(y[i]) - my);
    sxx += dx * dx;
  }
  if (!(sxx > 0.0)) throw InvalidInput("fit_slope: abscissae must not all coincide");
  return sxy / sxx;
}

double penalty_norm(const Trajectory& trajectory) {
  std::vector<double> f;
  for (const auto& s : trajectory.steps) f.push_back(s.penalty_defect);
  return std::sqrt(std::max(0.0, trapezoid(times(trajectory), f)));
}

double penalization_decay(const std::vector<double>& n, const std::vector<double>& norms) {
  if (n.size() < 4 || n.size() != norms.size())
    throw InvalidInput(fmt::format("penalization_decay: need at least 4 matched points (got {})", n.size()));
  return fit_slope(n, norms);
}

std::vector<double> slip_flux_norm(const Trajectory& trajectory) {
  std::vector<double> out;
  for (const auto& s : trajectory.steps) out.push_back(s.flux_norm);
  return out;
}

double slip_flux_norm(const VectorSampler& u, const RigidField& uS, const Placement& placement,
                      const SolidShape& shape, int order) {
  double s = 0.0;
  for (const auto& bn : boundary_quadrature(placement, shape, order)) {
    const double m = (u(bn.x) - uS(bn.x)).dot(bn.normal);
    s += bn.weight * m * m;
  }
  return std::sqrt(s);
}

double slip_flux_integral(const Trajectory& trajectory) {
  std::vector<double> f;
  for (const auto& s : trajectory.steps) f.push_back(s.flux_norm * s.flux_norm);
  return trapezoid(times(trajectory), f);
}

// ---------------------------------------------------------------------------
// analytic test functions

namespace {

double damp(double t, double T) { return t < T ? std::pow(1.0 - t / T, 3) : 0.0; }
double damp_dt(double t, double T) { return t < T ? -3.0 / T * std::pow(1.0 - t / T, 2) : 0.0; }

// eta(|d|) for a radial profile q(rho): value, gradient, Hessian.
StreamJet radial(const Vec2& d, double q, double q1, double q2) {
  StreamJet s;
  s.psi = q;
  const double rho = d.norm();
  if (rho < 1e-300) {
    s.hess = q2 * Mat2::Identity();
    return s;
  }
  const Vec2 e = d / rho;
  s.grad = q1 * e;
  s.hess = q2 * e * e.transpose() + q1 / rho * (Mat2::Identity() - e * e.transpose());
  return s;
}

StreamJet product(const StreamJet& a, const StreamJet& b) {
  StreamJet s;
  s.psi = a.psi * b.psi;
  s.grad = a.psi * b.grad + b.psi * a.grad;
  s.hess = a.psi * b.hess + b.psi * a.hess + a.grad * b.grad.transpose() + b.grad * a.grad.transpose();
  return s;
}

Jet2 jet_of(const StreamJet& s) { return {velocity_from_stream(s), velocity_gradient_from_stream(s)}; }

}  // namespace

SpaceTimeTest bump_test(const Vec2& center, double radius, double T, double amplitude) {
  if (!(radius > 0.0) || !(T > 0.0)) throw InvalidInput("bump_test: radius and T must be positive");
  // b = A (1 - |d|^2 / R^2)^4 on the disk, C^3 across its edge
  auto stream = [=](const Vec2& x) {
    const Vec2 d = x - center;
    const double s = 1.0 - d.squaredNorm() / (radius * radius);
    if (s <= 0.0) return StreamJet{};
    const double rho = d.norm(), R2 = radius * radius;
    const double q = amplitude * std::pow(s, 4);
    const double q1 = amplitude * 4.0 * std::pow(s, 3) * (-2.0 * rho / R2);
    const double q2 = amplitude * (12.0 * s * s * 4.0 * rho * rho / (R2 * R2) - 8.0 * std::pow(s, 3) / R2);
    return radial(d, q, q1, q2);
  };
  SpaceTimeTest tf;
  tf.fluid = [=](double t, const Vec2& x) {
    Jet2 j = jet_of(stream(x));
    j.value *= damp(t, T);
    j.grad *= damp(t, T);
    return j;
  };
  tf.fluid_dt = [=](double t, const Vec2& x) { return Vec2(damp_dt(t, T) * velocity_from_stream(stream(x))); };
  tf.solid = [](double) { return RigidField{}; };
  tf.solid_dt = [](double) { return RigidField{}; };
  return tf;
}

SpaceTimeTest carrier_test(const RigidField& rigid, double r_in, double r_out, double T) {
  if (!(r_in > 0.0 && r_out > r_in) || !(T > 0.0)) throw InvalidInput("carrier_test: need 0 < r_in < r_out, T > 0");
  const Vec2 c = rigid.center;
  auto stream = [=](const Vec2& x) {
    const Vec2 d = x - c;
    // rigid stream: V_x dy - V_y dx - omega |d|^2 / 2
    StreamJet s;
    s.psi = rigid.V.x() * d.y() - rigid.V.y() * d.x() - 0.5 * rigid.omega * d.squaredNorm();
    s.grad = Vec2(-rigid.V.y() - rigid.omega * d.x(), rigid.V.x() - rigid.omega * d.y());
    s.hess = -rigid.omega * Mat2::Identity();
    const double rho = d.norm();
    if (rho <= r_in) return s;
    if (rho >= r_out) return StreamJet{};
    // eta(rho) = chi(1/4 + (3/4)(rho - r_in)/(r_out - r_in))
    const double k = 0.75 / (r_out - r_in), arg = 0.25 + k * (rho - r_in);
    return product(s, radial(d, truncation(arg), k * truncation_d1(arg), k * k * truncation_d2(arg)));
  };
  SpaceTimeTest tf;
  tf.fluid = [=](double t, const Vec2& x) {
    Jet2 j = jet_of(stream(x));
    j.value *= damp(t, T);
    j.grad *= damp(t, T);
    return j;
  };
  tf.fluid_dt = [=](double t, const Vec2& x) { return Vec2(damp_dt(t, T) * velocity_from_stream(stream(x))); };
  tf.solid = [=](double t) { return RigidField{damp(t, T) * rigid.V, damp(t, T) * rigid.omega, c}; };
  tf.solid_dt = [=](double t) { return RigidField{damp_dt(t, T) * rigid.V, damp_dt(t, T) * rigid.omega, c}; };
  return tf;
}

SpaceTimeTest operator+(const SpaceTimeTest& a, const SpaceTimeTest& b) {
  SpaceTimeTest s;
  s.fluid = [=](double t, const Vec2& x) {
    Jet2 ja = a.fluid(t, x), jb = b.fluid(t, x);
    return Jet2{ja.value + jb.value, ja.grad + jb.grad};
  };
  s.fluid_dt = [=](double t, const Vec2& x) { return Vec2(a.fluid_dt(t, x) + b.fluid_dt(t, x)); };
  auto add = [](const RigidField& p, const RigidField& q) {
    // re-center q on p's center
    return RigidField{p.V + q.V + q.omega * perp(p.center - q.center), p.omega + q.omega, p.center};
  };
  s.solid = [=](double t) { return add(a.solid(t), b.solid(t)); };
  s.solid_dt = [=](double t) { return add(a.solid_dt(t), b.solid_dt(t)); };
  return s;
}

}  // namespace navslip
