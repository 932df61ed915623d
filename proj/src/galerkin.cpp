#include "navslip/galerkin.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include <fmt/format.h>

#include "navslip/connect.hpp"
#include "navslip/quadrature.hpp"

namespace navslip {

namespace {
constexpr double pi = std::numbers::pi;
using Values = Eigen::Matrix<double, 2, Eigen::Dynamic>;
using Grads = Eigen::Matrix<double, 4, Eigen::Dynamic>;
}  // namespace

// --------------------------------------------------------------------------
// basis

Basis::Basis(const Cavity& cavity, int N) : cavity_(cavity) {
  cavity.validate();
  if (cavity.dim != 2) throw InvalidInput("build_basis: only planar cavities carry the stream-function basis");
  if (N < 1) throw InvalidInput("build_basis: N must be >= 1");
  const double L = cavity.extents[0], H = cavity.extents[1];
  struct Cand {
    int i, j;
    double key;
  };
  std::vector<Cand> cands;
  for (int i = 1; i <= N; ++i)
    for (int j = 1; j <= N; ++j) cands.push_back({i, j, double(i) * i / (L * L) + double(j) * j / (H * H)});
  std::sort(cands.begin(), cands.end(), [](const Cand& a, const Cand& b) {
    if (a.key != b.key) return a.key < b.key;
    return a.i < b.i;
  });
  for (int k = 0; k < N; ++k) {
    const auto& c = cands[k];
    modes_.push_back({c.i, c.j, pi * std::sqrt(c.key * L * H / 4.0)});
    max_i_ = std::max(max_i_, c.i);
    max_j_ = std::max(max_j_, c.j);
  }
}

Basis build_basis(const Cavity& cavity, int N) { return Basis(cavity, N); }

void Basis::trig(const Vec2& x, std::vector<double>& sx, std::vector<double>& cx, std::vector<double>& sy,
                 std::vector<double>& cy) const {
  const double L = cavity_.extents[0], H = cavity_.extents[1];
  sx.resize(max_i_ + 1);
  cx.resize(max_i_ + 1);
  sy.resize(max_j_ + 1);
  cy.resize(max_j_ + 1);
  for (int i = 0; i <= max_i_; ++i) {
    sx[i] = std::sin(i * pi * x.x() / L);
    cx[i] = std::cos(i * pi * x.x() / L);
  }
  for (int j = 0; j <= max_j_; ++j) {
    sy[j] = std::sin(j * pi * x.y() / H);
    cy[j] = std::cos(j * pi * x.y() / H);
  }
}

void Basis::evaluate(const Vec2& x, Values* values, Grads* grads) const {
  thread_local std::vector<double> sx, cx, sy, cy;
  trig(x, sx, cx, sy, cy);
  const double L = cavity_.extents[0], H = cavity_.extents[1];
  if (values) values->resize(2, size());
  if (grads) grads->resize(4, size());
  for (int k = 0; k < size(); ++k) {
    const auto& m = modes_[k];
    const double a = m.i * pi / L, b = m.j * pi / H, inv = 1.0 / m.norm;
    const double si = sx[m.i], ci = cx[m.i], sj = sy[m.j], cj = cy[m.j];
    if (values) {
      (*values)(0, k) = b * si * cj * inv;
      (*values)(1, k) = -a * ci * sj * inv;
    }
    if (grads) {
      (*grads)(0, k) = a * b * ci * cj * inv;
      (*grads)(1, k) = -b * b * si * sj * inv;
      (*grads)(2, k) = a * a * si * sj * inv;
      (*grads)(3, k) = -a * b * ci * cj * inv;
    }
  }
}

Jet2 Basis::jet(int k, const Vec2& x) const {
  Values v;
  Grads g;
  evaluate(x, &v, &g);
  Jet2 j;
  j.value = v.col(k);
  j.grad << g(0, k), g(1, k), g(2, k), g(3, k);
  return j;
}

Vec2 Basis::velocity(const Eigen::VectorXd& alpha, const Vec2& x) const {
  Values v;
  evaluate(x, &v, nullptr);
  return v * alpha;
}

Jet2 Basis::velocity_jet(const Eigen::VectorXd& alpha, const Vec2& x) const {
  Values v;
  Grads g;
  evaluate(x, &v, &g);
  const Eigen::Vector4d d = g * alpha;
  Jet2 j;
  j.value = v * alpha;
  j.grad << d[0], d[1], d[2], d[3];
  return j;
}

StreamJet Basis::stream(const Eigen::VectorXd& alpha, const Vec2& x) const {
  thread_local std::vector<double> sx, cx, sy, cy;
  trig(x, sx, cx, sy, cy);
  const double L = cavity_.extents[0], H = cavity_.extents[1];
  StreamJet s;
  for (int k = 0; k < size(); ++k) {
    const auto& m = modes_[k];
    const double a = m.i * pi / L, b = m.j * pi / H, c = alpha[k] / m.norm;
    const double si = sx[m.i], ci = cx[m.i], sj = sy[m.j], cj = cy[m.j];
    s.psi += c * si * sj;
    s.grad += c * Vec2(a * ci * sj, b * si * cj);
    s.hess(0, 0) -= c * a * a * si * sj;
    s.hess(0, 1) += c * a * b * ci * cj;
    s.hess(1, 1) -= c * b * b * si * sj;
  }
  s.hess(1, 0) = s.hess(0, 1);
  return s;
}

// --------------------------------------------------------------------------
// parameters

void SimParams::validate() const {
  auto positive = [](double v, const char* name) {
    if (!(v > 0.0) || !std::isfinite(v)) throw InvalidInput(fmt::format("{} must be positive (got {})", name, v));
  };
  positive(rho_F, "rho_F");
  positive(rho_S, "rho_S");
  positive(mu_F, "mu_F");
  positive(beta_S, "beta_S");
  positive(beta_Omega, "beta_Omega");
  positive(delta, "delta");
  positive(dt, "dt");
  positive(picard_tol, "picard_tol");
  if (!(n >= 1.0)) throw InvalidInput(fmt::format("n must be >= 1 (got {})", n));
  if (N < 1) throw InvalidInput("N must be >= 1");
  if (picard_max_iter < 1) throw InvalidInput("picard_max_iter must be >= 1");
  if (!(relaxation > 0.0 && relaxation <= 1.0)) throw InvalidInput("relaxation must lie in (0, 1]");
  if (!g.allFinite()) throw InvalidInput("gravity must be finite");
  if (solid_order < 2 || band_order < 2 || band_angles < 8) throw InvalidInput("quadrature orders too small");
}

// --------------------------------------------------------------------------
// cavity integrals

CavityIntegrals cavity_integrals(const Basis& basis, int points, Exec exec) {
  const double L = basis.cavity().extents[0], H = basis.cavity().extents[1];
  const int N = basis.size();
  const auto gx = gauss_legendre(points, 0.0, L), gy = gauss_legendre(points, 0.0, H);
  const int M = points * points;
  Eigen::MatrixXd Ew(2 * M, N), Es(2 * M, N), Dv(3 * M, N);
  std::vector<Values> vals(M);
  std::vector<Grads> grads(M);
  for (int a = 0; a < points; ++a)
    for (int b = 0; b < points; ++b) {
      const int q = a * points + b;
      const double w = gx.weights[a] * gy.weights[b];
      basis.evaluate({gx.nodes[a], gy.nodes[b]}, &vals[q], &grads[q]);
      Ew.row(2 * q) = w * vals[q].row(0);
      Ew.row(2 * q + 1) = w * vals[q].row(1);
      Es.row(2 * q) = std::sqrt(w) * vals[q].row(0);
      Es.row(2 * q + 1) = std::sqrt(w) * vals[q].row(1);
      const double s = std::sqrt(2.0 * w);
      Dv.row(3 * q) = s * grads[q].row(0);
      Dv.row(3 * q + 1) = s * grads[q].row(3);
      Dv.row(3 * q + 2) = s * std::sqrt(0.5) * (grads[q].row(1) + grads[q].row(2));
    }
  CavityIntegrals out;
  kernels::gram(Es, out.gram, exec);
  kernels::gram(Dv, out.viscous, exec);
  out.T.resize(N);
  Eigen::MatrixXd Dk(2 * M, N);
  for (int k = 0; k < N; ++k) {
    for (int q = 0; q < M; ++q) {
      const double ex = vals[q](0, k), ey = vals[q](1, k);
      Dk.row(2 * q) = ex * grads[q].row(0) + ey * grads[q].row(1);
      Dk.row(2 * q + 1) = ex * grads[q].row(2) + ey * grads[q].row(3);
    }
    kernels::cross_gram(Ew, Dk, out.T[k], exec);
  }
  // walls: tangential traces
  Eigen::MatrixXd Wt(4 * points, N);
  Values v;
  for (int a = 0; a < points; ++a) {
    basis.evaluate({0.0, gy.nodes[a]}, &v, nullptr);
    Wt.row(a) = std::sqrt(gy.weights[a]) * v.row(1);
    basis.evaluate({L, gy.nodes[a]}, &v, nullptr);
    Wt.row(points + a) = std::sqrt(gy.weights[a]) * v.row(1);
    basis.evaluate({gx.nodes[a], 0.0}, &v, nullptr);
    Wt.row(2 * points + a) = std::sqrt(gx.weights[a]) * v.row(0);
    basis.evaluate({gx.nodes[a], H}, &v, nullptr);
    Wt.row(3 * points + a) = std::sqrt(gx.weights[a]) * v.row(0);
  }
  kernels::gram(Wt, out.wall, exec);
  return out;
}

// --------------------------------------------------------------------------
// model

GalerkinModel::GalerkinModel(const Cavity& cavity, const SolidShape& shape, const SimParams& params, Exec exec)
    : cavity_(cavity), shape_(shape), params_(params), exec_(exec) {
  params.validate();
  shape_.density = params.rho_S;
  shape_.validate();
  basis_ = Basis(cavity, params.N);
  int points = params.cavity_points;
  if (points <= 0) points = std::max(64, 4 * std::max(basis_.max_i(), basis_.max_j()) + 16);
  auto ci = cavity_integrals(basis_, points, exec);
  T_ = std::move(ci.T);
  K_ = std::move(ci.viscous);
  Wall_ = std::move(ci.wall);
}

namespace {

struct SolidSamples {
  std::vector<VolumeNode> nodes;
  std::vector<Values> vals;
  std::vector<Grads> grads;
  double area = 0.0, J = 0.0;
  Eigen::Matrix<double, 2, Eigen::Dynamic> V;
  Eigen::VectorXd omega;
};

SolidSamples sample_solid(const Basis& basis, const Placement& placement, const SolidShape& shape, int order,
                          bool with_grads) {
  SolidSamples s;
  s.nodes = solid_quadrature(placement, shape, order);
  const int N = basis.size();
  s.vals.resize(s.nodes.size());
  if (with_grads) s.grads.resize(s.nodes.size());
  s.V = Eigen::Matrix<double, 2, Eigen::Dynamic>::Zero(2, N);
  s.omega = Eigen::VectorXd::Zero(N);
  for (std::size_t q = 0; q < s.nodes.size(); ++q) {
    const auto& nd = s.nodes[q];
    basis.evaluate(nd.x, &s.vals[q], with_grads ? &s.grads[q] : nullptr);
    const Vec2 r = nd.x - placement.center;
    s.area += nd.weight;
    s.J += nd.weight * r.squaredNorm();
    s.V += nd.weight * s.vals[q];
    s.omega += nd.weight * (s.vals[q].transpose() * perp(r));
  }
  s.V /= s.area;
  s.omega /= s.J;
  return s;
}

}  // namespace

RigidField GalerkinModel::rigid_projection(const SystemParts& parts, const Placement& placement,
                                           const Eigen::VectorXd& alpha) const {
  return {parts.proj_V * alpha, parts.proj_omega.dot(alpha), placement.center};
}

RigidField GalerkinModel::rigid_projection(const Placement& placement, const Eigen::VectorXd& alpha) const {
  const auto s = sample_solid(basis_, placement, shape_, params_.solid_order, false);
  return {s.V * alpha, s.omega.dot(alpha), placement.center};
}

SystemParts GalerkinModel::assemble(const Placement& placement, const Eigen::VectorXd& alpha_v,
                                    bool with_solid) const {
  const int N = basis_.size();
  if (alpha_v.size() != N) throw InvalidInput("assemble: coefficient vector has the wrong size");
  const SimParams& p = params_;
  SystemParts out;
  out.A = p.rho_F * Eigen::MatrixXd::Identity(N, N);
  out.wall_slip = Wall_ / (2.0 * p.beta_Omega);
  out.f = Eigen::VectorXd::Zero(N);  // int_Omega e_i = 0 exactly

  Eigen::MatrixXd C = Eigen::MatrixXd::Zero(N, N);
  for (int k = 0; k < N; ++k)
    if (alpha_v[k] != 0.0) C += alpha_v[k] * T_[k];
  C *= p.rho_F;

  if (!with_solid) {
    out.viscous = p.mu_F * K_;
    out.interface_slip = Eigen::MatrixXd::Zero(N, N);
    out.penalization = Eigen::MatrixXd::Zero(N, N);
    out.normal_mismatch = Eigen::MatrixXd::Zero(N, N);
    out.proj_V = Eigen::Matrix<double, 2, Eigen::Dynamic>::Zero(2, N);
    out.proj_omega = Eigen::VectorXd::Zero(N);
    out.convection = 0.5 * (C - C.transpose());
    return out;
  }

  const double gap = gap_distance(placement, shape_, cavity_);
  if (gap < p.delta)
    throw CollisionApproach(fmt::format("assemble: gap {} leaves no room for the connecting band", gap), 0.0, gap);

  const auto S = sample_solid(basis_, placement, shape_, p.solid_order, true);
  out.proj_V = S.V;
  out.proj_omega = S.omega;
  const int Ms = static_cast<int>(S.nodes.size());

  // solid volume terms
  Eigen::MatrixXd Es(2 * Ms, N), Rs(2 * Ms, N), Ds(3 * Ms, N);
  Eigen::VectorXd ew = Eigen::VectorXd::Zero(N);
  for (int q = 0; q < Ms; ++q) {
    const auto& nd = S.nodes[q];
    const double sw = std::sqrt(nd.weight);
    const Vec2 r = perp(nd.x - placement.center);
    Es.row(2 * q) = sw * S.vals[q].row(0);
    Es.row(2 * q + 1) = sw * S.vals[q].row(1);
    Rs.row(2 * q) = sw * (S.vals[q].row(0) - S.V.row(0) - r.x() * S.omega.transpose());
    Rs.row(2 * q + 1) = sw * (S.vals[q].row(1) - S.V.row(1) - r.y() * S.omega.transpose());
    const double s2 = std::sqrt(2.0 * nd.weight);
    Ds.row(3 * q) = s2 * S.grads[q].row(0);
    Ds.row(3 * q + 1) = s2 * S.grads[q].row(3);
    Ds.row(3 * q + 2) = s2 * std::sqrt(0.5) * (S.grads[q].row(1) + S.grads[q].row(2));
    ew += nd.weight * (S.vals[q].transpose() * (-p.g));
  }
  Eigen::MatrixXd Gs, Pen, Ks;
  kernels::gram(Es, Gs, exec_);
  kernels::gram(Rs, Pen, exec_);
  kernels::gram(Ds, Ks, exec_);
  out.A += (p.rho_S - p.rho_F) * Gs;
  out.penalization = p.n * Pen;
  out.viscous = p.mu_F * K_ - (p.mu_F - p.mu_solid()) * Ks;
  out.f = (p.rho_S - p.rho_F) * ew;

  // interface terms
  const auto bnodes = boundary_quadrature(placement, shape_, p.solid_order);
  const int Mb = static_cast<int>(bnodes.size());
  Eigen::MatrixXd Bt(Mb, N), Bn(Mb, N);
  Values v;
  for (int q = 0; q < Mb; ++q) {
    const auto& b = bnodes[q];
    basis_.evaluate(b.x, &v, nullptr);
    const Vec2 r = perp(b.x - placement.center);
    const Values d = v - S.V - r * S.omega.transpose();
    const Vec2 tau = perp(b.normal);
    const double sw = std::sqrt(b.weight);
    Bt.row(q) = sw * (tau.transpose() * d);
    Bn.row(q) = sw * (b.normal.transpose() * d);
  }
  Eigen::MatrixXd It;
  kernels::gram(Bt, It, exec_);
  out.interface_slip = It / (2.0 * p.beta_S);
  kernels::gram(Bn, out.normal_mismatch, exec_);

  // convection with the connecting field built from alpha_v
  const RigidField Pv{S.V * alpha_v, S.omega.dot(alpha_v), placement.center};
  const StreamConnection conn([&](const Vec2& x) { return basis_.stream(alpha_v, x); }, Pv, placement, shape_,
                              p.delta, p.solid_order);
  const double r = shape_.radius;
  std::vector<VolumeNode> band = annulus_quadrature(placement.center, r, r + 0.25 * p.delta, p.band_order, p.band_angles);
  const auto outer = annulus_quadrature(placement.center, r + 0.25 * p.delta, r + p.delta, p.band_order, p.band_angles);
  band.insert(band.end(), outer.begin(), outer.end());
  const int Mv = Ms + static_cast<int>(band.size());
  Eigen::MatrixXd Lc(2 * Mv, N), Rc(2 * Mv, N);
  Grads g;
  auto add_row = [&](int q, double w, const Values& vals, const Grads& grads, const Vec2& c) {
    Lc.row(2 * q) = w * vals.row(0);
    Lc.row(2 * q + 1) = w * vals.row(1);
    Rc.row(2 * q) = c.x() * grads.row(0) + c.y() * grads.row(1);
    Rc.row(2 * q + 1) = c.x() * grads.row(2) + c.y() * grads.row(3);
  };
  for (int q = 0; q < Ms; ++q) {
    const Vec2 u = S.vals[q] * alpha_v;
    add_row(q, S.nodes[q].weight, S.vals[q], S.grads[q], p.rho_S * Pv(S.nodes[q].x) - p.rho_F * u);
  }
  for (std::size_t q = 0; q < band.size(); ++q) {
    basis_.evaluate(band[q].x, &v, &g);
    const Vec2 u = v * alpha_v;
    add_row(Ms + static_cast<int>(q), band[q].weight, v, g, p.rho_F * (conn(band[q].x) - u));
  }
  Eigen::MatrixXd Cl;
  kernels::cross_gram(Lc, Rc, Cl, exec_);
  C += Cl;
  out.convection = 0.5 * (C - C.transpose());
  return out;
}

GalerkinState GalerkinModel::initial_state(const Placement& placement, const Eigen::VectorXd& alpha) const {
  if (alpha.size() != basis_.size()) throw InvalidInput("initial_state: coefficient vector has the wrong size");
  GalerkinState s;
  s.t = 0.0;
  s.alpha = alpha;
  s.placement = placement;
  s.rigid = rigid_projection(placement, alpha);
  return s;
}

EnergyLedger GalerkinModel::ledger(const SystemParts& parts, const Eigen::VectorXd& a) const {
  EnergyLedger l;
  l.kinetic = 0.5 * a.dot(parts.A * a);
  l.viscous = a.dot(parts.viscous * a);
  l.wall_slip = a.dot(parts.wall_slip * a);
  l.interface_slip = a.dot(parts.interface_slip * a);
  l.penalization = a.dot(parts.penalization * a);
  l.gravity_work = parts.f.dot(a);
  return l;
}

StepRecord GalerkinModel::step(const GalerkinState& state) const {
  const SimParams& p = params_;
  const double gap0 = gap_distance(state.placement, shape_, cavity_);
  if (gap0 < 2.0 * p.delta)
    throw CollisionApproach(fmt::format("step: gap {} below 2 delta = {}", gap0, 2.0 * p.delta), state.t, gap0);

  // A at the start of the step
  const auto S0 = sample_solid(basis_, state.placement, shape_, p.solid_order, false);
  Eigen::MatrixXd Es(2 * S0.nodes.size(), basis_.size());
  for (std::size_t q = 0; q < S0.nodes.size(); ++q) {
    const double sw = std::sqrt(S0.nodes[q].weight);
    Es.row(2 * q) = sw * S0.vals[q].row(0);
    Es.row(2 * q + 1) = sw * S0.vals[q].row(1);
  }
  Eigen::MatrixXd G0;
  kernels::gram(Es, G0, exec_);
  const Eigen::MatrixXd A0 = p.rho_F * Eigen::MatrixXd::Identity(basis_.size(), basis_.size()) + (p.rho_S - p.rho_F) * G0;
  const Eigen::VectorXd rhs0 = A0 * state.alpha;

  Eigen::VectorXd iterate = state.alpha;
  RigidField P{S0.V * iterate, S0.omega.dot(iterate), state.placement.center};
  std::vector<double> history;
  for (int m = 0; m < p.picard_max_iter; ++m) {
    Placement next{state.placement.center + p.dt * P.V, state.placement.angle + p.dt * P.omega};
    SystemParts parts;
    try {
      parts = assemble(next, iterate);
    } catch (const CollisionApproach& e) {
      throw CollisionApproach(e.what(), state.t + p.dt, e.gap());
    } catch (const InvalidInput& e) {
      throw CollisionApproach(fmt::format("step: solid leaves the cavity ({})", e.what()), state.t + p.dt, 0.0);
    }
    const Eigen::MatrixXd M = 0.5 * (A0 + parts.A) + p.dt * parts.B();
    const Eigen::VectorXd sol = M.partialPivLu().solve(rhs0 + p.dt * parts.f);
    const double res = (sol - iterate).norm();
    history.push_back(res);
    if (!std::isfinite(res) || (m >= 8 && res > 1e6 * std::max(history.front(), p.picard_tol)))
      throw PicardFailure(fmt::format("Picard iteration diverged at t = {} (residual {:.3e})", state.t + p.dt, res),
                          history);
    if (res <= p.picard_tol) {
      StepRecord rec;
      rec.state.t = state.t + p.dt;
      rec.state.alpha = sol;
      rec.state.placement = next;
      rec.state.rigid = rigid_projection(parts, next, sol);
      rec.transport = P;
      rec.transport.center = next.center;
      rec.ledger = ledger(parts, sol);
      rec.penalty_defect = sol.dot(parts.penalization * sol) / p.n;
      rec.flux_norm = std::sqrt(std::max(0.0, sol.dot(parts.normal_mismatch * sol)));
      const Eigen::VectorXd d = sol - state.alpha;
      rec.numerical_slack = 0.5 * d.dot(A0 * d);
      rec.picard_iterations = m + 1;
      rec.gap = gap_distance(next, shape_, cavity_);
      if (rec.gap < 2.0 * p.delta)
        throw CollisionApproach(fmt::format("gap {} below 2 delta = {} at t = {}", rec.gap, 2.0 * p.delta, rec.state.t),
                                rec.state.t, rec.gap);
      return rec;
    }
    iterate += p.relaxation * (sol - iterate);
    P = rigid_projection(parts, next, iterate);
  }
  throw PicardFailure(fmt::format("Picard iteration did not reach {:.1e} in {} sweeps at t = {} (last residual {:.3e})",
                                  p.picard_tol, p.picard_max_iter, state.t + p.dt, history.back()),
                      history);
}

SystemParts assemble_system(const GalerkinModel& model, const GalerkinState& state) {
  return model.assemble(state.placement, state.alpha);
}

StepRecord picard_step(const GalerkinModel& model, const GalerkinState& state) { return model.step(state); }

// --------------------------------------------------------------------------
// horizon

double horizon_constant(const SolidShape& shape) {
  shape.validate();
  const double r = shape.radius;
  const double mass = shape.density * pi * r * r;
  const double lambda0 = 0.5 * shape.density * pi * r * r * r * r;
  return std::sqrt(2.0) * std::max(1.0, r) / std::sqrt(std::min({1.0, lambda0, mass}));
}

double existence_horizon(const Placement& placement, const SolidShape& shape, const Cavity& cavity, double delta,
                         double R) {
  if (!(R > 0.0)) throw InvalidInput("existence_horizon: R must be positive");
  const double margin = gap_distance(placement, shape, cavity) - 2.0 * delta;
  if (margin <= 0.0) return 0.0;
  return margin / (horizon_constant(shape) * std::sqrt(shape.density) * R);
}

double default_velocity_bound(double kinetic_energy, const SimParams& params) {
  const double R = 2.0 * std::sqrt(std::max(kinetic_energy, 0.0)) / std::sqrt(std::min(params.rho_F, params.rho_S));
  return std::max(R, 1e-300);
}

// --------------------------------------------------------------------------
// driver

Trajectory run_simulation(const GalerkinModel& model, const Placement& placement, const Eigen::VectorXd& alpha0,
                          double T_end) {
  const SimParams& p = model.params();
  const double gap = gap_distance(placement, model.shape(), model.cavity());
  if (!(gap > 2.0 * p.delta))
    throw InvalidInput(fmt::format("run_simulation: initial gap {} must exceed 2 delta = {}", gap, 2.0 * p.delta));
  if (!(T_end >= 0.0)) throw InvalidInput("run_simulation: T_end must be nonnegative");
  Trajectory traj;
  StepRecord first;
  first.state = model.initial_state(placement, alpha0);
  first.transport = first.state.rigid;
  const auto parts = model.assemble(placement, alpha0);
  first.ledger = model.ledger(parts, alpha0);
  first.penalty_defect = alpha0.dot(parts.penalization * alpha0) / p.n;
  first.flux_norm = std::sqrt(std::max(0.0, alpha0.dot(parts.normal_mismatch * alpha0)));
  first.gap = gap;
  traj.steps.push_back(first);
  traj.velocity_bound = default_velocity_bound(first.ledger.kinetic, p);
  traj.horizon = existence_horizon(placement, model.shape(), model.cavity(), p.delta, traj.velocity_bound);

  const long steps = std::lround(T_end / p.dt);
  for (long k = 0; k < steps; ++k) {
    try {
      traj.steps.push_back(model.step(traj.steps.back().state));
    } catch (const CollisionApproach& e) {
      traj.termination = Termination::collision_approach;
      traj.message = e.what();
      traj.event_time = e.time();
      traj.event_gap = e.gap();
      return traj;
    } catch (const PicardFailure& e) {
      traj.termination = Termination::picard_failure;
      traj.message = e.what();
      traj.event_time = traj.steps.back().state.t + p.dt;
      traj.picard_history = e.history();
      return traj;
    }
  }
  return traj;
}

Eigen::VectorXd rest_coefficients(const Basis& basis) { return Eigen::VectorXd::Zero(basis.size()); }

Eigen::VectorXd solid_translation_coefficients(const Basis& basis, const Placement& placement,
                                               const SolidShape& shape, const Vec2& V) {
  Eigen::VectorXd a = Eigen::VectorXd::Zero(basis.size());
  Values v;
  for (const auto& nd : solid_quadrature(placement, shape, 16)) {
    basis.evaluate(nd.x, &v, nullptr);
    a += nd.weight * (v.transpose() * V);
  }
  return a;
}

}  // namespace navslip
