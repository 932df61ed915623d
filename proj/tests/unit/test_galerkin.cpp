#include <cmath>
#include <numbers>

#include <doctest.h>

#include "helpers.hpp"
#include "navslip/connect.hpp"
#include "navslip/galerkin.hpp"
#include "navslip/quadrature.hpp"

using namespace navslip;

namespace {

constexpr double pi = std::numbers::pi;

SimParams heavy_params(int N = 16) {
  SimParams p;
  p.rho_F = 1.0;
  p.rho_S = 2.0;
  p.mu_F = 0.05;
  p.beta_S = 0.5;
  p.beta_Omega = 0.5;
  p.n = 100.0;
  p.delta = 0.1;
  p.N = N;
  p.dt = 0.01;
  return p;
}

const Cavity cavity2 = Cavity::rectangle(2.0, 2.0);
const SolidShape disk{0.25, 2.0};
const Placement mid{{1.0, 1.2}, 0.0};

double min_eig(const Eigen::MatrixXd& M) {
  return Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(0.5 * (M + M.transpose())).eigenvalues().minCoeff();
}

}  // namespace

TEST_CASE("basis: normalization, orthonormality, solenoidality, wall traces") {
  const Cavity cav = Cavity::rectangle(1.5, 1.0);
  const Basis b1(cav, 1);
  const Basis b(cav, 10);
  const auto gx = gauss_legendre(60, 0.0, 1.5), gy = gauss_legendre(60, 0.0, 1.0);
  Eigen::MatrixXd G = Eigen::MatrixXd::Zero(10, 10);
  double n1 = 0.0;
  for (int a = 0; a < 60; ++a)
    for (int c = 0; c < 60; ++c) {
      const Vec2 x(gx.nodes[a], gy.nodes[c]);
      const double w = gx.weights[a] * gy.weights[c];
      n1 += w * b1.jet(0, x).value.squaredNorm();
      for (int i = 0; i < 10; ++i)
        for (int j = 0; j < 10; ++j) G(i, j) += w * b.jet(i, x).value.dot(b.jet(j, x).value);
    }
  CHECK(n1 == doctest::Approx(1.0).epsilon(1e-12));
  CHECK((G - Eigen::MatrixXd::Identity(10, 10)).cwiseAbs().maxCoeff() < 1e-10);
  for (int k = 0; k < 10; ++k)
    for (int s = 0; s < 20; ++s) {
      const double t = testing_util::uniform(0.0, 1.0);
      CHECK(std::abs(b.jet(k, {0.0, t}).value.x()) < 1e-12);
      CHECK(std::abs(b.jet(k, {1.5, t}).value.x()) < 1e-12);
      CHECK(std::abs(b.jet(k, {1.5 * t, 0.0}).value.y()) < 1e-12);
      CHECK(std::abs(b.jet(k, {1.5 * t, 1.0}).value.y()) < 1e-12);
      const Vec2 x(1.5 * testing_util::uniform(0, 1), testing_util::uniform(0, 1));
      const Jet2 j = b.jet(k, x);
      CHECK(std::abs(j.grad.trace()) < 1e-10);
      const double h = 1e-6;
      const Vec2 fd = (b.jet(k, x + Vec2(0, h)).value - b.jet(k, x - Vec2(0, h)).value) / (2 * h);
      CHECK((fd - j.grad.col(1)).norm() < 1e-6);
    }
  // ordering by frequency
  for (int k = 1; k < 10; ++k) {
    const auto &p = b.modes()[k - 1], &q = b.modes()[k];
    CHECK(p.i * p.i / 2.25 + p.j * p.j <= q.i * q.i / 2.25 + q.j * q.j + 1e-12);
  }
  // stream function consistency
  Eigen::VectorXd a = Eigen::VectorXd::Random(10);
  for (int s = 0; s < 10; ++s) {
    const Vec2 x(1.5 * testing_util::uniform(0, 1), testing_util::uniform(0, 1));
    CHECK((velocity_from_stream(b.stream(a, x)) - b.velocity(a, x)).norm() < 1e-12);
    CHECK((velocity_gradient_from_stream(b.stream(a, x)) - b.velocity_jet(a, x).grad).norm() < 1e-11);
  }
}

TEST_CASE("assembly kernels: serial and parallel results are bitwise identical") {
  const Basis b(cavity2, 12);
  const auto s = cavity_integrals(b, 48, Exec::serial);
  const auto p = cavity_integrals(b, 48, Exec::parallel);
  CHECK((s.viscous - p.viscous).cwiseAbs().maxCoeff() == 0.0);
  CHECK((s.wall - p.wall).cwiseAbs().maxCoeff() == 0.0);
  for (int k = 0; k < 12; ++k) CHECK((s.T[k] - p.T[k]).cwiseAbs().maxCoeff() == 0.0);
  CHECK((s.gram - Eigen::MatrixXd::Identity(12, 12)).cwiseAbs().maxCoeff() < 1e-10);

  const GalerkinModel ms(cavity2, disk, heavy_params(12), Exec::serial);
  const GalerkinModel mp(cavity2, disk, heavy_params(12), Exec::parallel);
  const Eigen::VectorXd a = Eigen::VectorXd::LinSpaced(12, -0.3, 0.4);
  const auto ps = ms.assemble(mid, a), pp = mp.assemble(mid, a);
  CHECK((ps.B() - pp.B()).cwiseAbs().maxCoeff() == 0.0);
  CHECK((ps.A - pp.A).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("assembled system: structure, definiteness, special cases") {
  SimParams p = heavy_params(16);
  const GalerkinModel model(cavity2, disk, p);
  const int N = 16;
  const Eigen::VectorXd a = 0.3 * Eigen::VectorXd::Random(N);
  const auto parts = model.assemble(mid, a);
  CHECK((parts.A - parts.A.transpose()).cwiseAbs().maxCoeff() < 1e-14);
  CHECK(min_eig(parts.A) >= std::min(p.rho_F, p.rho_S) - 1e-8);
  for (const Eigen::MatrixXd* M : {&parts.viscous, &parts.wall_slip, &parts.interface_slip, &parts.penalization}) {
    CHECK(((*M) - M->transpose()).cwiseAbs().maxCoeff() < 1e-12 * (1 + M->cwiseAbs().maxCoeff()));
    CHECK(min_eig(*M) >= -1e-10 * (1 + M->cwiseAbs().maxCoeff()));
  }
  CHECK((parts.convection + parts.convection.transpose()).cwiseAbs().maxCoeff() < 1e-14);

  // no solid, uniform density: A = rho_F I
  const auto free = model.assemble(mid, a, false);
  CHECK((free.A - p.rho_F * Eigen::MatrixXd::Identity(N, N)).cwiseAbs().maxCoeff() < 1e-10);
  // zero velocity: no convection
  const auto rest = model.assemble(mid, Eigen::VectorXd::Zero(N));
  CHECK(rest.convection.cwiseAbs().maxCoeff() < 1e-12);

  // penalization form against moments computed independently
  const auto nodes = solid_quadrature(mid, disk, 20);
  Eigen::MatrixXd G = Eigen::MatrixXd::Zero(N, N);
  Eigen::MatrixXd V = Eigen::MatrixXd::Zero(2, N);
  Eigen::VectorXd om = Eigen::VectorXd::Zero(N);
  double area = 0, J = 0;
  for (const auto& nd : nodes) {
    Eigen::MatrixXd E(2, N);
    for (int k = 0; k < N; ++k) E.col(k) = model.basis().jet(k, nd.x).value;
    const Vec2 r = nd.x - mid.center;
    G += nd.weight * E.transpose() * E;
    V += nd.weight * E;
    om += nd.weight * E.transpose() * perp(r);
    area += nd.weight;
    J += nd.weight * r.squaredNorm();
  }
  V /= area;
  om /= J;
  const Eigen::MatrixXd pen = p.n * (G - area * V.transpose() * V - J * om * om.transpose());
  CHECK((pen - parts.penalization).cwiseAbs().maxCoeff() < 1e-9 * parts.penalization.cwiseAbs().maxCoeff());
  CHECK(area == doctest::Approx(pi * 0.0625).epsilon(1e-12));

  // the penalization functional annihilates fields that are rigid on S
  const RigidField US{{0.2, -0.1}, 0.8, mid.center};
  ConnectParams cp;
  cp.delta = 0.1;
  cp.n = 20;
  cp.n_s = 64;
  const auto v = connect_velocity(testing_util::sample_flow, US, mid, disk, cp);
  const auto data = inertial_data(disk, mid);
  const RigidField Pv = project_rigid([&](const Vec2& x) { return v(x); }, data, mid, disk);
  double form = 0.0;
  for (const auto& nd : nodes) form += p.n * nd.weight * (v(nd.x) - Pv(nd.x)).squaredNorm();
  CHECK(form <= 1e-10);
}

TEST_CASE("picard step: equilibria and buoyancy response") {
  SimParams p = heavy_params(16);
  p.g = Vec2::Zero();
  const GalerkinModel still(cavity2, disk, p);
  const auto s0 = still.initial_state(mid, Eigen::VectorXd::Zero(16));
  const auto r0 = picard_step(still, s0);
  CHECK(r0.state.alpha.norm() == 0.0);
  CHECK(r0.picard_iterations == 1);
  CHECK((r0.state.placement.center - mid.center).norm() == 0.0);
  CHECK(r0.state.t == doctest::Approx(0.01));

  p = heavy_params(16);
  p.rho_S = p.rho_F;
  const GalerkinModel neutral(cavity2, SolidShape{0.25, 1.0}, p);
  const auto r1 = picard_step(neutral, neutral.initial_state(mid, Eigen::VectorXd::Zero(16)));
  CHECK(r1.state.alpha.norm() < 1e-14);

  // added mass halves the response of the reduced ODE; N = 32 resolves it
  p = heavy_params(32);
  p.dt = 1e-3;
  const GalerkinModel heavy(cavity2, disk, p);
  const auto r2 = picard_step(heavy, heavy.initial_state(mid, Eigen::VectorXd::Zero(32)));
  const double estimate = p.dt * p.g.norm() * (p.rho_S - p.rho_F) / p.rho_S;
  CHECK(r2.state.rigid.V.y() < 0.0);
  CHECK(std::abs(r2.state.rigid.V.y()) <= 2.0 * estimate);
  CHECK(std::abs(r2.state.rigid.V.y()) >= 0.5 * estimate);
  CHECK(std::abs(r2.state.rigid.V.x()) < 1e-12);
}

TEST_CASE("picard step: exact discrete energy identity") {
  const SimParams p = heavy_params(16);
  const GalerkinModel model(cavity2, disk, p);
  Eigen::VectorXd a0 = solid_translation_coefficients(model.basis(), mid, disk, {0.3, 0.2});
  auto prev = model.initial_state(mid, a0);
  double E = 0.5 * a0.dot(model.assemble(mid, a0).A * a0);
  for (int k = 0; k < 4; ++k) {
    const auto rec = model.step(prev);
    const double lhs = rec.ledger.kinetic - E + rec.numerical_slack + p.dt * rec.ledger.dissipation();
    CHECK(lhs == doctest::Approx(p.dt * rec.ledger.gravity_work).epsilon(1e-9).scale(1e-12));
    CHECK(rec.ledger.viscous >= 0.0);
    CHECK(rec.ledger.wall_slip >= 0.0);
    CHECK(rec.ledger.interface_slip >= 0.0);
    CHECK(rec.ledger.penalization >= 0.0);
    E = rec.ledger.kinetic;
    prev = rec.state;
  }
}

TEST_CASE("picard step: iteration cap reports the residual history") {
  SimParams p = heavy_params(16);
  p.picard_max_iter = 2;
  const GalerkinModel model(cavity2, disk, p);
  try {
    model.step(model.initial_state(mid, Eigen::VectorXd::Zero(16)));
    FAIL("expected failure");
  } catch (const PicardFailure& e) {
    CHECK(e.history().size() == 2);
    CHECK(e.history().back() > p.picard_tol);
  }
}

TEST_CASE("existence horizon: closed form, monotonicity, margin scaling") {
  const Cavity cav = Cavity::rectangle(4.0, 4.0);
  const SolidShape unit{1.0, 1.0};
  const Placement c{{2.0, 2.0}, 0.0};
  // independent evaluation: mass pi, inertia pi/2, so min(1, pi/2, pi) = 1
  const double C0 = std::sqrt(2.0) * 1.0 / std::sqrt(std::min({1.0, pi / 2, pi}));
  CHECK(horizon_constant(unit) == doctest::Approx(C0).epsilon(1e-15));
  CHECK(existence_horizon(c, unit, cav, 0.25, 1.0) == doctest::Approx(0.5 / std::sqrt(2.0)).epsilon(1e-14));
  double last = 1e300;
  for (double R : {0.5, 1.0, 10.0, 1e3, 1e6}) {
    const double h = existence_horizon(c, unit, cav, 0.25, R);
    CHECK(h < last);
    last = h;
  }
  CHECK(last < 1e-6);
  const double h1 = existence_horizon(c, unit, cav, 0.1, 1.0), h2 = existence_horizon(c, unit, cav, 0.2, 1.0);
  CHECK(h2 / h1 == doctest::Approx((1.0 - 0.4) / (1.0 - 0.2)).epsilon(1e-14));
  CHECK(existence_horizon(c, unit, cav, 0.6, 1.0) == 0.0);
}

TEST_CASE("run_simulation: neutral buoyancy stays at rest") {
  SimParams p = heavy_params(12);
  p.rho_S = p.rho_F;
  const GalerkinModel model(cavity2, SolidShape{0.25, 1.0}, p);
  const auto traj = run_simulation(model, mid, Eigen::VectorXd::Zero(12), 100 * p.dt);
  CHECK(traj.termination == Termination::completed);
  REQUIRE(traj.steps.size() == 101);
  double worst = 0.0;
  for (const auto& s : traj.steps) worst = std::max(worst, s.state.alpha.norm());
  CHECK(worst <= 1e-10);
}

TEST_CASE("run_simulation: heavy disk falls until the 2 delta guard fires") {
  SimParams p = heavy_params(12);
  p.delta = 0.05;
  p.dt = 0.02;
  const GalerkinModel model(cavity2, disk, p);
  const Placement low{{1.0, 0.55}, 0.0};
  const auto traj = run_simulation(model, low, Eigen::VectorXd::Zero(12), 2.0);
  CHECK(traj.termination == Termination::collision_approach);
  CHECK(traj.event_gap < 2 * p.delta);
  for (std::size_t k = 1; k < traj.steps.size(); ++k) {
    CHECK(traj.steps[k].gap < traj.steps[k - 1].gap);
    CHECK(traj.steps[k].gap >= 2 * p.delta);
  }
}

TEST_CASE("run_simulation: self-convergence in the time step") {
  std::vector<Eigen::VectorXd> finals;
  for (double dt : {0.02, 0.01, 0.005}) {
    SimParams p = heavy_params(12);
    p.dt = dt;
    const GalerkinModel model(cavity2, disk, p);
    const auto traj = run_simulation(model, mid, Eigen::VectorXd::Zero(12), 0.08);
    REQUIRE(traj.termination == Termination::completed);
    finals.push_back(traj.steps.back().state.alpha);
  }
  const double order = std::log2((finals[0] - finals[1]).norm() / (finals[1] - finals[2]).norm());
  CHECK(order >= 0.9);
}

TEST_CASE("slip magnitudes decrease as both slip lengths shrink") {
  double last_wall = 1e300, last_iface = 1e300;
  for (double beta : {1.0, 0.1, 0.01}) {
    SimParams p = heavy_params(16);
    p.beta_S = beta;
    p.beta_Omega = beta;
    const GalerkinModel model(cavity2, disk, p);
    const auto traj = run_simulation(model, mid, Eigen::VectorXd::Zero(16), 0.05);
    REQUIRE(traj.termination == Termination::completed);
    const auto& l = traj.steps.back().ledger;
    const double wall = std::sqrt(2 * beta * l.wall_slip), iface = std::sqrt(2 * beta * l.interface_slip);
    CHECK(wall < last_wall);
    CHECK(iface < last_iface);
    last_wall = wall;
    last_iface = iface;
  }
}
