#include <cmath>
#include <numbers>

#include <doctest.h>

#include "helpers.hpp"
#include "navslip/connect.hpp"
#include "navslip/quadrature.hpp"

using namespace navslip;
using testing_util::uniform;

namespace {

constexpr double pi = std::numbers::pi;

Jet2 rigid_jet(const RigidField& r, const Vec2& x) { return {r(x), r.gradient()}; }

// Random point in the band a <= |x - c| - r <= b.
Vec2 band_point(const Vec2& c, double r, double a, double b) {
  const double th = uniform(0.0, 2 * pi), z = uniform(a, b);
  return c + (r + z) * Vec2(std::cos(th), std::sin(th));
}

double max_node_gap(const AnnulusGrid& g, int iz, const VectorSampler& a, const VectorSampler& b) {
  double worst = 0.0;
  for (int is = 0; is < g.n_s(); ++is) worst = std::max(worst, (a(g.node(is, iz)) - b(g.node(is, iz))).norm());
  return worst;
}

}  // namespace

TEST_CASE("truncation profile: plateau, support, evenness, derivatives") {
  CHECK(truncation(0.0) == 1.0);
  CHECK(truncation(0.25) == 1.0);
  CHECK(truncation(-0.2) == 1.0);
  CHECK(truncation(1.0) == 0.0);
  CHECK(truncation(3.0) == 0.0);
  for (int i = 0; i < 50; ++i) {
    const double s = uniform(-1.2, 1.2);
    CHECK(truncation(s) == doctest::Approx(truncation(-s)).epsilon(1e-15));
    CHECK(truncation(s) >= 0.0);
    CHECK(truncation(s) <= 1.0);
    const double h = 1e-6;
    CHECK(truncation_d1(s) == doctest::Approx((truncation(s + h) - truncation(s - h)) / (2 * h)).epsilon(1e-6).scale(1));
    CHECK(truncation_d2(s) == doctest::Approx((truncation_d1(s + h) - truncation_d1(s - h)) / (2 * h)).epsilon(1e-5).scale(1));
  }
}

TEST_CASE("annulus grid nodes round-trip through tubular coordinates; interpolation reproduces nodes") {
  const Placement p{{0.3, -0.2}, 0.0};
  const SolidShape shape{0.7, 1.0};
  const AnnulusGrid g(p.center, shape.radius, 0.0, 0.2, 16, 9);
  for (int iz = 0; iz < g.n_z(); ++iz)
    for (int is = 0; is < g.n_s(); ++is) {
      const Vec2 x = g.node(is, iz);
      const auto tc = tubular_coordinates(x, p, shape);
      CHECK(tc.z == doctest::Approx(g.z(iz)).epsilon(1e-13).scale(1));
      CHECK((point_from_tubular(tc.s, tc.z, p, shape) - x).norm() < 1e-13);
    }
  const auto U = AnnulusField::sample(g, [](const Vec2& x) { return testing_util::sample_flow(x).value; });
  double worst = 0.0;
  for (int iz = 0; iz < g.n_z(); ++iz)
    for (int is = 0; is < g.n_s(); ++is) worst = std::max(worst, (U.interpolate(g.node(is, iz)) - U.at(is, iz)).norm());
  CHECK(worst < 1e-12);
  CHECK_THROWS_AS(U.interpolate(p.center + Vec2(1.5, 0.0)), InvalidInput);
}

TEST_CASE("blend_tangential: equal fields unchanged, boundary value rigid plus normal mismatch") {
  const Vec2 c(0.1, 0.4);
  const AnnulusGrid g(c, 1.0, 0.0, 0.25, 32, 24);
  const RigidField US{{0.3, -0.1}, 0.7, c};
  const auto same = AnnulusField::sample(g, US);
  const auto out = blend_tangential(same, US, 8.0);
  for (int i = 0; i < g.size(); ++i) CHECK((out.values()[i] - same.values()[i]).norm() < 1e-14);

  const auto U = AnnulusField::sample(g, [](const Vec2& x) { return testing_util::sample_flow(x).value; });
  const auto V = blend_tangential(U, US, 8.0);
  for (int is = 0; is < g.n_s(); ++is) {
    const Vec2 x = g.node(is, 0), e = (x - c).normalized();
    const Vec2 expect = US(x) + (U.at(is, 0) - US(x)).dot(e) * e;
    CHECK((V.at(is, 0) - expect).norm() < 1e-14);
  }
  for (int iz = 0; iz < g.n_z(); ++iz)
    if (8.0 * g.z(iz) >= 1.0)
      for (int is = 0; is < g.n_s(); ++is) CHECK((V.at(is, iz) - U.at(is, iz)).norm() == 0.0);
  CHECK_THROWS_AS(blend_tangential(U, US, 64.0), InvalidInput);
}

TEST_CASE("divergence correction: trivial data gives zero") {
  const AnnulusGrid g(Vec2::Zero(), 1.0, 0.0, 0.3, 16, 12);
  const std::vector<Vec2> zero(16, Vec2::Zero());
  const auto sol = solve_divergence_correction(g, std::vector<double>(g.size(), 0.0), zero, zero);
  for (int i = 0; i < 20; ++i) CHECK(sol.field(band_point(Vec2::Zero(), 1.0, 0.0, 0.3)).norm() == 0.0);
  CHECK(sol.compatibility_defect == 0.0);
}

TEST_CASE("divergence correction: div of a compactly supported field, homogeneous traces") {
  const Vec2 c(0.2, -0.1);
  const double r = 0.8, L = 0.3;
  const AnnulusGrid g(c, r, 0.0, L, 32, 24);
  // g(x) = B(rho) (1 + x y, x - y^2), B = sin^4(pi z / L)
  auto divg = [&](const Vec2& x) {
    const Vec2 d = x - c;
    const double rho = d.norm(), z = rho - r, s = std::sin(pi * z / L);
    const double B = std::pow(s, 4), dB = 4 * std::pow(s, 3) * std::cos(pi * z / L) * pi / L;
    const Vec2 cf(1 + x.x() * x.y(), x.x() - x.y() * x.y());
    return dB * (d / rho).dot(cf) + B * (x.y() - 2 * x.y());
  };
  std::vector<double> f(g.size());
  for (int iz = 0; iz < g.n_z(); ++iz)
    for (int is = 0; is < g.n_s(); ++is) f[g.index(is, iz)] = divg(g.node(is, iz));
  const std::vector<Vec2> zero(32, Vec2::Zero());
  const auto sol = solve_divergence_correction(g, f, zero, zero);
  CHECK(sol.residual < 1e-8);
  CHECK(sol.compatibility_defect < 1e-10);
  CHECK(sol.bound_constant > 0.0);
  const auto zf = [](const Vec2&) { return Vec2(0, 0); };
  CHECK(max_node_gap(g, 0, sol.field, zf) < 1e-10);
  CHECK(max_node_gap(g, g.n_z() - 1, sol.field, zf) < 1e-10);
}

TEST_CASE("divergence correction: random compatible data, traces, linearity, rejection on both sides") {
  const Vec2 c(-0.3, 0.25);
  const double r = 1.0;
  const int ns = 32;
  const AnnulusGrid g(c, r, 0.0, 0.25, ns, 20);
  const double ra = g.r_inner(), rb = g.r_outer();
  auto make = [&](std::vector<double>& f, std::vector<Vec2>& in, std::vector<Vec2>& out) {
    double a[8];
    for (double& v : a) v = uniform(-1, 1);
    in.resize(ns);
    out.resize(ns);
    double flux = 0.0;
    for (int is = 0; is < ns; ++is) {
      const double th = g.theta(is);
      in[is] = {a[0] + a[1] * std::cos(2 * th), a[2] * std::sin(th)};
      out[is] = {a[3] * std::cos(3 * th), a[4] + a[5] * std::sin(th)};
      const Vec2 e(std::cos(th), std::sin(th));
      flux += (rb * out[is].dot(e) - ra * in[is].dot(e)) * 2 * pi / ns;
    }
    f.assign(g.size(), 0.0);
    double integral = 0.0;
    for (int iz = 0; iz < g.n_z(); ++iz)
      for (int is = 0; is < ns; ++is) {
        const Vec2 x = g.node(is, iz);
        f[g.index(is, iz)] = a[6] * std::sin(x.x()) * std::exp(x.y()) + a[7] * x.x() * x.y();
        integral += g.z_grid().weights()[iz] * (r + g.z(iz)) * (2 * pi / ns) * f[g.index(is, iz)];
      }
    const double shift = (flux - integral) / (pi * (rb * rb - ra * ra));
    for (auto& v : f) v += shift;
  };
  std::vector<double> f1, f2;
  std::vector<Vec2> i1, o1, i2, o2;
  make(f1, i1, o1);
  make(f2, i2, o2);
  const auto s1 = solve_divergence_correction(g, f1, i1, o1);
  const auto s2 = solve_divergence_correction(g, f2, i2, o2);
  CHECK(s1.residual < 1e-8);
  CHECK(s2.residual < 1e-8);
  double inner = 0.0, outer = 0.0;
  for (int is = 0; is < ns; ++is) {
    inner = std::max(inner, (s1.field(g.node(is, 0)) - i1[is]).norm());
    outer = std::max(outer, (s1.field(g.node(is, g.n_z() - 1)) - o1[is]).norm());
  }
  CHECK(inner < 1e-9);
  CHECK(outer < 1e-9);

  std::vector<double> fs(g.size());
  std::vector<Vec2> is_(ns), os(ns);
  for (int i = 0; i < g.size(); ++i) fs[i] = f1[i] + f2[i];
  for (int i = 0; i < ns; ++i) {
    is_[i] = i1[i] + i2[i];
    os[i] = o1[i] + o2[i];
  }
  const auto ss = solve_divergence_correction(g, fs, is_, os);
  for (int k = 0; k < 20; ++k) {
    const Vec2 x = band_point(c, r, 0.0, 0.25);
    CHECK((ss.field(x) - s1.field(x) - s2.field(x)).norm() < 1e-10);
  }

  // constant radial perturbation eps on the inner ring: defect = 2 pi ra eps
  auto perturbed = [&](double eps) {
    std::vector<Vec2> in = i1;
    for (int is = 0; is < ns; ++is) in[is] += eps * Vec2(std::cos(g.theta(is)), std::sin(g.theta(is)));
    return in;
  };
  const auto ok = solve_divergence_correction(g, f1, perturbed(1e-12), o1);
  CHECK(ok.compatibility_defect == doctest::Approx(2 * pi * ra * 1e-12).epsilon(1e-2));
  try {
    solve_divergence_correction(g, f1, perturbed(1e-4), o1);
    FAIL("expected rejection");
  } catch (const IncompatibleData& e) {
    CHECK(e.defect() == doctest::Approx(2 * pi * ra * 1e-4).epsilon(1e-8));
  }
}

TEST_CASE("harmonic Neumann corrector matches the separable annulus solution") {
  const Vec2 c(0.4, 0.1);
  const double r1 = 1.0, r2 = 1.3;
  const AnnulusGrid g(c, r1, 0.0, r2 - r1, 32, 24);
  const auto quad = annulus_quadrature(c, r1, r2, 24, 64);
  for (int k = 1; k <= 3; ++k) {
    std::vector<double> gk(32);
    for (int is = 0; is < 32; ++is) gk[is] = std::cos(k * g.theta(is));
    const auto sol = harmonic_neumann(g, gk);
    CHECK(sol.laplacian_residual < 1e-8);
    // Y = (a r^k + b r^-k) cos k theta, Y_r(r2) = 0, Y_r(r1) = 1
    const double a = 1.0 / (k * (std::pow(r1, k - 1) - std::pow(r2, 2 * k) * std::pow(r1, -k - 1)));
    const double b = a * std::pow(r2, 2 * k);
    double eY = 0.0, eG = 0.0;
    for (const auto& q : quad) {
      const Vec2 d = q.x - c;
      const double rho = d.norm(), th = std::atan2(d.y(), d.x());
      const double Y = (a * std::pow(rho, k) + b * std::pow(rho, -k)) * std::cos(k * th);
      const double Yr = k * (a * std::pow(rho, k - 1) - b * std::pow(rho, -k - 1)) * std::cos(k * th);
      const double Yt = -k * (a * std::pow(rho, k) + b * std::pow(rho, -k)) * std::sin(k * th) / rho;
      const Vec2 grad = Yr * d / rho + Yt * Vec2(-d.y(), d.x()) / rho;
      eY += q.weight * std::pow(sol.potential(q.x) - Y, 2);
      eG += q.weight * (sol.gradient(q.x) - grad).squaredNorm();
    }
    CHECK(std::sqrt(eY) < 1e-6);
    CHECK(std::sqrt(eG) < 1e-6);
  }
}

TEST_CASE("harmonic Neumann: zero data, linearity, compatibility rejection") {
  const AnnulusGrid g(Vec2::Zero(), 1.0, 0.0, 0.4, 16, 16);
  const auto zero = harmonic_neumann(g, std::vector<double>(16, 0.0));
  CHECK(zero.gradient(Vec2(1.2, 0.1)).norm() == 0.0);
  std::vector<double> g1(16), g2(16), gs(16);
  for (int i = 0; i < 16; ++i) {
    g1[i] = std::sin(g.theta(i)) + 0.3 * std::cos(3 * g.theta(i));
    g2[i] = std::cos(2 * g.theta(i));
    gs[i] = g1[i] + g2[i];
  }
  const auto h1 = harmonic_neumann(g, g1), h2 = harmonic_neumann(g, g2), hs = harmonic_neumann(g, gs);
  for (int k = 0; k < 20; ++k) {
    const Vec2 x = band_point(Vec2::Zero(), 1.0, 0.0, 0.4);
    CHECK((hs.gradient(x) - h1.gradient(x) - h2.gradient(x)).norm() < 1e-10);
  }
  // mean zero of Y on the annulus
  double mean = 0.0;
  for (const auto& q : annulus_quadrature(Vec2::Zero(), 1.0, 1.4, 16, 32)) mean += q.weight * hs.potential(q.x);
  CHECK(std::abs(mean) < 1e-12);
  std::vector<double> bad = g1;
  for (auto& v : bad) v += 1e-3;
  CHECK_THROWS_AS(harmonic_neumann(g, bad), IncompatibleData);
  for (auto& v : bad) v += -1e-3 + 1e-13;
  CHECK_NOTHROW(harmonic_neumann(g, bad));
}

TEST_CASE("normal flux corrector: zero mismatch, closed-form W1 norm, linearity, traces") {
  const Placement p{{0.1, 0.2}, 0.0};
  const SolidShape shape{0.9, 1.0};
  const double delta = 0.2;
  const RigidField zeroR{{0, 0}, 0.0, p.center};
  const RigidField US{{0.2, -0.4}, 0.3, p.center};
  {
    const NormalFluxCorrector W([&](const Vec2& x) { return rigid_jet(US, x); }, US, p, shape, delta);
    for (int i = 0; i < 10; ++i) CHECK(W(band_point(p.center, 0.9, 0, delta)).norm() < 1e-14);
  }
  for (int k = 1; k <= 2; ++k) {
    // U . e_r = cos(k theta) on the boundary
    auto U = [&, k](const Vec2& x) -> Jet2 {
      const Vec2 d = x - p.center;
      const double r = shape.radius;
      if (k == 1) return {{1.0, 0.0}, Mat2::Zero()};
      Mat2 G;
      G << 1, 0, 0, -1;
      return {Vec2(d.x(), -d.y()) / r, G / r};
    };
    const NormalFluxCorrector W(U, zeroR, p, shape, delta, 32, 24);
    CHECK(W.divergence_residual() < 1e-8);
    CHECK(W.mismatch_norm() == doctest::Approx(std::sqrt(pi * shape.radius)).epsilon(1e-12));
    // ||W1||^2 = pi * int_0^delta chi(2z/delta)^2 (r + z) dz, piecewise polynomial
    double closed = 0.0;
    const double knots[] = {0.0, delta / 8, delta / 2};
    for (int seg = 0; seg < 2; ++seg) {
      const auto rule = gauss_legendre(12, knots[seg], knots[seg + 1]);
      for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
        const double z = rule.nodes[i], chi = truncation(2 * z / delta);
        closed += rule.weights[i] * chi * chi * (shape.radius + z);
      }
    }
    closed *= pi;
    double num = 0.0;
    for (int seg = 0; seg < 2; ++seg)
      for (const auto& q : annulus_quadrature(p.center, shape.radius + knots[seg], shape.radius + knots[seg + 1], 12, 16))
        num += q.weight * W.w1(q.x).value.squaredNorm();
    CHECK(std::sqrt(num) == doctest::Approx(std::sqrt(closed)).epsilon(1e-10));

    const AnnulusGrid g(p.center, shape.radius, 0.0, delta, 32, 24);
    for (int is = 0; is < 32; ++is) {
      const Vec2 x0 = g.node(is, 0), e = (x0 - p.center).normalized();
      CHECK((W(x0) - U(x0).value.dot(e) * e).norm() < 1e-10);
      CHECK(W(g.node(is, g.n_z() - 1)).norm() < 1e-10);
    }
    auto U2 = [&](const Vec2& x) {
      Jet2 j = U(x);
      j.value *= 2;
      j.grad *= 2;
      return j;
    };
    const NormalFluxCorrector W2(U2, zeroR, p, shape, delta, 32, 24);
    for (int i = 0; i < 10; ++i) {
      const Vec2 x = band_point(p.center, shape.radius, 0, delta);
      CHECK((W2(x) - 2 * W(x)).norm() < 1e-12);
    }
  }
}

TEST_CASE("connect_velocity: traces, solenoidality, rigid data, linearity") {
  const Placement p{{0.2, -0.3}, 0.0};
  const SolidShape shape{1.0, 1.0};
  ConnectParams params;
  params.delta = 0.25;
  params.n = 8;
  params.n_s = 48;
  params.n_z = 24;
  const RigidField US{{0.3, 0.1}, -0.4, p.center};
  const JetSampler U = testing_util::sample_flow;
  const auto V = connect_velocity(U, US, p, shape, params);
  CHECK(V.divergence_residual() < 1e-8);
  const AnnulusGrid g(p.center, shape.radius, 0.0, params.delta, 48, 8);
  double worst0 = 0.0, worstd = 0.0;
  for (int is = 0; is < 48; ++is) {
    const Vec2 x0 = g.node(is, 0), xd = g.node(is, g.n_z() - 1);
    worst0 = std::max(worst0, (V(x0) - US(x0)).norm());
    worstd = std::max(worstd, (V(xd) - U(xd).value).norm());
  }
  CHECK(worst0 < 1e-10);
  CHECK(worstd < 1e-10);
  for (int i = 0; i < 10; ++i) {
    const Vec2 in = band_point(p.center, 1.0, -0.9, -0.01), out = band_point(p.center, 1.0, 0.26, 1.0);
    CHECK((V(in) - US(in)).norm() == 0.0);
    CHECK((V(out) - U(out).value).norm() == 0.0);
  }
  // rigid everywhere
  const auto R = connect_velocity([&](const Vec2& x) { return rigid_jet(US, x); }, US, p, shape, params);
  for (int i = 0; i < 20; ++i) {
    const Vec2 x = band_point(p.center, 1.0, -0.5, 0.5);
    CHECK((R(x) - US(x)).norm() < 1e-13);
  }
  // linearity in (U, U_S)
  const RigidField US2{{-0.2, 0.5}, 0.9, p.center};
  auto U2 = [](const Vec2& x) {
    Jet2 j = testing_util::sample_flow(x + Vec2(0.3, -0.5));
    j.value *= -1.5;
    j.grad *= -1.5;
    return j;
  };
  const auto V2 = connect_velocity(U2, US2, p, shape, params);
  const RigidField USs{US.V + US2.V, US.omega + US2.omega, p.center};
  const auto Vs = connect_velocity([&](const Vec2& x) {
    const Jet2 a = U(x), b = U2(x);
    return Jet2{a.value + b.value, a.grad + b.grad};
  }, USs, p, shape, params);
  for (int i = 0; i < 20; ++i) {
    const Vec2 x = band_point(p.center, 1.0, 0.0, 0.25);
    CHECK((Vs(x) - V(x) - V2(x)).norm() < 1e-10);
  }
  params.n = 2;
  CHECK_THROWS_AS(connect_velocity(U, US, p, shape, params), InvalidInput);
}

TEST_CASE("stream-function connection: solenoidal, traces, agreement with the faithful construction outside the band") {
  const Placement p{{0.2, -0.3}, 0.0};
  const SolidShape shape{1.0, 1.0};
  const RigidField US{{0.3, 0.1}, -0.4, p.center};
  const double delta = 0.25;
  const StreamConnection S(testing_util::sample_stream, US, p, shape, delta);
  for (int i = 0; i < 50; ++i) {
    const Vec2 x = band_point(p.center, 1.0, -0.5, 0.5);
    const Jet2 j = S.jet(x);
    CHECK(std::abs(j.grad.trace()) < 1e-12);
    const double h = 1e-6;
    const Vec2 fd = (S(x + Vec2(h, 0)) - S(x - Vec2(h, 0))) / (2 * h);
    CHECK((fd - j.grad.col(0)).norm() < 1e-6);
  }
  for (int i = 0; i < 10; ++i) {
    const Vec2 in = band_point(p.center, 1.0, -0.9, 0.0);
    CHECK((S(in) - US(in)).norm() < 1e-13);
  }
  ConnectParams params;
  params.delta = delta;
  params.n = 8;
  params.n_s = 48;
  const auto V = connect_velocity(testing_util::sample_flow, US, p, shape, params);
  for (int i = 0; i < 10; ++i) {
    const Vec2 out = band_point(p.center, 1.0, delta, 1.0);
    CHECK((S(out) - V(out)).norm() == 0.0);
  }
}

TEST_CASE("test-function approximation: traces, solenoidality, rigid data, rejection") {
  const Placement p{{0.0, 0.1}, 0.0};
  const SolidShape shape{0.8, 1.0};
  const RigidField phiS{{0.3, -0.2}, 0.5, p.center};
  // phi_F = phi_S + curl((rho^2 - r^2) h), normal traces agree
  const JetSampler phiF = [&](const Vec2& x) {
    const Vec2 d = x - p.center;
    const double q = d.squaredNorm() - 0.64;
    const StreamJet h = testing_util::sample_stream(x);
    StreamJet s;
    s.psi = q * h.psi;
    s.grad = q * h.grad + 2 * d * h.psi;
    s.hess = q * h.hess + 2 * (d * h.grad.transpose() + h.grad * d.transpose()) + 2 * h.psi * Mat2::Identity();
    return Jet2{phiS(x) + velocity_from_stream(s), phiS.gradient() + velocity_gradient_from_stream(s)};
  };
  const TestFunctionApprox T(phiF, phiS, p, shape, 1.5, 4.0, 64, 24);
  CHECK(T.layer_width() == doctest::Approx(0.125));
  CHECK(T.divergence_residual() < 1e-8);
  const AnnulusGrid g(p.center, shape.radius, -0.125, 0.0, 32, 6);
  CHECK(max_node_gap(g, g.n_z() - 1, T, [&](const Vec2& x) { return phiF(x).value; }) < 1e-10);
  CHECK(max_node_gap(g, 0, T, phiS) < 1e-10);
  for (int i = 0; i < 10; ++i) {
    const Vec2 out = band_point(p.center, 0.8, 0.0, 0.5);
    CHECK((T(out) - phiF(out).value).norm() == 0.0);
  }
  const auto same = approximate_test_function([&](const Vec2& x) { return rigid_jet(phiS, x); }, phiS, p, shape, 1.5, 8.0);
  for (int i = 0; i < 10; ++i) {
    const Vec2 x = band_point(p.center, 0.8, -0.5, 0.5);
    CHECK((same(x) - phiS(x)).norm() < 1e-13);
  }
  const JetSampler bad = [](const Vec2&) { return Jet2{{1.0, 0.0}, Mat2::Zero()}; };
  CHECK_THROWS_AS(approximate_test_function(bad, phiS, p, shape, 1.5, 8.0), InvalidInput);
  CHECK_THROWS_AS(approximate_test_function(phiF, phiS, p, shape, 1.5, 1.0), InvalidInput);
}

TEST_CASE("rigidify: rigid data, exact rigidity near the solid, range checks, normal continuity") {
  const Placement p{{0.1, 0.1}, 0.0};
  const SolidShape shape{1.0, 1.0};
  const RigidField R{{0.2, 0.3}, -0.6, p.center};
  const auto same = rigidify([&](const Vec2& x) { return rigid_jet(R, x); }, p, shape, 0.05, 0.3);
  for (int i = 0; i < 20; ++i) {
    const Vec2 x = band_point(p.center, 1.0, -0.9, 0.6);
    CHECK((same(x) - R(x)).norm() < 1e-12);
  }
  const JetSampler u = testing_util::sample_flow;
  const auto vh = rigidify(u, p, shape, 0.05, 0.3);
  const auto& Pu = vh.rigid();
  for (int i = 0; i < 20; ++i) {
    const Vec2 x = band_point(p.center, 1.0, -0.9, 0.0499);
    CHECK((vh(x) - Pu(x)).norm() < 1e-12);
    const Vec2 y = band_point(p.center, 1.0, 0.3, 1.0);
    CHECK((vh(y) - u(y).value).norm() == 0.0);
  }
  const AnnulusGrid g(p.center, 1.0, 0.05, 0.3, 32, 6);
  for (int is = 0; is < 32; ++is) {
    const Vec2 x = g.node(is, 0), e = (x - p.center).normalized();
    CHECK(std::abs((vh.jet(x).value - Pu(x)).dot(e)) < 1e-10);
  }
  CHECK_THROWS_AS(rigidify(u, p, shape, 0.2, 0.3), InvalidInput);
  CHECK_THROWS_AS(rigidify(u, p, shape, 0.0, 0.3), InvalidInput);
}
