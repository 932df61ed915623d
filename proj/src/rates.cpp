#include <chrono>
#include <cmath>
#include <future>

#include "navslip/connect.hpp"
#include "navslip/diagnostics.hpp"

namespace navslip {

namespace {

// Smooth stream function used as the fixed mismatch of the construction studies.
StreamJet smooth_stream(const Vec2& x) {
  const double a = 1.3 * x.x() + 0.2, b = 0.7 * x.y() - 0.1;
  StreamJet s;
  s.psi = std::sin(a) * std::cos(b) + 0.25 * x.x() * x.y() * x.y();
  s.grad = Vec2(1.3 * std::cos(a) * std::cos(b) + 0.25 * x.y() * x.y(),
                -0.7 * std::sin(a) * std::sin(b) + 0.5 * x.x() * x.y());
  s.hess << -1.69 * std::sin(a) * std::cos(b), -0.91 * std::cos(a) * std::sin(b) + 0.5 * x.y(),
      -0.91 * std::cos(a) * std::sin(b) + 0.5 * x.y(), -0.49 * std::sin(a) * std::cos(b) + 0.5 * x.x();
  return s;
}

// curl((|x - c|^2 - r^2) q(x)): solenoidal with zero normal trace on |x - c| = r.
Jet2 vanishing_normal_trace(const Vec2& x, const Vec2& c, double r, const StreamJet& h) {
  const Vec2 d = x - c;
  const double q = d.squaredNorm() - r * r;
  StreamJet s;
  s.psi = q * h.psi;
  s.grad = q * h.grad + 2.0 * d * h.psi;
  s.hess = q * h.hess + 2.0 * (d * h.grad.transpose() + h.grad * d.transpose()) + 2.0 * h.psi * Mat2::Identity();
  return {velocity_from_stream(s), velocity_gradient_from_stream(s)};
}

// L2 norm of f over the annulus r + z_k <= |x - c| <= r + z_{k+1}.
double annulus_l2(const Vec2& c, double r, const std::vector<double>& z, const std::function<double(const Vec2&)>& f2) {
  double acc = 0.0;
  for (std::size_t i = 0; i + 1 < z.size(); ++i)
    for (const auto& q : annulus_quadrature(c, r + z[i], r + z[i + 1], 16, 128)) acc += q.weight * f2(q.x);
  return std::sqrt(acc);
}

template <class F>
std::vector<std::invoke_result_t<F, double>> fan_out(const std::vector<double>& params, F f) {
  std::vector<std::future<std::invoke_result_t<F, double>>> jobs;
  for (double p : params) jobs.push_back(std::async(std::launch::async, f, p));
  std::vector<std::invoke_result_t<F, double>> out;
  for (auto& j : jobs) out.push_back(j.get());
  return out;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

}  // namespace

RateStudy connect_rate_study(const std::vector<double>& n) {
  const auto t0 = std::chrono::steady_clock::now();
  const Placement p{{0.0, 0.0}, 0.0};
  const SolidShape shape{0.5, 1.0};
  const RigidField US{{0.0, 0.0}, 0.0, p.center};
  const JetSampler U = [&](const Vec2& x) { return vanishing_normal_trace(x, p.center, shape.radius, smooth_stream(x)); };
  RateStudy s;
  s.name = "connect";
  s.parameter_name = "n";
  s.parameter = n;
  s.value = fan_out(n, [&](double nn) {
    ConnectParams cp;
    cp.delta = 0.2;
    cp.n = nn;
    const auto V = connect_velocity(U, US, p, shape, cp);
    // V - U vanishes for z >= 1/n when the normal traces match
    return annulus_l2(p.center, shape.radius, {0.0, 0.25 / nn, 1.0 / nn},
                      [&](const Vec2& x) { return (V(x) - U(x).value).squaredNorm(); });
  });
  s.slope = fit_slope(s.parameter, s.value);
  s.expected = -1.0 / 3.0;
  s.lower = s.expected - 0.15;
  s.upper = s.expected + 0.15;
  s.seconds = seconds_since(t0);
  return s;
}

std::vector<RateStudy> test_function_rate_study(double alpha, const std::vector<double>& n) {
  const auto t0 = std::chrono::steady_clock::now();
  const Placement p{{0.0, 0.0}, 0.0};
  const SolidShape shape{0.5, 1.0};
  const RigidField phiS{{0.3, -0.2}, 0.5, p.center};
  const JetSampler phiF = [&](const Vec2& x) {
    Jet2 j = vanishing_normal_trace(x, p.center, shape.radius, smooth_stream(x));
    j.value += phiS(x);
    j.grad += phiS.gradient();
    return j;
  };
  const auto pairs = fan_out(n, [&](double nn) {
    const auto T = approximate_test_function(phiF, phiS, p, shape, alpha, nn);
    const double eps = T.layer_width();
    // Phi^n - phi_S is supported in the layer -eps <= z <= 0
    const std::vector<double> z{-eps, -0.25 * eps, 0.0};
    const double l2 = annulus_l2(p.center, shape.radius, z, [&](const Vec2& x) {
      return (T.jet(x).value - phiS(x)).squaredNorm();
    });
    const double g2 = annulus_l2(p.center, shape.radius, z, [&](const Vec2& x) {
      return (T.jet(x).grad - phiS.gradient()).squaredNorm();
    });
    return std::pair{l2, std::sqrt(l2 * l2 + g2 * g2)};
  });
  RateStudy l2, h1;
  l2.name = "test_function_l2";
  h1.name = "test_function_h1";
  l2.parameter_name = h1.parameter_name = "n";
  l2.parameter = h1.parameter = n;
  for (const auto& [a, b] : pairs) {
    l2.value.push_back(a);
    h1.value.push_back(b);
  }
  l2.slope = fit_slope(n, l2.value);
  h1.slope = fit_slope(n, h1.value);
  l2.expected = -alpha / 2.0;
  h1.expected = alpha / 2.0;
  for (auto* s : {&l2, &h1}) {
    s->lower = s->expected - 0.15;
    s->upper = s->expected + 0.15;
    s->seconds = seconds_since(t0);
  }
  return {l2, h1};
}

RateStudy rigidify_rate_study(const std::vector<double>& h) {
  const auto t0 = std::chrono::steady_clock::now();
  const Placement p{{0.0, 0.0}, 0.0};
  const SolidShape shape{1.0, 1.0};
  const double delta = 0.45;
  const RigidField R{{0.2, -0.1}, 0.3, p.center};
  // u = R + curl((|x|^2 - 1)(x^2 - y^2)); the second part has zero rigid projection
  const JetSampler u = [&](const Vec2& x) {
    StreamJet m;
    m.psi = x.x() * x.x() - x.y() * x.y();
    m.grad = Vec2(2.0 * x.x(), -2.0 * x.y());
    m.hess << 2.0, 0.0, 0.0, -2.0;
    Jet2 j = vanishing_normal_trace(x, p.center, shape.radius, m);
    j.value += R(x);
    j.grad += R.gradient();
    return j;
  };
  RateStudy s;
  s.name = "rigidify";
  s.parameter_name = "h";
  s.parameter = h;
  s.value = fan_out(h, [&](double hh) {
    const auto v = rigidify(u, p, shape, hh, delta);
    return annulus_l2(p.center, shape.radius, {0.0, hh, 1.25 * hh, 2.0 * hh, delta},
                      [&](const Vec2& x) { return (v(x) - u(x).value).squaredNorm(); });
  });
  s.slope = fit_slope(s.parameter, s.value);
  s.expected = 1.0 / 3.0;
  s.lower = s.expected - 0.1;
  s.seconds = seconds_since(t0);
  return s;
}

PenalizationScenario::PenalizationScenario() {
  params.rho_F = 1.0;
  params.rho_S = 2.0;
  params.mu_F = 0.05;
  params.beta_S = 0.5;
  params.beta_Omega = 0.5;
  params.delta = 0.1;
  params.N = 32;
  params.dt = 0.01;
}

std::vector<RateStudy> penalization_rate_study(const PenalizationScenario& sc, const std::vector<double>& n,
                                               Exec exec) {
  const auto t0 = std::chrono::steady_clock::now();
  RateStudy pen, flux;
  pen.name = "penalization";
  flux.name = "slip_flux";
  pen.parameter_name = flux.parameter_name = "n";
  pen.parameter = flux.parameter = n;
  // runs are sequential; the assembly inside each is already parallel
  for (double nn : n) {
    SimParams prm = sc.params;
    prm.n = nn;
    const GalerkinModel model(sc.cavity, sc.shape, prm, exec);
    const auto tr = run_simulation(model, sc.start, rest_coefficients(model.basis()), sc.T_end);
    if (tr.termination != Termination::completed)
      throw ConvergenceFailure("penalization_rate_study: run at n = " + std::to_string(nn) +
                               " stopped early: " + tr.message);
    pen.value.push_back(penalty_norm(tr));
    flux.value.push_back(slip_flux_integral(tr));
  }
  pen.slope = penalization_decay(n, pen.value);
  flux.slope = fit_slope(n, flux.value);
  pen.expected = -0.5;
  pen.lower = -0.65;
  pen.upper = -0.35;
  flux.expected = -0.5;
  flux.upper = -0.4;
  pen.seconds = flux.seconds = seconds_since(t0);
  return {pen, flux};
}

}  // namespace navslip
