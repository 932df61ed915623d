#include "navslip/connect.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include <fmt/format.h>

namespace navslip {

namespace {
constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr int kPieceNodes = 33;
using cplx = std::complex<double>;

// Tangential part of w = jet value and its gradient, given e = e_r at x.
Jet2 tangential_part(const Jet2& w, const Vec2& e, double rho) {
  const Mat2 grad_e = (Mat2::Identity() - e * e.transpose()) / rho;
  const double wn = w.value.dot(e);
  const Vec2 grad_wn = w.grad.transpose() * e + grad_e * w.value;
  Jet2 out;
  out.value = w.value - wn * e;
  out.grad = w.grad - e * grad_wn.transpose() - wn * grad_e;
  return out;
}

// base + s * w_tau with s = s(rho) radial.
Jet2 add_tangential(const Jet2& base, const Jet2& w, const Vec2& e, double rho, double s, double ds) {
  const Jet2 wt = tangential_part(w, e, rho);
  Jet2 out;
  out.value = base.value + s * wt.value;
  out.grad = base.grad + ds * wt.value * e.transpose() + s * wt.grad;
  return out;
}

Jet2 rigid_jet(const RigidField& r, const Vec2& x) { return {r(x), r.gradient()}; }

Jet2 operator-(const Jet2& a, const Jet2& b) { return {a.value - b.value, a.grad - b.grad}; }
Jet2 operator+(const Jet2& a, const Jet2& b) { return {a.value + b.value, a.grad + b.grad}; }


}  // namespace

// --------------------------------------------------------------------------
// truncation profile

double truncation(double s) {
  s = std::abs(s);
  if (s <= 0.25) return 1.0;
  if (s >= 1.0) return 0.0;
  const double t = (s - 0.25) / 0.75;
  return 1.0 - t * t * t * (10.0 - 15.0 * t + 6.0 * t * t);
}

double truncation_d1(double s) {
  const double a = std::abs(s);
  if (a <= 0.25 || a >= 1.0) return 0.0;
  const double t = (a - 0.25) / 0.75;
  const double d = -30.0 * t * t * (1.0 - t) * (1.0 - t) / 0.75;
  return s < 0 ? -d : d;
}

double truncation_d2(double s) {
  const double a = std::abs(s);
  if (a <= 0.25 || a >= 1.0) return 0.0;
  const double t = (a - 0.25) / 0.75;
  return -60.0 * t * (1.0 - t) * (1.0 - 2.0 * t) / (0.75 * 0.75);
}

// --------------------------------------------------------------------------
// grids and sampled fields

AnnulusGrid::AnnulusGrid(const Vec2& center, double radius, double z_min, double z_max, int n_s, int n_z)
    : center_(center), radius_(radius), n_s_(n_s) {
  if (!(radius > 0.0)) throw InvalidInput("AnnulusGrid: radius must be positive");
  if (!(z_max > z_min)) throw InvalidInput("AnnulusGrid: need z_min < z_max");
  if (radius + z_min < 0.5 * radius * (1.0 - 1e-12))
    throw InvalidInput(fmt::format("AnnulusGrid: inner radius {} below the tubular chart", radius + z_min));
  if (n_s < 4) throw InvalidInput("AnnulusGrid: need n_s >= 4");
  if (n_z < 3) throw InvalidInput("AnnulusGrid: need n_z >= 3");
  z_grid_ = std::make_shared<spectral::ChebyshevGrid>(n_z, z_min, z_max);
}

double AnnulusGrid::theta(int i_s) const { return kTwoPi * i_s / n_s_; }

Vec2 AnnulusGrid::node(int i_s, int i_z) const {
  const double th = theta(i_s);
  return center_ + (radius_ + z(i_z)) * Vec2(std::cos(th), std::sin(th));
}

AnnulusField::AnnulusField(AnnulusGrid grid, std::vector<Vec2> values) : grid_(std::move(grid)), values_(std::move(values)) {
  if (static_cast<int>(values_.size()) != grid_.size()) throw InvalidInput("AnnulusField: value count mismatch");
  for (const auto& v : values_)
    if (!v.allFinite()) throw InvalidInput("AnnulusField: non-finite value");
  std::vector<double> xs(grid_.n_s()), ys(grid_.n_s());
  for (int iz = 0; iz < grid_.n_z(); ++iz) {
    for (int is = 0; is < grid_.n_s(); ++is) {
      xs[is] = at(is, iz).x();
      ys[is] = at(is, iz).y();
    }
    fx_.push_back(spectral::real_fourier(xs));
    fy_.push_back(spectral::real_fourier(ys));
  }
}

AnnulusField AnnulusField::sample(const AnnulusGrid& grid, const VectorSampler& f) {
  std::vector<Vec2> v(grid.size());
  for (int iz = 0; iz < grid.n_z(); ++iz)
    for (int is = 0; is < grid.n_s(); ++is) v[grid.index(is, iz)] = f(grid.node(is, iz));
  return AnnulusField(grid, std::move(v));
}

Vec2 AnnulusField::interpolate(const Vec2& x) const {
  const Vec2 d = x - grid_.center();
  const double z = d.norm() - grid_.radius();
  const double tol = 1e-12 * (1.0 + std::abs(grid_.z_max()));
  if (z < grid_.z_min() - tol || z > grid_.z_max() + tol)
    throw InvalidInput(fmt::format("AnnulusField: offset z = {} outside the grid", z));
  const double th = std::atan2(d.y(), d.x());
  const Eigen::RowVectorXd row = grid_.z_grid().interpolation_row(std::clamp(z, grid_.z_min(), grid_.z_max()));
  Vec2 out = Vec2::Zero();
  for (int iz = 0; iz < grid_.n_z(); ++iz) {
    if (row[iz] == 0.0) continue;
    out.x() += row[iz] * spectral::eval_real_fourier(fx_[iz], grid_.n_s(), th);
    out.y() += row[iz] * spectral::eval_real_fourier(fy_[iz], grid_.n_s(), th);
  }
  return out;
}

// --------------------------------------------------------------------------
// spectral fields

bool PolarSpectralField::contains(const Vec2& x) const {
  if (modes_.empty()) return false;
  const double rho = (x - center_).norm();
  const double tol = 1e-13 * r_b_;
  return rho >= r_a_ - tol && rho <= r_b_ + tol;
}

namespace {

struct PolarParts {
  double ur = 0, ut = 0, dr_ur = 0, dt_ur = 0, dr_ut = 0, dt_ut = 0, potential = 0;
};

}  // namespace

class PolarSpectralBuilder {
 public:
  struct Data {
    std::vector<double> f;                    // interior source at grid nodes (may be empty = 0)
    std::vector<double> g_in, g_out;          // dphi/dr at inner/outer ring
    std::vector<double> t_in, t_out;          // tangential targets (empty = no curl part)
    bool keep_mode_zero = true;
    std::function<double(double)> f0;         // angular mean of f at radius r (optional)
    std::vector<double> z_breaks;             // interior breakpoints for f0
  };

  static PolarSpectralField build(const AnnulusGrid& grid, const Data& data, double compat_tol, double& defect);
  static PolarParts parts(const PolarSpectralField& field, double rho, double theta);
};

PolarSpectralField PolarSpectralBuilder::build(const AnnulusGrid& grid, const Data& data, double compat_tol,
                                               double& defect) {
  const int ns = grid.n_s(), m = grid.n_z();
  const int kmax = ns / 2;
  const double ra = grid.r_inner(), rb = grid.r_outer();
  const double half = 0.5 * (rb - ra);
  const auto fold = [&](std::vector<cplx> c) {
    for (int k = 1; k <= kmax; ++k)
      if (2 * k != ns) c[k] *= 2.0;
    return c;
  };

  // Fourier modes of the source per radial node and of the ring data.
  std::vector<std::vector<cplx>> fk(m);
  std::vector<double> row(ns);
  for (int iz = 0; iz < m; ++iz) {
    for (int is = 0; is < ns; ++is) row[is] = data.f.empty() ? 0.0 : data.f[grid.index(is, iz)];
    fk[iz] = fold(spectral::real_fourier(row));
  }
  const auto gin = fold(spectral::real_fourier(data.g_in));
  const auto gout = fold(spectral::real_fourier(data.g_out));
  const bool curl_part = !data.t_in.empty();
  std::vector<cplx> tin, tout;
  if (curl_part) {
    tin = fold(spectral::real_fourier(data.t_in));
    tout = fold(spectral::real_fourier(data.t_out));
  }

  // Chebyshev basis (M + 2 terms) at the collocation nodes and endpoints.
  const int nc = m + 2;
  Eigen::MatrixXd T(m, nc), dT(m, nc), d2T(m, nc);
  std::vector<double> t(nc), dt(nc), d2t(nc);
  Eigen::VectorXd rnode(m);
  for (int i = 0; i < m; ++i) {
    const double x = -std::cos(std::numbers::pi * i / (m - 1));
    rnode[i] = grid.radius() + grid.z(i);
    spectral::chebyshev_basis(x, nc, t.data(), dt.data(), d2t.data());
    for (int j = 0; j < nc; ++j) {
      T(i, j) = t[j];
      dT(i, j) = dt[j];
      d2T(i, j) = d2t[j];
    }
  }
  Eigen::RowVectorXd dT_lo(nc), dT_hi(nc), T_lo(nc), T_hi(nc);
  for (int j = 0; j < nc; ++j) {
    dT_hi[j] = double(j) * j;
    dT_lo[j] = ((j % 2) ? 1.0 : -1.0) * double(j) * j;
    T_hi[j] = 1.0;
    T_lo[j] = (j % 2) ? -1.0 : 1.0;
  }

  std::vector<double> breaks{ra};
  for (double z : data.z_breaks) {
    const double r = grid.radius() + z;
    if (r > breaks.back() + 1e-14 * rb && r < rb - 1e-14 * rb) breaks.push_back(r);
  }
  breaks.push_back(rb);

  // data scale for the compatibility test
  double scale = 0.0;
  for (int is = 0; is < ns; ++is) scale += ra * std::abs(data.g_in[is]) + rb * std::abs(data.g_out[is]);
  scale *= kTwoPi / ns;
  if (!data.f.empty())
    for (int iz = 0; iz < m; ++iz)
      for (int is = 0; is < ns; ++is)
        scale += grid.z_grid().weights()[iz] * rnode[iz] * std::abs(data.f[grid.index(is, iz)]) * kTwoPi / ns;
  scale = std::max(scale, 1e-300);

  PolarSpectralField field;
  field.center_ = grid.center();
  field.r_a_ = ra;
  field.r_b_ = rb;
  defect = 0.0;

  for (int k = 0; k <= kmax; ++k) {
    PolarSpectralField::Mode mode;
    mode.k = k;
    cplx phi_a, phi_b;  // endpoint values for the curl correction
    if (k == 0) {
      // flux F = r dphi_0/dr, F' = r f_0, F(r_a) = r_a g_a
      double running = ra * gin[0].real();
      for (std::size_t j = 0; j + 1 < breaks.size(); ++j) {
        const double lo = breaks[j], hi = breaks[j + 1], hh = 0.5 * (hi - lo);
        Eigen::VectorXd sf;
        if (data.f0) {
          sf.resize(kPieceNodes);
          for (int i = 0; i < kPieceNodes; ++i) {
            const double s = 0.5 * (lo + hi) - hh * std::cos(std::numbers::pi * i / (kPieceNodes - 1));
            sf[i] = s * data.f0(s);
          }
        } else {
          sf.resize(m);
          for (int i = 0; i < m; ++i) sf[i] = rnode[i] * fk[i][0].real();
        }
        Eigen::VectorXd I = spectral::chebyshev_integral(spectral::chebyshev_coefficients(sf)) * hh;
        I[0] += running;
        running = I.sum();
        field.flux_pieces_.push_back(std::move(I));
      }
      field.flux_breaks_ = breaks;
      const double d = std::abs(running - rb * gout[0].real()) * kTwoPi;
      defect = d;
      if (d > compat_tol * scale && d > 1e-14)
        throw IncompatibleData(fmt::format("compatibility defect {:.3e} exceeds tolerance {:.1e} x scale {:.3e}", d,
                                           compat_tol, scale),
                               d);
      if (!data.keep_mode_zero) {
        field.flux_breaks_.clear();
        field.flux_pieces_.clear();
        continue;
      }
      phi_a = phi_b = 0.0;
    } else {
      Eigen::MatrixXd L(nc, nc);
      for (int i = 0; i < m; ++i)
        L.row(i) = d2T.row(i) / (half * half) + dT.row(i) / (half * rnode[i]) - (double(k) * k / (rnode[i] * rnode[i])) * T.row(i);
      L.row(m) = dT_lo / half;
      L.row(m + 1) = dT_hi / half;
      Eigen::VectorXcd rhs(nc);
      for (int i = 0; i < m; ++i) rhs[i] = fk[i][k];
      rhs[m] = gin[k];
      rhs[m + 1] = gout[k];
      Eigen::PartialPivLU<Eigen::MatrixXd> lu(L);
      Eigen::VectorXd re = lu.solve(rhs.real()), im = lu.solve(rhs.imag());
      mode.phi = re.cast<cplx>() + cplx(0.0, 1.0) * im.cast<cplx>();
      phi_a = T_lo.cast<cplx>().dot(mode.phi.conjugate()) ;
      phi_a = std::conj(phi_a);
      phi_b = std::conj(T_hi.cast<cplx>().dot(mode.phi.conjugate()));
    }
    if (curl_part) {
      const cplx ik(0.0, double(k));
      const cplx mis_a = tin[k] - ik / ra * phi_a;
      const cplx mis_b = tout[k] - ik / rb * phi_b;
      mode.zeta_da = -mis_a;
      mode.zeta_db = -mis_b;
    }
    field.modes_.push_back(std::move(mode));
  }
  return field;
}

PolarParts PolarSpectralBuilder::parts(const PolarSpectralField& f, double rho, double theta) {
  PolarParts p;
  const double half = 0.5 * (f.r_b_ - f.r_a_);
  const double x = std::clamp((rho - 0.5 * (f.r_a_ + f.r_b_)) / half, -1.0, 1.0);
  const double L = f.r_b_ - f.r_a_;
  const double s = std::clamp((rho - f.r_a_) / L, 0.0, 1.0);
  const double h10 = s * s * s - 2 * s * s + s, h11 = s * s * s - s * s;
  const double h10p = 3 * s * s - 4 * s + 1, h11p = 3 * s * s - 2 * s;
  const double h10pp = 6 * s - 4, h11pp = 6 * s - 2;

  std::size_t nc = 0;
  for (const auto& m : f.modes_) nc = std::max<std::size_t>(nc, m.phi.size());
  std::vector<double> t(nc), dt(nc), d2t(nc);
  spectral::chebyshev_basis(x, static_cast<int>(nc), t.data(), dt.data(), d2t.data());

  for (const auto& m : f.modes_) {
    cplx v(0), dv(0), d2v(0);
    for (Eigen::Index j = 0; j < m.phi.size(); ++j) {
      v += m.phi[j] * t[j];
      dv += m.phi[j] * dt[j];
      d2v += m.phi[j] * d2t[j];
    }
    dv /= half;
    d2v /= half * half;
    const cplx z = L * (m.zeta_da * h10 + m.zeta_db * h11);
    const cplx dz = m.zeta_da * h10p + m.zeta_db * h11p;
    const cplx d2z = (m.zeta_da * h10pp + m.zeta_db * h11pp) / L;
    const cplx E = std::polar(1.0, m.k * theta);
    if (m.k == 0) {
      double F = 0.0, dF = 0.0;
      if (!f.flux_pieces_.empty()) {
        const auto& br = f.flux_breaks_;
        std::size_t j = std::upper_bound(br.begin() + 1, br.end() - 1, rho) - br.begin() - 1;
        const double lo = br[j], hi = br[j + 1], hh = 0.5 * (hi - lo);
        const double xp = std::clamp((rho - 0.5 * (lo + hi)) / hh, -1.0, 1.0);
        const auto& c = f.flux_pieces_[j];
        std::vector<double> tp(c.size()), dtp(c.size()), d2tp(c.size());
        spectral::chebyshev_basis(xp, static_cast<int>(c.size()), tp.data(), dtp.data(), d2tp.data());
        for (Eigen::Index i = 0; i < c.size(); ++i) {
          F += c[i] * tp[i];
          dF += c[i] * dtp[i];
        }
        dF /= hh;
      }
      const double ph1 = F / rho, ph2 = dF / rho - F / (rho * rho);
      p.ur += ph1;
      p.dr_ur += ph2;
      p.ut += -dz.real();
      p.dr_ut += -d2z.real();
      continue;
    }
    const cplx ik(0.0, double(m.k));
    const cplx ur = dv + ik / rho * z;
    const cplx ut = ik / rho * v - dz;
    p.ur += (ur * E).real();
    p.ut += (ut * E).real();
    p.dr_ur += ((d2v + ik * (dz / rho - z / (rho * rho))) * E).real();
    p.dt_ur += (ik * ur * E).real();
    p.dr_ut += ((ik * (dv / rho - v / (rho * rho)) - d2z) * E).real();
    p.dt_ut += (ik * ut * E).real();
    p.potential += (v * E).real();
  }
  return p;
}

Jet2 PolarSpectralField::jet(const Vec2& x) const {
  if (!contains(x)) return {};
  const Vec2 d = x - center_;
  const double rho = d.norm(), th = std::atan2(d.y(), d.x());
  const auto p = PolarSpectralBuilder::parts(*this, rho, th);
  const Vec2 er(std::cos(th), std::sin(th)), et(-std::sin(th), std::cos(th));
  Jet2 out;
  out.value = p.ur * er + p.ut * et;
  const Vec2 dr = p.dr_ur * er + p.dr_ut * et;
  const Vec2 dth = (p.dt_ur - p.ut) * er + (p.dt_ut + p.ur) * et;
  out.grad = dr * er.transpose() + (dth / rho) * et.transpose();
  return out;
}

double PolarSpectralField::divergence(const Vec2& x) const {
  if (!contains(x)) return 0.0;
  const Vec2 d = x - center_;
  const double rho = d.norm();
  const auto p = PolarSpectralBuilder::parts(*this, rho, std::atan2(d.y(), d.x()));
  return p.dr_ur + p.ur / rho + p.dt_ut / rho;
}

double PolarSpectralField::potential(const Vec2& x) const {
  if (!contains(x)) return 0.0;
  const Vec2 d = x - center_;
  return PolarSpectralBuilder::parts(*this, d.norm(), std::atan2(d.y(), d.x())).potential;
}

namespace {

// RMS of div V - f over the nodes, relative to rms(f) + max|trace| / width
// (absolute when all data vanish).
double nodal_residual(const AnnulusGrid& grid, const PolarSpectralField& field, const std::vector<double>& f,
                      double max_trace) {
  double num = 0.0, den = 0.0;
  for (int iz = 0; iz < grid.n_z(); ++iz)
    for (int is = 0; is < grid.n_s(); ++is) {
      const double target = f.empty() ? 0.0 : f[grid.index(is, iz)];
      const double r = field.divergence(grid.node(is, iz)) - target;
      num += r * r;
      den += target * target;
    }
  const double m = grid.size();
  const double scale = std::sqrt(den / m) + max_trace / (grid.z_max() - grid.z_min());
  return scale > 0.0 ? std::sqrt(num / m) / scale : std::sqrt(num / m);
}

}  // namespace

namespace {

DivergenceSolution divergence_impl(const AnnulusGrid& grid, const std::vector<double>& f,
                                   std::function<double(double)> f0, const std::vector<double>& z_breaks,
                                   const std::vector<Vec2>& inner_bc, const std::vector<Vec2>& outer_bc,
                                   double compat_tol) {
  const int ns = grid.n_s();
  if (static_cast<int>(f.size()) != grid.size() || static_cast<int>(inner_bc.size()) != ns ||
      static_cast<int>(outer_bc.size()) != ns)
    throw InvalidInput("solve_divergence_correction: data sizes do not match the grid");
  PolarSpectralBuilder::Data data;
  data.f = f;
  data.f0 = std::move(f0);
  data.z_breaks = z_breaks;
  for (int is = 0; is < ns; ++is) {
    const double th = grid.theta(is);
    const Vec2 er(std::cos(th), std::sin(th)), et(-std::sin(th), std::cos(th));
    data.g_in.push_back(inner_bc[is].dot(er));
    data.g_out.push_back(outer_bc[is].dot(er));
    data.t_in.push_back(inner_bc[is].dot(et));
    data.t_out.push_back(outer_bc[is].dot(et));
  }
  DivergenceSolution sol;
  sol.field = PolarSpectralBuilder::build(grid, data, compat_tol, sol.compatibility_defect);
  double max_trace = 0.0;
  for (int is = 0; is < ns; ++is)
    max_trace = std::max({max_trace, inner_bc[is].norm(), outer_bc[is].norm()});
  sol.residual = nodal_residual(grid, sol.field, f, max_trace);

  // measured operator bound
  const double dth = kTwoPi / ns;
  double v2 = 0.0, f2 = 0.0, b2 = 0.0;
  for (int iz = 0; iz < grid.n_z(); ++iz)
    for (int is = 0; is < ns; ++is) {
      const double w = grid.z_grid().weights()[iz] * (grid.radius() + grid.z(iz)) * dth;
      v2 += w * sol.field(grid.node(is, iz)).squaredNorm();
      f2 += w * f[grid.index(is, iz)] * f[grid.index(is, iz)];
    }
  for (int is = 0; is < ns; ++is)
    b2 += dth * (grid.r_inner() * inner_bc[is].squaredNorm() + grid.r_outer() * outer_bc[is].squaredNorm());
  const double den = std::sqrt(b2) + std::sqrt(f2);
  sol.bound_constant = den > 0.0 ? std::sqrt(v2) / den : 0.0;
  return sol;
}

}  // namespace

DivergenceSolution solve_divergence_correction(const AnnulusGrid& grid, const std::vector<double>& f,
                                               const std::vector<Vec2>& inner_bc, const std::vector<Vec2>& outer_bc,
                                               double compat_tol) {
  return divergence_impl(grid, f, {}, {}, inner_bc, outer_bc, compat_tol);
}

DivergenceSolution solve_divergence_correction(const AnnulusGrid& grid, const ScalarSampler& f,
                                               const std::vector<Vec2>& inner_bc, const std::vector<Vec2>& outer_bc,
                                               const std::vector<double>& z_breaks, double compat_tol) {
  std::vector<double> nodal(grid.size());
  for (int iz = 0; iz < grid.n_z(); ++iz)
    for (int is = 0; is < grid.n_s(); ++is) nodal[grid.index(is, iz)] = f(grid.node(is, iz));
  auto f0 = [&grid, &f](double r) {
    double acc = 0.0;
    for (int is = 0; is < grid.n_s(); ++is) {
      const double th = grid.theta(is);
      acc += f(grid.center() + r * Vec2(std::cos(th), std::sin(th)));
    }
    return acc / grid.n_s();
  };
  return divergence_impl(grid, nodal, f0, z_breaks, inner_bc, outer_bc, compat_tol);
}

HarmonicSolution harmonic_neumann(const AnnulusGrid& grid, const std::vector<double>& g, double compat_tol) {
  if (static_cast<int>(g.size()) != grid.n_s()) throw InvalidInput("harmonic_neumann: need one value per ring node");
  PolarSpectralBuilder::Data data;
  data.g_in = g;
  data.g_out.assign(g.size(), 0.0);
  data.keep_mode_zero = false;
  HarmonicSolution sol;
  sol.gradient = PolarSpectralBuilder::build(grid, data, compat_tol, sol.compatibility_defect);
  double max_g = 0.0;
  for (double v : g) max_g = std::max(max_g, std::abs(v));
  sol.laplacian_residual = nodal_residual(grid, sol.gradient, {}, max_g);
  return sol;
}

AnnulusField blend_tangential(const AnnulusField& U, const RigidField& US, double n) {
  const auto& grid = U.grid();
  if (!(n >= 1.0)) throw InvalidInput("blend_tangential: n must be >= 1");
  if (grid.n_z() < 8.0 * n * (grid.z_max() - grid.z_min()))
    throw InvalidInput(fmt::format("blend_tangential: {} radial nodes cannot resolve a layer of width 1/{} over a band of {}",
                                   grid.n_z(), n, grid.z_max() - grid.z_min()));
  std::vector<Vec2> out(grid.size());
  for (int iz = 0; iz < grid.n_z(); ++iz)
    for (int is = 0; is < grid.n_s(); ++is) {
      const Vec2 x = grid.node(is, iz);
      const Vec2 e = (x - grid.center()).normalized();
      const double c = truncation(n * grid.z(iz));
      const Vec2 u = U.at(is, iz), us = US(x);
      out[grid.index(is, iz)] = (1.0 - c) * u + c * (us + (u - us).dot(e) * e);
    }
  return AnnulusField(grid, std::move(out));
}

// --------------------------------------------------------------------------
// normal flux corrector

NormalFluxCorrector::NormalFluxCorrector(const JetSampler& U, const RigidField& US, const Placement& placement,
                                         const SolidShape& shape, double delta, int n_s, int n_z)
    : U_(U), US_(US), center_(placement.center), radius_(shape.radius), delta_(delta) {
  if (!(delta > 0.0)) throw InvalidInput("normal_flux_corrector: delta must be positive");
  const AnnulusGrid grid(center_, radius_, 0.0, delta, n_s, n_z);
  double acc = 0.0;
  for (int is = 0; is < n_s; ++is) {
    const Vec2 x = grid.node(is, 0);
    const double m = (U_(x).value - US_(x)).dot((x - center_).normalized());
    acc += m * m * radius_ * kTwoPi / n_s;
  }
  mismatch_norm_ = std::sqrt(acc);
  const std::vector<Vec2> zero(n_s, Vec2::Zero());
  w2_ = solve_divergence_correction(grid, [&](const Vec2& x) { return -w1(x).grad.trace(); }, zero, zero,
                                    {delta / 8, delta / 2});
}

Jet2 NormalFluxCorrector::w1(const Vec2& x) const {
  const Vec2 d = x - center_;
  const double rho = d.norm(), z = rho - radius_;
  if (z < -1e-12 * radius_ || z > delta_) return {};
  const Vec2 e = d / rho, et(-e.y(), e.x());
  const Vec2 p = center_ + radius_ * e;
  const Jet2 u = U_(p);
  const Vec2 w = u.value - US_(p);
  const Mat2 gw = u.grad - US_.gradient();
  const double m = w.dot(e);
  const double dm = (gw * (radius_ * et)).dot(e) + w.dot(et);
  const double a = truncation(2.0 * z / delta_), da = truncation_d1(2.0 * z / delta_) * 2.0 / delta_;
  const Mat2 grad_e = (Mat2::Identity() - e * e.transpose()) / rho;
  const Vec2 grad_am = da * m * e + a * dm / rho * et;
  return {a * m * e, e * grad_am.transpose() + a * m * grad_e};
}

Jet2 NormalFluxCorrector::jet(const Vec2& x) const { return w1(x) + w2_.field.jet(x); }

// --------------------------------------------------------------------------
// connection

ConnectedVelocity::ConnectedVelocity(JetSampler U, const RigidField& US, const Placement& placement,
                                     const SolidShape& shape, const ConnectParams& params)
    : U_(std::move(U)), US_(US), center_(placement.center), radius_(shape.radius), params_(params),
      W_(U_, US, placement, shape, params.delta, params.n_s, params.n_z) {
  if (!(params.n >= 1.0)) throw InvalidInput("connect_velocity: n must be >= 1");
  if (!(params.n * params.delta >= 1.0))
    throw InvalidInput(fmt::format("connect_velocity: layer 1/n = {} wider than the band {}", 1.0 / params.n,
                                   params.delta));
  const AnnulusGrid sub(center_, radius_, 0.0, 1.0 / params.n, params.n_s, params.n_z);
  if (sub.n_z() < 8.0 * params.n * (sub.z_max() - sub.z_min()))
    throw InvalidInput("connect_velocity: layer under-resolved");
  const std::vector<Vec2> zero(params.n_s, Vec2::Zero());
  v2_ = solve_divergence_correction(sub, [&](const Vec2& x) { return -v1(x).grad.trace(); }, zero, zero,
                                    {0.25 / params.n});
}

Jet2 ConnectedVelocity::v1(const Vec2& x) const {
  const Vec2 d = x - center_;
  const double rho = d.norm(), z = rho - radius_;
  const Jet2 u = U_(x);
  if (z * params_.n >= 1.0) return u;
  const Vec2 e = d / rho;
  const Jet2 w = u - rigid_jet(US_, x);
  return add_tangential(u, w, e, rho, -truncation(params_.n * z), -params_.n * truncation_d1(params_.n * z));
}

Jet2 ConnectedVelocity::jet(const Vec2& x) const {
  const double z = (x - center_).norm() - radius_;
  if (z < 0.0) return rigid_jet(US_, x);
  if (z >= params_.delta) return U_(x);
  return v1(x) + v2_.field.jet(x) - W_.jet(x);
}

double ConnectedVelocity::divergence_residual() const { return std::max(v2_.residual, W_.divergence_residual()); }

ConnectedVelocity connect_velocity(const JetSampler& U, const RigidField& US, const Placement& placement,
                                   const SolidShape& shape, const ConnectParams& params) {
  return ConnectedVelocity(U, US, placement, shape, params);
}

// --------------------------------------------------------------------------
// stream-function connection

StreamConnection::StreamConnection(StreamSampler psi_U, const RigidField& US, const Placement& placement,
                                   const SolidShape& shape, double delta, int boundary_order)
    : psi_U_(std::move(psi_U)), US_(US), center_(placement.center), radius_(shape.radius), delta_(delta) {
  if (!(delta > 0.0)) throw InvalidInput("StreamConnection: delta must be positive");
  double acc = 0.0, len = 0.0;
  for (const auto& b : boundary_quadrature(placement, shape, boundary_order)) {
    acc += b.weight * (psi_U_(b.x).psi - rigid_stream(b.x).psi);
    len += b.weight;
  }
  gauge_ = acc / len;
}

StreamJet StreamConnection::rigid_stream(const Vec2& x) const {
  const Vec2 r = x - US_.center;
  StreamJet s;
  s.psi = US_.V.x() * r.y() - US_.V.y() * r.x() - 0.5 * US_.omega * r.squaredNorm() + gauge_;
  s.grad = Vec2(-US_.V.y() - US_.omega * r.x(), US_.V.x() - US_.omega * r.y());
  s.hess = -US_.omega * Mat2::Identity();
  return s;
}

StreamJet StreamConnection::stream(const Vec2& x) const {
  const Vec2 d = x - center_;
  const double rho = d.norm(), z = rho - radius_;
  if (z <= 0.0) return rigid_stream(x);
  const StreamJet pu = psi_U_(x);
  if (z >= delta_) return pu;
  const StreamJet ps = rigid_stream(x);
  const Vec2 e = d / rho;
  const double eta = truncation(z / delta_);
  const double d1 = truncation_d1(z / delta_) / delta_, d2 = truncation_d2(z / delta_) / (delta_ * delta_);
  const Vec2 grad_eta = d1 * e;
  const Mat2 hess_eta = d2 * e * e.transpose() + d1 * (Mat2::Identity() - e * e.transpose()) / rho;
  const double D = ps.psi - pu.psi;
  const Vec2 gD = ps.grad - pu.grad;
  const Mat2 hD = ps.hess - pu.hess;
  StreamJet out;
  out.psi = pu.psi + eta * D;
  out.grad = pu.grad + eta * gD + D * grad_eta;
  out.hess = pu.hess + eta * hD + grad_eta * gD.transpose() + gD * grad_eta.transpose() + D * hess_eta;
  return out;
}

Jet2 StreamConnection::jet(const Vec2& x) const {
  const StreamJet s = stream(x);
  return {velocity_from_stream(s), velocity_gradient_from_stream(s)};
}

// --------------------------------------------------------------------------
// test-function approximation

TestFunctionApprox::TestFunctionApprox(JetSampler phi_F, const RigidField& phi_S, const Placement& placement,
                                       const SolidShape& shape, double alpha, double n, int n_s, int n_z)
    : phi_F_(std::move(phi_F)), phi_S_(phi_S), center_(placement.center), radius_(shape.radius) {
  if (!(n >= 1.0)) throw InvalidInput("approximate_test_function: n must be >= 1");
  if (!(alpha > 0.0)) throw InvalidInput("approximate_test_function: alpha must be positive");
  width_ = std::pow(n, -alpha);
  if (width_ > 0.5 * radius_)
    throw InvalidInput(fmt::format("approximate_test_function: layer width {} exceeds half the radius", width_));
  double scale = 0.0, worst = 0.0;
  for (const auto& b : boundary_quadrature(placement, shape, 16)) {
    const Vec2 f = phi_F_(b.x).value;
    scale = std::max(scale, f.norm() + phi_S_(b.x).norm());
    worst = std::max(worst, std::abs((f - phi_S_(b.x)).dot(b.normal)));
  }
  if (worst > 1e-8 * std::max(1.0, scale))
    throw InvalidInput(fmt::format("approximate_test_function: normal traces differ by {:.3e}", worst));
  const AnnulusGrid grid(center_, radius_, -width_, 0.0, n_s, n_z);
  const std::vector<Vec2> zero(n_s, Vec2::Zero());
  corr_ = solve_divergence_correction(grid, [&](const Vec2& x) { return -first(x).grad.trace(); }, zero, zero,
                                      {-0.25 * width_});
}

Jet2 TestFunctionApprox::first(const Vec2& x) const {
  const Vec2 d = x - center_;
  const double rho = d.norm(), z = rho - radius_;
  const Jet2 base = rigid_jet(phi_S_, x);
  const Jet2 w = phi_F_(x) - base;
  return add_tangential(base, w, d / rho, rho, truncation(z / width_), truncation_d1(z / width_) / width_);
}

Jet2 TestFunctionApprox::jet(const Vec2& x) const {
  const double z = (x - center_).norm() - radius_;
  if (z >= 0.0) return phi_F_(x);
  if (z <= -width_) return rigid_jet(phi_S_, x);
  return first(x) + corr_.field.jet(x);
}

TestFunctionApprox approximate_test_function(const JetSampler& phi_F, const RigidField& phi_S,
                                             const Placement& placement, const SolidShape& shape, double alpha,
                                             double n) {
  return TestFunctionApprox(phi_F, phi_S, placement, shape, alpha, n);
}

TestFunctionApprox approximate_test_function(const JetSampler& phi_F, const RigidField& phi_S,
                                             const Propagator& propagator, double t, const SolidShape& shape,
                                             double alpha, double n) {
  const Placement p = propagator.placement(t);
  RigidField moved = phi_S;
  moved.center = p.center;
  return TestFunctionApprox(phi_F, moved, p, shape, alpha, n);
}

// --------------------------------------------------------------------------
// rigidified approximation

Rigidified::Rigidified(JetSampler u, const Placement& placement, const SolidShape& shape, double h, double delta,
                       int n_s, int n_z)
    : u_(std::move(u)), center_(placement.center), radius_(shape.radius), h_(h), delta_(delta) {
  if (!(h > 0.0) || !(h < 0.5 * delta))
    throw InvalidInput(fmt::format("rigidify: need 0 < h < delta / 2 (h = {}, delta = {})", h, delta));
  const auto data = inertial_data(shape, placement);
  Pu_ = project_rigid([&](const Vec2& x) { return u_(x).value; }, data, placement, shape);

  const AnnulusGrid blend_grid(center_, radius_, h, 2.0 * h, n_s, n_z);
  const std::vector<Vec2> zero(n_s, Vec2::Zero());
  v2_ = solve_divergence_correction(blend_grid, [&](const Vec2& x) { return -blend(x).grad.trace(); }, zero, zero,
                                    {1.25 * h});

  const AnnulusGrid harmonic_grid(center_, radius_, h, delta, n_s, n_z);
  std::vector<double> g(n_s);
  for (int is = 0; is < n_s; ++is) {
    const Vec2 x = harmonic_grid.node(is, 0);
    g[is] = (Pu_(x) - u_(x).value).dot((x - center_).normalized());
  }
  Y_ = harmonic_neumann(harmonic_grid, g);
}

Jet2 Rigidified::blend(const Vec2& x) const {
  const Vec2 d = x - center_;
  const double rho = d.norm(), z = rho - radius_;
  const Jet2 u = u_(x);
  const double s = (z - h_) / h_;
  if (s >= 1.0) return u;
  const Jet2 w = u - rigid_jet(Pu_, x);
  return add_tangential(u, w, d / rho, rho, -truncation(s), -truncation_d1(s) / h_);
}

Jet2 Rigidified::jet(const Vec2& x) const {
  const double z = (x - center_).norm() - radius_;
  if (z < h_) return rigid_jet(Pu_, x);
  if (z >= delta_) return u_(x);
  Jet2 out = z <= 2.0 * h_ ? blend(x) + v2_.field.jet(x) : u_(x);
  return out + Y_.gradient.jet(x);
}

Rigidified rigidify(const JetSampler& u, const Placement& placement, const SolidShape& shape, double h, double delta) {
  return Rigidified(u, placement, shape, h, delta);
}

}  // namespace navslip
