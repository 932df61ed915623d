#pragma once

#include <complex>
#include <memory>
#include <vector>

#include "navslip/geometry.hpp"
#include "navslip/rigid_motion.hpp"
#include "navslip/spectral.hpp"
#include "navslip/types.hpp"

namespace navslip {

/// Smooth truncation: 1 on [0, 1/4], 0 on [1, inf), quintic smoothstep in
/// between; even in its argument.
double truncation(double s);
double truncation_d1(double s);
double truncation_d2(double s);

/// Polar grid around a disk: uniform angles theta_j = 2 pi j / n_s (world
/// frame) times Chebyshev-Gauss-Lobatto offsets z in [z_min, z_max], where z is
/// the signed distance to the disk boundary.
class AnnulusGrid {
 public:
  AnnulusGrid(const Vec2& center, double radius, double z_min, double z_max, int n_s, int n_z);

  const Vec2& center() const { return center_; }
  double radius() const { return radius_; }
  double z_min() const { return z_grid_->a(); }
  double z_max() const { return z_grid_->b(); }
  double r_inner() const { return radius_ + z_min(); }
  double r_outer() const { return radius_ + z_max(); }
  int n_s() const { return n_s_; }
  int n_z() const { return z_grid_->size(); }
  int size() const { return n_s_ * n_z(); }
  int index(int i_s, int i_z) const { return i_z * n_s_ + i_s; }
  double theta(int i_s) const;
  double z(int i_z) const { return z_grid_->nodes()[i_z]; }
  Vec2 node(int i_s, int i_z) const;
  const spectral::ChebyshevGrid& z_grid() const { return *z_grid_; }

 private:
  Vec2 center_;
  double radius_;
  int n_s_;
  std::shared_ptr<const spectral::ChebyshevGrid> z_grid_;
};

/// Vector values on an AnnulusGrid with trigonometric x barycentric
/// interpolation (exact at the nodes).
class AnnulusField {
 public:
  AnnulusField(AnnulusGrid grid, std::vector<Vec2> values);
  static AnnulusField sample(const AnnulusGrid& grid, const VectorSampler& f);

  const AnnulusGrid& grid() const { return grid_; }
  const std::vector<Vec2>& values() const { return values_; }
  const Vec2& at(int i_s, int i_z) const { return values_[grid_.index(i_s, i_z)]; }
  Vec2 interpolate(const Vec2& x) const;

 private:
  AnnulusGrid grid_;
  std::vector<Vec2> values_;
  // per z-row Fourier coefficients of each component
  std::vector<std::vector<std::complex<double>>> fx_, fy_;
};

/// Smooth field on an annulus r_in <= |x - c| <= r_out written as
/// grad(phi) + curl(zeta) with phi, zeta expanded in Fourier modes in the
/// angle and polynomials in the radius. Zero outside the annulus.
class PolarSpectralField {
 public:
  PolarSpectralField() = default;

  bool empty() const { return modes_.empty(); }
  bool contains(const Vec2& x) const;
  Jet2 jet(const Vec2& x) const;
  Vec2 operator()(const Vec2& x) const { return jet(x).value; }
  double divergence(const Vec2& x) const;
  /// phi(x) for the modes k >= 1 (the k = 0 potential is only known through
  /// its radial derivative).
  double potential(const Vec2& x) const;
  double r_inner() const { return r_a_; }
  double r_outer() const { return r_b_; }

 private:
  friend class PolarSpectralBuilder;
  struct Mode {
    int k = 0;
    // Chebyshev coefficients in x in [-1,1] of the potential phi_k (k >= 1).
    Eigen::VectorXcd phi;
    // zeta_k(r) = L * (d_a h10(s) + d_b h11(s)), s = (r - r_a) / L
    std::complex<double> zeta_da{0.0, 0.0}, zeta_db{0.0, 0.0};
  };
  Vec2 center_ = Vec2::Zero();
  double r_a_ = 0.0, r_b_ = 0.0;
  std::vector<Mode> modes_;
  // Flux r * dphi_0/dr, piecewise Chebyshev between flux_breaks_.
  std::vector<double> flux_breaks_;
  std::vector<Eigen::VectorXd> flux_pieces_;
};

struct DivergenceSolution {
  PolarSpectralField field;
  double residual = 0.0;               ///< rms(div V - f) / (rms f + max|trace| / width) on the nodes
  double compatibility_defect = 0.0;   ///< |int f - oint phi.nu|
  double bound_constant = 0.0;         ///< ||V||_L2 / (||phi||_L2(bdry) + ||f||_L2)
};

/// Solves div V = f on the grid's annulus with V = inner_bc on the inner ring
/// and V = outer_bc on the outer ring (values at the ring nodes). Rejects data
/// whose compatibility defect exceeds compat_tol relative to the data scale.
DivergenceSolution solve_divergence_correction(const AnnulusGrid& grid, const std::vector<double>& f,
                                               const std::vector<Vec2>& inner_bc, const std::vector<Vec2>& outer_bc,
                                               double compat_tol = 1e-8);

/// Same with f given as a function. The axisymmetric part of f is integrated
/// piecewise between the radial offsets `z_breaks` (where f may lose
/// smoothness), so data compatible in the continuum stays compatible.
DivergenceSolution solve_divergence_correction(const AnnulusGrid& grid, const ScalarSampler& f,
                                               const std::vector<Vec2>& inner_bc, const std::vector<Vec2>& outer_bc,
                                               const std::vector<double>& z_breaks, double compat_tol = 1e-8);

struct HarmonicSolution {
  PolarSpectralField gradient;  ///< grad Y
  double laplacian_residual = 0.0;
  double compatibility_defect = 0.0;
  double potential(const Vec2& x) const { return gradient.potential(x); }
};

/// Delta Y = 0 on the grid's annulus, dY/dr = g on the inner ring (samples at
/// the ring nodes), dY/dr = 0 on the outer ring, mean of Y zero.
HarmonicSolution harmonic_neumann(const AnnulusGrid& grid, const std::vector<double>& g, double compat_tol = 1e-8);

/// V_1 = (1 - chi(n z)) U + chi(n z) (U_S + [(U - U_S).e_z] e_z) at every node.
/// Requires n_z >= 8 n (z_max - z_min) so the layer is resolved.
AnnulusField blend_tangential(const AnnulusField& U, const RigidField& US, double n);

struct ConnectParams {
  double delta = 0.1;  ///< band width
  double n = 100.0;    ///< sharpness of the tangential layer
  int n_s = 64;        ///< angular resolution of the correction solves
  int n_z = 24;        ///< radial resolution of the correction solves
};

/// W = W_1 + W_2 on the band 0 <= z <= delta: W_1 = chi(2z/delta) m(theta) e_z
/// with m the normal mismatch (U - U_S).nu on the boundary, W_2 removes the
/// divergence of W_1 with zero traces.
class NormalFluxCorrector {
 public:
  NormalFluxCorrector(const JetSampler& U, const RigidField& US, const Placement& placement, const SolidShape& shape,
                      double delta, int n_s = 64, int n_z = 24);
  Jet2 jet(const Vec2& x) const;
  Vec2 operator()(const Vec2& x) const { return jet(x).value; }
  Jet2 w1(const Vec2& x) const;
  const PolarSpectralField& w2() const { return w2_.field; }
  double divergence_residual() const { return w2_.residual; }
  double mismatch_norm() const { return mismatch_norm_; }  ///< ||(U - U_S).nu||_L2(boundary)

 private:
  JetSampler U_;
  RigidField US_;
  Vec2 center_;
  double radius_, delta_;
  double mismatch_norm_ = 0.0;
  DivergenceSolution w2_;
};

/// Faithful connection: U_S in the solid, U outside the delta-band,
/// V_1 + V_2 - W in the band, where V_2 removes the divergence of the
/// tangential blend V_1 inside the sub-band 0 <= z <= 1/n.
class ConnectedVelocity {
 public:
  ConnectedVelocity(JetSampler U, const RigidField& US, const Placement& placement, const SolidShape& shape,
                    const ConnectParams& params);
  Jet2 jet(const Vec2& x) const;
  Vec2 operator()(const Vec2& x) const { return jet(x).value; }
  Jet2 v1(const Vec2& x) const;
  double divergence_residual() const;
  const NormalFluxCorrector& flux_corrector() const { return W_; }

 private:
  JetSampler U_;
  RigidField US_;
  Vec2 center_;
  double radius_;
  ConnectParams params_;
  DivergenceSolution v2_;
  NormalFluxCorrector W_;
};

ConnectedVelocity connect_velocity(const JetSampler& U, const RigidField& US, const Placement& placement,
                                   const SolidShape& shape, const ConnectParams& params);

/// 2D alternative: psi_V = (1 - eta) psi_U + eta psi_US with eta(z) =
/// chi(z / delta), solenoidal by construction. The rigid stream function is
/// gauged so that psi_US - psi_U has zero mean on the solid boundary.
class StreamConnection {
 public:
  StreamConnection(StreamSampler psi_U, const RigidField& US, const Placement& placement, const SolidShape& shape,
                   double delta, int boundary_order = 16);
  StreamJet stream(const Vec2& x) const;
  Jet2 jet(const Vec2& x) const;
  Vec2 operator()(const Vec2& x) const { return velocity_from_stream(stream(x)); }
  StreamJet rigid_stream(const Vec2& x) const;

 private:
  StreamSampler psi_U_;
  RigidField US_;
  Vec2 center_;
  double radius_, delta_, gauge_ = 0.0;
};

/// Phi^n = phi_F outside S; inside S, phi_S plus the tangential mismatch
/// truncated to the layer |z| <= n^{-alpha}, plus a divergence correction on
/// that layer with zero traces.
class TestFunctionApprox {
 public:
  TestFunctionApprox(JetSampler phi_F, const RigidField& phi_S, const Placement& placement, const SolidShape& shape,
                     double alpha, double n, int n_s = 64, int n_z = 24);
  Jet2 jet(const Vec2& x) const;
  Vec2 operator()(const Vec2& x) const { return jet(x).value; }
  double layer_width() const { return width_; }
  double divergence_residual() const { return corr_.residual; }

 private:
  Jet2 first(const Vec2& x) const;
  JetSampler phi_F_;
  RigidField phi_S_;
  Vec2 center_;
  double radius_, width_;
  DivergenceSolution corr_;
};

TestFunctionApprox approximate_test_function(const JetSampler& phi_F, const RigidField& phi_S,
                                             const Placement& placement, const SolidShape& shape, double alpha,
                                             double n);
/// Same at time t of a propagator: the rigid part is re-centered on x_S(t).
TestFunctionApprox approximate_test_function(const JetSampler& phi_F, const RigidField& phi_S,
                                             const Propagator& propagator, double t, const SolidShape& shape,
                                             double alpha, double n);

/// v_h: P_S u on (S)_h, u outside (S)_delta, blended on h <= z <= 2h with a
/// divergence correction there, plus grad Y on h <= z <= delta restoring the
/// rigid normal trace at z = h.
class Rigidified {
 public:
  Rigidified(JetSampler u, const Placement& placement, const SolidShape& shape, double h, double delta,
             int n_s = 64, int n_z = 24);
  Jet2 jet(const Vec2& x) const;
  Vec2 operator()(const Vec2& x) const { return jet(x).value; }
  const RigidField& rigid() const { return Pu_; }
  double h() const { return h_; }

 private:
  Jet2 blend(const Vec2& x) const;
  JetSampler u_;
  RigidField Pu_;
  Vec2 center_;
  double radius_, h_, delta_;
  DivergenceSolution v2_;
  HarmonicSolution Y_;
};

Rigidified rigidify(const JetSampler& u, const Placement& placement, const SolidShape& shape, double h,
                    double delta);

}  // namespace navslip
