#pragma once

#include <functional>
#include <limits>
#include <string>
#include <vector>

#include "navslip/galerkin.hpp"

namespace navslip {

// ---------------------------------------------------------------------------
// energy

struct EnergyReport {
  std::vector<double> t;
  std::vector<EnergyLedger> ledger;
  /// kinetic(t_k) + int_0^t_k dissipation (right-endpoint rule, as in the scheme).
  std::vector<double> lhs;
  /// kinetic(0) + int_0^t_k gravity work.
  std::vector<double> rhs;
  double tolerance = 0.0;
  bool holds = true;
  double final_slack = 0.0;  ///< rhs - lhs at the last sample
  double min_slack = 0.0;
};

/// Checks lhs <= rhs + tol at every sample, with
/// tol = abs_tol * max(1, kinetic(0)) + c_dt * (largest step).
EnergyReport energy_report(const Trajectory& trajectory, double abs_tol = 1e-10, double c_dt = 0.0);

// ---------------------------------------------------------------------------
// weak formulation

/// A test pair on [0, T): phi_F on the whole cavity (solenoidal, zero normal
/// trace on the walls), phi_S(t) rigid about a fixed point; time derivatives
/// at fixed x.
struct SpaceTimeTest {
  std::function<Jet2(double, const Vec2&)> fluid;
  std::function<Vec2(double, const Vec2&)> fluid_dt;
  std::function<RigidField(double)> solid;
  std::function<RigidField(double)> solid_dt;
};

/// Signed contributions whose sum is the momentum defect.
struct WeakResidualTerms {
  double time_fluid = 0.0;      ///< -int int_F rho_F u . d_t phi_F
  double time_solid = 0.0;      ///< -int int_S rho_S u_S . d_t phi_S
  double convection = 0.0;      ///< -int int_F rho_F (u x u) : grad phi_F
  double viscous = 0.0;         ///< int int_F 2 mu D(u) : D(phi_F)
  double wall_slip = 0.0;
  double interface_slip = 0.0;
  double gravity = 0.0;         ///< minus both body-force integrals
  double initial = 0.0;         ///< minus both initial-data integrals
  double total() const {
    return time_fluid + time_solid + convection + viscous + wall_slip + interface_slip + gravity + initial;
  }
};

struct ResidualReport {
  WeakResidualTerms terms;
  double residual = 0.0;
  double trace_defect = 0.0;   ///< max |(phi_F - phi_S).nu| on dS over the samples
  int samples = 0;             ///< time samples (trapezoid rule)
  int cavity_points = 0;       ///< Gauss points per cavity axis
  int solid_order = 0;
};

/// Evaluates every term of the weak momentum equation on the trajectory
/// (fluid integrals as cavity minus solid). Throws IncompatibleData if the
/// normal traces of phi_F and phi_S differ by more than trace_tol relative.
ResidualReport weak_residual(const GalerkinModel& model, const Trajectory& trajectory, const SpaceTimeTest& test,
                             double trace_tol = 1e-8);

/// Scalar test function Psi(t, x) with d_t Psi and grad Psi.
struct ScalarTest {
  std::function<double(double, const Vec2&)> value;
  std::function<double(double, const Vec2&)> dt;
  std::function<Vec2(double, const Vec2&)> grad;
};

/// -int int_S d_t Psi - int int_S u_S . grad Psi - int_S0 Psi(0), trapezoid in
/// time with u_S the stored rigid projection.
double mass_residual(const Trajectory& trajectory, const SolidShape& shape, const ScalarTest& psi,
                     int order = 16);

// ---------------------------------------------------------------------------
// decay quantities

/// Least-squares slope of log y against log x.
double fit_slope(const std::vector<double>& x, const std::vector<double>& y);

/// ||sqrt(chi_S) (u - P_S u)||_L2((0,T) x Omega), trapezoid in time.
double penalty_norm(const Trajectory& trajectory);

/// Slope of the penalty norm against n; needs at least 4 positive points.
double penalization_decay(const std::vector<double>& n, const std::vector<double>& norms);

/// Per-step ||(u - P_S u).nu||_L2(dS).
std::vector<double> slip_flux_norm(const Trajectory& trajectory);
/// Same for a sampled field against a rigid field.
double slip_flux_norm(const VectorSampler& u, const RigidField& uS, const Placement& placement,
                      const SolidShape& shape, int order = 16);
/// int_0^T ||(u - P_S u).nu||^2 dt, trapezoid.
double slip_flux_integral(const Trajectory& trajectory);

// ---------------------------------------------------------------------------
// rate studies

struct RateStudy {
  std::string name;
  std::string parameter_name;
  std::vector<double> parameter;
  std::vector<double> value;
  double slope = 0.0;
  double expected = 0.0;  ///< reference exponent
  double lower = -std::numeric_limits<double>::infinity();  ///< pass iff lower <= slope <= upper
  double upper = std::numeric_limits<double>::infinity();
  double seconds = 0.0;
  bool pass() const { return slope >= lower && slope <= upper; }
};

/// ||V^{delta,n} - U||_L2(band) for a fixed smooth U whose normal trace
/// matches the rigid field, over n.
RateStudy connect_rate_study(const std::vector<double>& n = {8, 16, 32, 64, 128, 256, 512});

/// Interior L2 distance ||Phi^n - phi_S||_L2(S) and H1 size ||Phi^n - phi_S||_H1(S)
/// of the test-function approximation, over n.
std::vector<RateStudy> test_function_rate_study(double alpha = 1.5, const std::vector<double>& n = {4, 8, 16, 32, 64});

/// ||v_h - u||_L2(Omega \ S) for a smooth u with matching normal trace, over h.
RateStudy rigidify_rate_study(const std::vector<double>& h = {0.2, 0.1, 0.05, 0.025});

// ---------------------------------------------------------------------------
// analytic test functions, all damped in time by (1 - t/T)^3 on [0, T)

/// phi_F = curl of a compact C^2 bump of radius `radius` at `center`, phi_S = 0.
/// Valid while the solid stays clear of the bump.
SpaceTimeTest bump_test(const Vec2& center, double radius, double T, double amplitude = 1.0);

/// phi_S = V + omega (x - c)^perp, and phi_F equal to it on |x - c| <= r_in,
/// cut off to 0 by |x - c| = r_out. Valid while the solid stays in the plateau.
SpaceTimeTest carrier_test(const RigidField& rigid, double r_in, double r_out, double T);

SpaceTimeTest operator+(const SpaceTimeTest& a, const SpaceTimeTest& b);

/// Heavy-disk scenario used by the penalization sweep.
struct PenalizationScenario {
  Cavity cavity = Cavity::rectangle(2.0, 2.0);
  SolidShape shape{0.25, 2.0};
  SimParams params;
  Placement start{{1.0, 1.2}, 0.0};
  double T_end = 0.2;
  PenalizationScenario();
};

/// Penalty norm and time-integrated slip flux over an n sweep.
std::vector<RateStudy> penalization_rate_study(const PenalizationScenario& scenario,
                                               const std::vector<double>& n = {10, 100, 1000, 10000},
                                               Exec exec = Exec::parallel);

}  // namespace navslip
