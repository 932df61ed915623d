#pragma once

#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "navslip/geometry.hpp"
#include "navslip/kernels.hpp"
#include "navslip/rigid_motion.hpp"
#include "navslip/types.hpp"

namespace navslip {

/// e = curl(sin(i pi x / L) sin(j pi y / H)) / norm.
struct BasisMode {
  int i = 1, j = 1;
  double norm = 1.0;
};

/// L2-orthonormal divergence-free fields on a rectangle with zero normal
/// trace, ordered by increasing i^2/L^2 + j^2/H^2 (ties: smaller i first).
class Basis {
 public:
  Basis() = default;
  Basis(const Cavity& cavity, int N);

  int size() const { return static_cast<int>(modes_.size()); }
  const Cavity& cavity() const { return cavity_; }
  const std::vector<BasisMode>& modes() const { return modes_; }
  int max_i() const { return max_i_; }
  int max_j() const { return max_j_; }

  /// Values (2 x N) and gradients (4 x N, rows dxx, dxy, dyx, dyy with
  /// d_ab = d e_a / d x_b) of all fields at x. Either pointer may be null.
  void evaluate(const Vec2& x, Eigen::Matrix<double, 2, Eigen::Dynamic>* values,
                Eigen::Matrix<double, 4, Eigen::Dynamic>* grads) const;
  Jet2 jet(int k, const Vec2& x) const;

  Vec2 velocity(const Eigen::VectorXd& alpha, const Vec2& x) const;
  Jet2 velocity_jet(const Eigen::VectorXd& alpha, const Vec2& x) const;
  /// Stream function sum alpha_k psi_k / norm_k with derivatives.
  StreamJet stream(const Eigen::VectorXd& alpha, const Vec2& x) const;

 private:
  void trig(const Vec2& x, std::vector<double>& sx, std::vector<double>& cx, std::vector<double>& sy,
            std::vector<double>& cy) const;
  Cavity cavity_;
  std::vector<BasisMode> modes_;
  int max_i_ = 0, max_j_ = 0;
};

Basis build_basis(const Cavity& cavity, int N);

struct SimParams {
  double rho_F = 1.0;
  double rho_S = 1.0;
  double mu_F = 1.0;
  double beta_S = 1.0;
  double beta_Omega = 1.0;
  Vec2 g = Vec2(0.0, 9.81);  ///< body force is -rho g
  double n = 100.0;          ///< penalization index
  double delta = 0.1;        ///< band width of the connecting field
  int N = 32;
  double dt = 1e-3;
  double picard_tol = 1e-10;
  int picard_max_iter = 200;
  double relaxation = 0.7;
  int solid_order = 16;      ///< Gauss points per radial/angular panel on the disk
  int band_order = 10;       ///< radial Gauss points per band piece
  int band_angles = 128;
  int cavity_points = 0;     ///< tensor Gauss points per axis on the cavity (0: automatic)

  void validate() const;
  double mu_solid() const { return 1.0 / (n * n); }
};

/// Blocks of the Galerkin system A alpha' + B alpha = f.
struct SystemParts {
  Eigen::MatrixXd A;
  Eigen::MatrixXd convection;     ///< skew part, 1/2 (C - C^T)
  Eigen::MatrixXd viscous;
  Eigen::MatrixXd wall_slip;
  Eigen::MatrixXd interface_slip;
  Eigen::MatrixXd penalization;
  Eigen::VectorXd f;
  /// Rigid projection data: P_S e_i = V_i + omega_i (x - x_S)^perp.
  Eigen::Matrix<double, 2, Eigen::Dynamic> proj_V;
  Eigen::VectorXd proj_omega;
  /// Boundary normal-mismatch Gram: oint ((e_i - P e_i).nu)((e_j - P e_j).nu) on dS.
  Eigen::MatrixXd normal_mismatch;

  Eigen::MatrixXd B() const { return convection + viscous + wall_slip + interface_slip + penalization; }
  Eigen::MatrixXd dissipative() const { return viscous + wall_slip + interface_slip + penalization; }
};

/// Per-step values of every term of the energy balance.
struct EnergyLedger {
  double kinetic = 0.0;             ///< int 1/2 rho |u|^2
  double viscous = 0.0;             ///< int 2 mu |D u|^2
  double wall_slip = 0.0;           ///< 1/(2 beta_Omega) oint |u x nu|^2
  double interface_slip = 0.0;      ///< 1/(2 beta_S) oint |(u - P_S u) x nu|^2
  double penalization = 0.0;        ///< n int chi_S |u - P_S u|^2
  double gravity_work = 0.0;        ///< int rho (-g) . u
  double dissipation() const { return viscous + wall_slip + interface_slip + penalization; }
};

struct GalerkinState {
  double t = 0.0;
  Eigen::VectorXd alpha;
  Placement placement;
  RigidField rigid;            ///< P_S u on S(t)
};

struct StepRecord {
  GalerkinState state;
  RigidField transport;        ///< rigid velocity used to move the solid into this state
  double gap = 0.0;
  EnergyLedger ledger;
  double penalty_defect = 0.0; ///< int chi_S |u - P_S u|^2
  double flux_norm = 0.0;      ///< ||(u - P_S u).nu||_L2(dS)
  double numerical_slack = 0.0;///< 1/2 (alpha' - alpha)^T A (alpha' - alpha) of the step
  int picard_iterations = 0;
};

/// Picard iteration did not converge; carries the residual history.
class PicardFailure : public ConvergenceFailure {
 public:
  PicardFailure(const std::string& what, std::vector<double> history)
      : ConvergenceFailure(what), history_(std::move(history)) {}
  const std::vector<double>& history() const { return history_; }

 private:
  std::vector<double> history_;
};

/// Gap dropped below 2 delta; the scheme's connecting field is undefined there.
class CollisionApproach : public std::runtime_error {
 public:
  CollisionApproach(const std::string& what, double t, double gap)
      : std::runtime_error(what), t_(t), gap_(gap) {}
  double time() const { return t_; }
  double gap() const { return gap_; }

 private:
  double t_, gap_;
};

/// The discrete model: basis, cavity integrals precomputed once, and the
/// solid-dependent assembly.
class GalerkinModel {
 public:
  GalerkinModel(const Cavity& cavity, const SolidShape& shape, const SimParams& params, Exec exec = Exec::parallel);

  const Basis& basis() const { return basis_; }
  const SimParams& params() const { return params_; }
  const SolidShape& shape() const { return shape_; }
  const Cavity& cavity() const { return cavity_; }
  Exec exec() const { return exec_; }

  /// System at the given placement; the convection block uses the connecting
  /// field built from alpha_v. With `with_solid` false, chi_S = 0.
  SystemParts assemble(const Placement& placement, const Eigen::VectorXd& alpha_v, bool with_solid = true) const;

  RigidField rigid_projection(const SystemParts& parts, const Placement& placement, const Eigen::VectorXd& alpha) const;
  RigidField rigid_projection(const Placement& placement, const Eigen::VectorXd& alpha) const;

  /// State at time 0 with its rigid projection filled in.
  GalerkinState initial_state(const Placement& placement, const Eigen::VectorXd& alpha) const;
  /// Ledger entries for alpha with the blocks of `parts`.
  EnergyLedger ledger(const SystemParts& parts, const Eigen::VectorXd& alpha) const;

  /// One time step (throws PicardFailure, CollisionApproach).
  StepRecord step(const GalerkinState& state) const;

  /// Cavity integrals (e_k . grad e_j) . e_i, as T[k](i, j).
  const std::vector<Eigen::MatrixXd>& convection_tensor() const { return T_; }
  const Eigen::MatrixXd& viscous_cavity() const { return K_; }
  const Eigen::MatrixXd& wall_gram() const { return Wall_; }

 private:
  Cavity cavity_;
  SolidShape shape_;
  SimParams params_;
  Exec exec_;
  Basis basis_;
  std::vector<Eigen::MatrixXd> T_;
  Eigen::MatrixXd K_;     // int 2 D(e_i):D(e_j) over the cavity
  Eigen::MatrixXd Wall_;  // oint (e_i . tau)(e_j . tau) over the walls
};

/// Cavity-level integrals of the basis, computed once (serial or parallel).
struct CavityIntegrals {
  std::vector<Eigen::MatrixXd> T;
  Eigen::MatrixXd viscous;
  Eigen::MatrixXd wall;
  Eigen::MatrixXd gram;
};
CavityIntegrals cavity_integrals(const Basis& basis, int points, Exec exec);

/// Free-function forms.
SystemParts assemble_system(const GalerkinModel& model, const GalerkinState& state);
StepRecord picard_step(const GalerkinModel& model, const GalerkinState& state);

/// C_0 = sqrt(2) max(1, r) / min(1, lambda_0, M)^{1/2}, with lambda_0 the
/// moment of inertia and M the mass of the solid.
double horizon_constant(const SolidShape& shape);
/// (gap - 2 delta) / (C_0 sqrt(rho_S) R), 0 if the margin is not positive.
double existence_horizon(const Placement& placement, const SolidShape& shape, const Cavity& cavity, double delta,
                         double R);

/// Default bound R = 2 sqrt(E_0) / sqrt(min rho) (with E_0 the initial kinetic
/// energy); never below a tiny positive floor.
double default_velocity_bound(double kinetic_energy, const SimParams& params);

enum class Termination { completed, collision_approach, picard_failure };

struct Trajectory {
  std::vector<StepRecord> steps;  ///< steps[0] is the initial state
  Termination termination = Termination::completed;
  std::string message;
  double event_time = 0.0;        ///< time of the rejected step (collision / failure)
  double event_gap = 0.0;
  std::vector<double> picard_history;
  double horizon = 0.0;           ///< existence horizon at t = 0 with the default R
  double velocity_bound = 0.0;
};

Trajectory run_simulation(const GalerkinModel& model, const Placement& placement, const Eigen::VectorXd& alpha0,
                          double T_end);

/// Initial coefficient vectors.
Eigen::VectorXd rest_coefficients(const Basis& basis);
/// L2 projection onto the basis of u0 = V on the disk S, 0 elsewhere.
Eigen::VectorXd solid_translation_coefficients(const Basis& basis, const Placement& placement,
                                               const SolidShape& shape, const Vec2& V);

}  // namespace navslip
