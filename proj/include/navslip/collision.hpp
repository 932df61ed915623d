#pragma once

#include <optional>
#include <string>
#include <vector>

#include "navslip/galerkin.hpp"

namespace navslip {

enum class DragKind { log, inverse, none };

/// D(h) = -kappa |ln h| (log), -kappa / h (inverse), 0 (none), evaluated at
/// max(h, h_min). Nonpositive, so hdot * D(h) opposes the motion.
struct DragLaw {
  DragKind kind = DragKind::log;
  double kappa = 1.0;
  double h_min = 0.0;

  double value(double h) const;
  double derivative(double h) const;
  void validate() const;
};

const char* to_string(DragKind kind);
DragKind drag_kind_from_string(const std::string& s);

struct GapState {
  double t = 0.0;
  double h = 1.0;
  double hdot = 0.0;
};

struct GapOdeOptions {
  double abs_tol = 1e-12;
  double rel_tol = 1e-12;
  double h_contact = 1e-9;
  double min_step = 1e-14;      ///< relative to max(1, |t|); smaller steps count as underflow
  long max_steps = 5'000'000;
  void validate() const;
};

enum class GapOutcome { reached_end, contact, underflow };
const char* to_string(GapOutcome outcome);

struct GapTrajectory {
  std::vector<GapState> samples;  ///< every accepted step, plus the event point
  GapOutcome outcome = GapOutcome::reached_end;
  std::optional<double> contact_time;
  double min_h = 0.0;
  long steps = 0;
  std::string message;
};

/// h'' = h' D(h) + a with adaptive Rosenbrock steps; contact when h reaches
/// h_contact, located by bisection on the dense output.
GapTrajectory integrate_gap_ode(const GapState& initial, const DragLaw& law, double a, double T_end,
                                const GapOdeOptions& options = {});

/// Buoyancy-corrected acceleration ((rho_F - rho_S) / rho_S) |g| of the gap.
double gap_acceleration(double rho_F, double rho_S, double g);

struct ContactEstimate {
  bool event = false;
  double guard_time = 0.0;          ///< interpolated time where the gap reaches 2 delta
  double bracket_lo = 0.0, bracket_hi = 0.0;
  std::optional<double> extrapolated;  ///< zero of a quadratic fit of the last gap samples
};

/// First time the simulated gap reaches the 2 delta guard, if it does.
ContactEstimate contact_time(const Trajectory& trajectory, double delta);

}  // namespace navslip
