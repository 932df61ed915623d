#pragma once

#include <functional>
#include <vector>

#include "navslip/geometry.hpp"
#include "navslip/types.hpp"

namespace navslip {

/// V + omega x (x - x_S) in the plane.
struct RigidField {
  Vec2 V = Vec2::Zero();
  double omega = 0.0;
  Vec2 center = Vec2::Zero();

  Vec2 operator()(const Vec2& x) const { return V + omega * perp(x - center); }
  /// Constant gradient of the field.
  Mat2 gradient() const {
    Mat2 g;
    g << 0.0, -omega, omega, 0.0;
    return g;
  }
};

struct RigidField3 {
  Vec3 V = Vec3::Zero();
  Vec3 omega = Vec3::Zero();
  Vec3 center = Vec3::Zero();

  Vec3 operator()(const Vec3& x) const { return V + omega.cross(x - center); }
};

struct InertialData {
  double mass = 0.0;
  Vec2 center = Vec2::Zero();
  double inertia = 0.0;
};

struct InertialData3 {
  double mass = 0.0;
  Vec3 center = Vec3::Zero();
  Mat3 inertia = Mat3::Zero();
};

InertialData inertial_data(const SolidShape& shape, const Placement& placement, int order = 16);
InertialData3 inertial_data(const SolidShape& shape, const Placement3& placement, int order = 16);

/// Density-weighted L2(S) projection onto rigid fields.
RigidField project_rigid(const VectorSampler& u, const InertialData& data, const Placement& placement,
                         const SolidShape& shape, int order = 16);
RigidField3 project_rigid(const std::function<Vec3(const Vec3&)>& u, const InertialData3& data,
                          const Placement3& placement, const SolidShape& shape, int order = 16);

/// Same projection from precomputed samples u(x_q) at solid quadrature nodes.
RigidField project_rigid(const std::vector<VolumeNode>& nodes, const std::vector<Vec2>& values,
                         const InertialData& data, double density);

/// A rigid velocity sample at time t; history entries are interpolated
/// piecewise-linearly in t.
struct RigidSample {
  double t = 0.0;
  Vec2 V = Vec2::Zero();
  double omega = 0.0;
};

struct RigidSample3 {
  double t = 0.0;
  Vec3 V = Vec3::Zero();
  Vec3 omega = Vec3::Zero();
};

/// Discrete isometric flow phi_{t,0} of a planar solid.
class Propagator {
 public:
  /// Integrates x_S' = V(t), theta' = omega(t) exactly for the piecewise-linear
  /// interpolant of `history` (which must cover [t0, t1]).
  static Propagator from_history(const Placement& initial, const std::vector<RigidSample>& history, double t0,
                                 double t1);
  /// Piecewise-constant velocity between consecutive snapshots, i.e. linear
  /// interpolation of center and angle.
  static Propagator from_snapshots(std::vector<double> times, std::vector<Placement> placements);

  double t_begin() const { return times_.front(); }
  double t_end() const { return times_.back(); }
  const std::vector<double>& times() const { return times_; }
  const std::vector<Placement>& snapshots() const { return snapshots_; }

  Placement placement(double t) const;
  /// Rotation part Q(t) of phi_{t,0} (relative to the initial orientation).
  Mat2 rotation_from_start(double t) const;
  /// phi_{t,0}(y)
  Vec2 map(double t, const Vec2& y) const;
  /// phi_{t,0}^{-1}(x)
  Vec2 inverse_map(double t, const Vec2& x) const;
  /// phi_{t,s}(x) = phi_{t,0}(phi_{s,0}^{-1}(x))
  Vec2 map_between(double t, double s, const Vec2& x) const;

 private:
  void check_time(double t) const;
  std::vector<double> times_;
  std::vector<Placement> snapshots_;
  // Per-interval velocity polynomial (linear) for from_history; empty for
  // snapshot propagators.
  std::vector<RigidSample> history_;
};

class Propagator3 {
 public:
  /// Q' = [omega]_x Q with exponential-map midpoint substeps and step-doubling
  /// error control; polar re-orthonormalization after every accepted step.
  /// Throws ConvergenceFailure when the step size underflows.
  static Propagator3 from_history(const Placement3& initial, const std::vector<RigidSample3>& history, double t0,
                                  double t1, double tolerance = 1e-10);

  const std::vector<double>& times() const { return times_; }
  const std::vector<Placement3>& snapshots() const { return snapshots_; }
  Placement3 placement(double t) const;

 private:
  std::vector<double> times_;
  std::vector<Placement3> snapshots_;
  std::vector<RigidSample3> history_;
};

/// 1 if x lies in the transported solid S(t) = phi_{t,0}(S_0), else 0.
int transport_indicator(const Propagator& propagator, const SolidShape& shape, const Vec2& x, double t);

/// W(t, y) = Q(t)^T w(phi_{t,0}(y)): the pullback of w to the reference
/// configuration. With Q the rotation by pi/2, a constant (1, 0) pulls back to
/// (0, -1).
VectorSampler pullback_field(const VectorSampler& w, const Propagator& propagator, double t);

/// Nearest orthogonal matrix (polar factor).
Mat3 orthonormalize(const Mat3& q);
/// Rodrigues exponential of the skew matrix of `w`.
Mat3 rotation_exp(const Vec3& w);

}  // namespace navslip
