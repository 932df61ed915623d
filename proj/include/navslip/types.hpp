#pragma once

#include <functional>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace navslip {

using Vec2 = Eigen::Vector2d;
using Vec3 = Eigen::Vector3d;
using Mat2 = Eigen::Matrix2d;
using Mat3 = Eigen::Matrix3d;

/// Value and Jacobian (d v_i / d x_j) of a planar vector field at one point.
struct Jet2 {
  Vec2 value = Vec2::Zero();
  Mat2 grad = Mat2::Zero();
};

using VectorSampler = std::function<Vec2(const Vec2&)>;
using JetSampler = std::function<Jet2(const Vec2&)>;
using ScalarSampler = std::function<double(const Vec2&)>;

/// Scalar stream function with its gradient and Hessian; the velocity is
/// (d psi/dy, -d psi/dx).
struct StreamJet {
  double psi = 0.0;
  Vec2 grad = Vec2::Zero();
  Mat2 hess = Mat2::Zero();
};
using StreamSampler = std::function<StreamJet(const Vec2&)>;

inline Vec2 velocity_from_stream(const StreamJet& s) { return {s.grad.y(), -s.grad.x()}; }

inline Mat2 velocity_gradient_from_stream(const StreamJet& s) {
  Mat2 g;
  g << s.hess(1, 0), s.hess(1, 1), -s.hess(0, 0), -s.hess(0, 1);
  return g;
}

/// 2D scalar cross product a x b.
inline double cross(const Vec2& a, const Vec2& b) { return a.x() * b.y() - a.y() * b.x(); }

/// omega x r for a scalar (out-of-plane) angular velocity.
inline Vec2 perp(const Vec2& r) { return {-r.y(), r.x()}; }

inline Mat2 rotation(double angle) {
  const double c = std::cos(angle), s = std::sin(angle);
  Mat2 q;
  q << c, -s, s, c;
  return q;
}

/// Raised when inputs violate a documented precondition or invariant.
class InvalidInput : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Raised when data fail a solvability (compatibility) condition; carries the
/// measured defect so callers can report it.
class IncompatibleData : public std::runtime_error {
 public:
  IncompatibleData(const std::string& what, double defect)
      : std::runtime_error(what), defect_(defect) {}
  double defect() const noexcept { return defect_; }

 private:
  double defect_;
};

/// Raised by iterative procedures that fail to converge.
class ConvergenceFailure : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace navslip
