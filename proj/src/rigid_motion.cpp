#include "navslip/rigid_motion.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

namespace navslip {

InertialData inertial_data(const SolidShape& shape, const Placement& placement, int order) {
  shape.validate();
  const auto nodes = solid_quadrature(placement, shape, order);
  InertialData d;
  Vec2 first = Vec2::Zero();
  for (const auto& q : nodes) {
    d.mass += shape.density * q.weight;
    first += shape.density * q.weight * q.x;
  }
  d.center = first / d.mass;
  for (const auto& q : nodes) d.inertia += shape.density * q.weight * (q.x - d.center).squaredNorm();
  return d;
}

InertialData3 inertial_data(const SolidShape& shape, const Placement3& placement, int order) {
  shape.validate();
  const auto nodes = solid_quadrature(placement, shape, order);
  InertialData3 d;
  Vec3 first = Vec3::Zero();
  for (const auto& q : nodes) {
    d.mass += shape.density * q.weight;
    first += shape.density * q.weight * q.x;
  }
  d.center = first / d.mass;
  for (const auto& q : nodes) {
    const Vec3 r = q.x - d.center;
    d.inertia += shape.density * q.weight * (r.squaredNorm() * Mat3::Identity() - r * r.transpose());
  }
  return d;
}

RigidField project_rigid(const std::vector<VolumeNode>& nodes, const std::vector<Vec2>& values,
                         const InertialData& data, double density) {
  if (!(data.mass > 0.0) || !(data.inertia > 1e-14 * data.mass * 1e-6) || !std::isfinite(data.inertia))
    throw InvalidInput(fmt::format("project_rigid: degenerate inertial data (M = {}, J = {})", data.mass,
                                   data.inertia));
  Vec2 momentum = Vec2::Zero();
  double angular = 0.0;
  for (std::size_t q = 0; q < nodes.size(); ++q) {
    const double w = density * nodes[q].weight;
    momentum += w * values[q];
    angular += w * cross(nodes[q].x - data.center, values[q]);
  }
  return {momentum / data.mass, angular / data.inertia, data.center};
}

RigidField project_rigid(const VectorSampler& u, const InertialData& data, const Placement& placement,
                         const SolidShape& shape, int order) {
  const auto nodes = solid_quadrature(placement, shape, order);
  std::vector<Vec2> values(nodes.size());
  for (std::size_t q = 0; q < nodes.size(); ++q) values[q] = u(nodes[q].x);
  return project_rigid(nodes, values, data, shape.density);
}

RigidField3 project_rigid(const std::function<Vec3(const Vec3&)>& u, const InertialData3& data,
                          const Placement3& placement, const SolidShape& shape, int order) {
  Eigen::SelfAdjointEigenSolver<Mat3> eig(data.inertia);
  if (!(data.mass > 0.0) || eig.eigenvalues().minCoeff() <= 1e-12 * eig.eigenvalues().maxCoeff())
    throw InvalidInput("project_rigid: numerically singular inertia tensor");
  Vec3 momentum = Vec3::Zero(), angular = Vec3::Zero();
  for (const auto& q : solid_quadrature(placement, shape, order)) {
    const Vec3 v = u(q.x);
    const double w = shape.density * q.weight;
    momentum += w * v;
    angular += w * (q.x - data.center).cross(v);
  }
  return {momentum / data.mass, data.inertia.ldlt().solve(angular), data.center};
}

// ---------------------------------------------------------------------------

namespace {

RigidSample interpolate(const std::vector<RigidSample>& h, double t) {
  if (t <= h.front().t) return {t, h.front().V, h.front().omega};
  if (t >= h.back().t) return {t, h.back().V, h.back().omega};
  auto it = std::upper_bound(h.begin(), h.end(), t, [](double v, const RigidSample& s) { return v < s.t; });
  const auto& b = *it;
  const auto& a = *(it - 1);
  const double s = (t - a.t) / (b.t - a.t);
  return {t, (1 - s) * a.V + s * b.V, (1 - s) * a.omega + s * b.omega};
}

RigidSample3 interpolate(const std::vector<RigidSample3>& h, double t) {
  if (t <= h.front().t) return {t, h.front().V, h.front().omega};
  if (t >= h.back().t) return {t, h.back().V, h.back().omega};
  auto it = std::upper_bound(h.begin(), h.end(), t, [](double v, const RigidSample3& s) { return v < s.t; });
  const auto& b = *it;
  const auto& a = *(it - 1);
  const double s = (t - a.t) / (b.t - a.t);
  return {t, (1 - s) * a.V + s * b.V, (1 - s) * a.omega + s * b.omega};
}

template <class Sample>
void check_history(const std::vector<Sample>& history, double t0, double t1) {
  if (history.empty()) throw InvalidInput("propagate: empty rigid history");
  if (!(t1 >= t0)) throw InvalidInput("propagate: t_span must be ordered");
  for (std::size_t i = 1; i < history.size(); ++i)
    if (!(history[i].t > history[i - 1].t)) throw InvalidInput("propagate: history times must increase");
  if (history.size() > 1 && (t0 < history.front().t - 1e-12 || t1 > history.back().t + 1e-12))
    throw InvalidInput("propagate: history does not cover the requested span");
}

// Knots of the piecewise-linear velocity inside [t0, t1].
template <class Sample>
std::vector<Sample> knots(const std::vector<Sample>& history, double t0, double t1) {
  std::vector<Sample> out{interpolate(history, t0)};
  for (const auto& s : history)
    if (s.t > t0 && s.t < t1) out.push_back(s);
  if (t1 > t0) out.push_back(interpolate(history, t1));
  return out;
}

}  // namespace

Propagator Propagator::from_history(const Placement& initial, const std::vector<RigidSample>& history, double t0,
                                    double t1) {
  check_history(history, t0, t1);
  Propagator p;
  p.history_ = knots(history, t0, t1);
  p.times_.push_back(t0);
  p.snapshots_.push_back(initial);
  for (std::size_t k = 1; k < p.history_.size(); ++k) {
    const auto& a = p.history_[k - 1];
    const auto& b = p.history_[k];
    const double dt = b.t - a.t;
    Placement next = p.snapshots_.back();
    next.center += 0.5 * dt * (a.V + b.V);
    next.angle += 0.5 * dt * (a.omega + b.omega);
    p.times_.push_back(b.t);
    p.snapshots_.push_back(next);
  }
  return p;
}

Propagator Propagator::from_snapshots(std::vector<double> times, std::vector<Placement> placements) {
  if (times.empty() || times.size() != placements.size())
    throw InvalidInput("Propagator: snapshot times and placements must be nonempty and of equal length");
  for (std::size_t i = 1; i < times.size(); ++i)
    if (!(times[i] > times[i - 1])) throw InvalidInput("Propagator: snapshot times must increase");
  Propagator p;
  p.times_ = std::move(times);
  p.snapshots_ = std::move(placements);
  return p;
}

void Propagator::check_time(double t) const {
  const double slack = 1e-12 * std::max(1.0, std::abs(times_.back()));
  if (t < times_.front() - slack || t > times_.back() + slack)
    throw InvalidInput(fmt::format("Propagator: t = {} outside [{}, {}]", t, times_.front(), times_.back()));
}

Placement Propagator::placement(double t) const {
  check_time(t);
  if (times_.size() == 1 || t <= times_.front()) return snapshots_.front();
  if (t >= times_.back()) return snapshots_.back();
  const auto it = std::upper_bound(times_.begin(), times_.end(), t);
  const std::size_t k = static_cast<std::size_t>(it - times_.begin()) - 1;
  const double dt = times_[k + 1] - times_[k];
  const double tau = t - times_[k];
  Placement out = snapshots_[k];
  if (history_.empty()) {
    const double s = tau / dt;
    out.center = (1 - s) * snapshots_[k].center + s * snapshots_[k + 1].center;
    out.angle = (1 - s) * snapshots_[k].angle + s * snapshots_[k + 1].angle;
  } else {
    const auto& a = history_[k];
    const auto& b = history_[k + 1];
    const double s = tau / dt;
    out.center += tau * (a.V + 0.5 * s * (b.V - a.V));
    out.angle += tau * (a.omega + 0.5 * s * (b.omega - a.omega));
  }
  return out;
}

Mat2 Propagator::rotation_from_start(double t) const {
  return rotation(placement(t).angle - snapshots_.front().angle);
}

Vec2 Propagator::map(double t, const Vec2& y) const {
  const Placement p = placement(t);
  return p.center + rotation(p.angle - snapshots_.front().angle) * (y - snapshots_.front().center);
}

Vec2 Propagator::inverse_map(double t, const Vec2& x) const {
  const Placement p = placement(t);
  return snapshots_.front().center + rotation(p.angle - snapshots_.front().angle).transpose() * (x - p.center);
}

Vec2 Propagator::map_between(double t, double s, const Vec2& x) const { return map(t, inverse_map(s, x)); }

// ---------------------------------------------------------------------------

Mat3 orthonormalize(const Mat3& q) {
  Eigen::JacobiSVD<Mat3> svd(q, Eigen::ComputeFullU | Eigen::ComputeFullV);
  return svd.matrixU() * svd.matrixV().transpose();
}

Mat3 rotation_exp(const Vec3& w) {
  const double th = w.norm();
  Mat3 k;
  k << 0, -w.z(), w.y(), w.z(), 0, -w.x(), -w.y(), w.x(), 0;
  if (th < 1e-8) return Mat3::Identity() + k + 0.5 * k * k;
  return Mat3::Identity() + std::sin(th) / th * k + (1 - std::cos(th)) / (th * th) * k * k;
}

Propagator3 Propagator3::from_history(const Placement3& initial, const std::vector<RigidSample3>& history,
                                      double t0, double t1, double tolerance) {
  check_history(history, t0, t1);
  if (!(tolerance > 0.0)) throw InvalidInput("Propagator3: tolerance must be positive");
  Propagator3 p;
  p.history_ = knots(history, t0, t1);
  p.times_.push_back(t0);
  p.snapshots_.push_back(initial);
  const auto omega_at = [&](double t) { return interpolate(p.history_, t).omega; };
  const auto step = [&](const Mat3& q, double t, double h) { return rotation_exp(h * omega_at(t + 0.5 * h)) * q; };

  const double span = t1 - t0;
  double t = t0;
  double h = span > 0 ? span / 16.0 : 0.0;
  Mat3 q = initial.orientation;
  Vec3 x = initial.center;
  while (t < t1) {
    h = std::min(h, t1 - t);
    for (const auto& k : p.history_)
      if (k.t > t + 1e-15 * span && k.t < t + h) h = k.t - t;  // never straddle a velocity knot
    if (h < 1e-14 * std::max(1.0, span))
      throw ConvergenceFailure(fmt::format("Propagator3: step size underflow at t = {}", t));
    const Mat3 big = step(q, t, h);
    const Mat3 half = step(step(q, t, 0.5 * h), t + 0.5 * h, 0.5 * h);
    const double err = (big - half).cwiseAbs().maxCoeff();
    if (err <= tolerance) {
      const auto a = interpolate(p.history_, t);
      const auto b = interpolate(p.history_, t + h);
      x += 0.5 * h * (a.V + b.V);
      q = orthonormalize(half);
      t += h;
      p.times_.push_back(t);
      p.snapshots_.push_back({x, q});
    }
    const double factor = err > 0 ? 0.9 * std::cbrt(tolerance / err) : 2.0;
    h *= std::clamp(factor, 0.2, 2.0);
  }
  return p;
}

Placement3 Propagator3::placement(double t) const {
  if (t < times_.front() - 1e-12 || t > times_.back() + 1e-12)
    throw InvalidInput(fmt::format("Propagator3: t = {} outside span", t));
  if (t >= times_.back()) return snapshots_.back();
  const auto it = std::upper_bound(times_.begin(), times_.end(), t);
  const std::size_t k = static_cast<std::size_t>(it - times_.begin()) - 1;
  const double tau = t - times_[k];
  const auto a = interpolate(history_, times_[k]);
  const auto m = interpolate(history_, times_[k] + 0.5 * tau);
  const auto b = interpolate(history_, t);
  Placement3 out;
  out.center = snapshots_[k].center + tau / 6.0 * (a.V + 4.0 * m.V + b.V);
  out.orientation = orthonormalize(rotation_exp(tau * interpolate(history_, times_[k] + 0.5 * tau).omega) *
                                   snapshots_[k].orientation);
  return out;
}

// ---------------------------------------------------------------------------

int transport_indicator(const Propagator& propagator, const SolidShape& shape, const Vec2& x, double t) {
  const Vec2 y = propagator.inverse_map(t, x);
  return (y - propagator.snapshots().front().center).norm() <= shape.radius ? 1 : 0;
}

VectorSampler pullback_field(const VectorSampler& w, const Propagator& propagator, double t) {
  const Mat2 q = propagator.rotation_from_start(t);
  return [w, q, propagator, t](const Vec2& y) -> Vec2 { return q.transpose() * w(propagator.map(t, y)); };
}

}  // namespace navslip
