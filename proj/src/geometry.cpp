#include "navslip/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include <fmt/format.h>

#include "navslip/quadrature.hpp"

namespace navslip {

namespace {
constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr int kBoundaryPanels = 8;
constexpr int kAngularPanels = 4;

double wrap_angle(double a) {
  a = std::fmod(a, kTwoPi);
  return a < 0.0 ? a + kTwoPi : a;
}
}  // namespace

Cavity Cavity::rectangle(double width, double height) {
  Cavity c;
  c.dim = 2;
  c.extents = {width, height, 0.0};
  c.validate();
  return c;
}

Cavity Cavity::box(double lx, double ly, double lz) {
  Cavity c;
  c.dim = 3;
  c.extents = {lx, ly, lz};
  c.validate();
  return c;
}

void Cavity::validate() const {
  if (dim != 2 && dim != 3) throw InvalidInput(fmt::format("cavity dimension must be 2 or 3, got {}", dim));
  for (int k = 0; k < dim; ++k)
    if (!(extents[k] > 0.0) || !std::isfinite(extents[k]))
      throw InvalidInput(fmt::format("cavity extent {} must be positive, got {}", k, extents[k]));
}

void SolidShape::validate() const {
  if (!(radius > 0.0) || !std::isfinite(radius))
    throw InvalidInput(fmt::format("solid radius must be positive, got {}", radius));
  if (!(density > 0.0) || !std::isfinite(density))
    throw InvalidInput(fmt::format("solid density must be positive, got {}", density));
}

double Placement3::orthogonality_defect() const {
  return (orientation.transpose() * orientation - Mat3::Identity()).cwiseAbs().maxCoeff();
}

double gap_distance(const Placement& placement, const SolidShape& shape, const Cavity& cavity) {
  double wall = std::numeric_limits<double>::infinity();
  for (int k = 0; k < 2; ++k) {
    const double c = placement.center[k];
    wall = std::min({wall, c, cavity.extents[k] - c});
  }
  const double gap = wall - shape.radius;
  if (gap < 0.0)
    throw InvalidInput(fmt::format("solid at ({}, {}) with radius {} is not contained in the cavity (gap {})",
                                   placement.center.x(), placement.center.y(), shape.radius, gap));
  return gap;
}

double gap_distance(const Placement3& placement, const SolidShape& shape, const Cavity& cavity) {
  double wall = std::numeric_limits<double>::infinity();
  for (int k = 0; k < 3; ++k) {
    const double c = placement.center[k];
    wall = std::min({wall, c, cavity.extents[k] - c});
  }
  const double gap = wall - shape.radius;
  if (gap < 0.0) throw InvalidInput(fmt::format("ball is not contained in the cavity (gap {})", gap));
  return gap;
}

TubularCoord tubular_coordinates(const Vec2& x, const Placement& placement, const SolidShape& shape) {
  const Vec2 d = x - placement.center;
  const double rho = d.norm();
  if (!(rho > 0.5 * shape.radius))
    throw InvalidInput(fmt::format("point at distance {} from the center is outside the tubular chart (r/2 = {})",
                                   rho, 0.5 * shape.radius));
  TubularCoord tc;
  tc.z = rho - shape.radius;
  tc.s = shape.radius * wrap_angle(std::atan2(d.y(), d.x()) - placement.angle);
  tc.h_s = rho / shape.radius;
  tc.h_z = 1.0;
  return tc;
}

Vec2 point_from_tubular(double s, double z, const Placement& placement, const SolidShape& shape) {
  const double theta = s / shape.radius + placement.angle;
  return placement.center + (shape.radius + z) * Vec2(std::cos(theta), std::sin(theta));
}

std::vector<BoundaryNode> boundary_quadrature(const Placement& placement, const SolidShape& shape, int order) {
  if (order < 1) throw InvalidInput("boundary_quadrature: order must be >= 1");
  const Rule1D rule = composite_gauss(kBoundaryPanels, order, 0.0, kTwoPi);
  std::vector<BoundaryNode> out;
  out.reserve(rule.nodes.size());
  for (std::size_t q = 0; q < rule.nodes.size(); ++q) {
    const double th = rule.nodes[q] + placement.angle;
    const Vec2 nu(std::cos(th), std::sin(th));
    out.push_back({placement.center + shape.radius * nu, shape.radius * rule.weights[q], nu});
  }
  return out;
}

std::vector<VolumeNode> solid_quadrature(const Placement& placement, const SolidShape& shape, int order) {
  if (order < 1) throw InvalidInput("solid_quadrature: order must be >= 1");
  const Rule1D radial = gauss_legendre(order, 0.0, shape.radius);
  const Rule1D angular = composite_gauss(kAngularPanels, order, 0.0, kTwoPi);
  std::vector<VolumeNode> out;
  out.reserve(radial.nodes.size() * angular.nodes.size());
  for (std::size_t i = 0; i < radial.nodes.size(); ++i) {
    const double r = radial.nodes[i];
    for (std::size_t j = 0; j < angular.nodes.size(); ++j) {
      const double th = angular.nodes[j] + placement.angle;
      out.push_back({placement.center + r * Vec2(std::cos(th), std::sin(th)),
                     r * radial.weights[i] * angular.weights[j]});
    }
  }
  return out;
}

std::vector<VolumeNode3> solid_quadrature(const Placement3& placement, const SolidShape& shape, int order) {
  if (order < 1) throw InvalidInput("solid_quadrature: order must be >= 1");
  const Rule1D radial = gauss_legendre(order, 0.0, shape.radius);
  const Rule1D polar = gauss_legendre(order, -1.0, 1.0);
  const int n_az = 2 * order;
  std::vector<VolumeNode3> out;
  out.reserve(radial.nodes.size() * polar.nodes.size() * n_az);
  for (std::size_t i = 0; i < radial.nodes.size(); ++i) {
    const double r = radial.nodes[i];
    for (std::size_t j = 0; j < polar.nodes.size(); ++j) {
      const double ct = polar.nodes[j], st = std::sqrt(1.0 - ct * ct);
      for (int k = 0; k < n_az; ++k) {
        const double ph = kTwoPi * k / n_az;
        const Vec3 dir(st * std::cos(ph), st * std::sin(ph), ct);
        out.push_back({placement.center + placement.orientation * (r * dir),
                       r * r * radial.weights[i] * polar.weights[j] * (kTwoPi / n_az)});
      }
    }
  }
  return out;
}

std::vector<VolumeNode> annulus_quadrature(const Vec2& center, double r_in, double r_out, int radial_order,
                                           int angular_points) {
  if (!(r_out > r_in) || r_in < 0.0) throw InvalidInput("annulus_quadrature: need 0 <= r_in < r_out");
  const Rule1D radial = gauss_legendre(radial_order, r_in, r_out);
  std::vector<VolumeNode> out;
  out.reserve(radial.nodes.size() * angular_points);
  const double dth = kTwoPi / angular_points;
  for (std::size_t i = 0; i < radial.nodes.size(); ++i) {
    const double r = radial.nodes[i];
    for (int j = 0; j < angular_points; ++j) {
      const double th = dth * j;
      out.push_back({center + r * Vec2(std::cos(th), std::sin(th)), r * radial.weights[i] * dth});
    }
  }
  return out;
}

bool inclusion_test(const Placement& a, const SolidShape& shape_a, const Placement& b, const SolidShape& shape_b,
                    double h) {
  if (!(h > 0.0)) throw InvalidInput("inclusion_test: h must be positive");
  return (a.center - b.center).norm() + shape_a.radius <= shape_b.radius + h;
}

bool inclusion_test(const Placement& a, const Placement& b, const SolidShape& shape, double h) {
  return inclusion_test(a, shape, b, shape, h);
}

}  // namespace navslip
