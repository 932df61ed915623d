#pragma once

#include <array>
#include <vector>

#include "navslip/types.hpp"

namespace navslip {

/// Axis-aligned cavity [0, L_1] x ... x [0, L_d], d in {2, 3}.
struct Cavity {
  int dim = 2;
  std::array<double, 3> extents{1.0, 1.0, 0.0};

  static Cavity rectangle(double width, double height);
  static Cavity box(double lx, double ly, double lz);
  void validate() const;
};

/// A disk (2D) or ball (3D) of uniform density.
struct SolidShape {
  double radius = 1.0;
  double density = 1.0;
  void validate() const;
};

/// Center and orientation angle of a planar solid.
struct Placement {
  Vec2 center = Vec2::Zero();
  double angle = 0.0;

  Mat2 orientation() const { return rotation(angle); }
};

/// Center and rotation matrix of a solid in 3D.
struct Placement3 {
  Vec3 center = Vec3::Zero();
  Mat3 orientation = Mat3::Identity();

  /// || Q^T Q - I ||_max
  double orthogonality_defect() const;
};

/// Coordinates adapted to the solid boundary: arc length s along the body
/// boundary (measured from the body-fixed reference direction) and signed
/// normal offset z, positive outside the solid.
struct TubularCoord {
  double s = 0.0;
  double z = 0.0;
  double h_s = 1.0;  ///< scale factor of d/ds, (r + z) / r for a disk
  double h_z = 1.0;
};

struct BoundaryNode {
  Vec2 x;
  double weight;
  Vec2 normal;  ///< unit, pointing out of the solid
};

struct VolumeNode {
  Vec2 x;
  double weight;
};

struct VolumeNode3 {
  Vec3 x;
  double weight;
};

/// Distance from the solid to the cavity walls. Throws InvalidInput if the
/// closed solid is not contained in the closed cavity.
double gap_distance(const Placement& placement, const SolidShape& shape, const Cavity& cavity);
double gap_distance(const Placement3& placement, const SolidShape& shape, const Cavity& cavity);

/// Tubular coordinates of x; valid for |x - x_S| > r / 2.
TubularCoord tubular_coordinates(const Vec2& x, const Placement& placement, const SolidShape& shape);

/// Inverse of tubular_coordinates.
Vec2 point_from_tubular(double s, double z, const Placement& placement, const SolidShape& shape);

/// Composite Gauss rule on the solid boundary (8 panels of `order` points).
std::vector<BoundaryNode> boundary_quadrature(const Placement& placement, const SolidShape& shape, int order = 16);

/// Polar Gauss-Legendre tensor rule on the disk.
std::vector<VolumeNode> solid_quadrature(const Placement& placement, const SolidShape& shape, int order = 16);

/// Tensor rule on the ball (Gauss in radius and polar cosine, uniform azimuth).
std::vector<VolumeNode3> solid_quadrature(const Placement3& placement, const SolidShape& shape, int order = 16);

/// Polar rule on the annulus r_in <= |x - x_S| <= r_out.
std::vector<VolumeNode> annulus_quadrature(const Vec2& center, double r_in, double r_out, int radial_order,
                                           int angular_points);

/// True iff the closed disk A lies in the closed h-neighborhood of disk B.
bool inclusion_test(const Placement& a, const SolidShape& shape_a, const Placement& b, const SolidShape& shape_b,
                    double h);

/// Congruent-disk shorthand: |x_A - x_B| <= h.
bool inclusion_test(const Placement& a, const Placement& b, const SolidShape& shape, double h);

}  // namespace navslip
