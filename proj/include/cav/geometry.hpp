#pragma once

#include <Eigen/Dense>

namespace cav {

using CartesianPoint = Eigen::Vector3d;

/// Point in spherical coordinates. Convention: z = r cos(alpha), so alpha is
/// the polar angle measured from the +z axis; beta is the azimuth in (-pi, pi].
/// Canonical form: alpha = beta = 0 at r = 0, beta = 0 on the polar axis.
struct SphericalPoint {
  double r = 0.0;
  double alpha = 0.0;
  double beta = 0.0;

  /// Builds a canonical SphericalPoint, normalizing angles at the
  /// coordinate singularities so equality is well defined.
  static SphericalPoint canonical(double r, double alpha, double beta);
};

CartesianPoint to_cartesian(const SphericalPoint& p);
SphericalPoint to_spherical(const CartesianPoint& c);

/// Reflection (x, y, z) -> (x, y, -z); in spherical terms alpha -> pi - alpha.
CartesianPoint reflect_z(const CartesianPoint& c);

}  // namespace cav
