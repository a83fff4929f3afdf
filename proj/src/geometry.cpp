#include "cav/geometry.hpp"

#include <cmath>

namespace cav {

SphericalPoint SphericalPoint::canonical(double r, double alpha, double beta) {
  SphericalPoint p;
  if (r <= 0.0) return p;  // origin: all angles zero
  p.r = r;
  p.alpha = alpha;
  if (p.alpha <= 0.0) {
    p.alpha = 0.0;
    p.beta = 0.0;
    return p;
  }
  if (p.alpha >= M_PI) {
    p.alpha = M_PI;
    p.beta = 0.0;
    return p;
  }
  // wrap beta into (-pi, pi]
  double b = std::remainder(beta, 2.0 * M_PI);
  if (b <= -M_PI) b = M_PI;
  p.beta = b;
  return p;
}

CartesianPoint to_cartesian(const SphericalPoint& p) {
  const double s = std::sin(p.alpha);
  return CartesianPoint(p.r * s * std::cos(p.beta), p.r * s * std::sin(p.beta),
                        p.r * std::cos(p.alpha));
}

SphericalPoint to_spherical(const CartesianPoint& c) {
  const double r = c.norm();
  if (r == 0.0) return SphericalPoint{};
  const double alpha = std::atan2(std::hypot(c.x(), c.y()), c.z());
  const double beta = std::atan2(c.y(), c.x());
  return SphericalPoint::canonical(r, alpha, beta);
}

CartesianPoint reflect_z(const CartesianPoint& c) {
  return CartesianPoint(c.x(), c.y(), -c.z());
}

}  // namespace cav
