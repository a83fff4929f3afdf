#pragma once

#include <memory>
#include <optional>
#include <string>

#include "cav/geometry.hpp"

namespace cav {

/// Parameters of the map family. Derived quantities (lambda, c0, r0, r1) are
/// computed once in make_params and cached.
struct MapParams {
  double eps = 0.0;
  double a = 0.0;
  double p = 0.0;
  double lambda = 0.0;  // 2 / (1 + a - 3 a p), > 2
  double c0 = 0.0;      // (pi/(pi-eps)) * ((pi-eps)/(pi-2 eps))^lambda
  double r0 = 0.0;      // (eps - 2 eps^2) / (1 - eps^2)
  double r1 = 0.0;      // 1 + eps / (pi - eps)
};

/// Validates (eps, a, p) and fills in derived constants. If p is not given it
/// defaults to the midpoint of the admissible interval (1/2, (a+1)/(3a)).
/// Throws std::invalid_argument on out-of-range input.
MapParams make_params(double eps, double a, std::optional<double> p = std::nullopt);

enum class RegionLabel { A1, A2, B, C, D1, D2, Shell };

std::string to_string(RegionLabel label);

struct Region {
  RegionLabel label = RegionLabel::Shell;
  /// Distance (in the (r, alpha) plane) to the nearest region interface.
  double proximity = 0.0;
};

/// Interface curve alpha = S(eps, r) separating the lower cone from the
/// transition band, for r in (0, 2).
double s_curve(const MapParams& params, double r);

/// Width delta(eps, r) of the transition band below S.
double thickness(const MapParams& params, double r);

/// Radial modulation psi(eps, r) in [0, 1], piecewise on [0, r0], [r0, r1],
/// [r1, 2].
double psi(const MapParams& params, double r);

/// Angular profile xi(eps, r, alpha) in [0, 1]; 1 - alpha / (S - delta) in the
/// lower cone, 0 in the band, 1 - (pi - alpha) / (pi - S) above.
double xi(const MapParams& params, double r, double alpha);

Region classify(const MapParams& params, double r, double alpha);

/// Image radius R(eps, r, alpha), before reflection.
double radius_field(const MapParams& params, double r, double alpha);

/// Image polar factor T(eps, r, alpha) = (pi/2) (1 - xi^p) psi, so that the
/// unreflected image is (R cos T, R T, beta).
double angle_field(const MapParams& params, double r, double alpha);

CartesianPoint eval_family(const MapParams& params, const SphericalPoint& x);

/// Pointwise limit of the family as eps -> 0, parametrized by p alone.
CartesianPoint eval_limit(double p, const SphericalPoint& x);

/// Value and partial derivatives of the spherical-image profile
/// (r, alpha) -> (rt, at); the map in Cartesian coordinates is
/// (rt sin(at) cos(beta), rt sin(at) sin(beta), rt cos(at)).
struct ProfileJet {
  double rt = 0.0;
  double at = 0.0;
  double d_rt_dr = 0.0;
  double d_rt_da = 0.0;
  double d_at_dr = 0.0;
  double d_at_da = 0.0;
};

/// A map of the ball B(0, 10) that acts on (r, alpha) and fixes beta.
class RadialMap {
 public:
  virtual ~RadialMap() = default;
  virtual ProfileJet jet(double r, double alpha) const = 0;
  /// Distance to the nearest curve across which the formula changes branch.
  virtual double boundary_proximity(double r, double alpha) const;
  virtual double domain_radius() const { return 10.0; }

  CartesianPoint map(const SphericalPoint& x) const;
  CartesianPoint map(const CartesianPoint& x) const;
};

class IdentityMap final : public RadialMap {
 public:
  ProfileJet jet(double r, double alpha) const override;
};

class FamilyMap final : public RadialMap {
 public:
  explicit FamilyMap(MapParams params) : params_(params) {}
  ProfileJet jet(double r, double alpha) const override;
  double boundary_proximity(double r, double alpha) const override;
  const MapParams& params() const { return params_; }

 private:
  MapParams params_;
};

class LimitMap final : public RadialMap {
 public:
  explicit LimitMap(double p);
  ProfileJet jet(double r, double alpha) const override;
  double boundary_proximity(double r, double alpha) const override;
  double exponent() const { return p_; }

 private:
  double p_;
};

}  // namespace cav
