#pragma once

#include "cav/mapfamily.hpp"

namespace cav {

enum class DiffMode { analytic, finite_difference };

/// Differential of a RadialMap at a point, expressed in the orthonormal
/// spherical frames. Entries:
///   d_rr = d(rt)/dr     d_ra = d(rt)/d(alpha)
///   d_ar = d(at)/dr     d_aa = d(at)/d(alpha)
///   azim = rt sin(at) / (r sin(alpha))   (azimuthal stretch)
struct Differential {
  double d_rr = 0.0;
  double d_ra = 0.0;
  double d_ar = 0.0;
  double d_aa = 0.0;
  double azim = 0.0;
  double rt = 0.0;
  double at = 0.0;
  SphericalPoint at_point;
};

/// Computes the differential either from the map's analytic jet or by central
/// finite differences on (rt, at). The FD step is 1e-6 * max(1, r), shrunk to
/// half the boundary proximity so stencils never straddle a branch curve.
Differential partials(const RadialMap& map, const SphericalPoint& x,
                      DiffMode mode = DiffMode::analytic);

/// Volume Jacobian det Df.
double jacobian(const Differential& d);

/// Squared Frobenius norm |Df|^2.
double grad_norm_sq(const Differential& d);

/// K^{1/2} where K = |Df|^3 / det Df; equals |Df|^{3/2} / sqrt(det Df).
double distortion_half(const Differential& d);

}  // namespace cav
