#include "cav/differential.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace cav {

namespace {

Differential from_jet(const ProfileJet& j, const SphericalPoint& x) {
  Differential d;
  d.d_rr = j.d_rt_dr;
  d.d_ra = j.d_rt_da;
  d.d_ar = j.d_at_dr;
  d.d_aa = j.d_at_da;
  d.rt = j.rt;
  d.at = j.at;
  d.azim = j.rt * std::sin(j.at) / (x.r * std::sin(x.alpha));
  d.at_point = x;
  return d;
}

}  // namespace

Differential partials(const RadialMap& map, const SphericalPoint& x,
                      DiffMode mode) {
  if (mode == DiffMode::analytic) return from_jet(map.jet(x.r, x.alpha), x);

  double h = 1e-6 * std::max(1.0, x.r);
  const double prox = map.boundary_proximity(x.r, x.alpha);
  if (prox > 0.0) h = std::min(h, 0.5 * prox);

  const ProfileJet c = map.jet(x.r, x.alpha);
  const ProfileJet rp = map.jet(x.r + h, x.alpha);
  const ProfileJet rm = map.jet(x.r - h, x.alpha);
  const ProfileJet ap = map.jet(x.r, x.alpha + h);
  const ProfileJet am = map.jet(x.r, x.alpha - h);

  Differential d;
  d.d_rr = (rp.rt - rm.rt) / (2.0 * h);
  d.d_ar = (rp.at - rm.at) / (2.0 * h);
  d.d_ra = (ap.rt - am.rt) / (2.0 * h);
  d.d_aa = (ap.at - am.at) / (2.0 * h);
  d.rt = c.rt;
  d.at = c.at;
  d.azim = c.rt * std::sin(c.at) / (x.r * std::sin(x.alpha));
  d.at_point = x;
  return d;
}

double jacobian(const Differential& d) {
  const double det2 = d.d_rr * d.d_aa - d.d_ra * d.d_ar;
  return det2 * (d.rt / d.at_point.r) * d.azim;
}

double grad_norm_sq(const Differential& d) {
  const double r = d.at_point.r;
  const double a = d.d_rr;
  const double b = d.d_ra / r;
  const double c = d.rt * d.d_ar;
  const double e = d.rt * d.d_aa / r;
  return a * a + b * b + c * c + e * e + d.azim * d.azim;
}

double distortion_half(const Differential& d) {
  const double j = jacobian(d);
  if (!(j > 0.0)) return std::numeric_limits<double>::infinity();
  return std::pow(grad_norm_sq(d), 0.75) / std::sqrt(j);
}

}  // namespace cav
