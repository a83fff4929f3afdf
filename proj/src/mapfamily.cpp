#include "cav/mapfamily.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace cav {

namespace {

// Scalar function of r together with its derivative.
struct Field {
  double v = 0.0;
  double dr = 0.0;
};

// Scalar function of (r, alpha) together with both partials.
struct Field2 {
  double v = 0.0;
  double dr = 0.0;
  double da = 0.0;
};

Field s_field(const MapParams& q, double r) {
  if (r <= q.r1) return {M_PI - q.eps * r, -q.eps};
  return {(2.0 - r) * M_PI, -M_PI};
}

Field delta_field(const MapParams& q, double r) {
  const double e = std::pow(q.eps, 1.0 / q.p);
  if (r <= q.r1) return {e * r, e};
  const double t = 2.0 - r;
  return {q.c0 * e * std::pow(t, q.lambda),
          -q.lambda * q.c0 * e * std::pow(t, q.lambda - 1.0)};
}

Field psi_field(const MapParams& q, double r) {
  if (r <= q.r0) return {r / q.eps, 1.0 / q.eps};
  if (r <= q.r1) return {1.0 - q.eps * (2.0 - r), q.eps};
  const double lp = q.lambda * q.p;
  const double c = std::pow((M_PI - 2.0 * q.eps) / (M_PI - q.eps), 1.0 - lp);
  const double t = 2.0 - r;
  return {1.0 - c * q.eps * std::pow(t, lp),
          c * q.eps * lp * std::pow(t, lp - 1.0)};
}

bool in_lower(RegionLabel l) {
  return l == RegionLabel::A1 || l == RegionLabel::A2;
}

bool in_band(RegionLabel l) {
  return l == RegionLabel::B || l == RegionLabel::C;
}

Field2 xi_field(const MapParams& q, double r, double alpha, RegionLabel l) {
  if (in_band(l)) return {0.0, 0.0, 0.0};
  const Field s = s_field(q, r);
  if (in_lower(l)) {
    const Field d = delta_field(q, r);
    const double st = s.v - d.v;
    const double dst = s.dr - d.dr;
    return {1.0 - alpha / st, alpha * dst / (st * st), -1.0 / st};
  }
  const double g = M_PI - s.v;
  return {1.0 - (M_PI - alpha) / g, -(M_PI - alpha) * s.dr / (g * g), 1.0 / g};
}

// Image radius on the pure regions; the band interpolates these.
Field radius_a1(const MapParams&, double r) {
  return {(2.0 - r) / 3.0, -1.0 / 3.0};
}

Field radius_a2(const MapParams& q, double r) {
  const double k = std::sqrt((M_PI - 2.0 * q.eps) / (M_PI - q.eps));
  const double s = std::sqrt(2.0 - r);
  return {k * s / 3.0, -k / (6.0 * s)};
}

Field radius_d1(const MapParams& q, double r) {
  return {2.0 / 3.0 + q.eps * r / (3.0 * M_PI), q.eps / (3.0 * M_PI)};
}

Field radius_d2(const MapParams&, double r) {
  return {(1.0 + r) / 3.0, 1.0 / 3.0};
}

Field2 radius_field2(const MapParams& q, double r, double alpha, RegionLabel l) {
  switch (l) {
    case RegionLabel::A1: {
      const Field f = radius_a1(q, r);
      return {f.v, f.dr, 0.0};
    }
    case RegionLabel::A2: {
      const Field f = radius_a2(q, r);
      return {f.v, f.dr, 0.0};
    }
    case RegionLabel::D1: {
      const Field f = radius_d1(q, r);
      return {f.v, f.dr, 0.0};
    }
    case RegionLabel::D2: {
      const Field f = radius_d2(q, r);
      return {f.v, f.dr, 0.0};
    }
    default:
      break;
  }
  // band: convex combination with weight w = (S - alpha) / delta
  const Field s = s_field(q, r);
  const Field d = delta_field(q, r);
  const double w = (s.v - alpha) / d.v;
  const double dw_da = -1.0 / d.v;
  const double dw_dr = s.dr / d.v - w * d.dr / d.v;
  const Field lo =
      (l == RegionLabel::B) ? radius_a1(q, r) : radius_a2(q, r);
  const Field hi =
      (l == RegionLabel::B) ? radius_d1(q, r) : radius_d2(q, r);
  Field2 out;
  out.v = w * lo.v + (1.0 - w) * hi.v;
  out.da = (lo.v - hi.v) * dw_da;
  out.dr = w * lo.dr + (1.0 - w) * hi.dr + (lo.v - hi.v) * dw_dr;
  return out;
}

Field2 angle_field2(const MapParams& q, double r, double alpha, RegionLabel l) {
  const Field ps = psi_field(q, r);
  if (in_band(l)) return {M_PI_2 * ps.v, M_PI_2 * ps.dr, 0.0};
  const Field2 x = xi_field(q, r, alpha, l);
  const double xc = std::max(x.v, 0.0);
  const double xp = std::pow(xc, q.p);
  const double xpm = q.p * std::pow(xc, q.p - 1.0);
  Field2 out;
  out.v = M_PI_2 * (1.0 - xp) * ps.v;
  out.dr = M_PI_2 * (-xpm * x.dr * ps.v + (1.0 - xp) * ps.dr);
  out.da = M_PI_2 * (-xpm * x.da * ps.v);
  return out;
}

// Shell profile for r in [2, 10]: interpolation between the drop that the
// sphere r = 2 maps onto and the (reflected-identity) image of the sphere
// r = 10. The blend is taken between the two image points inside the common
// meridian half-plane, written in cylindrical coordinates (s, z) with
// s = rt*sin(at) >= 0 and z = rt*cos(at). Both endpoint curves touch the
// polar axis at alpha in {0, pi}, so the blend stays on the axis there: the
// map is continuous across the axis and its azimuthal stretch behaves like
// alpha^(p-1), which is square integrable against the sin(alpha) weight.
ProfileJet shell_jet(double p, double r, double alpha) {
  const double u = std::pow(alpha / M_PI, p);
  const double t2 = M_PI_2 * (1.0 - u);
  const double dt2 = -(p / 2.0) * std::pow(alpha / M_PI, p - 1.0);
  const double lam = (r - 2.0) / 8.0, mu = (10.0 - r) / 8.0;
  // Outer endpoint (10, pi - alpha) and inner endpoint (cos t2, t2).
  const double as = 10.0 * std::sin(alpha), az = -10.0 * std::cos(alpha);
  const double c2 = std::cos(2.0 * t2), s2 = std::sin(2.0 * t2);
  const double bs = 0.5 * s2, bz = 0.5 * (1.0 + c2);
  const double s = lam * as + mu * bs;
  const double z = lam * az + mu * bz;
  const double ds_dr = (as - bs) / 8.0, dz_dr = (az - bz) / 8.0;
  const double ds_da = lam * 10.0 * std::cos(alpha) + mu * dt2 * c2;
  const double dz_da = lam * 10.0 * std::sin(alpha) - mu * dt2 * s2;
  const double rt = std::hypot(s, z);
  ProfileJet j;
  j.rt = rt;
  j.at = std::atan2(s, z);
  if (rt > 0.0) {
    j.d_rt_dr = (s * ds_dr + z * dz_dr) / rt;
    j.d_rt_da = (s * ds_da + z * dz_da) / rt;
    j.d_at_dr = (z * ds_dr - s * dz_dr) / (rt * rt);
    j.d_at_da = (z * ds_da - s * dz_da) / (rt * rt);
  } else {
    j.d_rt_dr = j.d_rt_da = j.d_at_dr = j.d_at_da = 0.0;
  }
  return j;
}

ProfileJet from_profile(const Field2& R, const Field2& T) {
  const double c = std::cos(T.v), s = std::sin(T.v);
  ProfileJet j;
  j.rt = R.v * c;
  j.at = R.v * T.v;
  j.d_rt_dr = R.dr * c - R.v * s * T.dr;
  j.d_rt_da = R.da * c - R.v * s * T.da;
  j.d_at_dr = R.dr * T.v + R.v * T.dr;
  j.d_at_da = R.da * T.v + R.v * T.da;
  return j;
}

ProfileJet reflect(ProfileJet j) {
  j.at = M_PI - j.at;
  j.d_at_dr = -j.d_at_dr;
  j.d_at_da = -j.d_at_da;
  return j;
}

}  // namespace

MapParams make_params(double eps, double a, std::optional<double> p_opt) {
  if (!(eps > 0.0) || eps > 0.4)
    throw std::invalid_argument("eps must lie in (0, 0.4]");
  if (!(a > 0.0) || a >= 2.0)
    throw std::invalid_argument("a must lie in (0, 2)");
  const double p_hi = (a + 1.0) / (3.0 * a);
  const double p = p_opt.value_or(0.5 * (0.5 + p_hi));
  if (!(p > 0.5) || !(p < p_hi))
    throw std::invalid_argument("p must lie in (1/2, (a+1)/(3a))");
  MapParams q;
  q.eps = eps;
  q.a = a;
  q.p = p;
  q.lambda = 2.0 / (1.0 + a - 3.0 * a * p);
  q.c0 = (M_PI / (M_PI - eps)) *
         std::pow((M_PI - eps) / (M_PI - 2.0 * eps), q.lambda);
  q.r0 = (eps - 2.0 * eps * eps) / (1.0 - eps * eps);
  q.r1 = 1.0 + eps / (M_PI - eps);
  return q;
}

std::string to_string(RegionLabel label) {
  switch (label) {
    case RegionLabel::A1: return "A1";
    case RegionLabel::A2: return "A2";
    case RegionLabel::B: return "B";
    case RegionLabel::C: return "C";
    case RegionLabel::D1: return "D1";
    case RegionLabel::D2: return "D2";
    case RegionLabel::Shell: return "Shell";
  }
  return "?";
}

double s_curve(const MapParams& params, double r) {
  return s_field(params, r).v;
}

double thickness(const MapParams& params, double r) {
  return delta_field(params, r).v;
}

double psi(const MapParams& params, double r) {
  return psi_field(params, r).v;
}

double xi(const MapParams& params, double r, double alpha) {
  return xi_field(params, r, alpha, classify(params, r, alpha).label).v;
}

Region classify(const MapParams& q, double r, double alpha) {
  Region out;
  if (r >= 2.0) {
    out.label = RegionLabel::Shell;
    out.proximity = std::min({r - 2.0, 10.0 - r, alpha, M_PI - alpha});
    return out;
  }
  const double s = s_field(q, r).v;
  const double d = delta_field(q, r).v;
  const double st = s - d;
  const bool sub = r <= q.r1;
  if (alpha <= st) {
    out.label = sub ? RegionLabel::A1 : RegionLabel::A2;
  } else if (alpha <= s) {
    out.label = sub ? RegionLabel::B : RegionLabel::C;
  } else {
    out.label = sub ? RegionLabel::D1 : RegionLabel::D2;
  }
  out.proximity =
      std::min({std::abs(alpha - st), std::abs(alpha - s), std::abs(r - q.r0),
                std::abs(r - q.r1), std::abs(r - 2.0), r, alpha,
                M_PI - alpha});
  return out;
}

double radius_field(const MapParams& q, double r, double alpha) {
  return radius_field2(q, r, alpha, classify(q, r, alpha).label).v;
}

double angle_field(const MapParams& q, double r, double alpha) {
  return angle_field2(q, r, alpha, classify(q, r, alpha).label).v;
}

double RadialMap::boundary_proximity(double r, double alpha) const {
  return std::min({r, domain_radius() - r, alpha, M_PI - alpha});
}

CartesianPoint RadialMap::map(const SphericalPoint& x) const {
  if (x.r > domain_radius() * (1.0 + 1e-12))
    throw std::domain_error("point outside the map domain");
  const ProfileJet j = jet(x.r, x.alpha);
  return to_cartesian(SphericalPoint::canonical(j.rt, j.at, x.beta));
}

CartesianPoint RadialMap::map(const CartesianPoint& x) const {
  return map(to_spherical(x));
}

ProfileJet IdentityMap::jet(double r, double alpha) const {
  ProfileJet j;
  j.rt = r;
  j.at = alpha;
  j.d_rt_dr = 1.0;
  j.d_at_da = 1.0;
  return j;
}

ProfileJet FamilyMap::jet(double r, double alpha) const {
  if (r >= 2.0) return reflect(shell_jet(params_.p, r, alpha));
  const RegionLabel l = classify(params_, r, alpha).label;
  const Field2 R = radius_field2(params_, r, alpha, l);
  const Field2 T = angle_field2(params_, r, alpha, l);
  return reflect(from_profile(R, T));
}

double FamilyMap::boundary_proximity(double r, double alpha) const {
  return classify(params_, r, alpha).proximity;
}

CartesianPoint eval_family(const MapParams& params, const SphericalPoint& x) {
  return FamilyMap(params).map(x);
}

LimitMap::LimitMap(double p) : p_(p) {
  if (!(p > 0.5) || !(p < 1.0))
    throw std::invalid_argument("p must lie in (1/2, 1)");
}

ProfileJet LimitMap::jet(double r, double alpha) const {
  if (r >= 2.0) return reflect(shell_jet(p_, r, alpha));
  Field2 R, T;
  if (r <= 1.0) {
    R = {(2.0 - r) / 3.0, -1.0 / 3.0, 0.0};
    const double x = (M_PI - alpha) / M_PI;
    T.v = M_PI_2 * (1.0 - std::pow(x, p_));
    T.da = (p_ / 2.0) * std::pow(x, p_ - 1.0);
    T.dr = 0.0;
  } else {
    const double s0 = (2.0 - r) * M_PI;
    Field2 x;
    if (alpha <= s0) {
      const double sq = std::sqrt(2.0 - r);
      R = {sq / 3.0, -1.0 / (6.0 * sq), 0.0};
      x = {1.0 - alpha / s0, -alpha * M_PI / (s0 * s0), -1.0 / s0};
    } else {
      R = {(1.0 + r) / 3.0, 1.0 / 3.0, 0.0};
      const double g = M_PI - s0;
      x = {1.0 - (M_PI - alpha) / g, (M_PI - alpha) * M_PI / (g * g),
           1.0 / g};
    }
    const double xc = std::max(x.v, 0.0);
    const double xp = std::pow(xc, p_);
    const double xpm = p_ * std::pow(xc, p_ - 1.0);
    T.v = M_PI_2 * (1.0 - xp);
    T.dr = -M_PI_2 * xpm * x.dr;
    T.da = -M_PI_2 * xpm * x.da;
  }
  return reflect(from_profile(R, T));
}

double LimitMap::boundary_proximity(double r, double alpha) const {
  double prox = std::min({r, 10.0 - r, alpha, M_PI - alpha,
                          std::abs(r - 1.0), std::abs(r - 2.0)});
  if (r > 1.0 && r < 2.0)
    prox = std::min(prox, std::abs(alpha - (2.0 - r) * M_PI));
  return prox;
}

CartesianPoint eval_limit(double p, const SphericalPoint& x) {
  return LimitMap(p).map(x);
}

}  // namespace cav
