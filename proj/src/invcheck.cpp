#include "cav/invcheck.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "json.hpp"

namespace cav {

std::string to_string(InvVerdict v) {
  switch (v) {
    case InvVerdict::satisfied: return "satisfied";
    case InvVerdict::violated_inside: return "violated(ii)";
    case InvVerdict::violated_outside: return "violated(iii)";
    case InvVerdict::violated_both: return "violated(both)";
  }
  return "?";
}

double halton(uint64_t index, int base) {
  double f = 1.0, result = 0.0;
  uint64_t i = index + 1;
  while (i > 0) {
    f /= base;
    result += f * static_cast<double>(i % base);
    i /= base;
  }
  return result;
}

std::string InvReport::to_json() const {
  nlohmann::json j;
  j["verdict"] = to_string(verdict);
  j["ball"] = {{"center", {ball_center.x(), ball_center.y(), ball_center.z()}},
               {"radius", ball_radius}};
  j["mesh_level"] = mesh_level;
  j["n_samples"] = n_samples;
  j["inside"] = {{"tested", inside_tested},
                 {"in_image", inside_in_image},
                 {"fraction", inside_fraction}};
  j["outside"] = {{"tested", outside_tested},
                  {"out_of_image", outside_out_of_image},
                  {"fraction", outside_fraction}};
  j["guard_failures"] = guard_failures;
  j["residue_failures"] = residue_failures;
  return j.dump(2);
}

ImageSurface graded_pushed_sphere(const RadialMap& map, const Ball& ball,
                                  int mesh_level) {
  if (mesh_level < 0 || mesh_level > 12)
    throw std::invalid_argument("mesh_level must be in [0, 12]");
  const auto fmap = [&map](const CartesianPoint& x) { return map.map(x); };
  // Image diameter estimate along one meridian fixes the level scale: level
  // l asks for pushed triangles no larger than (image diameter) / 2^l.
  double lo = std::numeric_limits<double>::infinity(), hi = -lo;
  CartesianPoint pmin = CartesianPoint::Zero(), pmax = pmin;
  pmin.setConstant(lo);
  pmax.setConstant(hi);
  for (int i = 0; i <= 256; ++i) {
    const double a = M_PI * i / 256.0;
    const CartesianPoint p = fmap(
        ball.center + ball.radius * CartesianPoint(std::sin(a), 0.0, std::cos(a)));
    pmin = pmin.cwiseMin(p);
    pmax = pmax.cwiseMax(p);
  }
  const double image_diam = (pmax - pmin).norm();
  return push_mesh(fmap,
                   graded_sphere_mesh(fmap, ball.center, ball.radius,
                                      image_diam / std::pow(2.0, mesh_level)));
}

InvReport check_inv(const RadialMap& map, const Ball& ball,
                    long long n_samples, int mesh_level,
                    double exclusion_tube_radius, uint64_t seed) {
  if (n_samples < 100)
    throw std::invalid_argument("n_samples must be at least 100");
  if (!(ball.radius > 0.0) ||
      ball.center.norm() + 2.0 * ball.radius > map.domain_radius())
    throw std::invalid_argument("annulus must fit in the map domain");

  const ImageSurface surface = graded_pushed_sphere(map, ball, mesh_level);

  InvReport rep;
  rep.verdict = InvVerdict::satisfied;
  rep.ball_radius = ball.radius;
  rep.ball_center = ball.center;
  rep.mesh_level = mesh_level;
  rep.n_samples = n_samples;

  const double outer = 2.0 * ball.radius;
  uint64_t idx = seed;
  auto next_point = [&](bool inside) {
    for (;;) {
      const uint64_t i = idx++;
      CartesianPoint u(halton(i, 2), halton(i, 3), halton(i, 5));
      const CartesianPoint x =
          ball.center + outer * (2.0 * u - CartesianPoint::Ones());
      const double d = (x - ball.center).norm();
      if (inside ? d >= ball.radius : (d <= ball.radius || d >= outer))
        continue;
      if (std::hypot(x.x(), x.y()) < exclusion_tube_radius) continue;
      if (x.norm() >= map.domain_radius()) continue;
      return x;
    }
  };

  auto run = [&](bool inside, long long& tested, long long& favorable) {
    for (long long k = 0; k < n_samples; ++k) {
      const CartesianPoint x = next_point(inside);
      const DegreeResult dr = degree_at(surface, map.map(x));
      if (!dr.guard_ok) {
        ++rep.guard_failures;
        continue;
      }
      if (!dr.residue_ok) {
        ++rep.residue_failures;
        continue;
      }
      ++tested;
      const bool in_image = dr.degree != 0;
      if (in_image == inside) ++favorable;
    }
  };
  run(true, rep.inside_tested, rep.inside_in_image);
  run(false, rep.outside_tested, rep.outside_out_of_image);

  if (rep.guard_failures * 10 > 2 * n_samples)
    throw std::runtime_error(
        "check_inv: more than 10% of samples fell in the guard zone");

  rep.inside_fraction =
      rep.inside_tested ? static_cast<double>(rep.inside_in_image) /
                              rep.inside_tested
                        : 0.0;
  rep.outside_fraction =
      rep.outside_tested ? static_cast<double>(rep.outside_out_of_image) /
                               rep.outside_tested
                         : 0.0;
  const bool inside_ok = rep.inside_fraction >= 0.95;
  const bool outside_ok = rep.outside_fraction >= 0.95;
  if (inside_ok && outside_ok)
    rep.verdict = InvVerdict::satisfied;
  else if (!inside_ok && outside_ok)
    rep.verdict = InvVerdict::violated_inside;
  else if (inside_ok && !outside_ok)
    rep.verdict = InvVerdict::violated_outside;
  else
    rep.verdict = InvVerdict::violated_both;
  return rep;
}

}  // namespace cav
