#pragma once

#include <cstdint>
#include <string>

#include "cav/degree.hpp"
#include "cav/mapfamily.hpp"

namespace cav {

struct Ball {
  CartesianPoint center = CartesianPoint::Zero();
  double radius = 1.0;
};

enum class InvVerdict {
  satisfied,
  violated_inside,   // material from inside the sphere escapes the image
  violated_outside,  // material from outside lands in the image
  violated_both
};

std::string to_string(InvVerdict v);

struct InvReport {
  InvVerdict verdict = InvVerdict::satisfied;
  double ball_radius = 0.0;
  CartesianPoint ball_center = CartesianPoint::Zero();
  int mesh_level = 0;
  long long n_samples = 0;
  long long inside_tested = 0;
  long long inside_in_image = 0;
  long long outside_tested = 0;
  long long outside_out_of_image = 0;
  long long guard_failures = 0;
  long long residue_failures = 0;
  double inside_fraction = 0.0;
  double outside_fraction = 0.0;
  std::string to_json() const;
};

/// Element i (one-based internally) of the van der Corput sequence in the
/// given base.
double halton(uint64_t index, int base);

/// Pushes a graded sphere mesh through the map. `mesh_level` l in [0, 12]
/// asks for pushed triangles no larger than (image diameter) / 2^l, where the
/// image diameter is measured along one image meridian.
ImageSurface graded_pushed_sphere(const RadialMap& map, const Ball& ball,
                                  int mesh_level);

/// Monte Carlo style check of the invertibility condition on the sphere
/// bounding `ball`: pushes a graded mesh through the map, then tests
/// that sample points inside the ball land in the topological image and
/// points in the surrounding annulus (radius up to twice the ball radius) do
/// not. Sampling is a Halton sequence offset by `seed`, restricted to the
/// map domain and excluding a tube around the symmetry axis. Fractions are
/// judged against 95%. Throws std::runtime_error if more than 10% of the
/// degree evaluations fail the guard-zone check.
InvReport check_inv(const RadialMap& map, const Ball& ball,
                    long long n_samples = 1000, int mesh_level = 9,
                    double exclusion_tube_radius = 1e-3, uint64_t seed = 0);

}  // namespace cav
