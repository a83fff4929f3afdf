#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <stdexcept>

#include "cav/invcheck.hpp"
#include "cav/mapfamily.hpp"

using namespace cav;

TEST_CASE("van der Corput sequence values") {
  CHECK(halton(0, 2) == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(halton(1, 2) == doctest::Approx(0.25).epsilon(1e-15));
  CHECK(halton(2, 2) == doctest::Approx(0.75).epsilon(1e-15));
  CHECK(halton(0, 3) == doctest::Approx(1.0 / 3.0).epsilon(1e-15));
  // Low discrepancy sanity: first 1000 elements fill (0,1) with small gaps.
  for (uint64_t i = 0; i < 1000; ++i) {
    double v = halton(i, 5);
    CHECK(v > 0.0);
    CHECK(v < 1.0);
  }
}

TEST_CASE("identity map satisfies the invertibility condition") {
  IdentityMap id;
  // Level 9 is the coarsest resolution whose guard-zone attrition stays
  // under the 10% abort threshold for a round unit sphere.
  InvReport rep = check_inv(id, Ball{CartesianPoint::Zero(), 1.0}, 500, 9);
  CHECK(to_string(rep.verdict) == "satisfied");
  CHECK(rep.inside_fraction == doctest::Approx(1.0));
  CHECK(rep.outside_fraction == doctest::Approx(1.0));
  // A thin layer of samples always lands within ten triangle diameters of
  // the surface; they must be counted, not silently dropped.
  CHECK(rep.guard_failures < 100);
}

TEST_CASE("reports are deterministic") {
  IdentityMap id;
  InvReport a = check_inv(id, Ball{CartesianPoint::Zero(), 1.0}, 300, 9);
  InvReport b = check_inv(id, Ball{CartesianPoint::Zero(), 1.0}, 300, 9);
  CHECK(a.to_json() == b.to_json());
  // Different seed offsets draw different samples but reach the same verdict.
  InvReport c =
      check_inv(id, Ball{CartesianPoint::Zero(), 1.0}, 300, 9, 1e-3, 17);
  CHECK(to_string(c.verdict) == "satisfied");
}

TEST_CASE("report serialization carries the audit fields") {
  IdentityMap id;
  InvReport rep = check_inv(id, Ball{CartesianPoint::Zero(), 1.0}, 200, 9);
  std::string j = rep.to_json();
  for (const char* key :
       {"verdict", "ball", "radius", "mesh_level", "n_samples", "inside",
        "in_image", "outside", "out_of_image", "fraction", "guard_failures",
        "residue_failures"}) {
    CHECK(j.find(key) != std::string::npos);
  }
}

TEST_CASE("too coarse a mesh aborts loudly instead of passing") {
  IdentityMap id;
  CHECK_THROWS_AS(check_inv(id, Ball{CartesianPoint::Zero(), 1.0}, 500, 0),
                  std::runtime_error);
}

TEST_CASE("annulus must fit inside the map domain") {
  IdentityMap id;
  CHECK_THROWS_AS(check_inv(id, Ball{CartesianPoint::Zero(), 6.0}, 100, 3),
                  std::invalid_argument);
}

TEST_CASE("the family map satisfies the invertibility condition") {
  FamilyMap f(make_params(0.2, 1.0));
  // The family compresses volume toward the drop surface, so guard-zone
  // attrition forces one level finer than the identity needs.
  InvReport rep = check_inv(f, Ball{CartesianPoint::Zero(), 0.5}, 200, 10);
  CHECK(rep.verdict == InvVerdict::satisfied);
  CHECK(rep.inside_fraction == doctest::Approx(1.0));
  CHECK(rep.outside_fraction == doctest::Approx(1.0));
}

TEST_CASE("the limit map violates the invertibility condition") {
  LimitMap lim(7.0 / 12.0);
  InvReport rep = check_inv(lim, Ball{CartesianPoint::Zero(), 0.5}, 200, 10);
  CHECK(rep.verdict == InvVerdict::violated_both);
  // Material from inside the ball is expelled and outside material is
  // drawn in, so both inclusion fractions collapse.
  CHECK(rep.inside_fraction < 0.5);
}
