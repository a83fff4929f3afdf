#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "cav/geometry.hpp"

using namespace cav;

TEST_CASE("to_cartesian poles and equator") {
  CartesianPoint north = to_cartesian(SphericalPoint::canonical(1.0, 0.0, 0.0));
  CHECK(north.isApprox(CartesianPoint(0, 0, 1), 1e-15));

  CartesianPoint eq = to_cartesian(SphericalPoint::canonical(2.0, M_PI / 2, 0.0));
  CHECK((eq - CartesianPoint(2, 0, 0)).norm() < 1e-14);

  CartesianPoint south = to_cartesian(SphericalPoint::canonical(0.5, M_PI, 0.0));
  CHECK((south - CartesianPoint(0, 0, -0.5)).norm() < 1e-15);
}

TEST_CASE("to_spherical canonical values") {
  SphericalPoint p = to_spherical(CartesianPoint(0, 0, 1));
  CHECK(p.r == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(p.alpha == 0.0);
  CHECK(p.beta == 0.0);

  SphericalPoint o = to_spherical(CartesianPoint(0, 0, 0));
  CHECK(o.r == 0.0);
  CHECK(o.alpha == 0.0);
  CHECK(o.beta == 0.0);

  SphericalPoint q = to_spherical(CartesianPoint(1, 1, 0));
  CHECK(q.r == doctest::Approx(std::sqrt(2.0)).epsilon(1e-14));
  CHECK(q.alpha == doctest::Approx(M_PI / 2).epsilon(1e-14));
  CHECK(q.beta == doctest::Approx(M_PI / 4).epsilon(1e-14));
}

TEST_CASE("reflect_z basics") {
  CHECK((reflect_z(CartesianPoint(1, 2, 3)) - CartesianPoint(1, 2, -3)).norm() == 0.0);
  CHECK(reflect_z(CartesianPoint(0, 0, 0)).norm() == 0.0);
  CartesianPoint v(0.3, -0.7, 1.9);
  CHECK((reflect_z(reflect_z(v)) - v).norm() == 0.0);
}

TEST_CASE("round trip cartesian -> spherical -> cartesian") {
  // Deterministic low-discrepancy sweep of B(0,10).
  auto vdc = [](unsigned long long i, int base) {
    double f = 1.0, x = 0.0;
    for (unsigned long long n = i + 1; n > 0; n /= base) {
      f /= base;
      x += f * double(n % base);
    }
    return x;
  };
  double worst = 0.0;
  for (int i = 0; i < 10000; ++i) {
    CartesianPoint c(20 * vdc(i, 2) - 10, 20 * vdc(i, 3) - 10, 20 * vdc(i, 5) - 10);
    if (c.norm() > 10.0) continue;
    CartesianPoint back = to_cartesian(to_spherical(c));
    worst = std::max(worst, (back - c).norm() / std::max(1.0, c.norm()));
  }
  CHECK(worst < 1e-12);
}

TEST_CASE("canonicalization at coordinate singularities") {
  // beta is forced to 0 on the axis and at the origin, beta wraps to (-pi, pi].
  SphericalPoint axis = SphericalPoint::canonical(1.0, 0.0, 2.5);
  CHECK(axis.beta == 0.0);
  SphericalPoint south = SphericalPoint::canonical(1.0, M_PI, -1.0);
  CHECK(south.beta == 0.0);
  SphericalPoint origin = SphericalPoint::canonical(0.0, 1.0, 1.0);
  CHECK(origin.alpha == 0.0);
  CHECK(origin.beta == 0.0);
  SphericalPoint wrap = SphericalPoint::canonical(1.0, 1.0, 2 * M_PI + 0.25);
  CHECK(wrap.beta == doctest::Approx(0.25).epsilon(1e-12));
}
