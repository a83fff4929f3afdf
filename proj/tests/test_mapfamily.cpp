#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <stdexcept>
#include <vector>

#include "cav/invcheck.hpp"
#include "cav/mapfamily.hpp"

using namespace cav;

TEST_CASE("make_params derived constants") {
  MapParams mp = make_params(0.1, 1.0);
  CHECK(mp.p == doctest::Approx(7.0 / 12.0).epsilon(1e-14));
  CHECK(mp.lambda == doctest::Approx(8.0).epsilon(1e-12));
  CHECK(mp.r1 == doctest::Approx(1.0 + 0.1 / (M_PI - 0.1)).epsilon(1e-14));
  CHECK(mp.r1 == doctest::Approx(1.03288).epsilon(1e-5));
  CHECK(mp.r0 == doctest::Approx((0.1 - 0.02) / (1.0 - 0.01)).epsilon(1e-14));
  CHECK(mp.r0 == doctest::Approx(0.080808).epsilon(1e-5));

  MapParams mp2 = make_params(0.1, 1.0, 0.6);
  CHECK(mp2.lambda == doctest::Approx(10.0).epsilon(1e-12));
}

TEST_CASE("make_params rejects out-of-range input") {
  CHECK_THROWS_AS(make_params(0.1, 2.0), std::invalid_argument);  // empty p window
  CHECK_THROWS_AS(make_params(0.0, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(make_params(0.5, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(make_params(0.1, 1.0, 0.5), std::invalid_argument);
  CHECK_THROWS_AS(make_params(0.1, 1.0, 2.0 / 3.0), std::invalid_argument);
}

TEST_CASE("interface curve and band thickness") {
  MapParams mp = make_params(0.1, 1.0);
  CHECK(s_curve(mp, 1.0) == doctest::Approx(M_PI - 0.1).epsilon(1e-14));
  CHECK(s_curve(mp, 2.0 - 1e-13) == doctest::Approx(0.0).epsilon(1e-10));
  // Both branches of S and delta agree at r1.
  double below = s_curve(mp, mp.r1 - 1e-14);
  double above = s_curve(mp, mp.r1 + 1e-14);
  CHECK(std::abs(below - above) < 1e-12);

  CHECK(thickness(mp, 1.0) == doctest::Approx(std::pow(0.1, 12.0 / 7.0)).epsilon(1e-13));
  CHECK(thickness(mp, 1.0) == doctest::Approx(0.019307).epsilon(1e-4));
  CHECK(thickness(mp, 2.0) == doctest::Approx(0.0).epsilon(1e-14));
  double tb = thickness(mp, mp.r1 - 1e-13);
  double ta = thickness(mp, mp.r1 + 1e-13);
  CHECK(std::abs(tb - ta) / tb < 1e-10);
}

TEST_CASE("radial modulation psi") {
  MapParams mp = make_params(0.1, 1.0);
  CHECK(psi(mp, 0.05) == doctest::Approx(0.5).epsilon(1e-14));
  CHECK(psi(mp, 1.0) == doctest::Approx(0.9).epsilon(1e-14));
  CHECK(psi(mp, 2.0) == doctest::Approx(1.0).epsilon(1e-14));
  // Continuity at the two breakpoints and monotone range [0, 1].
  CHECK(std::abs(psi(mp, mp.r0 - 1e-13) - psi(mp, mp.r0 + 1e-13)) < 1e-10);
  CHECK(std::abs(psi(mp, mp.r1 - 1e-13) - psi(mp, mp.r1 + 1e-13)) < 1e-10);
  for (int i = 0; i <= 200; ++i) {
    double r = 2.0 * i / 200.0;
    double v = psi(mp, r);
    CHECK(v >= 0.0);
    CHECK(v <= 1.0);
  }
}

TEST_CASE("angular profile xi") {
  MapParams mp = make_params(0.1, 1.0);
  CHECK(xi(mp, 1.0, 0.0) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(xi(mp, 1.0, M_PI) == doctest::Approx(1.0).epsilon(1e-14));
  // Above the interface: 1 - (pi - alpha)/(pi - S), with pi - S = eps * r.
  CHECK(xi(mp, 1.0, M_PI - 0.05) == doctest::Approx(0.5).epsilon(1e-13));
  // Inside the band xi vanishes.
  double s = s_curve(mp, 1.0);
  double d = thickness(mp, 1.0);
  CHECK(xi(mp, 1.0, s - 0.5 * d) == 0.0);
}

TEST_CASE("region classification") {
  MapParams mp = make_params(0.1, 1.0);
  CHECK(classify(mp, 0.5, 1.0).label == RegionLabel::A1);
  double d15 = thickness(mp, 1.5);
  CHECK(classify(mp, 1.5, (2.0 - 1.5) * M_PI - 0.5 * d15).label == RegionLabel::C);
  CHECK(classify(mp, 5.0, 1.0).label == RegionLabel::Shell);
  CHECK(classify(mp, 5.0, 3.0).label == RegionLabel::Shell);
  // Above S, below/above r1.
  CHECK(classify(mp, 1.0, M_PI - 0.05).label == RegionLabel::D1);
  CHECK(classify(mp, 1.5, M_PI - 0.05).label == RegionLabel::D2);
  CHECK(classify(mp, 1.5, 1.0).label == RegionLabel::A2);
}

TEST_CASE("image radius R") {
  MapParams mp = make_params(0.1, 1.0);
  CHECK(radius_field(mp, 0.5, 1.0) == doctest::Approx(0.5).epsilon(1e-14));  // (2-r)/3
  CHECK(radius_field(mp, 2.0 - 1e-13, M_PI - 1e-6) == doctest::Approx(1.0).epsilon(1e-10));
  double s = s_curve(mp, 1.0);
  CHECK(radius_field(mp, 1.0, s) ==
        doctest::Approx(2.0 / 3.0 + 0.1 / (3.0 * M_PI)).epsilon(1e-13));
  CHECK(radius_field(mp, 1.0, s) == doctest::Approx(0.67727).epsilon(1e-5));
  // Range [0, 1] over a sweep.
  for (int i = 1; i < 60; ++i)
    for (int j = 1; j < 60; ++j) {
      double r = 2.0 * i / 60.0, alpha = M_PI * j / 60.0;
      double v = radius_field(mp, r, alpha);
      CHECK(v >= 0.0);
      CHECK(v <= 1.0);
    }
}

TEST_CASE("image polar factor T") {
  MapParams mp = make_params(0.1, 1.0);
  CHECK(angle_field(mp, 1.2, 0.0) == doctest::Approx(0.0).epsilon(1e-14));
  double s = s_curve(mp, 1.0), d = thickness(mp, 1.0);
  CHECK(angle_field(mp, 1.0, s - 0.5 * d) == doctest::Approx(M_PI / 2 * 0.9).epsilon(1e-13));
  CHECK(angle_field(mp, 1.0, s - 0.5 * d) == doctest::Approx(1.41372).epsilon(1e-5));
  double s05 = s_curve(mp, 0.05), d05 = thickness(mp, 0.05);
  CHECK(angle_field(mp, 0.05, s05 - 0.5 * d05) ==
        doctest::Approx(M_PI / 2 * 0.5).epsilon(1e-13));
  // Range [0, pi/2].
  for (int i = 1; i < 60; ++i)
    for (int j = 0; j <= 60; ++j) {
      double r = 2.0 * i / 60.0, alpha = M_PI * j / 60.0;
      double v = angle_field(mp, r, alpha);
      CHECK(v >= 0.0);
      CHECK(v <= M_PI / 2 + 1e-15);
    }
}

TEST_CASE("family map is the identity on the outer boundary") {
  MapParams mp = make_params(0.1, 1.0);
  SphericalPoint x = SphericalPoint::canonical(10.0, M_PI / 3, 1.2);
  CartesianPoint image = eval_family(mp, x);
  CHECK((image - to_cartesian(x)).norm() < 1e-12);
}

TEST_CASE("family map is continuous across r = 2") {
  MapParams mp = make_params(0.1, 1.0);
  for (int j = 1; j < 100; ++j) {
    double alpha = M_PI * j / 100.0;
    CartesianPoint below = eval_family(mp, SphericalPoint::canonical(2.0 - 1e-9, alpha, 0.7));
    CartesianPoint above = eval_family(mp, SphericalPoint::canonical(2.0 + 1e-9, alpha, 0.7));
    CHECK((below - above).norm() < 1e-8);
  }
}

TEST_CASE("family map collapses the origin to the drop tip") {
  // As r -> 0 the polar factor T -> 0 in every direction (psi(eps, 0) = 0),
  // so all images converge to the single point (0, 0, -2/3); the continuous
  // extension sends the origin there.
  MapParams mp = make_params(0.1, 1.0);
  CartesianPoint tip(0.0, 0.0, -2.0 / 3.0);
  CHECK((eval_family(mp, SphericalPoint::canonical(0.0, 0.0, 0.0)) - tip).norm() < 1e-14);
  for (int j = 0; j <= 10; ++j) {
    double alpha = M_PI * j / 10.0;
    CartesianPoint y = eval_family(mp, SphericalPoint::canonical(1e-8, alpha, 0.3));
    CHECK((y - tip).norm() < 1e-6);
  }
}

TEST_CASE("family map is continuous across every branch curve") {
  // The polar factor T has an infinite alpha-derivative where xi -> 0, so
  // the map is Hoelder with exponent p (= 7/12 here), not Lipschitz: pairs at
  // distance d across a branch curve can be ~d^p apart in the image. The
  // check therefore uses the Hoelder modulus, plus decay as d -> 0.
  MapParams mp = make_params(0.1, 1.0);
  const double kC = 20.0;
  double prev_worst = 1e300;
  for (double h : {5e-8, 5e-10, 5e-12}) {
    double worst = 0.0;
    int pairs = 0;
    auto probe = [&](const SphericalPoint& a, const SphericalPoint& b) {
      worst = std::max(worst, (eval_family(mp, a) - eval_family(mp, b)).norm());
      ++pairs;
    };
    for (int i = 1; i < 250 && pairs < 1000; ++i) {
      double r = 2.0 * i / 250.0;
      double s = s_curve(mp, r), st = s - thickness(mp, r);
      // Straddle alpha = S and alpha = S - delta at this r.
      probe(SphericalPoint::canonical(r, s - h, 0.0),
            SphericalPoint::canonical(r, s + h, 0.0));
      probe(SphericalPoint::canonical(r, st - h, 0.0),
            SphericalPoint::canonical(r, st + h, 0.0));
      // Straddle r = r0, r = r1 and r = 2 at alpha proportional to i.
      double alpha = M_PI * i / 250.0;
      probe(SphericalPoint::canonical(mp.r0 - h, alpha, 0.0),
            SphericalPoint::canonical(mp.r0 + h, alpha, 0.0));
      probe(SphericalPoint::canonical(mp.r1 - h, alpha, 0.0),
            SphericalPoint::canonical(mp.r1 + h, alpha, 0.0));
      probe(SphericalPoint::canonical(2.0 - h, alpha, 0.0),
            SphericalPoint::canonical(2.0 + h, alpha, 0.0));
    }
    CHECK(pairs >= 1000);
    CHECK(worst < kC * std::pow(2.0 * h, mp.p));
    CHECK(worst < prev_worst);
    prev_worst = worst;
  }
}

TEST_CASE("domain is the closed ball of radius 10") {
  MapParams mp = make_params(0.1, 1.0);
  CHECK_THROWS_AS(eval_family(mp, SphericalPoint::canonical(10.5, 1.0, 0.0)),
                  std::domain_error);
}

TEST_CASE("limit map values") {
  double p = 7.0 / 12.0;
  CartesianPoint y = eval_limit(p, SphericalPoint::canonical(0.5, M_PI / 2, 0.0));
  SphericalPoint s = to_spherical(y);
  // R = 0.5, T = (pi/2)(1 - 0.5^p); image (R cos T, R T) then reflected.
  double t = M_PI / 2 * (1.0 - std::pow(0.5, p));
  CHECK(s.r == doctest::Approx(0.5 * std::cos(t)).epsilon(1e-12));
  CHECK(s.r == doctest::Approx(0.4334).epsilon(2e-4));
  CHECK(s.alpha == doctest::Approx(M_PI - 0.5 * t).epsilon(1e-12));
  CHECK(s.alpha == doctest::Approx(2.8805).epsilon(1e-4));

  for (double r : {0.2, 0.5, 0.9}) {
    CartesianPoint axis = eval_limit(p, SphericalPoint::canonical(r, M_PI, 0.0));
    CHECK(axis.norm() < 1e-15);
  }
}

TEST_CASE("limit map is continuous across its branch curves") {
  // Same Hoelder (exponent p) modulus as the family: both sides of the
  // interior interface alpha = (2 - r) pi send the interface itself to the
  // origin, approaching it like distance^p.
  double p = 7.0 / 12.0;
  const double kC = 20.0;
  for (double h : {5e-8, 5e-10}) {
    const double bound = kC * std::pow(2.0 * h, p);
    for (int j = 1; j < 100; ++j) {
      double alpha = M_PI * j / 100.0;
      for (double rc : {1.0, 2.0}) {
        CartesianPoint below = eval_limit(p, SphericalPoint::canonical(rc - h, alpha, 0.0));
        CartesianPoint above = eval_limit(p, SphericalPoint::canonical(rc + h, alpha, 0.0));
        CHECK((below - above).norm() < bound);
      }
      double r = 1.0 + j / 100.0;  // interior interface alpha = (2 - r) pi
      double s0 = (2.0 - r) * M_PI;
      if (s0 > h && s0 < M_PI - h) {
        CartesianPoint lo = eval_limit(p, SphericalPoint::canonical(r, s0 - h, 0.0));
        CartesianPoint hi = eval_limit(p, SphericalPoint::canonical(r, s0 + h, 0.0));
        CHECK((lo - hi).norm() < bound);
      }
    }
  }
}

TEST_CASE("family converges pointwise to the limit map") {
  SphericalPoint x = SphericalPoint::canonical(0.5, M_PI / 2, 0.0);
  double p = 7.0 / 12.0;
  CartesianPoint lim = eval_limit(p, x);
  double prev = 1e300;
  for (double eps : {0.2, 0.1, 0.05}) {
    double gap = (eval_family(make_params(eps, 1.0, p), x) - lim).norm();
    CHECK(gap < prev);
    prev = gap;
  }
}

TEST_CASE("sampled injectivity of the family map") {
  MapParams mp = make_params(0.1, 1.0);
  FamilyMap f(mp);
  // Image coincidence implies domain coincidence over quasi-random pairs.
  const int n = 20000;
  std::vector<CartesianPoint> xs, ys;
  xs.reserve(n);
  ys.reserve(n);
  for (uint64_t i = 0; xs.size() < size_t(n); ++i) {
    CartesianPoint c(20 * halton(i, 2) - 10, 20 * halton(i, 3) - 10, 20 * halton(i, 5) - 10);
    if (c.norm() >= 10.0) continue;
    xs.push_back(c);
    ys.push_back(f.map(c));
  }
  for (int i = 0; i + 1 < n; i += 2) {
    if ((ys[i] - ys[i + 1]).norm() < 1e-9) {
      CHECK((xs[i] - xs[i + 1]).norm() < 1e-6);
    }
  }
}
