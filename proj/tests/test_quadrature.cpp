#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <stdexcept>

#include "cav/quadrature.hpp"

using namespace cav;

namespace {

struct OrientationReversingMap final : RadialMap {
  ProfileJet jet(double r, double alpha) const override {
    return {r, M_PI - alpha, 1.0, 0.0, 0.0, -1.0};
  }
};

}  // namespace

TEST_CASE("identity energies on B(0,2)") {
  IdentityMap id;
  CellDecomposition dec = simple_cells(2.0);
  EnergyEntry dir = integrate_energy(id, dec, {EnergyKind::dirichlet, 1.0}, 1e-6);
  CHECK(dir.converged);
  CHECK(dir.total == doctest::Approx(32.0 * M_PI).epsilon(1e-4));
  EnergyEntry vol = integrate_energy(id, dec, {EnergyKind::jac_neg_power, 1.0}, 1e-6);
  CHECK(vol.converged);
  CHECK(vol.total == doctest::Approx(32.0 * M_PI / 3.0).epsilon(1e-4));
}

TEST_CASE("per-region contributions add to the total") {
  FamilyMap f(make_params(0.1, 1.0));
  EnergyEntry e = integrate_energy(f, {EnergyKind::dirichlet, 1.0}, 1e-3);
  CHECK(e.converged);
  CHECK(e.flagged_cells == 0);
  double sum = 0.0;
  for (const auto& [name, v] : e.per_region) sum += v;
  CHECK(sum == doctest::Approx(e.total).epsilon(1e-9));
  CHECK(e.per_region.count("B") == 1);
  CHECK(e.per_region.count("Shell") == 1);
}

TEST_CASE("band decomposition is aligned with the region structure") {
  MapParams mp = make_params(0.1, 1.0);
  CellDecomposition dec = region_cells(mp);
  REQUIRE(dec.bands.size() == 10);
  for (const Band& band : dec.bands) {
    if (band.r_hi <= band.r_lo) continue;
    for (int i = 1; i <= 5; ++i)
      for (int j = 1; j <= 5; ++j) {
        double r = band.r_lo + (band.r_hi - band.r_lo) * i / 6.0;
        double lo = band.alpha_lo(r), hi = band.alpha_hi(r);
        if (hi <= lo) continue;
        double alpha = lo + (hi - lo) * j / 6.0;
        CHECK(to_string(classify(mp, r, alpha).label) == band.region);
      }
    if (band.region == "B" || band.region == "C") {
      for (int i = 1; i <= 5; ++i) {
        double r = band.r_lo + (band.r_hi - band.r_lo) * i / 6.0;
        // absolute slack: the band edges are computed as s and s - delta,
        // so the width can exceed delta by an ulp of s
        CHECK(band.alpha_hi(r) - band.alpha_lo(r) <=
              thickness(mp, r) * (1.0 + 1e-9) + 1e-14);
      }
    }
  }
}

TEST_CASE("edge margin excludes a strip along every branch curve") {
  MapParams mp = make_params(0.1, 1.0);
  const double m = 1e-3;
  CellDecomposition dec = region_cells(mp, 8, m);
  FamilyMap f(mp);
  for (const Band& band : dec.bands) {
    if (band.r_hi <= band.r_lo) continue;
    for (int i = 0; i <= 6; ++i)
      for (int j = 0; j <= 6; ++j) {
        double r = band.r_lo + (band.r_hi - band.r_lo) * i / 6.0;
        double lo = band.alpha_lo(r), hi = band.alpha_hi(r);
        if (hi <= lo) continue;
        double alpha = lo + (hi - lo) * j / 6.0;
        CHECK(f.boundary_proximity(r, alpha) >= m * (1.0 - 1e-9));
      }
  }
}

TEST_CASE("adaptive quadrature matches a brute-force midpoint reference") {
  MapParams mp = make_params(0.1, 1.0);
  FamilyMap f(mp);
  const double m = 1e-4;  // margin excluded around every branch curve
  EnergyEntry e = integrate_energy(f, region_cells(mp, 8, m),
                                   {EnergyKind::dirichlet, 1.0}, 1e-4);
  CHECK(e.converged);

  const int n = 4000;
  const double dr = 10.0 / n, da = M_PI / n;
  double ref = 0.0;
  for (int i = 0; i < n; ++i) {
    const double r = (i + 0.5) * dr;
    double row = 0.0;
    for (int j = 0; j < n; ++j) {
      const double alpha = (j + 0.5) * da;
      if (f.boundary_proximity(r, alpha) < m) continue;
      const Differential d = partials(f, SphericalPoint{r, alpha, 0.0});
      row += grad_norm_sq(d) * std::sin(alpha);
    }
    ref += row * r * r;
  }
  ref *= 2.0 * M_PI * dr * da;
  CHECK(e.total == doctest::Approx(ref).epsilon(0.01));
}

TEST_CASE("nonpositive Jacobian in a J^{-a} integral is a hard error") {
  OrientationReversingMap rev;
  CHECK_THROWS_AS(integrate_energy(rev, simple_cells(2.0),
                                   {EnergyKind::jac_neg_power, 1.0}, 1e-3),
                  std::runtime_error);
}

TEST_CASE("composition inequality holds for the identity map") {
  IdentityMap id;
  CellDecomposition dec = simple_cells(10.0);
  for (const Bump& bump : builtin_bumps()) {
    KmReport rep = km_inequality_check(id, dec, bump, 1e-3);
    CHECK(rep.holds);
    CHECK(rep.lhs > 0.0);
    CHECK(rep.lhs <= rep.rhs * (1.0 + 1e-9));
  }
}

TEST_CASE("composition inequality holds for the family near the drop tip") {
  // The image drop comes to a point at the origin (image radius -> 0 as the
  // polar factor reaches pi/2); the bump sits on that tip.
  const Bump tip{0.0, 0.2};
  double prev_lhs = -1.0;
  for (double eps : {0.1, 0.05}) {
    MapParams mp = make_params(eps, 1.0);
    FamilyMap f(mp);
    KmReport rep = km_inequality_check(f, region_cells(mp), tip, 1e-2);
    CHECK(rep.holds);
    CHECK(rep.lhs >= prev_lhs);  // nondecreasing as eps shrinks
    prev_lhs = rep.lhs;
  }
}

TEST_CASE("pairwise summation is deterministic and exact on small input") {
  std::vector<double> v{1.0, 2.0, 3.0, 4.0, 5.0};
  CHECK(pairwise_sum(v) == 15.0);
  CHECK(pairwise_sum({}) == 0.0);
}
