#pragma once

#include <functional>
#include <map>
#include <string>
#include <vector>

#include "cav/differential.hpp"

namespace cav {

/// A band is a curvilinear strip { (r, alpha) : r in [r_lo, r_hi],
/// alpha in [alpha_lo(r), alpha_hi(r)] }. Bands are chosen so that no band
/// crosses a branch curve of the map; quadrature cells subdivide bands in
/// (r, u) with alpha = alpha_lo + u (alpha_hi - alpha_lo), u in [0, 1].
struct Band {
  double r_lo = 0.0;
  double r_hi = 0.0;
  std::function<double(double)> alpha_lo;
  std::function<double(double)> alpha_hi;
  std::string region;
};

struct CellDecomposition {
  std::vector<Band> bands;
  int base_resolution = 8;
};

/// Bands aligned with the region structure of the map family. With
/// edge_margin > 0, a strip of that width is removed along every branch
/// curve (and the domain boundary), matching a pointwise exclusion of
/// points whose classify() proximity is below the margin.
CellDecomposition region_cells(const MapParams& params,
                               int base_resolution = 8,
                               double edge_margin = 0.0);

/// Bands for the limit map: split at r = 1, r = 2 and along the interior
/// interface alpha = (2 - r) pi for r in (1, 2).
CellDecomposition limit_cells(double p, int base_resolution = 8,
                              double edge_margin = 0.0);

/// Single band covering (0, r_max) x (0, pi), for maps without branch curves.
CellDecomposition simple_cells(double r_max = 10.0, int base_resolution = 8,
                               double edge_margin = 0.0);

enum class EnergyKind { dirichlet, jac_neg_power, distortion_half };

struct EnergySpec {
  EnergyKind kind = EnergyKind::dirichlet;
  double exponent = 1.0;  // stands for a in |det Df|^{-a}
};

struct EnergyEntry {
  double total = 0.0;
  std::map<std::string, double> per_region;
  double est_error = 0.0;
  bool converged = false;
  long long cells = 0;
  long long flagged_cells = 0;
};

/// Adaptive tensor Gauss-Legendre integration over a band decomposition.
/// The integrand is a function of (r, alpha); the azimuthal direction must
/// already be integrated out (all built-in integrands carry the 2 pi factor).
EnergyEntry integrate_over(const CellDecomposition& dec,
                           const std::function<double(double, double)>& f,
                           double tol, long long max_cells = 200000);

/// Energy functional of a map over the unit of its decomposition:
///   dirichlet        int |Df|^2
///   jac_neg_power    int |det Df|^{-exponent}
///   distortion_half  int K^{1/2},  K = |Df|^3 / det Df
EnergyEntry integrate_energy(const RadialMap& map,
                             const CellDecomposition& dec, EnergySpec which,
                             double tol);

/// Convenience overload: picks the decomposition matching the map type.
EnergyEntry integrate_energy(const RadialMap& map, EnergySpec which,
                             double tol, int base_resolution = 8);

/// Radial bump u(y) = exp(-1 / (1 - t^2)) with t = |y - center| / rho,
/// supported in the ball B(center, rho). The center must be on the z axis
/// so the composition with a RadialMap stays azimuthally symmetric.
struct Bump {
  double center_z = 0.0;
  double rho = 1.0;
};

struct KmReport {
  double lhs = 0.0;        // int |Du(f)| |Df(x) pulled back|
  double rhs = 0.0;        // ||Du||_L3 (int K^{1/2})^{2/3}
  double grad_l3 = 0.0;
  double energy_k_half = 0.0;
  bool holds = false;
};

std::vector<Bump> builtin_bumps();

/// Checks int_B |D(u o f)| <= ||Du||_{L^3} (int_B K_f^{1/2})^{2/3} for the
/// given bump test function. Pass a nonnegative precomputed_k_half to reuse
/// a distortion integral across bumps.
KmReport km_inequality_check(const RadialMap& map,
                             const CellDecomposition& dec, const Bump& bump,
                             double tol, double precomputed_k_half = -1.0);

/// Deterministic pairwise summation.
double pairwise_sum(const std::vector<double>& v);

}  // namespace cav
