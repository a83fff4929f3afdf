#include "cav/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>
#include <stdexcept>

namespace cav {

namespace {

constexpr double kGlNode[7] = {-0.9491079123427585, -0.7415311855993945,
                               -0.4058451513773972, 0.0,
                               0.4058451513773972,  0.7415311855993945,
                               0.9491079123427585};
constexpr double kGlWeight[7] = {0.1294849661688697, 0.2797053914892766,
                                 0.3818300505051189, 0.4179591836734694,
                                 0.3818300505051189, 0.2797053914892766,
                                 0.1294849661688697};

struct Cell {
  int band = 0;
  double ra = 0, rb = 0, u0 = 0, u1 = 0;
  int depth = 0;
  long long id = 0;
  double value = 0, err = 0, err_r = 0, err_u = 0;
  bool alive = true;
};

double gl7(const Band& band, const std::function<double(double, double)>& f,
           double ra, double rb, double u0, double u1) {
  const double rm = 0.5 * (ra + rb), rh = 0.5 * (rb - ra);
  const double um = 0.5 * (u0 + u1), uh = 0.5 * (u1 - u0);
  double sum = 0.0;
  for (int i = 0; i < 7; ++i) {
    const double r = rm + rh * kGlNode[i];
    const double lo = band.alpha_lo(r);
    const double w = std::max(0.0, band.alpha_hi(r) - lo);
    if (w == 0.0) continue;
    const double hi = lo + w;
    double row = 0.0;
    for (int j = 0; j < 7; ++j) {
      const double u = um + uh * kGlNode[j];
      // Keep nodes strictly inside the open interval: very thin bands round
      // node positions onto the edges, where branch-curve jets are singular.
      double a = lo + u * w;
      if (a <= lo) a = std::nextafter(lo, hi);
      if (a >= hi) a = std::nextafter(hi, lo);
      if (a <= lo || a >= hi) continue;  // no representable interior point
      row += kGlWeight[j] * f(r, a);
    }
    sum += kGlWeight[i] * row * w;
  }
  return sum * rh * uh;
}

void evaluate(Cell& c, const Band& band,
              const std::function<double(double, double)>& f) {
  const double i0 = gl7(band, f, c.ra, c.rb, c.u0, c.u1);
  const double rm = 0.5 * (c.ra + c.rb);
  const double um = 0.5 * (c.u0 + c.u1);
  const double ir = gl7(band, f, c.ra, rm, c.u0, c.u1) +
                    gl7(band, f, rm, c.rb, c.u0, c.u1);
  const double iu = gl7(band, f, c.ra, c.rb, c.u0, um) +
                    gl7(band, f, c.ra, c.rb, um, c.u1);
  c.value = 0.5 * (ir + iu);
  c.err_r = std::abs(ir - i0);
  c.err_u = std::abs(iu - i0);
  c.err = c.err_r + c.err_u;
}

Band margin_band(double r_lo, double r_hi,
                 std::function<double(double)> alpha_lo,
                 std::function<double(double)> alpha_hi, std::string region,
                 double m) {
  Band b;
  b.r_lo = r_lo + m;
  b.r_hi = r_hi - m;
  b.alpha_lo = [lo = std::move(alpha_lo), m](double r) { return lo(r) + m; };
  b.alpha_hi = [hi = std::move(alpha_hi), m](double r) { return hi(r) - m; };
  b.region = std::move(region);
  return b;
}

}  // namespace

CellDecomposition region_cells(const MapParams& params, int base_resolution,
                               double edge_margin) {
  const MapParams q = params;
  const double m = edge_margin;
  auto zero = [](double) { return 0.0; };
  auto pi = [](double) { return M_PI; };
  auto st = [q](double r) { return s_curve(q, r) - thickness(q, r); };
  auto s = [q](double r) { return s_curve(q, r); };

  CellDecomposition dec;
  dec.base_resolution = std::max(base_resolution, 8);
  const double breaks[3][2] = {{0.0, q.r0}, {q.r0, q.r1}, {q.r1, 2.0}};
  for (int k = 0; k < 3; ++k) {
    const double lo = breaks[k][0], hi = breaks[k][1];
    const bool sub = k < 2;
    dec.bands.push_back(margin_band(lo, hi, zero, st, sub ? "A1" : "A2", m));
    dec.bands.push_back(margin_band(lo, hi, st, s, sub ? "B" : "C", m));
    dec.bands.push_back(margin_band(lo, hi, s, pi, sub ? "D1" : "D2", m));
  }
  dec.bands.push_back(margin_band(2.0, 10.0, zero, pi, "Shell", m));
  return dec;
}

CellDecomposition limit_cells(double p, int base_resolution,
                              double edge_margin) {
  (void)p;
  const double m = edge_margin;
  auto zero = [](double) { return 0.0; };
  auto pi = [](double) { return M_PI; };
  auto s0 = [](double r) { return (2.0 - r) * M_PI; };

  CellDecomposition dec;
  dec.base_resolution = std::max(base_resolution, 8);
  dec.bands.push_back(margin_band(0.0, 1.0, zero, pi, "A1", m));
  dec.bands.push_back(margin_band(1.0, 2.0, zero, s0, "A2", m));
  dec.bands.push_back(margin_band(1.0, 2.0, s0, pi, "D2", m));
  dec.bands.push_back(margin_band(2.0, 10.0, zero, pi, "Shell", m));
  return dec;
}

CellDecomposition simple_cells(double r_max, int base_resolution,
                               double edge_margin) {
  auto zero = [](double) { return 0.0; };
  auto pi = [](double) { return M_PI; };
  CellDecomposition dec;
  dec.base_resolution = std::max(base_resolution, 8);
  dec.bands.push_back(margin_band(0.0, r_max, zero, pi, "All", edge_margin));
  return dec;
}

double pairwise_sum(const std::vector<double>& v) {
  std::function<double(size_t, size_t)> rec = [&](size_t lo,
                                                  size_t hi) -> double {
    if (hi - lo <= 4) {
      double s = 0.0;
      for (size_t i = lo; i < hi; ++i) s += v[i];
      return s;
    }
    const size_t mid = lo + (hi - lo) / 2;
    return rec(lo, mid) + rec(mid, hi);
  };
  return v.empty() ? 0.0 : rec(0, v.size());
}

EnergyEntry integrate_over(const CellDecomposition& dec,
                           const std::function<double(double, double)>& f,
                           double tol, long long max_cells) {
  constexpr int kMaxDepth = 40;
  std::vector<Cell> cells;
  long long next_id = 0;

  auto make_cell = [&](int band, double ra, double rb, double u0, double u1,
                       int depth) {
    Cell c;
    c.band = band;
    c.ra = ra;
    c.rb = rb;
    c.u0 = u0;
    c.u1 = u1;
    c.depth = depth;
    c.id = next_id++;
    evaluate(c, dec.bands[band], f);
    if (!std::isfinite(c.value)) {
      // non-integrable behaviour: poison the error budget so the result can
      // never be reported as converged
      c.value = 0.0;
      c.err = std::numeric_limits<double>::infinity();
      c.err_r = c.err_u = c.err;
      c.depth = kMaxDepth;
    }
    cells.push_back(c);
  };

  const int n = dec.base_resolution;
  for (int b = 0; b < static_cast<int>(dec.bands.size()); ++b) {
    const Band& band = dec.bands[b];
    if (band.r_hi <= band.r_lo) continue;
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        make_cell(b, band.r_lo + (band.r_hi - band.r_lo) * i / n,
                  band.r_lo + (band.r_hi - band.r_lo) * (i + 1) / n,
                  static_cast<double>(j) / n,
                  static_cast<double>(j + 1) / n, 0);
  }

  auto worse = [&](long long lhs, long long rhs) {
    if (cells[lhs].err != cells[rhs].err)
      return cells[lhs].err < cells[rhs].err;
    return cells[lhs].id > cells[rhs].id;
  };
  std::priority_queue<long long, std::vector<long long>, decltype(worse)> pq(
      worse);

  double active_err = 0.0, total = 0.0, flagged_err = 0.0;
  long long flagged = 0;
  for (long long i = 0; i < static_cast<long long>(cells.size()); ++i) {
    total += cells[i].value;
    if (cells[i].depth >= kMaxDepth) {
      ++flagged;
      flagged_err += cells[i].err;
    } else {
      active_err += cells[i].err;
      pq.push(i);
    }
  }

  while (!pq.empty() &&
         active_err > tol * std::max(std::abs(total), 1e-12) &&
         static_cast<long long>(cells.size()) < max_cells) {
    const long long idx = pq.top();
    pq.pop();
    Cell parent = cells[idx];
    if (parent.depth >= kMaxDepth) {
      ++flagged;
      flagged_err += parent.err;
      active_err -= parent.err;
      continue;
    }
    cells[idx].alive = false;
    total -= parent.value;
    active_err -= parent.err;
    const long long first = static_cast<long long>(cells.size());
    if (parent.err_r >= parent.err_u) {
      const double rm = 0.5 * (parent.ra + parent.rb);
      make_cell(parent.band, parent.ra, rm, parent.u0, parent.u1,
                parent.depth + 1);
      make_cell(parent.band, rm, parent.rb, parent.u0, parent.u1,
                parent.depth + 1);
    } else {
      const double um = 0.5 * (parent.u0 + parent.u1);
      make_cell(parent.band, parent.ra, parent.rb, parent.u0, um,
                parent.depth + 1);
      make_cell(parent.band, parent.ra, parent.rb, um, parent.u1,
                parent.depth + 1);
    }
    for (long long i = first; i < static_cast<long long>(cells.size()); ++i) {
      total += cells[i].value;
      if (cells[i].depth >= kMaxDepth) {
        ++flagged;
        flagged_err += cells[i].err;
      } else {
        active_err += cells[i].err;
        pq.push(i);
      }
    }
  }

  // deterministic final reduction over leaves in creation order
  std::map<std::string, std::vector<double>> by_region;
  std::vector<double> leaf_values;
  for (const Cell& c : cells) {
    if (!c.alive) continue;
    leaf_values.push_back(c.value);
    by_region[dec.bands[c.band].region].push_back(c.value);
  }

  EnergyEntry out;
  out.total = pairwise_sum(leaf_values);
  for (auto& [name, vals] : by_region) out.per_region[name] = pairwise_sum(vals);
  out.est_error = active_err + flagged_err;
  out.cells = static_cast<long long>(leaf_values.size());
  out.flagged_cells = flagged;
  // Depth-capped cells count through their (finite) residual error estimate;
  // genuinely non-integrable cells carry an infinite estimate and can never
  // converge.
  out.converged =
      active_err + flagged_err <=
          tol * std::max(std::abs(out.total), 1e-12) &&
      static_cast<long long>(cells.size()) < max_cells;
  return out;
}

namespace {

std::function<double(double, double)> energy_integrand(const RadialMap& map,
                                                       EnergySpec which) {
  return [&map, which](double r, double alpha) {
    const SphericalPoint x{r, alpha, 0.0};
    const Differential d = partials(map, x);
    double v = 0.0;
    switch (which.kind) {
      case EnergyKind::dirichlet:
        v = grad_norm_sq(d);
        break;
      case EnergyKind::jac_neg_power: {
        const double j = jacobian(d);
        if (!(j > 0.0))
          throw std::runtime_error("nonpositive Jacobian in J^{-a} integrand");
        v = std::pow(j, -which.exponent);
        break;
      }
      case EnergyKind::distortion_half:
        v = distortion_half(d);
        break;
    }
    return 2.0 * M_PI * v * r * r * std::sin(alpha);
  };
}

}  // namespace

EnergyEntry integrate_energy(const RadialMap& map,
                             const CellDecomposition& dec, EnergySpec which,
                             double tol) {
  return integrate_over(dec, energy_integrand(map, which), tol);
}

EnergyEntry integrate_energy(const RadialMap& map, EnergySpec which,
                             double tol, int base_resolution) {
  if (auto* fam = dynamic_cast<const FamilyMap*>(&map))
    return integrate_energy(map, region_cells(fam->params(), base_resolution),
                            which, tol);
  if (auto* lim = dynamic_cast<const LimitMap*>(&map))
    return integrate_energy(map, limit_cells(lim->exponent(), base_resolution),
                            which, tol);
  return integrate_energy(
      map, simple_cells(map.domain_radius(), base_resolution), which, tol);
}

std::vector<Bump> builtin_bumps() {
  return {{0.0, 1.0}, {0.5, 0.45}, {-0.4, 0.35}, {0.0, 5.0}};
}

KmReport km_inequality_check(const RadialMap& map,
                             const CellDecomposition& dec, const Bump& bump,
                             double tol, double precomputed_k_half) {
  auto dbump = [](double t) {  // |g'(t)| for g(t) = exp(-1/(1-t^2))
    if (t <= 0.0 || t >= 1.0) return 0.0;
    const double q = 1.0 - t * t;
    return 2.0 * t / (q * q) * std::exp(-1.0 / q);
  };

  // ||Du||_{L^3}^3 = 4 pi int_0^1 |g'(t)|^3 t^2 dt, independent of rho.
  double c3 = 0.0;
  const int panels = 64;
  for (int k = 0; k < panels; ++k) {
    const double a = static_cast<double>(k) / panels;
    const double b = static_cast<double>(k + 1) / panels;
    for (int i = 0; i < 7; ++i) {
      const double t = 0.5 * (a + b) + 0.5 * (b - a) * kGlNode[i];
      const double g = dbump(t);
      c3 += 0.5 * (b - a) * kGlWeight[i] * g * g * g * t * t;
    }
  }

  auto integrand = [&](double r, double alpha) {
    const ProfileJet j = map.jet(r, alpha);
    const double sa = std::sin(j.at), ca = std::cos(j.at);
    const double wy = j.rt * sa;               // meridian coordinates of image
    const double wz = j.rt * ca - bump.center_z;
    const double dist = std::hypot(wy, wz);
    const double t = dist / bump.rho;
    if (t >= 1.0 || dist == 0.0) return 0.0;
    const double gp = dbump(t) / bump.rho;
    // columns of Df in the meridian plane, orthonormal domain frame
    const double cr_y = j.d_rt_dr * sa + j.rt * ca * j.d_at_dr;
    const double cr_z = j.d_rt_dr * ca - j.rt * sa * j.d_at_dr;
    const double ca_y = (j.d_rt_da * sa + j.rt * ca * j.d_at_da) / r;
    const double ca_z = (j.d_rt_da * ca - j.rt * sa * j.d_at_da) / r;
    const double uy = wy / dist, uz = wz / dist;
    const double s1 = uy * cr_y + uz * cr_z;
    const double s2 = uy * ca_y + uz * ca_z;
    return 2.0 * M_PI * gp * std::hypot(s1, s2) * r * r * std::sin(alpha);
  };

  KmReport rep;
  rep.grad_l3 = std::cbrt(4.0 * M_PI * c3);
  rep.energy_k_half =
      precomputed_k_half >= 0.0
          ? precomputed_k_half
          : integrate_energy(map, dec, {EnergyKind::distortion_half}, tol)
                .total;
  rep.lhs = integrate_over(dec, integrand, tol).total;
  rep.rhs = rep.grad_l3 * std::pow(rep.energy_k_half, 2.0 / 3.0);
  rep.holds = rep.lhs <= rep.rhs;
  return rep;
}

}  // namespace cav
