#include "cav/degree.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <limits>
#include <map>
#include <numeric>
#include <stdexcept>

namespace cav {

namespace {

TriangulatedSphere base_icosahedron() {
  const double t = (1.0 + std::sqrt(5.0)) / 2.0;
  TriangulatedSphere m;
  m.vertices = {{-1, t, 0}, {1, t, 0},   {-1, -t, 0}, {1, -t, 0},
                {0, -1, t}, {0, 1, t},   {0, -1, -t}, {0, 1, -t},
                {t, 0, -1}, {t, 0, 1},   {-t, 0, -1}, {-t, 0, 1}};
  m.triangles = {{0, 11, 5}, {0, 5, 1},  {0, 1, 7},   {0, 7, 10}, {0, 10, 11},
                 {1, 5, 9},  {5, 11, 4}, {11, 10, 2}, {10, 7, 6}, {7, 1, 8},
                 {3, 9, 4},  {3, 4, 2},  {3, 2, 6},   {3, 6, 8},  {3, 8, 9},
                 {4, 9, 5},  {2, 4, 11}, {6, 2, 10},  {8, 6, 7},  {9, 8, 1}};
  for (auto& v : m.vertices) v.normalize();
  return m;
}

}  // namespace

TriangulatedSphere icosphere(const CartesianPoint& center, double radius,
                             int level) {
  if (level < 0 || level > 8)
    throw std::invalid_argument("icosphere level must be in [0, 8]");
  TriangulatedSphere m = base_icosahedron();
  for (int l = 0; l < level; ++l) {
    std::map<std::pair<int, int>, int> midpoint;
    auto mid = [&](int a, int b) {
      const auto key = std::minmax(a, b);
      auto it = midpoint.find(key);
      if (it != midpoint.end()) return it->second;
      const int idx = static_cast<int>(m.vertices.size());
      m.vertices.push_back((m.vertices[a] + m.vertices[b]).normalized());
      midpoint.emplace(key, idx);
      return idx;
    };
    std::vector<std::array<int, 3>> next;
    next.reserve(m.triangles.size() * 4);
    for (const auto& t : m.triangles) {
      const int ab = mid(t[0], t[1]), bc = mid(t[1], t[2]),
                ca = mid(t[2], t[0]);
      next.push_back({t[0], ab, ca});
      next.push_back({t[1], bc, ab});
      next.push_back({t[2], ca, bc});
      next.push_back({ab, bc, ca});
    }
    m.triangles = std::move(next);
  }
  for (auto& v : m.vertices) v = center + radius * v;
  m.center = center;
  m.radius = radius;
  return m;
}

bool is_closed_oriented(const std::vector<CartesianPoint>& vertices,
                        const std::vector<std::array<int, 3>>& triangles) {
  std::map<std::pair<int, int>, int> count;
  for (const auto& t : triangles) {
    for (int k = 0; k < 3; ++k) {
      const int a = t[k], b = t[(k + 1) % 3];
      count[{a, b}] += 1;
    }
  }
  long long edges = 0;
  for (const auto& [edge, n] : count) {
    if (n != 1) return false;  // a directed edge used twice, or degenerate
    auto it = count.find({edge.second, edge.first});
    if (it == count.end() || it->second != 1) return false;
    ++edges;
  }
  edges /= 2;
  const long long v = static_cast<long long>(vertices.size());
  const long long f = static_cast<long long>(triangles.size());
  return v - edges + f == 2;
}

TriangulatedSphere graded_sphere_mesh(
    const std::function<CartesianPoint(const CartesianPoint&)>& f,
    const CartesianPoint& center, double radius, double max_image_diam) {
  if (!(radius > 0.0) || !(max_image_diam > 0.0))
    throw std::invalid_argument(
        "graded_sphere_mesh: radius and max_image_diam must be positive");
  const auto at = [&](double alpha, double beta) {
    return CartesianPoint(
        center.x() + radius * std::sin(alpha) * std::cos(beta),
        center.y() + radius * std::sin(alpha) * std::sin(beta),
        center.z() + radius * std::cos(alpha));
  };
  // Image arc-length bound of a polar interval, sampled on two meridians.
  const auto span = [&](double a, double b) {
    double s = 0.0;
    const double m = 0.5 * (a + b);
    for (double beta : {0.0, M_PI_2}) {
      const CartesianPoint pa = f(at(a, beta)), pm = f(at(m, beta)),
                           pb = f(at(b, beta));
      s = std::max(s, (pa - pm).norm() + (pm - pb).norm());
    }
    return s;
  };
  std::vector<double> rows{0.0};
  const std::function<void(double, double, int)> refine =
      [&](double a, double b, int depth) {
        if (depth < 48 && span(a, b) > max_image_diam) {
          const double m = 0.5 * (a + b);
          refine(a, m, depth + 1);
          refine(m, b, depth + 1);
        } else {
          rows.push_back(b);
        }
      };
  constexpr int kBaseRows = 32;
  for (int i = 0; i < kBaseRows; ++i)
    refine(i * M_PI / kBaseRows, (i + 1) * M_PI / kBaseRows, 0);
  // Azimuthal segment count from the widest image ring.
  double ring = 0.0;
  for (double a : rows) {
    const CartesianPoint p0 = f(at(a, 0.0)), p1 = f(at(a, M_PI));
    ring = std::max(ring, std::hypot(p0.x(), p0.y()));
    ring = std::max(ring, 0.5 * (p0 - p1).norm());
  }
  const long long want =
      static_cast<long long>(std::ceil(2.0 * M_PI * ring / max_image_diam));
  const int nseg = static_cast<int>(std::clamp<long long>(want, 8, 16384));
  const long long nrings = static_cast<long long>(rows.size()) - 2;
  if (2 * (nrings + 1) * nseg > 33'000'000)
    throw std::invalid_argument(
        "graded_sphere_mesh: resolution exceeds the triangle budget");

  TriangulatedSphere m;
  m.center = center;
  m.radius = radius;
  m.vertices.reserve(2 + nrings * nseg);
  m.vertices.push_back(at(0.0, 0.0));  // 0: north pole
  for (long long j = 0; j < nrings; ++j)
    for (int k = 0; k < nseg; ++k)
      m.vertices.push_back(at(rows[j + 1], 2.0 * M_PI * k / nseg - M_PI));
  m.vertices.push_back(at(M_PI, 0.0));  // south pole
  const int south = static_cast<int>(m.vertices.size()) - 1;
  const auto rv = [&](long long j, int k) {
    return static_cast<int>(1 + j * nseg + (k % nseg));
  };
  m.triangles.reserve(2 * (nrings + 1) * nseg);
  for (int k = 0; k < nseg; ++k)
    m.triangles.push_back({0, rv(0, k), rv(0, k + 1)});
  for (long long j = 0; j + 1 < nrings; ++j)
    for (int k = 0; k < nseg; ++k) {
      m.triangles.push_back({rv(j, k), rv(j + 1, k), rv(j + 1, k + 1)});
      m.triangles.push_back({rv(j, k), rv(j + 1, k + 1), rv(j, k + 1)});
    }
  for (int k = 0; k < nseg; ++k)
    m.triangles.push_back({south, rv(nrings - 1, k + 1), rv(nrings - 1, k)});
  return m;
}

ImageSurface push_mesh(
    const std::function<CartesianPoint(const CartesianPoint&)>& f,
    const TriangulatedSphere& mesh) {
  ImageSurface s;
  s.vertices.reserve(mesh.vertices.size());
  for (const auto& v : mesh.vertices) s.vertices.push_back(f(v));
  s.triangles = mesh.triangles;
  s.centroids.reserve(s.triangles.size());
  s.area_vectors.reserve(s.triangles.size());
  s.diameters.reserve(s.triangles.size());
  for (const auto& t : s.triangles) {
    const CartesianPoint &a = s.vertices[t[0]], &b = s.vertices[t[1]],
                         &c = s.vertices[t[2]];
    s.centroids.push_back((a + b + c) / 3.0);
    s.area_vectors.push_back(0.5 * (b - a).cross(c - a));
    const double d =
        std::max({(b - a).norm(), (c - b).norm(), (a - c).norm()});
    s.diameters.push_back(d);
    s.max_diameter = std::max(s.max_diameter, d);
  }
  // Partition the triangles into spatially compact far-field blocks by
  // recursively splitting a permutation of the indices at the median of the
  // longest bounding-box axis. Compactness matters: a block of mesh-order
  // triangles can trace a long arc whose bounding box blankets the interior.
  constexpr std::size_t kBlock = 512;
  const std::size_t n = s.triangles.size();
  s.order.resize(n);
  std::iota(s.order.begin(), s.order.end(), 0);
  const auto make_block = [&s](std::size_t lo, std::size_t hi) {
    SurfaceBlock blk;
    blk.begin = lo;
    blk.end = hi;
    blk.box_lo =
        CartesianPoint::Constant(std::numeric_limits<double>::infinity());
    blk.box_hi = -blk.box_lo;
    double weight = 0.0;
    CartesianPoint first_moment = CartesianPoint::Zero();
    for (std::size_t k = lo; k < hi; ++k) {
      const int i = s.order[k];
      for (int v : s.triangles[i]) {
        blk.box_lo = blk.box_lo.cwiseMin(s.vertices[v]);
        blk.box_hi = blk.box_hi.cwiseMax(s.vertices[v]);
      }
      blk.dipole += s.area_vectors[i];
      const double w = s.area_vectors[i].norm();
      weight += w;
      first_moment += w * s.centroids[i];
      blk.max_diam = std::max(blk.max_diam, s.diameters[i]);
    }
    blk.center = weight > 0.0 ? CartesianPoint(first_moment / weight)
                              : CartesianPoint(0.5 * (blk.box_lo + blk.box_hi));
    blk.radius = 0.5 * (blk.box_hi - blk.box_lo).norm();
    s.blocks.push_back(blk);
  };
  // Iterative stack to avoid deep recursion on huge meshes.
  std::vector<std::pair<std::size_t, std::size_t>> stack;
  if (n > 0) stack.emplace_back(0, n);
  while (!stack.empty()) {
    const auto [lo, hi] = stack.back();
    stack.pop_back();
    if (hi - lo <= kBlock) {
      make_block(lo, hi);
      continue;
    }
    CartesianPoint cmin =
        CartesianPoint::Constant(std::numeric_limits<double>::infinity());
    CartesianPoint cmax = -cmin;
    for (std::size_t k = lo; k < hi; ++k) {
      cmin = cmin.cwiseMin(s.centroids[s.order[k]]);
      cmax = cmax.cwiseMax(s.centroids[s.order[k]]);
    }
    int axis = 0;
    (cmax - cmin).maxCoeff(&axis);
    const std::size_t mid = lo + (hi - lo) / 2;
    std::nth_element(s.order.begin() + lo, s.order.begin() + mid,
                     s.order.begin() + hi, [&s, axis](int a, int b) {
                       return s.centroids[a][axis] < s.centroids[b][axis];
                     });
    stack.emplace_back(lo, mid);
    stack.emplace_back(mid, hi);
  }
  return s;
}

namespace {

// Signed solid angle sum over 4 pi; also reports the guard ratio.
double winding(const ImageSurface& s, const CartesianPoint& y,
               double* guard_margin) {
  double omega = 0.0;
  double guard = std::numeric_limits<double>::infinity();
  // Far blocks contribute through their dipole; a block is "far" when the
  // query point is at least kFar bounding radii from its box. The guard
  // minimum is pruned with dist(box)/max_diam, a lower bound for every
  // triangle in the block.
  constexpr double kFar = 6.0;
  auto box_dist = [&](const SurfaceBlock& b) {
    const CartesianPoint q = y.cwiseMax(b.box_lo).cwiseMin(b.box_hi);
    return (y - q).norm();
  };
  // Scan the nearest block exactly first: it almost always realizes the
  // guard minimum, and the primed minimum then prunes the other blocks.
  const size_t nb = s.blocks.size();
  std::vector<double> bdist(nb);
  size_t prime = 0;
  for (size_t i = 0; i < nb; ++i) {
    bdist[i] = box_dist(s.blocks[i]);
    if (bdist[i] < bdist[prime]) prime = i;
  }
  for (size_t bi = 0; bi < nb; ++bi) {
    const size_t b = bi == 0 ? prime : (bi <= prime ? bi - 1 : bi);
    const SurfaceBlock& blk = s.blocks[b];
    const double bd = bdist[b];
    const bool need_guard =
        guard_margin && bd / blk.max_diam < guard;
    if (!need_guard && bd > kFar * blk.radius) {
      const CartesianPoint v = blk.center - y;
      const double l = v.norm();
      omega += blk.dipole.dot(v) / (l * l * l);
      continue;
    }
    for (size_t k = blk.begin; k < blk.end; ++k) {
    const size_t i = s.order[k];
    const auto& t = s.triangles[i];
    const double ax = s.vertices[t[0]].x() - y.x(),
                 ay = s.vertices[t[0]].y() - y.y(),
                 az = s.vertices[t[0]].z() - y.z();
    const double bx = s.vertices[t[1]].x() - y.x(),
                 by = s.vertices[t[1]].y() - y.y(),
                 bz = s.vertices[t[1]].z() - y.z();
    const double cx = s.vertices[t[2]].x() - y.x(),
                 cy = s.vertices[t[2]].y() - y.y(),
                 cz = s.vertices[t[2]].z() - y.z();
    const double la = std::sqrt(ax * ax + ay * ay + az * az);
    const double lb = std::sqrt(bx * bx + by * by + bz * bz);
    const double lc = std::sqrt(cx * cx + cy * cy + cz * cz);
    const double det = ax * (by * cz - bz * cy) - ay * (bx * cz - bz * cx) +
                       az * (bx * cy - by * cx);
    const double denom = la * lb * lc + (ax * bx + ay * by + az * bz) * lc +
                         (bx * cx + by * cy + bz * cz) * la +
                         (cx * ax + cy * ay + cz * az) * lb;
    omega += 2.0 * std::atan2(det, denom);
    if (guard_margin) {
      const double dist = (s.centroids[i] - y).norm();
      guard = std::min(guard, dist / s.diameters[i]);
    }
    }
  }
  if (guard_margin) *guard_margin = guard;
  return omega / (4.0 * M_PI);
}

}  // namespace

DegreeResult degree_at(const ImageSurface& surface, const CartesianPoint& y) {
  DegreeResult r;
  const double w = winding(surface, y, &r.guard_margin);
  r.degree = static_cast<int>(std::lround(w));
  r.residue = std::abs(w - r.degree);
  r.guard_ok = r.guard_margin > 10.0;
  r.residue_ok = r.residue < 0.1;
  return r;
}

bool in_topological_image(const ImageSurface& surface,
                          const CartesianPoint& y) {
  const DegreeResult r = degree_at(surface, y);
  return r.guard_ok && r.residue_ok && r.degree != 0;
}

VectorField linear_field() {
  return {"linear",
          [](const CartesianPoint& y) { return CartesianPoint(y / 3.0); },
          [](const CartesianPoint&) { return 1.0; }};
}

VectorField quadratic_field() {
  return {"quadratic",
          [](const CartesianPoint& y) {
            return CartesianPoint(0.5 * y.array().square());
          },
          [](const CartesianPoint& y) { return y.sum(); }};
}

WeakIdentityReport verify_weak_identity(const ImageSurface& surface,
                                        const VectorField& field, int grid_n) {
  if (grid_n < 8) throw std::invalid_argument("grid_n must be at least 8");

  CartesianPoint lo = surface.vertices.front(), hi = lo;
  for (const auto& v : surface.vertices) {
    lo = lo.cwiseMin(v);
    hi = hi.cwiseMax(v);
  }
  const CartesianPoint pad = 0.05 * (hi - lo) +
                             CartesianPoint::Constant(1e-9);
  lo -= pad;
  hi += pad;
  const int n = grid_n;
  const CartesianPoint h = (hi - lo) / n;
  const double vol = h.x() * h.y() * h.z();

  auto index = [n](int i, int j, int k) {
    return (static_cast<size_t>(i) * n + j) * n + k;
  };
  auto midpoint = [&](int i, int j, int k) {
    return CartesianPoint(lo.x() + (i + 0.5) * h.x(),
                          lo.y() + (j + 0.5) * h.y(),
                          lo.z() + (k + 0.5) * h.z());
  };

  // voxels whose box meets a triangle bounding box get a direct evaluation
  std::vector<uint8_t> marked(static_cast<size_t>(n) * n * n, 0);
  for (const auto& t : surface.triangles) {
    CartesianPoint tlo = surface.vertices[t[0]], thi = tlo;
    for (int k = 1; k < 3; ++k) {
      tlo = tlo.cwiseMin(surface.vertices[t[k]]);
      thi = thi.cwiseMax(surface.vertices[t[k]]);
    }
    int i0[3], i1[3];
    for (int d = 0; d < 3; ++d) {
      i0[d] = std::clamp(
          static_cast<int>(std::floor((tlo[d] - lo[d]) / h[d])), 0, n - 1);
      i1[d] = std::clamp(
          static_cast<int>(std::floor((thi[d] - lo[d]) / h[d])), 0, n - 1);
    }
    for (int i = i0[0]; i <= i1[0]; ++i)
      for (int j = i0[1]; j <= i1[1]; ++j)
        for (int k = i0[2]; k <= i1[2]; ++k) marked[index(i, j, k)] = 1;
  }

  // flood fill the unmarked voxels; the degree is constant per component
  std::vector<int32_t> comp(marked.size(), -1);
  std::vector<int> comp_degree;
  WeakIdentityReport rep;
  std::vector<std::array<int, 3>> stack;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k) {
        const size_t root = index(i, j, k);
        if (marked[root] || comp[root] >= 0) continue;
        const int32_t cid = static_cast<int32_t>(comp_degree.size());
        const double w = winding(surface, midpoint(i, j, k), nullptr);
        const int deg0 = static_cast<int>(std::lround(w));
        ++rep.degree_evaluations;
        if (std::abs(w - deg0) >= 0.1) ++rep.residue_failures;
        comp_degree.push_back(deg0);
        comp[root] = cid;
        stack.push_back({i, j, k});
        while (!stack.empty()) {
          const auto [ci, cj, ck] = stack.back();
          stack.pop_back();
          static constexpr int d6[6][3] = {{1, 0, 0},  {-1, 0, 0}, {0, 1, 0},
                                           {0, -1, 0}, {0, 0, 1},  {0, 0, -1}};
          for (const auto& d : d6) {
            const int ni = ci + d[0], nj = cj + d[1], nk = ck + d[2];
            if (ni < 0 || nj < 0 || nk < 0 || ni >= n || nj >= n || nk >= n)
              continue;
            const size_t q = index(ni, nj, nk);
            if (marked[q] || comp[q] >= 0) continue;
            comp[q] = cid;
            stack.push_back({ni, nj, nk});
          }
        }
      }
  rep.components = static_cast<long long>(comp_degree.size());

  std::vector<double> contributions;
  contributions.reserve(marked.size() / 8);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k) {
        const size_t q = index(i, j, k);
        int deg;
        if (marked[q]) {
          const double w = winding(surface, midpoint(i, j, k), nullptr);
          deg = static_cast<int>(std::lround(w));
          ++rep.degree_evaluations;
          ++rep.surface_voxels;
          if (std::abs(w - deg) >= 0.1) ++rep.residue_failures;
        } else {
          deg = comp_degree[comp[q]];
        }
        if (deg != 0)
          contributions.push_back(deg * field.div(midpoint(i, j, k)) * vol);
      }
  rep.nodes = rep.surface_voxels + rep.components;

  double lhs = 0.0;
  for (double c : contributions) lhs += c;
  double rhs = 0.0;
  for (size_t i = 0; i < surface.triangles.size(); ++i)
    rhs += field.u(surface.centroids[i]).dot(surface.area_vectors[i]);

  rep.lhs = lhs;
  rep.rhs = rhs;
  rep.residual =
      std::abs(lhs - rhs) / std::max({std::abs(lhs), std::abs(rhs), 1e-12});
  rep.residue_fraction_ok = rep.residue_failures * 100 <= rep.nodes;
  return rep;
}

void write_off(const std::vector<CartesianPoint>& vertices,
               const std::vector<std::array<int, 3>>& triangles,
               const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path);
  out << "OFF\n" << vertices.size() << ' ' << triangles.size() << " 0\n";
  out.precision(17);
  for (const auto& v : vertices)
    out << v.x() << ' ' << v.y() << ' ' << v.z() << '\n';
  for (const auto& t : triangles)
    out << "3 " << t[0] << ' ' << t[1] << ' ' << t[2] << '\n';
}

}  // namespace cav
