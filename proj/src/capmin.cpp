#include "cav/capmin.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <stdexcept>

#include <Eigen/Sparse>

namespace cav {

namespace {

struct Tri {
  int a, b, c;
  double ccx, ccy, rr;  // circumcenter, squared circumradius
};

Tri make_tri(const std::vector<Eigen::Vector2d>& p, int a, int b, int c) {
  const Eigen::Vector2d A = p[a], B = p[b], C = p[c];
  const double d =
      2.0 * (A.x() * (B.y() - C.y()) + B.x() * (C.y() - A.y()) +
             C.x() * (A.y() - B.y()));
  const double a2 = A.squaredNorm(), b2 = B.squaredNorm(),
               c2 = C.squaredNorm();
  Tri t{a, b, c, 0, 0, 0};
  t.ccx = (a2 * (B.y() - C.y()) + b2 * (C.y() - A.y()) +
           c2 * (A.y() - B.y())) /
          d;
  t.ccy = (a2 * (C.x() - B.x()) + b2 * (A.x() - C.x()) +
           c2 * (B.x() - A.x())) /
          d;
  t.rr = (A - Eigen::Vector2d(t.ccx, t.ccy)).squaredNorm();
  return t;
}

}  // namespace

std::vector<std::array<int, 3>> delaunay(
    const std::vector<Eigen::Vector2d>& points) {
  std::vector<Eigen::Vector2d> p = points;
  Eigen::Vector2d lo = p.front(), hi = lo;
  for (const auto& q : p) {
    lo = lo.cwiseMin(q);
    hi = hi.cwiseMax(q);
  }
  const Eigen::Vector2d mid = 0.5 * (lo + hi);
  const double span = std::max((hi - lo).maxCoeff(), 1e-12);
  const int n = static_cast<int>(p.size());
  p.push_back(mid + Eigen::Vector2d(-20.0 * span, -10.0 * span));
  p.push_back(mid + Eigen::Vector2d(20.0 * span, -10.0 * span));
  p.push_back(mid + Eigen::Vector2d(0.0, 20.0 * span));

  std::vector<Tri> tris{make_tri(p, n, n + 1, n + 2)};
  for (int i = 0; i < n; ++i) {
    const Eigen::Vector2d q = p[i];
    std::map<std::pair<int, int>, int> edge_count;
    std::vector<Tri> keep;
    keep.reserve(tris.size());
    for (const Tri& t : tris) {
      const double dx = q.x() - t.ccx, dy = q.y() - t.ccy;
      if (dx * dx + dy * dy < t.rr * (1.0 + 1e-12)) {
        const int e[3][2] = {{t.a, t.b}, {t.b, t.c}, {t.c, t.a}};
        for (const auto& ed : e) edge_count[{ed[0], ed[1]}] += 1;
      } else {
        keep.push_back(t);
      }
    }
    for (const auto& [edge, cnt] : edge_count) {
      auto rev = edge_count.find({edge.second, edge.first});
      if (rev != edge_count.end()) continue;  // interior edge of the cavity
      keep.push_back(make_tri(p, edge.first, edge.second, i));
    }
    tris = std::move(keep);
  }

  std::vector<std::array<int, 3>> out;
  out.reserve(tris.size());
  for (const Tri& t : tris) {
    if (t.a >= n || t.b >= n || t.c >= n) continue;
    // orient counterclockwise
    const Eigen::Vector2d A = p[t.a], B = p[t.b], C = p[t.c];
    const double cross =
        (B.x() - A.x()) * (C.y() - A.y()) - (B.y() - A.y()) * (C.x() - A.x());
    if (cross >= 0)
      out.push_back({t.a, t.b, t.c});
    else
      out.push_back({t.a, t.c, t.b});
  }
  return out;
}

CapSolution solve_cap(const CapProblem& problem) {
  if (!problem.boundary_trace)
    throw std::invalid_argument("boundary_trace is required");
  double chart_radius = 0.0;
  if (problem.kind == CapKind::flat_disk) {
    if (!(problem.disk_radius > 0.0))
      throw std::invalid_argument("disk_radius must be positive");
    chart_radius = problem.disk_radius;
  } else {
    const double R = problem.sphere_radius, th = problem.cap_angular_radius;
    if (!(R > 0.0) || !(th > 0.0))
      throw std::invalid_argument("sphere and cap radii must be positive");
    if (2.0 * R * std::sin(th) >= R / 12.0)
      throw std::invalid_argument("cap too large: diameter must be < R/12");
    chart_radius = R * std::sin(th);
  }
  const double h = problem.mesh_h * chart_radius;
  if (!(h > 0.0) || h > 0.5 * chart_radius)
    throw std::invalid_argument("mesh_h must lie in (0, 0.5]");

  // hexagonal lattice interior, thinned near the boundary circle
  std::vector<Eigen::Vector2d> nodes;
  const double row = h * std::sqrt(3.0) / 2.0;
  const int jmax = static_cast<int>(std::ceil(chart_radius / row)) + 1;
  for (int j = -jmax; j <= jmax; ++j) {
    const double y = j * row;
    const double shift = (j % 2 == 0) ? 0.0 : 0.5 * h;
    const int imax = static_cast<int>(std::ceil(chart_radius / h)) + 1;
    for (int i = -imax; i <= imax; ++i) {
      const Eigen::Vector2d q(i * h + shift, y);
      if (q.norm() > chart_radius - 0.6 * h) continue;
      // deterministic microscopic jitter to break cocircular lattice ties
      const uint64_t hsh =
          (static_cast<uint64_t>(i + imax) * 2654435761ull) ^
          (static_cast<uint64_t>(j + jmax) * 40503ull);
      const double jx = ((hsh & 0xffff) / 65535.0 - 0.5) * 1e-7 * h;
      const double jy = (((hsh >> 16) & 0xffff) / 65535.0 - 0.5) * 1e-7 * h;
      nodes.emplace_back(q.x() + jx, q.y() + jy);
    }
  }
  const int n_interior = static_cast<int>(nodes.size());
  const int n_bd = std::max(
      12, static_cast<int>(std::lround(2.0 * M_PI * chart_radius / h)));
  std::vector<int> boundary;
  std::vector<double> boundary_phi;
  for (int k = 0; k < n_bd; ++k) {
    const double phi = 2.0 * M_PI * k / n_bd;
    boundary.push_back(static_cast<int>(nodes.size()));
    boundary_phi.push_back(phi);
    nodes.emplace_back(chart_radius * std::cos(phi),
                       chart_radius * std::sin(phi));
  }

  std::vector<std::array<int, 3>> tris = delaunay(nodes);

  double min_angle = 180.0;
  for (const auto& t : tris) {
    for (int k = 0; k < 3; ++k) {
      const Eigen::Vector2d v1 = nodes[t[(k + 1) % 3]] - nodes[t[k]];
      const Eigen::Vector2d v2 = nodes[t[(k + 2) % 3]] - nodes[t[k]];
      const double ang =
          std::acos(std::clamp(v1.dot(v2) / (v1.norm() * v2.norm()), -1.0,
                               1.0)) *
          180.0 / M_PI;
      min_angle = std::min(min_angle, ang);
    }
  }
  if (min_angle < 10.0)
    throw std::invalid_argument("mesh quality too low: min angle < 10 deg");

  const int N = static_cast<int>(nodes.size());

  // assemble the scalar form int (|Du|^2 - (xh . Du)^2), i.e. coefficient
  // matrix I - xh xh^T in gradient space with xh the chart position divided
  // by the sphere radius (identity for the flat disk); the three target
  // components decouple and share one stiffness pattern
  std::vector<Eigen::Triplet<double>> trip;
  trip.reserve(tris.size() * 27);
  for (const auto& t : tris) {
    const Eigen::Vector2d A = nodes[t[0]], B = nodes[t[1]], C = nodes[t[2]];
    const double area2 =
        (B.x() - A.x()) * (C.y() - A.y()) - (B.y() - A.y()) * (C.x() - A.x());
    const double area = 0.5 * area2;
    Eigen::Vector2d g[3];
    g[0] = Eigen::Vector2d(B.y() - C.y(), C.x() - B.x()) / area2;
    g[1] = Eigen::Vector2d(C.y() - A.y(), A.x() - C.x()) / area2;
    g[2] = Eigen::Vector2d(A.y() - B.y(), B.x() - A.x()) / area2;
    Eigen::Matrix2d coef = Eigen::Matrix2d::Identity();
    if (problem.kind == CapKind::spherical_cap) {
      const Eigen::Vector2d xh = (A + B + C) / (3.0 * problem.sphere_radius);
      coef -= xh * xh.transpose();
    }
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) {
        const double s = area * g[i].dot(coef * g[j]);
        for (int c = 0; c < 3; ++c)
          trip.emplace_back(3 * t[i] + c, 3 * t[j] + c, s);
      }
  }
  Eigen::SparseMatrix<double> K(3 * N, 3 * N);
  K.setFromTriplets(trip.begin(), trip.end());

  // Dirichlet elimination: solve on interior dofs only
  Eigen::VectorXd full = Eigen::VectorXd::Zero(3 * N);
  std::vector<bool> is_bd(N, false);
  for (size_t k = 0; k < boundary.size(); ++k) {
    is_bd[boundary[k]] = true;
    const Eigen::Vector3d g = problem.boundary_trace(boundary_phi[k]);
    for (int c = 0; c < 3; ++c) full[3 * boundary[k] + c] = g[c];
  }
  std::vector<int> dof(3 * N, -1);
  int n_free = 0;
  for (int i = 0; i < N; ++i)
    if (!is_bd[i])
      for (int c = 0; c < 3; ++c) dof[3 * i + c] = n_free++;

  std::vector<Eigen::Triplet<double>> atrip;
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(n_free);
  for (int col = 0; col < K.outerSize(); ++col)
    for (Eigen::SparseMatrix<double>::InnerIterator it(K, col); it; ++it) {
      const int fr = dof[it.row()], fc = dof[it.col()];
      if (fr >= 0 && fc >= 0)
        atrip.emplace_back(fr, fc, it.value());
      else if (fr >= 0)
        rhs[fr] -= it.value() * full[it.col()];
    }
  Eigen::SparseMatrix<double> Aff(n_free, n_free);
  Aff.setFromTriplets(atrip.begin(), atrip.end());
  Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> solver(Aff);
  if (solver.info() != Eigen::Success)
    throw std::runtime_error("FEM factorization failed");
  const Eigen::VectorXd x = solver.solve(rhs);
  for (int i = 0; i < 3 * N; ++i)
    if (dof[i] >= 0) full[i] = x[dof[i]];

  CapSolution sol;
  sol.chart_nodes = nodes;
  sol.triangles = tris;
  sol.boundary = boundary;
  sol.min_angle_deg = min_angle;
  sol.values.resize(N, 3);
  for (int i = 0; i < N; ++i)
    sol.values.row(i) = full.segment<3>(3 * i).transpose();
  sol.energy = full.dot(K * full);
  for (size_t k = 0; k < boundary.size(); ++k) {
    const Eigen::Vector3d g = problem.boundary_trace(boundary_phi[k]);
    sol.boundary_residual =
        std::max(sol.boundary_residual,
                 (sol.values.row(boundary[k]).transpose() - g).norm());
  }
  return sol;
}

}  // namespace cav
