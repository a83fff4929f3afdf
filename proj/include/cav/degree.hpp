#pragma once

#include <array>
#include <functional>
#include <string>
#include <vector>

#include "cav/geometry.hpp"

namespace cav {

struct TriangulatedSphere {
  CartesianPoint center = CartesianPoint::Zero();
  double radius = 1.0;
  std::vector<CartesianPoint> vertices;
  std::vector<std::array<int, 3>> triangles;
};

/// Outward-oriented geodesic sphere with 20 * 4^level triangles.
TriangulatedSphere icosphere(const CartesianPoint& center, double radius,
                             int level);

/// Latitude/longitude sphere mesh whose polar rows are bisected until the
/// image of every row interval under `f` (sampled along two meridians) has
/// chord length below `max_image_diam`. Pushing this mesh through `f` then
/// yields triangles of controlled image size even where `f` is only
/// Holder-continuous, which is what the 10x-diameter degree guard needs.
/// The azimuthal segment count is chosen so image rings meet the same bound.
/// Throws std::invalid_argument when the requested resolution would exceed
/// thirty-three million triangles.
TriangulatedSphere graded_sphere_mesh(
    const std::function<CartesianPoint(const CartesianPoint&)>& f,
    const CartesianPoint& center, double radius, double max_image_diam);

/// Checks that every edge is shared by exactly two triangles with opposite
/// orientation and that V - E + F = 2.
bool is_closed_oriented(const std::vector<CartesianPoint>& vertices,
                        const std::vector<std::array<int, 3>>& triangles);

/// Far-field cluster of a contiguous triangle range: the solid angle of the
/// whole block seen from a distant point is approximated by a single dipole
/// (aggregate area vector at the area-weighted centroid), which makes degree
/// queries on multi-million-triangle surfaces run in roughly square-root
/// time. Any approximation error shows up in the degree residue, which the
/// residue guard already polices.
struct SurfaceBlock {
  std::size_t begin = 0, end = 0;  // range in ImageSurface::order
  CartesianPoint box_lo = CartesianPoint::Zero();
  CartesianPoint box_hi = CartesianPoint::Zero();
  CartesianPoint center = CartesianPoint::Zero();
  CartesianPoint dipole = CartesianPoint::Zero();
  double radius = 0.0;    // half diagonal of the bounding box
  double max_diam = 0.0;  // largest triangle diameter in the block
};

/// Image of a triangulated sphere under a continuous map, with per-triangle
/// geometry cached for degree evaluation.
struct ImageSurface {
  std::vector<CartesianPoint> vertices;
  std::vector<std::array<int, 3>> triangles;
  std::vector<CartesianPoint> centroids;
  std::vector<CartesianPoint> area_vectors;  // 0.5 (b-a) x (c-a)
  std::vector<double> diameters;
  std::vector<int> order;  // spatial permutation of triangle indices
  std::vector<SurfaceBlock> blocks;
  double max_diameter = 0.0;
};

ImageSurface push_mesh(
    const std::function<CartesianPoint(const CartesianPoint&)>& f,
    const TriangulatedSphere& mesh);

struct DegreeResult {
  int degree = 0;
  double residue = 0.0;       // distance of angle sum / 4 pi to the integer
  double guard_margin = 0.0;  // min over triangles of dist(y) / diameter
  bool guard_ok = false;      // guard_margin > 10
  bool residue_ok = false;    // residue < 0.1
};

/// Topological degree of the surface around y via the signed solid angle sum.
DegreeResult degree_at(const ImageSurface& surface, const CartesianPoint& y);

/// True when the degree at y is nonzero and both guards pass.
bool in_topological_image(const ImageSurface& surface, const CartesianPoint& y);

struct VectorField {
  std::string name;
  std::function<CartesianPoint(const CartesianPoint&)> u;
  std::function<double(const CartesianPoint&)> div;
};

VectorField linear_field();     // u(y) = y / 3, div = 1
VectorField quadratic_field();  // u(y) = (y1^2, y2^2, y3^2)/2, div = y1+y2+y3

struct WeakIdentityReport {
  double lhs = 0.0;  // int deg(y) div u(y) dy, midpoint voxel rule
  double rhs = 0.0;  // sum over triangles of u(centroid) . area vector
  double residual = 0.0;
  long long components = 0;
  long long surface_voxels = 0;
  long long degree_evaluations = 0;
  long long residue_failures = 0;
  long long nodes = 0;
  bool residue_fraction_ok = false;  // failures <= 1% of nodes
};

/// Verifies int deg(f, y) div u dy = int_{boundary} (u o f) . n via a voxel
/// midpoint rule. Voxels touching the surface are evaluated directly; the
/// rest inherit the degree of their flood-fill component.
WeakIdentityReport verify_weak_identity(const ImageSurface& surface,
                                        const VectorField& field, int grid_n);

void write_off(const std::vector<CartesianPoint>& vertices,
               const std::vector<std::array<int, 3>>& triangles,
               const std::string& path);

}  // namespace cav
