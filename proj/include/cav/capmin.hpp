#pragma once

#include <array>
#include <functional>
#include <vector>

#include <Eigen/Dense>

namespace cav {

enum class CapKind { flat_disk, spherical_cap };

/// Energy minimization problem for maps into a small spherical cap (or a
/// flat disk as the degenerate analogue). The cap is projected along its
/// axis to a planar chart disk; each target component independently
/// minimizes the quadratic form
///   int (|Du|^2 - (xhat . Du)^2),  xhat = chart position / sphere radius
/// (plain Dirichlet energy for the flat disk), with Dirichlet data given by
/// boundary_trace on the chart circle, parametrized by the polar angle phi.
struct CapProblem {
  CapKind kind = CapKind::flat_disk;
  double disk_radius = 1.0;          // chart radius for flat_disk
  double sphere_radius = 1.0;        // target sphere radius for spherical_cap
  double cap_angular_radius = 0.04;  // polar radius of the cap
  std::function<Eigen::Vector3d(double)> boundary_trace;
  double mesh_h = 0.05;
};

struct CapSolution {
  std::vector<Eigen::Vector2d> chart_nodes;
  std::vector<std::array<int, 3>> triangles;
  std::vector<int> boundary;  // indices of boundary nodes
  Eigen::MatrixX3d values;
  double energy = 0.0;
  double boundary_residual = 0.0;  // max |values - trace| on boundary nodes
  double min_angle_deg = 0.0;
};

/// Delaunay triangulation (Bowyer-Watson) of a planar point set.
std::vector<std::array<int, 3>> delaunay(
    const std::vector<Eigen::Vector2d>& points);

/// Solves the cap problem with P1 finite elements on a hexagonal-lattice
/// disk mesh. Throws std::invalid_argument when a spherical cap is too
/// large (cap diameter must stay below sphere_radius / 12) or the mesh
/// quality drops below a 10 degree minimum angle.
CapSolution solve_cap(const CapProblem& problem);

}  // namespace cav
