#pragma once

// 2D triangular mesh with a tagged boundary split into a clamped part (D)
// and a traction part (N), plus file I/O and the geometry queries used by
// assembly. Meshes are immutable after validation; concurrent reads are safe.

#include <Eigen/Dense>
#include <array>
#include <iosfwd>
#include <set>
#include <string>
#include <vector>

#include "velast/errors.hpp"

namespace velast {

enum class Side { left, right, bottom, top };

struct BoundaryEdge {
  int a = 0;       // node indices, 0-based in memory (1-based in files)
  int b = 0;
  char tag = 'N';  // 'D' clamped, 'N' traction

  bool operator==(const BoundaryEdge&) const = default;
};

struct Mesh {
  std::vector<Eigen::Vector2d> nodes;
  std::vector<std::array<int, 3>> triangles;  // counterclockwise
  std::vector<BoundaryEdge> boundary_edges;

  // Filled by validation: adjacent triangle and the vertex opposite to each
  // boundary edge, used to orient normals outward.
  std::vector<int> edge_triangle;
  std::vector<int> edge_opposite_node;

  bool operator==(const Mesh& o) const {
    return nodes == o.nodes && triangles == o.triangles &&
           boundary_edges == o.boundary_edges;
  }
};

// Checks all mesh invariants (orientation, boundary tiling, both boundary
// parts nonempty) and fills the adjacency fields.
void validate_mesh(Mesh& mesh);

Mesh load_mesh(std::istream& in);
Mesh load_mesh(const std::string& path);
void write_mesh(const Mesh& mesh, std::ostream& out);
void write_mesh(const Mesh& mesh, const std::string& path);

// Uniform triangulation of the unit square into 2*nx*ny triangles; the
// listed sides are clamped, the rest carry tractions.
Mesh structured_square_mesh(int nx, int ny, const std::set<Side>& dirichlet_sides);

double triangle_area(const Mesh& mesh, int t);
double total_area(const Mesh& mesh);
double edge_length(const Mesh& mesh, int e);
Eigen::Vector2d edge_midpoint(const Mesh& mesh, int e);

// Outward unit normal, recomputed from the adjacent triangle (edge
// orientation in the file carries no meaning).
Eigen::Vector2d edge_normal(const Mesh& mesh, int e);

// Total length of the traction boundary.
double neumann_measure(const Mesh& mesh);

}  // namespace velast
