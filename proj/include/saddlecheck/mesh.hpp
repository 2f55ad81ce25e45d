#pragma once

#include <Eigen/Dense>

#include <array>
#include <vector>

namespace saddlecheck {

/// Uniform right-triangle mesh of the unit square. Every one of the n² cells
/// is split along its lower-left to upper-right diagonal.
struct Mesh {
  int n = 0;
  std::vector<Eigen::Vector2d> vertices;
  std::vector<std::array<int, 3>> triangles;  // counter-clockwise
  std::vector<std::array<int, 2>> edges;      // (lo, hi) vertex indices, lo < hi
  /// triangle_edges[t][i] is the edge opposite local vertex i.
  std::vector<std::array<int, 3>> triangle_edges;
  std::vector<bool> boundary_vertex;
  std::vector<bool> boundary_edge;

  int num_vertices() const { return static_cast<int>(vertices.size()); }
  int num_triangles() const { return static_cast<int>(triangles.size()); }
  int num_edges() const { return static_cast<int>(edges.size()); }

  double signed_area(int t) const;
  double edge_length(int e) const;
  Eigen::Vector2d edge_midpoint(int e) const;
  /// Unit normal of edge e: its tangent (hi - lo) rotated clockwise.
  Eigen::Vector2d edge_normal(int e) const;
};

Mesh build_unit_square_mesh(int n);

struct BoundaryEntities {
  std::vector<int> vertices;
  std::vector<int> edges;
};

/// Boundary vertices and edges, derived from edge-triangle incidence counts.
BoundaryEntities boundary_entities(const Mesh& mesh);

}  // namespace saddlecheck
