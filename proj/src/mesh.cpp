#include "saddlecheck/mesh.hpp"

#include <algorithm>
#include <map>
#include <stdexcept>

#include "saddlecheck/errors.hpp"

namespace saddlecheck {

double Mesh::signed_area(int t) const {
  const auto& tri = triangles[t];
  const Eigen::Vector2d a = vertices[tri[1]] - vertices[tri[0]];
  const Eigen::Vector2d b = vertices[tri[2]] - vertices[tri[0]];
  return 0.5 * (a.x() * b.y() - a.y() * b.x());
}

double Mesh::edge_length(int e) const {
  return (vertices[edges[e][1]] - vertices[edges[e][0]]).norm();
}

Eigen::Vector2d Mesh::edge_midpoint(int e) const {
  return 0.5 * (vertices[edges[e][0]] + vertices[edges[e][1]]);
}

Eigen::Vector2d Mesh::edge_normal(int e) const {
  const Eigen::Vector2d t = vertices[edges[e][1]] - vertices[edges[e][0]];
  return Eigen::Vector2d(t.y(), -t.x()) / t.norm();
}

Mesh build_unit_square_mesh(int n) {
  if (n < 1) throw Error(ErrorCode::ValidationError, "mesh subdivision must be >= 1");
  Mesh mesh;
  mesh.n = n;
  const double h = 1.0 / n;
  auto vid = [n](int i, int j) { return j * (n + 1) + i; };
  for (int j = 0; j <= n; ++j)
    for (int i = 0; i <= n; ++i) mesh.vertices.emplace_back(i * h, j * h);

  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < n; ++i) {
      const int v00 = vid(i, j), v10 = vid(i + 1, j), v01 = vid(i, j + 1), v11 = vid(i + 1, j + 1);
      mesh.triangles.push_back({v00, v10, v11});
      mesh.triangles.push_back({v00, v11, v01});
    }
  }

  std::map<std::pair<int, int>, int> edge_index;
  std::vector<int> incidence;
  mesh.triangle_edges.resize(mesh.triangles.size());
  for (std::size_t t = 0; t < mesh.triangles.size(); ++t) {
    const auto& tri = mesh.triangles[t];
    for (int local = 0; local < 3; ++local) {
      int a = tri[(local + 1) % 3], b = tri[(local + 2) % 3];
      if (a > b) std::swap(a, b);
      auto [it, inserted] = edge_index.emplace(std::make_pair(a, b), mesh.num_edges());
      if (inserted) {
        mesh.edges.push_back({a, b});
        incidence.push_back(0);
      }
      ++incidence[it->second];
      mesh.triangle_edges[t][local] = it->second;
    }
  }

  mesh.boundary_edge.assign(mesh.edges.size(), false);
  mesh.boundary_vertex.assign(mesh.vertices.size(), false);
  for (int e = 0; e < mesh.num_edges(); ++e) {
    if (incidence[e] == 1) {
      mesh.boundary_edge[e] = true;
      mesh.boundary_vertex[mesh.edges[e][0]] = true;
      mesh.boundary_vertex[mesh.edges[e][1]] = true;
    }
  }
  return mesh;
}

BoundaryEntities boundary_entities(const Mesh& mesh) {
  BoundaryEntities out;
  for (int v = 0; v < mesh.num_vertices(); ++v)
    if (mesh.boundary_vertex[v]) out.vertices.push_back(v);
  for (int e = 0; e < mesh.num_edges(); ++e)
    if (mesh.boundary_edge[e]) out.edges.push_back(e);
  return out;
}

}  // namespace saddlecheck
