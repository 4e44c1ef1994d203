#pragma once

#include <Eigen/Core>
#include <array>
#include <cmath>
#include <map>
#include <stdexcept>
#include <vector>

namespace chns {

using Vec2 = Eigen::Vector2d;

struct Rect {
  double x0 = 0.0, y0 = 0.0, x1 = 1.0, y1 = 1.0;

  double width() const { return x1 - x0; }
  double height() const { return y1 - y0; }
  double area() const { return width() * height(); }
};

/// Conforming triangulation of an axis-aligned rectangle. Immutable after
/// construction; all derived tables (edges, boundary) are built eagerly.
struct Mesh {
  std::vector<Vec2> vertices;
  std::vector<std::array<int, 3>> triangles;  // counter-clockwise

  // Unique edges as sorted vertex pairs (a < b); triangle_edges[t][k] is the
  // edge opposite local vertex k, i.e. the edge {t[k+1], t[k+2]}.
  std::vector<std::array<int, 2>> edges;
  std::vector<std::array<int, 3>> triangle_edges;

  std::vector<int> boundary_vertices;                // sorted
  std::vector<std::array<int, 2>> boundary_edges;    // oriented as traversed by their triangle
  std::vector<char> edge_on_boundary;                // per edge id
  double h_max = 0.0;

  int vertex_count() const { return static_cast<int>(vertices.size()); }
  int triangle_count() const { return static_cast<int>(triangles.size()); }
  int edge_count() const { return static_cast<int>(edges.size()); }

  double signed_area(int t) const {
    const auto& tri = triangles[t];
    const Vec2 a = vertices[tri[0]], b = vertices[tri[1]], c = vertices[tri[2]];
    return 0.5 * ((b.x() - a.x()) * (c.y() - a.y()) - (c.x() - a.x()) * (b.y() - a.y()));
  }

  double total_area() const {
    double s = 0.0;
    for (int t = 0; t < triangle_count(); ++t) s += signed_area(t);
    return s;
  }

  bool is_boundary_vertex(int v) const {
    return std::binary_search(boundary_vertices.begin(), boundary_vertices.end(), v);
  }
};

namespace detail {

inline void build_topology(Mesh& mesh) {
  std::map<std::array<int, 2>, int> edge_ids;
  std::map<std::array<int, 2>, int> edge_use;
  mesh.edges.clear();
  mesh.triangle_edges.assign(mesh.triangles.size(), {-1, -1, -1});

  for (std::size_t t = 0; t < mesh.triangles.size(); ++t) {
    const auto& tri = mesh.triangles[t];
    for (int k = 0; k < 3; ++k) {
      const int a = tri[(k + 1) % 3];
      const int b = tri[(k + 2) % 3];
      const std::array<int, 2> key{std::min(a, b), std::max(a, b)};
      auto it = edge_ids.find(key);
      if (it == edge_ids.end()) {
        it = edge_ids.emplace(key, static_cast<int>(mesh.edges.size())).first;
        mesh.edges.push_back(key);
      }
      mesh.triangle_edges[t][k] = it->second;
      edge_use[key] += 1;
    }
  }

  mesh.boundary_edges.clear();
  mesh.edge_on_boundary.assign(mesh.edges.size(), 0);
  std::vector<char> on_boundary(mesh.vertices.size(), 0);
  for (std::size_t t = 0; t < mesh.triangles.size(); ++t) {
    const auto& tri = mesh.triangles[t];
    for (int k = 0; k < 3; ++k) {
      const int a = tri[(k + 1) % 3];
      const int b = tri[(k + 2) % 3];
      const std::array<int, 2> key{std::min(a, b), std::max(a, b)};
      if (edge_use.at(key) == 1) {
        mesh.boundary_edges.push_back({a, b});  // keeps the triangle's orientation
        mesh.edge_on_boundary[mesh.triangle_edges[t][k]] = 1;
        on_boundary[a] = on_boundary[b] = 1;
      }
    }
  }

  mesh.boundary_vertices.clear();
  for (std::size_t v = 0; v < mesh.vertices.size(); ++v)
    if (on_boundary[v]) mesh.boundary_vertices.push_back(static_cast<int>(v));

  double hmax = 0.0;
  for (const auto& e : mesh.edges)
    hmax = std::max(hmax, (mesh.vertices[e[0]] - mesh.vertices[e[1]]).norm());
  mesh.h_max = hmax;
}

inline void check_mesh(const Mesh& mesh, double expected_area) {
  for (int t = 0; t < mesh.triangle_count(); ++t)
    if (!(mesh.signed_area(t) > 0.0))
      throw std::runtime_error("mesh: triangle " + std::to_string(t) + " is not positively oriented");
  const double total = mesh.total_area();
  if (std::abs(total - expected_area) > 1e-12 * std::max(1.0, expected_area))
    throw std::runtime_error("mesh: triangle areas do not partition the rectangle");
  // Conformity: every interior edge is shared by exactly two triangles. Edge
  // multiplicities were established during topology construction; here we only
  // re-count as a guard against degenerate input.
  std::map<std::array<int, 2>, int> uses;
  for (std::size_t t = 0; t < mesh.triangles.size(); ++t)
    for (int k = 0; k < 3; ++k) {
      const auto& tri = mesh.triangles[t];
      const int a = tri[(k + 1) % 3], b = tri[(k + 2) % 3];
      uses[{std::min(a, b), std::max(a, b)}] += 1;
    }
  for (const auto& [key, n] : uses)
    if (n != 1 && n != 2) throw std::runtime_error("mesh: nonconforming edge");
}

}  // namespace detail

/// Structured triangulation of `rect` with nx-by-ny cells, each split along
/// the lower-left to upper-right diagonal. Deterministic vertex numbering
/// (row-major) so repeated builds are bit-identical.
inline Mesh build_structured_mesh(int nx, int ny, const Rect& rect = Rect{}) {
  if (nx < 1 || ny < 1) throw std::invalid_argument("build_structured_mesh: cell counts must be >= 1");
  if (!(rect.x1 > rect.x0) || !(rect.y1 > rect.y0))
    throw std::invalid_argument("build_structured_mesh: degenerate rectangle");

  Mesh mesh;
  mesh.vertices.reserve(static_cast<std::size_t>(nx + 1) * (ny + 1));
  for (int j = 0; j <= ny; ++j)
    for (int i = 0; i <= nx; ++i)
      mesh.vertices.emplace_back(rect.x0 + rect.width() * i / nx, rect.y0 + rect.height() * j / ny);

  const auto vid = [nx](int i, int j) { return j * (nx + 1) + i; };
  mesh.triangles.reserve(static_cast<std::size_t>(2) * nx * ny);
  for (int j = 0; j < ny; ++j)
    for (int i = 0; i < nx; ++i) {
      const int a = vid(i, j), b = vid(i + 1, j), c = vid(i + 1, j + 1), d = vid(i, j + 1);
      mesh.triangles.push_back({a, b, c});
      mesh.triangles.push_back({a, c, d});
    }

  detail::build_topology(mesh);
  detail::check_mesh(mesh, rect.area());
  return mesh;
}

/// Red refinement: every triangle is split into four via edge midpoints.
/// Midpoints are identified through the parent edge table, so the refined
/// mesh is conforming by construction and h_max halves.
inline Mesh refine_uniform(const Mesh& parent) {
  if (parent.triangles.empty()) throw std::invalid_argument("refine_uniform: empty mesh");

  Mesh mesh;
  mesh.vertices = parent.vertices;
  const int nv = parent.vertex_count();
  mesh.vertices.reserve(nv + parent.edge_count());
  for (const auto& e : parent.edges)
    mesh.vertices.emplace_back(0.5 * (parent.vertices[e[0]] + parent.vertices[e[1]]));

  mesh.triangles.reserve(4 * parent.triangles.size());
  for (std::size_t t = 0; t < parent.triangles.size(); ++t) {
    const auto& tri = parent.triangles[t];
    const int m0 = nv + parent.triangle_edges[t][0];  // midpoint of {v1, v2}
    const int m1 = nv + parent.triangle_edges[t][1];  // midpoint of {v2, v0}
    const int m2 = nv + parent.triangle_edges[t][2];  // midpoint of {v0, v1}
    mesh.triangles.push_back({tri[0], m2, m1});
    mesh.triangles.push_back({m2, tri[1], m0});
    mesh.triangles.push_back({m1, m0, tri[2]});
    mesh.triangles.push_back({m2, m0, m1});
  }

  detail::build_topology(mesh);
  detail::check_mesh(mesh, parent.total_area());
  return mesh;
}

}  // namespace chns
