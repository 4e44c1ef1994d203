#pragma once

#include <Eigen/Core>
#include <functional>
#include <memory>
#include <stdexcept>
#include <vector>

#include "chns/mesh.hpp"

namespace chns {

using Vector = Eigen::VectorXd;
using Mat2 = Eigen::Matrix2d;

enum class SpaceKind {
  P1Scalar,          // continuous piecewise linears (phase field, chemical potential)
  P1ScalarMeanZero,  // same basis, fields constrained to zero mean (pressure)
  P2VectorDirichlet  // continuous piecewise quadratic vectors, zero on the boundary
};

/// Degree-of-freedom layout over one mesh. Scalar spaces carry one dof per
/// vertex. The vector space carries two dofs per node, nodes being vertices
/// followed by edge midpoints; dof = 2*node + component.
class FunctionSpace {
 public:
  FunctionSpace(SpaceKind kind, std::shared_ptr<const Mesh> mesh) : kind_(kind), mesh_(std::move(mesh)) {
    const Mesh& m = *mesh_;
    if (kind_ == SpaceKind::P2VectorDirichlet) {
      node_count_ = m.vertex_count() + m.edge_count();
      dof_count_ = 2 * node_count_;
      dof_coords_.resize(dof_count_);
      dirichlet_mask_.assign(dof_count_, 0);
      for (int v = 0; v < m.vertex_count(); ++v) {
        dof_coords_[2 * v] = dof_coords_[2 * v + 1] = m.vertices[v];
        if (m.is_boundary_vertex(v)) dirichlet_mask_[2 * v] = dirichlet_mask_[2 * v + 1] = 1;
      }
      for (int e = 0; e < m.edge_count(); ++e) {
        const int node = m.vertex_count() + e;
        dof_coords_[2 * node] = dof_coords_[2 * node + 1] =
            0.5 * (m.vertices[m.edges[e][0]] + m.vertices[m.edges[e][1]]);
        if (m.edge_on_boundary[e]) dirichlet_mask_[2 * node] = dirichlet_mask_[2 * node + 1] = 1;
      }
    } else {
      node_count_ = m.vertex_count();
      dof_count_ = node_count_;
      dof_coords_.resize(dof_count_);
      for (int v = 0; v < m.vertex_count(); ++v) dof_coords_[v] = m.vertices[v];
    }
  }

  SpaceKind kind() const { return kind_; }
  const Mesh& mesh() const { return *mesh_; }
  std::shared_ptr<const Mesh> mesh_ptr() const { return mesh_; }
  int dof_count() const { return dof_count_; }
  int node_count() const { return node_count_; }
  bool mean_zero() const { return kind_ == SpaceKind::P1ScalarMeanZero; }
  bool vector_valued() const { return kind_ == SpaceKind::P2VectorDirichlet; }
  const std::vector<Vec2>& dof_coords() const { return dof_coords_; }
  const std::vector<char>& dirichlet_mask() const { return dirichlet_mask_; }
  bool is_dirichlet(int dof) const { return !dirichlet_mask_.empty() && dirichlet_mask_[dof]; }

  bool compatible_with(const FunctionSpace& other) const {
    return kind_ == other.kind_ && mesh_.get() == other.mesh_.get();
  }

 private:
  SpaceKind kind_;
  std::shared_ptr<const Mesh> mesh_;
  int node_count_ = 0;
  int dof_count_ = 0;
  std::vector<Vec2> dof_coords_;
  std::vector<char> dirichlet_mask_;
};

inline std::shared_ptr<const FunctionSpace> make_p1_space(std::shared_ptr<const Mesh> mesh) {
  return std::make_shared<FunctionSpace>(SpaceKind::P1Scalar, std::move(mesh));
}
inline std::shared_ptr<const FunctionSpace> make_pressure_space(std::shared_ptr<const Mesh> mesh) {
  return std::make_shared<FunctionSpace>(SpaceKind::P1ScalarMeanZero, std::move(mesh));
}
inline std::shared_ptr<const FunctionSpace> make_velocity_space(std::shared_ptr<const Mesh> mesh) {
  return std::make_shared<FunctionSpace>(SpaceKind::P2VectorDirichlet, std::move(mesh));
}

/// Coefficient vector of one finite element function.
struct FieldVector {
  std::shared_ptr<const FunctionSpace> space;
  Vector coeffs;

  FieldVector() = default;
  explicit FieldVector(std::shared_ptr<const FunctionSpace> s)
      : space(std::move(s)), coeffs(Vector::Zero(space->dof_count())) {}
  FieldVector(std::shared_ptr<const FunctionSpace> s, Vector c) : space(std::move(s)), coeffs(std::move(c)) {
    if (coeffs.size() != space->dof_count()) throw std::invalid_argument("FieldVector: coefficient length mismatch");
  }

  int size() const { return static_cast<int>(coeffs.size()); }
};

inline void require_same_space(const FieldVector& a, const FieldVector& b, const char* where) {
  if (!a.space || !b.space || !a.space->compatible_with(*b.space))
    throw std::invalid_argument(std::string(where) + ": fields live on different spaces");
}

/// Nodal interpolant of a scalar function into a P1 space.
inline FieldVector interpolate(std::shared_ptr<const FunctionSpace> space,
                               const std::function<double(Vec2)>& f) {
  if (space->vector_valued()) throw std::invalid_argument("interpolate: scalar function into vector space");
  FieldVector out(space);
  for (int i = 0; i < space->dof_count(); ++i) out.coeffs[i] = f(space->dof_coords()[i]);
  return out;
}

/// Nodal interpolant of a vector function into the P2 velocity space.
/// Dirichlet dofs are pinned to zero regardless of the sampled value.
inline FieldVector interpolate_vector(std::shared_ptr<const FunctionSpace> space,
                                      const std::function<Vec2(Vec2)>& f) {
  if (!space->vector_valued()) throw std::invalid_argument("interpolate_vector: vector function into scalar space");
  FieldVector out(space);
  for (int n = 0; n < space->node_count(); ++n) {
    const Vec2 value = f(space->dof_coords()[2 * n]);
    out.coeffs[2 * n] = space->is_dirichlet(2 * n) ? 0.0 : value.x();
    out.coeffs[2 * n + 1] = space->is_dirichlet(2 * n + 1) ? 0.0 : value.y();
  }
  return out;
}

}  // namespace chns
