#pragma once

#include <Eigen/Core>
#include <Eigen/LU>
#include <Eigen/Sparse>
#include <array>
#include <functional>
#include <vector>

#include "chns/quadrature.hpp"
#include "chns/space.hpp"

namespace chns {

using SparseMatrix = Eigen::SparseMatrix<double>;
using Triplet = Eigen::Triplet<double>;

/// Convex-splitting nonlinearity chi(a, b) = ((a^2 + b^2)/2) * ((a + b)/2)
/// and its partial derivative with respect to the new value a.
inline double chi(double a, double b) { return 0.5 * (a * a + b * b) * 0.5 * (a + b); }
inline double chi_dnew(double a, double b) { return 0.5 * a * (a + b) + 0.25 * (a * a + b * b); }

namespace fem {

// Reference P1 basis: the barycentric coordinates themselves.
inline std::array<double, 3> p1_values(const std::array<double, 3>& l) { return l; }
constexpr std::array<std::array<double, 2>, 3> p1_ref_grads{{{-1.0, -1.0}, {1.0, 0.0}, {0.0, 1.0}}};

// Reference P2 basis: vertex functions l_i(2 l_i - 1), then edge functions
// 4 l_{k+1} l_{k+2} for the midpoint opposite vertex k (matching
// Mesh::triangle_edges ordering).
inline std::array<double, 6> p2_values(const std::array<double, 3>& l) {
  return {l[0] * (2 * l[0] - 1), l[1] * (2 * l[1] - 1), l[2] * (2 * l[2] - 1),
          4 * l[1] * l[2], 4 * l[2] * l[0], 4 * l[0] * l[1]};
}

inline std::array<std::array<double, 2>, 6> p2_ref_grads(const std::array<double, 3>& l) {
  // d l0 = (-1,-1), d l1 = (1,0), d l2 = (0,1)
  const double g0[2] = {-1.0, -1.0}, g1[2] = {1.0, 0.0}, g2[2] = {0.0, 1.0};
  std::array<std::array<double, 2>, 6> g{};
  for (int d = 0; d < 2; ++d) {
    g[0][d] = (4 * l[0] - 1) * g0[d];
    g[1][d] = (4 * l[1] - 1) * g1[d];
    g[2][d] = (4 * l[2] - 1) * g2[d];
    g[3][d] = 4 * (l[1] * g2[d] + l[2] * g1[d]);
    g[4][d] = 4 * (l[2] * g0[d] + l[0] * g2[d]);
    g[5][d] = 4 * (l[0] * g1[d] + l[1] * g0[d]);
  }
  return g;
}

struct ElementGeometry {
  double area;
  Mat2 inv_jac_t;  // maps reference gradients to physical gradients
  std::array<Vec2, 3> corners;

  Vec2 point(const std::array<double, 3>& l) const {
    return l[0] * corners[0] + l[1] * corners[1] + l[2] * corners[2];
  }
};

inline ElementGeometry element_geometry(const Mesh& mesh, int t) {
  const auto& tri = mesh.triangles[t];
  ElementGeometry g;
  g.corners = {mesh.vertices[tri[0]], mesh.vertices[tri[1]], mesh.vertices[tri[2]]};
  Mat2 jac;
  jac.col(0) = g.corners[1] - g.corners[0];
  jac.col(1) = g.corners[2] - g.corners[0];
  const double det = jac(0, 0) * jac(1, 1) - jac(0, 1) * jac(1, 0);
  g.area = 0.5 * det;
  g.inv_jac_t = jac.inverse().transpose();
  return g;
}

// Per-quadrature-point tabulation shared by all elements of a call.
struct Tabulation {
  std::vector<std::array<double, 3>> p1;
  std::vector<std::array<double, 6>> p2;
  std::vector<std::array<std::array<double, 2>, 6>> p2_ref_grad;

  explicit Tabulation(const Quadrature& q) {
    p1.reserve(q.size());
    p2.reserve(q.size());
    p2_ref_grad.reserve(q.size());
    for (const auto& l : q.points) {
      p1.push_back(p1_values(l));
      p2.push_back(p2_values(l));
      p2_ref_grad.push_back(p2_ref_grads(l));
    }
  }
};

inline Vec2 physical_grad(const Mat2& inv_jac_t, const std::array<double, 2>& ref_grad) {
  return inv_jac_t * Vec2(ref_grad[0], ref_grad[1]);
}

// Local-to-global dof maps. P1: vertex ids. P2 scalar nodes: vertices then
// edge nodes offset by the vertex count.
inline std::array<int, 3> p1_dofs(const Mesh& mesh, int t) {
  const auto& tri = mesh.triangles[t];
  return {tri[0], tri[1], tri[2]};
}

inline std::array<int, 6> p2_nodes(const Mesh& mesh, int t) {
  const auto& tri = mesh.triangles[t];
  const int nv = mesh.vertex_count();
  return {tri[0], tri[1], tri[2], nv + mesh.triangle_edges[t][0], nv + mesh.triangle_edges[t][1],
          nv + mesh.triangle_edges[t][2]};
}

}  // namespace fem

/// Mass matrix: (f, g) over the given space. Vector spaces produce a
/// component-block-diagonal matrix.
inline SparseMatrix assemble_mass(const FunctionSpace& space, const Quadrature& quad = Quadrature::degree6()) {
  const Mesh& mesh = space.mesh();
  const fem::Tabulation tab(quad);
  std::vector<Triplet> trips;

  if (!space.vector_valued()) {
    trips.reserve(mesh.triangle_count() * 9);
    for (int t = 0; t < mesh.triangle_count(); ++t) {
      const auto geom = fem::element_geometry(mesh, t);
      const auto dofs = fem::p1_dofs(mesh, t);
      double local[3][3] = {};
      for (int q = 0; q < quad.size(); ++q) {
        const double w = quad.weights[q] * geom.area;
        for (int i = 0; i < 3; ++i)
          for (int j = 0; j < 3; ++j) local[i][j] += w * tab.p1[q][i] * tab.p1[q][j];
      }
      for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) trips.emplace_back(dofs[i], dofs[j], local[i][j]);
    }
  } else {
    trips.reserve(mesh.triangle_count() * 72);
    for (int t = 0; t < mesh.triangle_count(); ++t) {
      const auto geom = fem::element_geometry(mesh, t);
      const auto nodes = fem::p2_nodes(mesh, t);
      double local[6][6] = {};
      for (int q = 0; q < quad.size(); ++q) {
        const double w = quad.weights[q] * geom.area;
        for (int i = 0; i < 6; ++i)
          for (int j = 0; j < 6; ++j) local[i][j] += w * tab.p2[q][i] * tab.p2[q][j];
      }
      for (int i = 0; i < 6; ++i)
        for (int j = 0; j < 6; ++j)
          for (int c = 0; c < 2; ++c) trips.emplace_back(2 * nodes[i] + c, 2 * nodes[j] + c, local[i][j]);
    }
  }

  SparseMatrix m(space.dof_count(), space.dof_count());
  m.setFromTriplets(trips.begin(), trips.end());
  return m;
}

/// Stiffness matrix: (grad f, grad g).
inline SparseMatrix assemble_stiffness(const FunctionSpace& space, const Quadrature& quad = Quadrature::degree6()) {
  const Mesh& mesh = space.mesh();
  const fem::Tabulation tab(quad);
  std::vector<Triplet> trips;

  if (!space.vector_valued()) {
    trips.reserve(mesh.triangle_count() * 9);
    for (int t = 0; t < mesh.triangle_count(); ++t) {
      const auto geom = fem::element_geometry(mesh, t);
      const auto dofs = fem::p1_dofs(mesh, t);
      Vec2 g[3];
      for (int i = 0; i < 3; ++i) g[i] = fem::physical_grad(geom.inv_jac_t, fem::p1_ref_grads[i]);
      for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) trips.emplace_back(dofs[i], dofs[j], geom.area * g[i].dot(g[j]));
    }
  } else {
    trips.reserve(mesh.triangle_count() * 72);
    for (int t = 0; t < mesh.triangle_count(); ++t) {
      const auto geom = fem::element_geometry(mesh, t);
      const auto nodes = fem::p2_nodes(mesh, t);
      double local[6][6] = {};
      for (int q = 0; q < quad.size(); ++q) {
        const double w = quad.weights[q] * geom.area;
        Vec2 g[6];
        for (int i = 0; i < 6; ++i) g[i] = fem::physical_grad(geom.inv_jac_t, tab.p2_ref_grad[q][i]);
        for (int i = 0; i < 6; ++i)
          for (int j = 0; j < 6; ++j) local[i][j] += w * g[i].dot(g[j]);
      }
      for (int i = 0; i < 6; ++i)
        for (int j = 0; j < 6; ++j)
          for (int c = 0; c < 2; ++c) trips.emplace_back(2 * nodes[i] + c, 2 * nodes[j] + c, local[i][j]);
    }
  }

  SparseMatrix a(space.dof_count(), space.dof_count());
  a.setFromTriplets(trips.begin(), trips.end());
  return a;
}

/// Divergence coupling c(v, q) = (div v, q): rows are pressure dofs, columns
/// velocity dofs. Dirichlet columns are included; constraints are applied at
/// solve time.
inline SparseMatrix assemble_divergence(const FunctionSpace& vel, const FunctionSpace& pres,
                                        const Quadrature& quad = Quadrature::degree6()) {
  if (!vel.vector_valued() || pres.vector_valued())
    throw std::invalid_argument("assemble_divergence: expected velocity and pressure spaces");
  if (&vel.mesh() != &pres.mesh()) throw std::invalid_argument("assemble_divergence: meshes differ");

  const Mesh& mesh = vel.mesh();
  const fem::Tabulation tab(quad);
  std::vector<Triplet> trips;
  trips.reserve(mesh.triangle_count() * 36);

  for (int t = 0; t < mesh.triangle_count(); ++t) {
    const auto geom = fem::element_geometry(mesh, t);
    const auto pdofs = fem::p1_dofs(mesh, t);
    const auto nodes = fem::p2_nodes(mesh, t);
    double local[3][6][2] = {};
    for (int q = 0; q < quad.size(); ++q) {
      const double w = quad.weights[q] * geom.area;
      for (int n = 0; n < 6; ++n) {
        const Vec2 g = fem::physical_grad(geom.inv_jac_t, tab.p2_ref_grad[q][n]);
        for (int i = 0; i < 3; ++i) {
          local[i][n][0] += w * g.x() * tab.p1[q][i];
          local[i][n][1] += w * g.y() * tab.p1[q][i];
        }
      }
    }
    for (int i = 0; i < 3; ++i)
      for (int n = 0; n < 6; ++n)
        for (int c = 0; c < 2; ++c) trips.emplace_back(pdofs[i], 2 * nodes[n] + c, local[i][n][c]);
  }

  SparseMatrix m(pres.dof_count(), vel.dof_count());
  m.setFromTriplets(trips.begin(), trips.end());
  return m;
}

/// Phase transport b(psi, v, nu) = (grad psi . v, nu) with the first slot
/// frozen: rows are scalar test dofs, columns velocity dofs.
inline SparseMatrix assemble_phase_convection(const FieldVector& psi, const FunctionSpace& vel,
                                              const FunctionSpace& test,
                                              const Quadrature& quad = Quadrature::degree6()) {
  if (psi.space->vector_valued()) throw std::invalid_argument("assemble_phase_convection: psi must be scalar");
  if (&psi.space->mesh() != &vel.mesh() || &vel.mesh() != &test.mesh())
    throw std::invalid_argument("assemble_phase_convection: meshes differ");

  const Mesh& mesh = vel.mesh();
  const fem::Tabulation tab(quad);
  std::vector<Triplet> trips;
  trips.reserve(mesh.triangle_count() * 36);

  for (int t = 0; t < mesh.triangle_count(); ++t) {
    const auto geom = fem::element_geometry(mesh, t);
    const auto pdofs = fem::p1_dofs(mesh, t);
    const auto nodes = fem::p2_nodes(mesh, t);
    // P1 gradient of psi is constant on the element
    Vec2 gpsi = Vec2::Zero();
    for (int i = 0; i < 3; ++i)
      gpsi += psi.coeffs[pdofs[i]] * fem::physical_grad(geom.inv_jac_t, fem::p1_ref_grads[i]);
    double local[3][6][2] = {};
    for (int q = 0; q < quad.size(); ++q) {
      const double w = quad.weights[q] * geom.area;
      for (int n = 0; n < 6; ++n)
        for (int i = 0; i < 3; ++i) {
          local[i][n][0] += w * gpsi.x() * tab.p2[q][n] * tab.p1[q][i];
          local[i][n][1] += w * gpsi.y() * tab.p2[q][n] * tab.p1[q][i];
        }
    }
    for (int i = 0; i < 3; ++i)
      for (int n = 0; n < 6; ++n)
        for (int c = 0; c < 2; ++c) trips.emplace_back(pdofs[i], 2 * nodes[n] + c, local[i][n][c]);
  }

  SparseMatrix m(test.dof_count(), vel.dof_count());
  m.setFromTriplets(trips.begin(), trips.end());
  return m;
}

/// Skew-symmetrized convection B(u, v, w) = ((u.grad v, w) - (u.grad w, v))/2
/// with the transport field frozen. The local blocks are antisymmetrized
/// before scattering, so K = -K^T holds exactly in floating point.
inline SparseMatrix assemble_skew_convection(const FieldVector& u_tilde,
                                             const Quadrature& quad = Quadrature::degree6()) {
  const FunctionSpace& vel = *u_tilde.space;
  if (!vel.vector_valued()) throw std::invalid_argument("assemble_skew_convection: velocity field expected");

  const Mesh& mesh = vel.mesh();
  const fem::Tabulation tab(quad);
  std::vector<Triplet> trips;
  trips.reserve(mesh.triangle_count() * 72);

  for (int t = 0; t < mesh.triangle_count(); ++t) {
    const auto geom = fem::element_geometry(mesh, t);
    const auto nodes = fem::p2_nodes(mesh, t);
    double g[6][6] = {};  // g[i][j] = (u~ . grad N_j, N_i)
    for (int q = 0; q < quad.size(); ++q) {
      const double w = quad.weights[q] * geom.area;
      Vec2 ut = Vec2::Zero();
      for (int n = 0; n < 6; ++n) {
        ut.x() += u_tilde.coeffs[2 * nodes[n]] * tab.p2[q][n];
        ut.y() += u_tilde.coeffs[2 * nodes[n] + 1] * tab.p2[q][n];
      }
      Vec2 grads[6];
      for (int n = 0; n < 6; ++n) grads[n] = fem::physical_grad(geom.inv_jac_t, tab.p2_ref_grad[q][n]);
      for (int i = 0; i < 6; ++i)
        for (int j = 0; j < 6; ++j) g[i][j] += w * ut.dot(grads[j]) * tab.p2[q][i];
    }
    for (int i = 0; i < 6; ++i)
      for (int j = 0; j < 6; ++j) {
        const double k = 0.5 * (g[i][j] - g[j][i]);
        for (int c = 0; c < 2; ++c) trips.emplace_back(2 * nodes[i] + c, 2 * nodes[j] + c, k);
      }
  }

  SparseMatrix m(vel.dof_count(), vel.dof_count());
  m.setFromTriplets(trips.begin(), trips.end());
  return m;
}

struct ChiAssembly {
  Vector residual;        // (chi(phi_new, phi_old), psi_i)
  SparseMatrix jacobian;  // d residual / d coeffs(phi_new)
};

/// The chi nonlinearity tested against the P1 basis, with its Jacobian in the
/// new phase values. chi is evaluated at quadrature points from interpolated
/// P1 values so the energy identity holds exactly under the degree-6 rule.
inline ChiAssembly assemble_chi(const FieldVector& phi_new, const FieldVector& phi_old,
                                const Quadrature& quad = Quadrature::degree6()) {
  require_same_space(phi_new, phi_old, "assemble_chi");
  const FunctionSpace& space = *phi_new.space;
  if (space.vector_valued()) throw std::invalid_argument("assemble_chi: scalar space expected");

  const Mesh& mesh = space.mesh();
  const fem::Tabulation tab(quad);
  ChiAssembly out;
  out.residual = Vector::Zero(space.dof_count());
  std::vector<Triplet> trips;
  trips.reserve(mesh.triangle_count() * 9);

  for (int t = 0; t < mesh.triangle_count(); ++t) {
    const auto geom = fem::element_geometry(mesh, t);
    const auto dofs = fem::p1_dofs(mesh, t);
    double local_r[3] = {};
    double local_j[3][3] = {};
    for (int q = 0; q < quad.size(); ++q) {
      const double w = quad.weights[q] * geom.area;
      double a = 0.0, b = 0.0;
      for (int i = 0; i < 3; ++i) {
        a += phi_new.coeffs[dofs[i]] * tab.p1[q][i];
        b += phi_old.coeffs[dofs[i]] * tab.p1[q][i];
      }
      const double value = chi(a, b);
      const double slope = chi_dnew(a, b);
      for (int i = 0; i < 3; ++i) {
        local_r[i] += w * value * tab.p1[q][i];
        for (int j = 0; j < 3; ++j) local_j[i][j] += w * slope * tab.p1[q][j] * tab.p1[q][i];
      }
    }
    for (int i = 0; i < 3; ++i) {
      out.residual[dofs[i]] += local_r[i];
      for (int j = 0; j < 3; ++j) trips.emplace_back(dofs[i], dofs[j], local_j[i][j]);
    }
  }

  out.jacobian.resize(space.dof_count(), space.dof_count());
  out.jacobian.setFromTriplets(trips.begin(), trips.end());
  return out;
}

/// Pointwise cubic tested against the P1 basis (used by the first-order
/// bootstrap step, where the implicit convex part is phi^3).
inline ChiAssembly assemble_cubic(const FieldVector& phi, const Quadrature& quad = Quadrature::degree6()) {
  const FunctionSpace& space = *phi.space;
  if (space.vector_valued()) throw std::invalid_argument("assemble_cubic: scalar space expected");

  const Mesh& mesh = space.mesh();
  const fem::Tabulation tab(quad);
  ChiAssembly out;
  out.residual = Vector::Zero(space.dof_count());
  std::vector<Triplet> trips;
  trips.reserve(mesh.triangle_count() * 9);

  for (int t = 0; t < mesh.triangle_count(); ++t) {
    const auto geom = fem::element_geometry(mesh, t);
    const auto dofs = fem::p1_dofs(mesh, t);
    double local_r[3] = {};
    double local_j[3][3] = {};
    for (int q = 0; q < quad.size(); ++q) {
      const double w = quad.weights[q] * geom.area;
      double a = 0.0;
      for (int i = 0; i < 3; ++i) a += phi.coeffs[dofs[i]] * tab.p1[q][i];
      for (int i = 0; i < 3; ++i) {
        local_r[i] += w * a * a * a * tab.p1[q][i];
        for (int j = 0; j < 3; ++j) local_j[i][j] += w * 3.0 * a * a * tab.p1[q][j] * tab.p1[q][i];
      }
    }
    for (int i = 0; i < 3; ++i) {
      out.residual[dofs[i]] += local_r[i];
      for (int j = 0; j < 3; ++j) trips.emplace_back(dofs[i], dofs[j], local_j[i][j]);
    }
  }

  out.jacobian.resize(space.dof_count(), space.dof_count());
  out.jacobian.setFromTriplets(trips.begin(), trips.end());
  return out;
}

/// Load vector (f, basis_i) for a scalar analytic f.
inline Vector assemble_load(const FunctionSpace& space, const std::function<double(Vec2)>& f,
                            const Quadrature& quad = Quadrature::degree6()) {
  if (space.vector_valued()) throw std::invalid_argument("assemble_load: scalar space expected");
  const Mesh& mesh = space.mesh();
  const fem::Tabulation tab(quad);
  Vector out = Vector::Zero(space.dof_count());
  for (int t = 0; t < mesh.triangle_count(); ++t) {
    const auto geom = fem::element_geometry(mesh, t);
    const auto dofs = fem::p1_dofs(mesh, t);
    for (int q = 0; q < quad.size(); ++q) {
      const double w = quad.weights[q] * geom.area;
      const double value = f(geom.point(quad.points[q]));
      for (int i = 0; i < 3; ++i) out[dofs[i]] += w * value * tab.p1[q][i];
    }
  }
  return out;
}

/// Load vector (grad f, grad basis_i) for a scalar f given through its
/// analytic gradient (right-hand side of the Ritz projection).
inline Vector assemble_grad_load(const FunctionSpace& space, const std::function<Vec2(Vec2)>& grad_f,
                                 const Quadrature& quad = Quadrature::degree6()) {
  if (space.vector_valued()) throw std::invalid_argument("assemble_grad_load: scalar space expected");
  const Mesh& mesh = space.mesh();
  Vector out = Vector::Zero(space.dof_count());
  for (int t = 0; t < mesh.triangle_count(); ++t) {
    const auto geom = fem::element_geometry(mesh, t);
    const auto dofs = fem::p1_dofs(mesh, t);
    Vec2 g[3];
    for (int i = 0; i < 3; ++i) g[i] = fem::physical_grad(geom.inv_jac_t, fem::p1_ref_grads[i]);
    for (int q = 0; q < quad.size(); ++q) {
      const double w = quad.weights[q] * geom.area;
      const Vec2 gf = grad_f(geom.point(quad.points[q]));
      for (int i = 0; i < 3; ++i) out[dofs[i]] += w * gf.dot(g[i]);
    }
  }
  return out;
}

/// Load vector (f, v_i) for a vector analytic f against the velocity basis.
inline Vector assemble_vector_load(const FunctionSpace& vel, const std::function<Vec2(Vec2)>& f,
                                   const Quadrature& quad = Quadrature::degree6()) {
  if (!vel.vector_valued()) throw std::invalid_argument("assemble_vector_load: velocity space expected");
  const Mesh& mesh = vel.mesh();
  const fem::Tabulation tab(quad);
  Vector out = Vector::Zero(vel.dof_count());
  for (int t = 0; t < mesh.triangle_count(); ++t) {
    const auto geom = fem::element_geometry(mesh, t);
    const auto nodes = fem::p2_nodes(mesh, t);
    for (int q = 0; q < quad.size(); ++q) {
      const double w = quad.weights[q] * geom.area;
      const Vec2 value = f(geom.point(quad.points[q]));
      for (int n = 0; n < 6; ++n) {
        out[2 * nodes[n]] += w * value.x() * tab.p2[q][n];
        out[2 * nodes[n] + 1] += w * value.y() * tab.p2[q][n];
      }
    }
  }
  return out;
}

/// Load vector eta (grad u, grad v_i) - (div v_i, p) for analytic (u, p)
/// (right-hand side of the Stokes projection). grad_u(i, j) = d u_i / d x_j.
inline Vector assemble_stokes_load(const FunctionSpace& vel, double eta,
                                   const std::function<Mat2(Vec2)>& grad_u,
                                   const std::function<double(Vec2)>& p,
                                   const Quadrature& quad = Quadrature::degree6()) {
  if (!vel.vector_valued()) throw std::invalid_argument("assemble_stokes_load: velocity space expected");
  const Mesh& mesh = vel.mesh();
  const fem::Tabulation tab(quad);
  Vector out = Vector::Zero(vel.dof_count());
  for (int t = 0; t < mesh.triangle_count(); ++t) {
    const auto geom = fem::element_geometry(mesh, t);
    const auto nodes = fem::p2_nodes(mesh, t);
    for (int q = 0; q < quad.size(); ++q) {
      const double w = quad.weights[q] * geom.area;
      const Vec2 x = geom.point(quad.points[q]);
      const Mat2 gu = grad_u(x);
      const double pv = p(x);
      for (int n = 0; n < 6; ++n) {
        const Vec2 g = fem::physical_grad(geom.inv_jac_t, tab.p2_ref_grad[q][n]);
        // basis (N_n, 0): (grad u, grad v) = gu.row(0) . g; div v = g.x()
        out[2 * nodes[n]] += w * (eta * gu.row(0).dot(g) - pv * g.x());
        out[2 * nodes[n] + 1] += w * (eta * gu.row(1).dot(g) - pv * g.y());
      }
    }
  }
  return out;
}

/// Quadrature integral of an analytic scalar function over the mesh.
inline double integrate(const Mesh& mesh, const std::function<double(Vec2)>& f,
                        const Quadrature& quad = Quadrature::degree6()) {
  double s = 0.0;
  for (int t = 0; t < mesh.triangle_count(); ++t) {
    const auto geom = fem::element_geometry(mesh, t);
    for (int q = 0; q < quad.size(); ++q) s += quad.weights[q] * geom.area * f(geom.point(quad.points[q]));
  }
  return s;
}

/// Quadrature integral of a pointwise function of a P1 field, e.g. the
/// double-well density (phi^2 - 1)^2.
inline double integrate_p1_pointwise(const FieldVector& phi, const std::function<double(double)>& f,
                                     const Quadrature& quad = Quadrature::degree6()) {
  if (phi.space->vector_valued()) throw std::invalid_argument("integrate_p1_pointwise: scalar field expected");
  const Mesh& mesh = phi.space->mesh();
  const fem::Tabulation tab(quad);
  double s = 0.0;
  for (int t = 0; t < mesh.triangle_count(); ++t) {
    const auto geom = fem::element_geometry(mesh, t);
    const auto dofs = fem::p1_dofs(mesh, t);
    for (int q = 0; q < quad.size(); ++q) {
      double v = 0.0;
      for (int i = 0; i < 3; ++i) v += phi.coeffs[dofs[i]] * tab.p1[q][i];
      s += quad.weights[q] * geom.area * f(v);
    }
  }
  return s;
}

}  // namespace chns
