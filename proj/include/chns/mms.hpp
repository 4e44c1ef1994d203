#pragma once

#include <cmath>
#include <memory>
#include <stdexcept>
#include <string>

#include "chns/params.hpp"
#include "chns/projections.hpp"

namespace chns {

/// Closed-form space-time fields with enough derivatives to build the
/// forcing that makes them solve the coupled phase-field / flow system.
/// The chemical potential and both forcings are derived from the primitive
/// fields, so a solution only supplies phi, u, p and their derivatives.
class ManufacturedSolution {
 public:
  virtual ~ManufacturedSolution() = default;
  virtual std::string name() const = 0;

  virtual double phi(Vec2 x, double t) const = 0;
  virtual Vec2 grad_phi(Vec2 x, double t) const = 0;
  virtual double lap_phi(Vec2 x, double t) const = 0;
  virtual Vec2 grad_lap_phi(Vec2 x, double t) const = 0;
  virtual double bilap_phi(Vec2 x, double t) const = 0;
  virtual double dphi_dt(Vec2 x, double t) const = 0;

  virtual Vec2 velocity(Vec2 x, double t) const = 0;
  virtual Mat2 grad_velocity(Vec2 x, double t) const = 0;  // (i,j) = d u_i / d x_j
  virtual Vec2 lap_velocity(Vec2 x, double t) const = 0;
  virtual Vec2 dvelocity_dt(Vec2 x, double t) const = 0;

  virtual double pressure(Vec2 x, double t) const = 0;
  virtual Vec2 grad_pressure(Vec2 x, double t) const = 0;

  // mu = (phi^3 - phi)/eps - eps lap phi
  double mu(Vec2 x, double t, double eps) const {
    const double f = phi(x, t);
    return (f * f * f - f) / eps - eps * lap_phi(x, t);
  }
  Vec2 grad_mu(Vec2 x, double t, double eps) const {
    const double f = phi(x, t);
    return ((3.0 * f * f - 1.0) / eps) * grad_phi(x, t) - eps * grad_lap_phi(x, t);
  }
  double lap_mu(Vec2 x, double t, double eps) const {
    const double f = phi(x, t);
    const Vec2 g = grad_phi(x, t);
    const double lap_f = lap_phi(x, t);
    const double lap_f3 = 3.0 * f * f * lap_f + 6.0 * f * g.squaredNorm();
    return (lap_f3 - lap_f) / eps - eps * bilap_phi(x, t);
  }

  // Residual forcings of the strong-form system evaluated at (x, t).
  double f_phi(Vec2 x, double t, const PhysParams& p) const {
    return dphi_dt(x, t) + grad_phi(x, t).dot(velocity(x, t)) - p.epsilon * lap_mu(x, t, p.epsilon);
  }
  Vec2 f_velocity(Vec2 x, double t, const PhysParams& p) const {
    const Vec2 u = velocity(x, t);
    return dvelocity_dt(x, t) - p.eta * lap_velocity(x, t) + grad_velocity(x, t) * u + grad_pressure(x, t) -
           p.gamma * mu(x, t, p.epsilon) * grad_phi(x, t);
  }

  ScalarField phi_field(double t) const {
    return {[this, t](Vec2 x) { return phi(x, t); }, [this, t](Vec2 x) { return grad_phi(x, t); }};
  }
  ScalarField mu_field(double t, double eps) const {
    return {[this, t, eps](Vec2 x) { return mu(x, t, eps); },
            [this, t, eps](Vec2 x) { return grad_mu(x, t, eps); }};
  }
  VectorField velocity_field(double t) const {
    return {[this, t](Vec2 x) { return velocity(x, t); }, [this, t](Vec2 x) { return grad_velocity(x, t); }};
  }
  ScalarField pressure_field(double t) const {
    return {[this, t](Vec2 x) { return pressure(x, t); }, [this, t](Vec2 x) { return grad_pressure(x, t); }};
  }
};

namespace detail {

/// phi = cos(pi x) cos(pi y) cos(t), u = curl(sin^2(pi x) sin^2(pi y) sin(t)),
/// p = sin(pi x) cos(pi y) sin(t) (mean-zero on the unit square). Satisfies
/// the natural boundary conditions on the unit square and div u = 0.
class TrigSolution final : public ManufacturedSolution {
 public:
  std::string name() const override { return "trig"; }

  double phi(Vec2 x, double t) const override { return cx(x) * cy(x) * std::cos(t); }
  Vec2 grad_phi(Vec2 x, double t) const override {
    return Vec2(-kPi * sx(x) * cy(x), -kPi * cx(x) * sy(x)) * std::cos(t);
  }
  double lap_phi(Vec2 x, double t) const override { return -2.0 * kPi * kPi * phi(x, t); }
  Vec2 grad_lap_phi(Vec2 x, double t) const override { return -2.0 * kPi * kPi * grad_phi(x, t); }
  double bilap_phi(Vec2 x, double t) const override { return 4.0 * kPi * kPi * kPi * kPi * phi(x, t); }
  double dphi_dt(Vec2 x, double t) const override { return -cx(x) * cy(x) * std::sin(t); }

  Vec2 velocity(Vec2 x, double t) const override {
    const double T = std::sin(t);
    return {kPi * sx(x) * sx(x) * s2y(x) * T, -kPi * s2x(x) * sy(x) * sy(x) * T};
  }
  Mat2 grad_velocity(Vec2 x, double t) const override {
    const double T = std::sin(t);
    Mat2 g;
    g(0, 0) = kPi * kPi * s2x(x) * s2y(x) * T;
    g(0, 1) = 2.0 * kPi * kPi * sx(x) * sx(x) * c2y(x) * T;
    g(1, 0) = -2.0 * kPi * kPi * c2x(x) * sy(x) * sy(x) * T;
    g(1, 1) = -kPi * kPi * s2x(x) * s2y(x) * T;
    return g;
  }
  Vec2 lap_velocity(Vec2 x, double t) const override {
    const double T = std::sin(t);
    const double p3 = kPi * kPi * kPi;
    return {2.0 * p3 * s2y(x) * (1.0 - 4.0 * sx(x) * sx(x)) * T,
            2.0 * p3 * s2x(x) * (4.0 * sy(x) * sy(x) - 1.0) * T};
  }
  Vec2 dvelocity_dt(Vec2 x, double t) const override {
    const double T = std::cos(t);
    return {kPi * sx(x) * sx(x) * s2y(x) * T, -kPi * s2x(x) * sy(x) * sy(x) * T};
  }

  double pressure(Vec2 x, double t) const override { return sx(x) * cy(x) * std::sin(t); }
  Vec2 grad_pressure(Vec2 x, double t) const override {
    return Vec2(kPi * cx(x) * cy(x), -kPi * sx(x) * sy(x)) * std::sin(t);
  }

 private:
  static constexpr double kPi = 3.14159265358979323846264338327950288;
  static double sx(Vec2 x) { return std::sin(kPi * x.x()); }
  static double cx(Vec2 x) { return std::cos(kPi * x.x()); }
  static double sy(Vec2 x) { return std::sin(kPi * x.y()); }
  static double cy(Vec2 x) { return std::cos(kPi * x.y()); }
  static double s2x(Vec2 x) { return std::sin(2.0 * kPi * x.x()); }
  static double c2x(Vec2 x) { return std::cos(2.0 * kPi * x.x()); }
  static double s2y(Vec2 x) { return std::sin(2.0 * kPi * x.y()); }
  static double c2y(Vec2 x) { return std::cos(2.0 * kPi * x.y()); }
};

/// The pure phase phi = 1, u = 0, p = 0: exactly representable, zero forcing.
class EquilibriumSolution final : public ManufacturedSolution {
 public:
  std::string name() const override { return "equilibrium"; }
  double phi(Vec2, double) const override { return 1.0; }
  Vec2 grad_phi(Vec2, double) const override { return Vec2::Zero(); }
  double lap_phi(Vec2, double) const override { return 0.0; }
  Vec2 grad_lap_phi(Vec2, double) const override { return Vec2::Zero(); }
  double bilap_phi(Vec2, double) const override { return 0.0; }
  double dphi_dt(Vec2, double) const override { return 0.0; }
  Vec2 velocity(Vec2, double) const override { return Vec2::Zero(); }
  Mat2 grad_velocity(Vec2, double) const override { return Mat2::Zero(); }
  Vec2 lap_velocity(Vec2, double) const override { return Vec2::Zero(); }
  Vec2 dvelocity_dt(Vec2, double) const override { return Vec2::Zero(); }
  double pressure(Vec2, double) const override { return 0.0; }
  Vec2 grad_pressure(Vec2, double) const override { return Vec2::Zero(); }
};

}  // namespace detail

inline std::shared_ptr<const ManufacturedSolution> builtin_solution(const std::string& name) {
  if (name == "trig") return std::make_shared<detail::TrigSolution>();
  if (name == "equilibrium") return std::make_shared<detail::EquilibriumSolution>();
  throw std::invalid_argument("builtin_solution: unknown solution '" + name + "'");
}

// Error norms of a discrete field against an analytic one, integrated with
// the project-wide quadrature rule.

inline double l2_error_scalar(const FieldVector& fh, const std::function<double(Vec2)>& exact,
                              const Quadrature& quad = Quadrature::degree6()) {
  const Mesh& mesh = fh.space->mesh();
  const fem::Tabulation tab(quad);
  double s = 0.0;
  for (int t = 0; t < mesh.triangle_count(); ++t) {
    const auto geom = fem::element_geometry(mesh, t);
    const auto dofs = fem::p1_dofs(mesh, t);
    for (int q = 0; q < quad.size(); ++q) {
      double v = 0.0;
      for (int i = 0; i < 3; ++i) v += fh.coeffs[dofs[i]] * tab.p1[q][i];
      const double d = v - exact(geom.point(quad.points[q]));
      s += quad.weights[q] * geom.area * d * d;
    }
  }
  return std::sqrt(s);
}

inline double h1_semi_error_scalar(const FieldVector& fh, const std::function<Vec2(Vec2)>& exact_grad,
                                   const Quadrature& quad = Quadrature::degree6()) {
  const Mesh& mesh = fh.space->mesh();
  double s = 0.0;
  for (int t = 0; t < mesh.triangle_count(); ++t) {
    const auto geom = fem::element_geometry(mesh, t);
    const auto dofs = fem::p1_dofs(mesh, t);
    Vec2 gh = Vec2::Zero();
    for (int i = 0; i < 3; ++i)
      gh += fh.coeffs[dofs[i]] * fem::physical_grad(geom.inv_jac_t, fem::p1_ref_grads[i]);
    for (int q = 0; q < quad.size(); ++q) {
      const Vec2 d = gh - exact_grad(geom.point(quad.points[q]));
      s += quad.weights[q] * geom.area * d.squaredNorm();
    }
  }
  return std::sqrt(s);
}

inline double l2_error_vector(const FieldVector& uh, const std::function<Vec2(Vec2)>& exact,
                              const Quadrature& quad = Quadrature::degree6()) {
  const Mesh& mesh = uh.space->mesh();
  const fem::Tabulation tab(quad);
  double s = 0.0;
  for (int t = 0; t < mesh.triangle_count(); ++t) {
    const auto geom = fem::element_geometry(mesh, t);
    const auto nodes = fem::p2_nodes(mesh, t);
    for (int q = 0; q < quad.size(); ++q) {
      Vec2 v = Vec2::Zero();
      for (int n = 0; n < 6; ++n) {
        v.x() += uh.coeffs[2 * nodes[n]] * tab.p2[q][n];
        v.y() += uh.coeffs[2 * nodes[n] + 1] * tab.p2[q][n];
      }
      const Vec2 d = v - exact(geom.point(quad.points[q]));
      s += quad.weights[q] * geom.area * d.squaredNorm();
    }
  }
  return std::sqrt(s);
}

inline double h1_semi_error_vector(const FieldVector& uh, const std::function<Mat2(Vec2)>& exact_grad,
                                   const Quadrature& quad = Quadrature::degree6()) {
  const Mesh& mesh = uh.space->mesh();
  const fem::Tabulation tab(quad);
  double s = 0.0;
  for (int t = 0; t < mesh.triangle_count(); ++t) {
    const auto geom = fem::element_geometry(mesh, t);
    const auto nodes = fem::p2_nodes(mesh, t);
    for (int q = 0; q < quad.size(); ++q) {
      Mat2 gh = Mat2::Zero();
      for (int n = 0; n < 6; ++n) {
        const Vec2 g = fem::physical_grad(geom.inv_jac_t, tab.p2_ref_grad[q][n]);
        gh.row(0) += uh.coeffs[2 * nodes[n]] * g.transpose();
        gh.row(1) += uh.coeffs[2 * nodes[n] + 1] * g.transpose();
      }
      const Mat2 d = gh - exact_grad(geom.point(quad.points[q]));
      s += quad.weights[q] * geom.area * d.squaredNorm();
    }
  }
  return std::sqrt(s);
}

}  // namespace chns
