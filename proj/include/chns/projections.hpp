#pragma once

#include <cmath>
#include <memory>
#include <utility>

#include "chns/operators.hpp"
#include "chns/solver.hpp"

namespace chns {

/// Analytic scalar datum: value and gradient, both evaluable anywhere.
struct ScalarField {
  std::function<double(Vec2)> value;
  std::function<Vec2(Vec2)> gradient;
};

/// Analytic vector datum; gradient(i, j) = d u_i / d x_j.
struct VectorField {
  std::function<Vec2(Vec2)> value;
  std::function<Mat2(Vec2)> gradient;

  double divergence(const Vec2& x) const { return gradient(x).trace(); }
};

/// Ritz and Stokes projections, the discrete Laplacian, and the discrete
/// negative norm over one mesh. All factorizations are prepared eagerly so
/// every operation is const and safe to call concurrently.
class ProjectionContext {
 public:
  ProjectionContext(std::shared_ptr<const DiscreteOperators> ops, double eta) : ops_(std::move(ops)), eta_(eta) {
    if (!(eta_ > 0.0)) throw std::invalid_argument("ProjectionContext: eta must be positive");
    const DiscreteOperators& o = *ops_;

    // Bordered stiffness [[A, m], [m^T, 0]]: the Ritz projection system and
    // the inverse discrete Laplacian behind the negative norm.
    ritz_.factorize(bordered(o.stiff_phase, o.phase_moment));
    mass_.factorize(o.mass_phase);

    // Bordered Stokes saddle: unknowns (u, p, mean multiplier), Dirichlet
    // velocity rows replaced by identity.
    const int nu = o.velocity->dof_count();
    const int np = o.pressure->dof_count();
    std::vector<Triplet> trips;
    trips.reserve(o.stiff_vel.nonZeros() + 2 * o.divergence.nonZeros() + 2 * np + nu);
    for (int k = 0; k < o.stiff_vel.outerSize(); ++k)
      for (SparseMatrix::InnerIterator it(o.stiff_vel, k); it; ++it)
        if (!o.velocity->is_dirichlet(static_cast<int>(it.row())))
          trips.emplace_back(it.row(), it.col(), eta_ * it.value());
    for (int d = 0; d < nu; ++d)
      if (o.velocity->is_dirichlet(d)) trips.emplace_back(d, d, 1.0);
    for (int k = 0; k < o.divergence.outerSize(); ++k)
      for (SparseMatrix::InnerIterator it(o.divergence, k); it; ++it) {
        trips.emplace_back(nu + it.row(), it.col(), it.value());  // c(u, q)
        if (!o.velocity->is_dirichlet(static_cast<int>(it.col())))
          trips.emplace_back(it.col(), nu + it.row(), -it.value());  // -c(v, p)
      }
    for (int i = 0; i < np; ++i) {
      trips.emplace_back(nu + i, nu + np, o.phase_moment[i]);
      trips.emplace_back(nu + np, nu + i, o.phase_moment[i]);
    }
    SparseMatrix stokes(nu + np + 1, nu + np + 1);
    stokes.setFromTriplets(trips.begin(), trips.end());
    stokes_.factorize(stokes);
  }

  const DiscreteOperators& ops() const { return *ops_; }
  std::shared_ptr<const DiscreteOperators> ops_ptr() const { return ops_; }
  double eta() const { return eta_; }

  /// Ritz projection of an analytic function: gradient-orthogonal to the P1
  /// space with the mean matched through the border multiplier.
  FieldVector ritz_project(const ScalarField& f) const {
    const DiscreteOperators& o = *ops_;
    Vector rhs(o.phase->dof_count() + 1);
    rhs.head(o.phase->dof_count()) = assemble_grad_load(*o.phase, f.gradient);
    rhs[o.phase->dof_count()] = integrate(*o.mesh, f.value);
    Vector sol = ritz_.solve(rhs);
    return FieldVector(o.phase, sol.head(o.phase->dof_count()));
  }

  /// Ritz projection applied to a member of the space: right-hand sides come
  /// from the assembled matrices, so the result must reproduce the input.
  FieldVector ritz_project(const FieldVector& f) const {
    const DiscreteOperators& o = *ops_;
    Vector rhs(o.phase->dof_count() + 1);
    rhs.head(o.phase->dof_count()) = o.stiff_phase * f.coeffs;
    rhs[o.phase->dof_count()] = o.phase_moment.dot(f.coeffs);
    Vector sol = ritz_.solve(rhs);
    return FieldVector(o.phase, sol.head(o.phase->dof_count()));
  }

  /// Stokes projection of an analytic divergence-free pair (u, p) with u = 0
  /// on the boundary and p mean-zero.
  std::pair<FieldVector, FieldVector> stokes_project(const VectorField& u, const ScalarField& p) const {
    const DiscreteOperators& o = *ops_;
    const int nu = o.velocity->dof_count();
    const int np = o.pressure->dof_count();
    Vector rhs = Vector::Zero(nu + np + 1);
    rhs.head(nu) = assemble_stokes_load(*o.velocity, eta_, u.gradient, p.value);
    for (int d = 0; d < nu; ++d)
      if (o.velocity->is_dirichlet(d)) rhs[d] = 0.0;
    rhs.segment(nu, np) = assemble_load(*o.pressure, [&u](Vec2 x) { return u.divergence(x); });
    rhs[nu + np] = 0.0;  // projected pressure has zero mean
    return split_stokes(stokes_.solve(rhs));
  }

  /// Stokes projection applied to a discrete pair; reproduces the inputs.
  std::pair<FieldVector, FieldVector> stokes_project(const FieldVector& u, const FieldVector& p) const {
    const DiscreteOperators& o = *ops_;
    const int nu = o.velocity->dof_count();
    const int np = o.pressure->dof_count();
    Vector rhs = Vector::Zero(nu + np + 1);
    rhs.head(nu) = eta_ * (o.stiff_vel * u.coeffs) - o.divergence.transpose() * p.coeffs;
    for (int d = 0; d < nu; ++d)
      if (o.velocity->is_dirichlet(d)) rhs[d] = u.coeffs[d];
    rhs.segment(nu, np) = o.divergence * u.coeffs;
    rhs[nu + np] = o.phase_moment.dot(p.coeffs);
    return split_stokes(stokes_.solve(rhs));
  }

  /// Discrete Laplacian: (lap_h v, xi) = -(grad v, grad xi) for all xi. The
  /// result is mean-zero up to roundoff; the residual mean is removed so the
  /// returned field lies in the mean-zero space exactly.
  FieldVector discrete_laplacian(const FieldVector& v) const {
    const DiscreteOperators& o = *ops_;
    if (v.space->vector_valued()) throw std::invalid_argument("discrete_laplacian: scalar field expected");
    Vector w = mass_.solve(-(o.stiff_phase * v.coeffs));
    w.array() -= o.phase_moment.dot(w) / o.area;
    return FieldVector(o.pressure, std::move(w));
  }

  /// Inverse discrete Laplacian on mean-zero fields: a(Tv, xi) = (v, xi).
  FieldVector inverse_laplacian(const FieldVector& v) const {
    require_mean_zero(v, "inverse_laplacian");
    const DiscreteOperators& o = *ops_;
    Vector rhs(o.phase->dof_count() + 1);
    rhs.head(o.phase->dof_count()) = o.mass_phase * v.coeffs;
    rhs[o.phase->dof_count()] = 0.0;
    Vector sol = ritz_.solve(rhs);
    return FieldVector(o.pressure, sol.head(o.phase->dof_count()));
  }

  /// Discrete negative norm ||v||_{-1,h} = sqrt((T v, v)) on mean-zero fields.
  double minus_one_norm(const FieldVector& v) const {
    const FieldVector tv = inverse_laplacian(v);
    const double sq = tv.coeffs.dot(ops_->mass_phase * v.coeffs);
    return std::sqrt(std::max(sq, 0.0));
  }

 private:
  void require_mean_zero(const FieldVector& v, const char* where) const {
    const double scale = std::max(1.0, v.coeffs.size() ? v.coeffs.cwiseAbs().maxCoeff() : 0.0);
    if (std::abs(ops_->phase_moment.dot(v.coeffs)) > 1e-10 * ops_->area * scale)
      throw std::invalid_argument(std::string(where) + ": field is not mean-zero");
  }

  std::pair<FieldVector, FieldVector> split_stokes(const Vector& sol) const {
    const DiscreteOperators& o = *ops_;
    const int nu = o.velocity->dof_count();
    return {FieldVector(o.velocity, sol.head(nu)),
            FieldVector(o.pressure, sol.segment(nu, o.pressure->dof_count()))};
  }

  std::shared_ptr<const DiscreteOperators> ops_;
  double eta_;
  LuSolver ritz_;    // bordered stiffness, shared with the negative norm
  SpdSolver mass_;
  LuSolver stokes_;  // bordered Stokes saddle
};

}  // namespace chns
