#pragma once

#include <cmath>
#include <optional>
#include <vector>

#include "chns/operators.hpp"
#include "chns/params.hpp"
#include "chns/projections.hpp"

namespace chns {

/// Ginzburg-Landau energy plus kinetic energy,
///   E = int (1/4 eps)(phi^2 - 1)^2 + (eps/2)|grad phi|^2 + (1/2 gamma)|u|^2.
/// Quadratic terms come from the assembled matrices; the quartic well is
/// integrated with the same quadrature rule that assembled them.
inline double energy_physical(const FieldVector& phi, const FieldVector& u, const PhysParams& p,
                              const DiscreteOperators& ops) {
  const double well = integrate_p1_pointwise(phi, [](double v) {
    const double w = v * v - 1.0;
    return w * w;
  });
  const double grad_sq = phi.coeffs.dot(ops.stiff_phase * phi.coeffs);
  const double kin = u.coeffs.dot(ops.mass_vel * u.coeffs);
  return well / (4.0 * p.epsilon) + 0.5 * p.epsilon * grad_sq + kin / (2.0 * p.gamma);
}

/// Modified energy dissipated exactly by the splitting scheme:
///   F = E(phi_new, u) + (1/4 eps)||phi_new - phi_old||^2
///     + (eps/8)||grad(phi_new - phi_old)||^2.
inline double energy_modified(const FieldVector& phi_new, const FieldVector& phi_old, const FieldVector& u,
                              const PhysParams& p, const DiscreteOperators& ops) {
  require_same_space(phi_new, phi_old, "energy_modified");
  const Vector d = phi_new.coeffs - phi_old.coeffs;
  return energy_physical(phi_new, u, p, ops) + d.dot(ops.mass_phase * d) / (4.0 * p.epsilon) +
         p.epsilon / 8.0 * d.dot(ops.stiff_phase * d);
}

/// Per-step pieces of the discrete energy law, recorded as a run progresses.
struct StepDiagnostics {
  double grad_mu_sq = 0.0;    // ||grad mu^{m+1/2}||^2
  double grad_ubar_sq = 0.0;  // ||grad ubar^{m+1/2}||^2
  double jump_l2_sq = 0.0;    // ||phi^{m+1} - 2 phi^m + phi^{m-1}||^2
  double jump_h1_sq = 0.0;    // ||grad(...)||^2
  double f_after = 0.0;       // F(phi^{m+1}, phi^m, u^{m+1})
};

/// Energy-law ledger of a run: the identity
///   F^{l+1} + tau sum(eps ||grad mu||^2 + (eta/gamma)||grad ubar||^2)
///          + sum((1/4 eps) jump_l2 + (eps/8) jump_h1) = F^1
/// must hold to roundoff at every l >= 1.
struct EnergyHistory {
  double f_initial = 0.0;  // F(phi^1, phi^0, u^1)
  double tau = 0.0;
  std::vector<StepDiagnostics> steps;

  /// |LHS - RHS| of the energy law after `ell` steps (1-based, ell <= steps).
  double residual_at(std::size_t ell, const PhysParams& p) const {
    if (ell < 1 || ell > steps.size()) throw std::invalid_argument("energy_law_residual: no such step");
    double dissip = 0.0, jumps = 0.0;
    for (std::size_t m = 0; m < ell; ++m) {
      dissip += p.epsilon * steps[m].grad_mu_sq + (p.eta / p.gamma) * steps[m].grad_ubar_sq;
      jumps += steps[m].jump_l2_sq / (4.0 * p.epsilon) + p.epsilon / 8.0 * steps[m].jump_h1_sq;
    }
    return std::abs(steps[ell - 1].f_after + tau * dissip + jumps - f_initial);
  }

  double max_residual(const PhysParams& p) const {
    double r = 0.0;
    for (std::size_t ell = 1; ell <= steps.size(); ++ell) r = std::max(r, residual_at(ell, p));
    return r;
  }
};

inline double energy_law_residual(const EnergyHistory& history, const PhysParams& p, std::size_t ell) {
  return history.residual_at(ell, p);
}

struct Norms {
  double l2 = 0.0;
  double h1_semi = 0.0;
  double linf_nodal = 0.0;
  std::optional<double> minus_one;
  std::optional<double> discrete_laplacian_l2;
};

/// Norm menagerie from the assembled matrices. The nodal max is exact for P1
/// fields and a lower bound for P2. Pass a ProjectionContext to also get the
/// negative norm (mean-zero fields only) and ||lap_h field||.
inline Norms norms(const FieldVector& f, const DiscreteOperators& ops,
                   const ProjectionContext* proj = nullptr) {
  Norms out;
  const bool vec = f.space->vector_valued();
  const SparseMatrix& m = vec ? ops.mass_vel : ops.mass_phase;
  const SparseMatrix& a = vec ? ops.stiff_vel : ops.stiff_phase;
  out.l2 = std::sqrt(std::max(0.0, f.coeffs.dot(m * f.coeffs)));
  out.h1_semi = std::sqrt(std::max(0.0, f.coeffs.dot(a * f.coeffs)));
  out.linf_nodal = f.coeffs.size() ? f.coeffs.cwiseAbs().maxCoeff() : 0.0;
  if (proj && !vec) {
    const FieldVector lap = proj->discrete_laplacian(f);
    out.discrete_laplacian_l2 = std::sqrt(std::max(0.0, lap.coeffs.dot(ops.mass_phase * lap.coeffs)));
    const double scale = std::max(1.0, out.linf_nodal);
    if (std::abs(ops.phase_moment.dot(f.coeffs)) <= 1e-10 * ops.area * scale)
      out.minus_one = proj->minus_one_norm(f);
  }
  return out;
}

/// One CSV row of a simulation time series.
struct EnergyReport {
  double E = 0.0;
  double F = 0.0;
  double grad_mu_sq = 0.0;
  double grad_ubar_sq = 0.0;
  double jump_l2 = 0.0;
  double jump_h1 = 0.0;
  double energy_law_residual = 0.0;
  double mass = 0.0;
  double linf_phi = 0.0;
  double l2_mu_half = 0.0;
  double laplacian_check_norm = 0.0;
};

}  // namespace chns
