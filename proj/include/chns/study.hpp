#pragma once

#include <array>
#include <cmath>
#include <cstdlib>
#include <future>
#include <string>
#include <vector>

#include "chns/mms.hpp"
#include "chns/scheme.hpp"

namespace chns {

enum class StudyMode { Temporal, Spatial, Coupled };

inline StudyMode study_mode_from_string(const std::string& s) {
  if (s == "temporal") return StudyMode::Temporal;
  if (s == "spatial") return StudyMode::Spatial;
  if (s == "coupled") return StudyMode::Coupled;
  throw std::invalid_argument("study.mode: unknown mode '" + s + "'");
}

struct StudyLevel {
  int nx = 8;
  double tau = 0.1;
};

/// Error norms of one refinement level. The "err_*" columns measure against
/// the exact fields; the "proj_*" columns measure against their Ritz/Stokes
/// projections at each time level, which is what the scheme's second-order
/// temporal accuracy is stated in (the projection error itself is purely
/// spatial and cancels there).
struct ConvergenceRow {
  double h = 0.0;
  double tau = 0.0;
  double err_phi_h1 = 0.0;        // max_m ||grad(phi(t_m) - phi_h^m)||
  double err_u_l2 = 0.0;          // max_m ||u(t_m) - u_h^m||
  double err_mu_h1 = 0.0;         // sqrt(tau sum ||grad(mu(t_m+1/2) - mu_h)||^2)
  double err_ubar_h1 = 0.0;       // sqrt(tau sum ||grad(ubar - ubar_h)||^2)
  double proj_phi_h1 = 0.0;
  double proj_u_l2 = 0.0;
  double proj_mu_h1 = 0.0;
  double proj_ubar_h1 = 0.0;

  double combined_energy_error() const {
    return std::sqrt(err_phi_h1 * err_phi_h1 + err_u_l2 * err_u_l2 + err_mu_h1 * err_mu_h1 +
                     err_ubar_h1 * err_ubar_h1);
  }
};

struct ConvergenceTable {
  StudyMode mode = StudyMode::Temporal;
  std::vector<ConvergenceRow> rows;

  /// log2 ratios of consecutive rows (valid when the refined parameter is
  /// halved level to level). Eight columns matching the error columns.
  std::vector<std::array<double, 8>> rates() const {
    std::vector<std::array<double, 8>> out;
    for (std::size_t i = 0; i + 1 < rows.size(); ++i) {
      const auto& a = rows[i];
      const auto& b = rows[i + 1];
      const auto rate = [](double ea, double eb) {
        return (ea > 0.0 && eb > 0.0) ? std::log2(ea / eb) : 0.0;
      };
      out.push_back({rate(a.err_phi_h1, b.err_phi_h1), rate(a.err_u_l2, b.err_u_l2),
                     rate(a.err_mu_h1, b.err_mu_h1), rate(a.err_ubar_h1, b.err_ubar_h1),
                     rate(a.proj_phi_h1, b.proj_phi_h1), rate(a.proj_u_l2, b.proj_u_l2),
                     rate(a.proj_mu_h1, b.proj_mu_h1), rate(a.proj_ubar_h1, b.proj_ubar_h1)});
    }
    return out;
  }
};

namespace detail {

inline ConvergenceRow run_study_level(const ManufacturedSolution& sol, const StudyLevel& level,
                                      const PhysParams& params, double t_final, const Rect& rect,
                                      const NewtonOptions& newton) {
  const int steps = static_cast<int>(std::lround(t_final / level.tau));
  if (std::abs(steps * level.tau - t_final) > 1e-12 * t_final)
    throw std::invalid_argument("run_convergence_study: tau must divide the final time");

  auto mesh = std::make_shared<const Mesh>(build_structured_mesh(level.nx, level.nx, rect));
  auto ops = make_operators(mesh);
  const ProjectionContext proj(ops, params.eta);
  Stepper stepper(ops, params, TimeGrid{level.tau, steps}, newton);
  stepper.initialize_exact(sol, proj);
  const StepForcing forcing = mms_forcing(sol, params);

  const auto stiffness_norm = [&](const Vector& v, const SparseMatrix& a) {
    return std::sqrt(std::max(0.0, v.dot(a * v)));
  };

  ConvergenceRow row;
  row.h = mesh->h_max;
  row.tau = level.tau;

  FieldVector stokes_u_prev(ops->velocity);  // projected exact velocity at the previous level
  const auto record_level = [&](int m, const FieldVector& phi_h, const FieldVector& u_h) {
    const double t = level.tau * m;
    row.err_phi_h1 = std::max(
        row.err_phi_h1, h1_semi_error_scalar(phi_h, [&](Vec2 x) { return sol.grad_phi(x, t); }));
    row.err_u_l2 =
        std::max(row.err_u_l2, l2_error_vector(u_h, [&](Vec2 x) { return sol.velocity(x, t); }));
    const FieldVector ritz = proj.ritz_project(sol.phi_field(t));
    row.proj_phi_h1 =
        std::max(row.proj_phi_h1, stiffness_norm(ritz.coeffs - phi_h.coeffs, ops->stiff_phase));
    auto [pu, pp] = proj.stokes_project(sol.velocity_field(t), sol.pressure_field(t));
    (void)pp;
    row.proj_u_l2 = std::max(
        row.proj_u_l2, std::sqrt(std::max(0.0, (pu.coeffs - u_h.coeffs)
                                                   .dot(ops->mass_vel * (pu.coeffs - u_h.coeffs)))));
    return pu;
  };

  record_level(0, stepper.state().phi_prev, stepper.state().u_prev);
  stokes_u_prev = record_level(1, stepper.state().phi_curr, stepper.state().u_curr);

  double mu_err_sq = 0.0, ubar_err_sq = 0.0, proj_mu_sq = 0.0, proj_ubar_sq = 0.0;
  for (int m = 1; m < steps; ++m) {
    const FieldVector u_before = stepper.state().u_curr;
    stepper.advance(&forcing);
    const SchemeState& s = stepper.state();
    const double t_half = level.tau * (m + 0.5);

    const FieldVector& mu_h = stepper.mu_half();
    mu_err_sq += level.tau * std::pow(h1_semi_error_scalar(
                                          mu_h, [&](Vec2 x) { return sol.grad_mu(x, t_half, params.epsilon); }),
                                      2);
    const FieldVector ubar_h(ops->velocity, 0.5 * (u_before.coeffs + s.u_curr.coeffs));
    ubar_err_sq +=
        level.tau *
        std::pow(h1_semi_error_vector(ubar_h,
                                      [&](Vec2 x) {
                                        return (0.5 * (sol.grad_velocity(x, level.tau * m) +
                                                       sol.grad_velocity(x, level.tau * (m + 1))))
                                            .eval();
                                      }),
                 2);

    const FieldVector ritz_mu = proj.ritz_project(sol.mu_field(t_half, params.epsilon));
    proj_mu_sq +=
        level.tau * std::pow(stiffness_norm(ritz_mu.coeffs - mu_h.coeffs, ops->stiff_phase), 2);

    const FieldVector stokes_u = record_level(m + 1, s.phi_curr, s.u_curr);
    const Vector ebar = 0.5 * (stokes_u_prev.coeffs + stokes_u.coeffs) - ubar_h.coeffs;
    proj_ubar_sq += level.tau * std::pow(stiffness_norm(ebar, ops->stiff_vel), 2);
    stokes_u_prev = stokes_u;
  }
  row.err_mu_h1 = std::sqrt(mu_err_sq);
  row.err_ubar_h1 = std::sqrt(ubar_err_sq);
  row.proj_mu_h1 = std::sqrt(proj_mu_sq);
  row.proj_ubar_h1 = std::sqrt(proj_ubar_sq);
  return row;
}

inline int study_worker_count(int levels) {
  int limit = 1;
  if (const char* env = std::getenv("CHNS_THREADS")) {
    limit = std::max(1, std::atoi(env));
  }
  return std::min(levels, limit);
}

}  // namespace detail

/// March every level to the final time and tabulate the error norms and
/// their observed orders. Levels are independent; CHNS_THREADS > 1 lets them
/// run concurrently.
inline ConvergenceTable run_convergence_study(const ManufacturedSolution& sol,
                                              const std::vector<StudyLevel>& levels,
                                              const PhysParams& params, StudyMode mode,
                                              double t_final = 0.5, const Rect& rect = Rect{},
                                              const NewtonOptions& newton = {}) {
  validate(params);
  if (levels.empty()) throw std::invalid_argument("run_convergence_study: no levels");

  ConvergenceTable table;
  table.mode = mode;
  table.rows.resize(levels.size());

  const int workers = detail::study_worker_count(static_cast<int>(levels.size()));
  if (workers <= 1) {
    for (std::size_t i = 0; i < levels.size(); ++i)
      table.rows[i] = detail::run_study_level(sol, levels[i], params, t_final, rect, newton);
  } else {
    std::vector<std::future<ConvergenceRow>> futures;
    for (std::size_t i = 0; i < levels.size(); ++i)
      futures.push_back(std::async(std::launch::async, [&, i] {
        return detail::run_study_level(sol, levels[i], params, t_final, rect, newton);
      }));
    for (std::size_t i = 0; i < levels.size(); ++i) table.rows[i] = futures[i].get();
  }
  return table;
}

inline std::vector<StudyLevel> default_study_levels(StudyMode mode) {
  switch (mode) {
    case StudyMode::Temporal:
      return {{64, 0.1}, {64, 0.05}, {64, 0.025}};
    case StudyMode::Spatial:
      return {{8, 1e-3}, {16, 1e-3}, {32, 1e-3}};
    case StudyMode::Coupled:
      return {{8, 0.1}, {16, 0.05}, {32, 0.025}};
  }
  throw std::logic_error("default_study_levels: unreachable");
}

}  // namespace chns
