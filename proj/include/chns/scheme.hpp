#pragma once

#include <memory>
#include <optional>
#include <random>
#include <utility>
#include <vector>

#include "chns/diagnostics.hpp"
#include "chns/mms.hpp"
#include "chns/operators.hpp"
#include "chns/params.hpp"
#include "chns/projections.hpp"
#include "chns/solver.hpp"

namespace chns {

/// Two consecutive time levels of the discrete solution. After
/// initialization m = 1 with (phi^1, phi^0, u^1, u^0, p^1); the stepper is
/// defined for m >= 1 only.
struct SchemeState {
  int m = 0;
  FieldVector phi_curr, phi_prev;
  FieldVector u_curr, u_prev;
  FieldVector p_curr;
  std::optional<FieldVector> mu_half_prev;  // last computed half-step potential
};

struct StepReport {
  int newton_iters = 0;
  double final_residual = 0.0;
  double energy_law_residual = 0.0;  // single-step identity defect
  double mass_drift = 0.0;           // |(phi^m - phi^0, 1)|
  std::vector<double> residual_history;
};

class SchemeError : public std::runtime_error {
 public:
  SchemeError(const std::string& what, StepReport report)
      : std::runtime_error(what), report(std::move(report)) {}
  StepReport report;
};

/// The consecutive-level combinations the stepper is built from:
/// difference quotient, trapezoidal average, two-level extrapolation to the
/// half step, and the weighted (3/4, 1/4) average.
struct Averages {
  FieldVector delta_tau, bar, tilde, check;
};

inline Averages averages(const FieldVector& next, const FieldVector& curr, const FieldVector& prev,
                         double tau) {
  require_same_space(next, curr, "averages");
  require_same_space(curr, prev, "averages");
  Averages out;
  out.delta_tau = FieldVector(next.space, (next.coeffs - curr.coeffs) / tau);
  out.bar = FieldVector(next.space, 0.5 * next.coeffs + 0.5 * curr.coeffs);
  out.tilde = FieldVector(next.space, 1.5 * curr.coeffs - 0.5 * prev.coeffs);
  out.check = FieldVector(next.space, 0.75 * next.coeffs + 0.25 * prev.coeffs);
  return out;
}

/// Forcing of the transport and momentum equations, evaluated at the
/// half-integer time the step is centered on. Used by manufactured-solution
/// runs; unforced simulations pass none.
struct StepForcing {
  std::function<double(Vec2, double)> phase;
  std::function<Vec2(Vec2, double)> momentum;
};

/// Forcing closures referencing the solution; the caller keeps it alive for
/// the duration of the run.
inline StepForcing mms_forcing(const ManufacturedSolution& sol, const PhysParams& params) {
  return {[&sol, params](Vec2 x, double t) { return sol.f_phi(x, t, params); },
          [&sol, params](Vec2 x, double t) { return sol.f_velocity(x, t, params); }};
}

/// Second-order convex-splitting stepper for the coupled phase-field / flow
/// system. Each step solves the four coupled equations monolithically with
/// Newton; only the chi block is re-linearized between iterations. Mean
/// constraints (phase mass, pressure mean) are enforced through two border
/// multipliers.
class Stepper {
 public:
  Stepper(std::shared_ptr<const DiscreteOperators> ops, PhysParams params, TimeGrid grid,
          NewtonOptions newton = {})
      : ops_(std::move(ops)), params_(params), grid_(grid), newton_(newton) {
    validate(params_);
    validate(grid_);
    np_ = ops_->phase->dof_count();
    nu_ = ops_->velocity->dof_count();
    total_ = 3 * np_ + nu_ + 2;
  }

  const SchemeState& state() const { return state_; }
  const DiscreteOperators& ops() const { return *ops_; }
  const PhysParams& params() const { return params_; }
  const TimeGrid& grid() const { return grid_; }
  double initial_mass() const { return mass0_; }
  const FieldVector& mu_half() const { return *state_.mu_half_prev; }

  /// phi^0 = phi^1 = c, u = 0, p = 0: a steady state of the scheme.
  void initialize_constant(double c) {
    FieldVector phi(ops_->phase);
    phi.coeffs.setConstant(c);
    set_first_levels(phi, phi, FieldVector(ops_->velocity), FieldVector(ops_->velocity),
                     FieldVector(ops_->pressure));
  }

  /// Ritz/Stokes projections of the exact fields at t = 0 and t = tau.
  void initialize_exact(const ManufacturedSolution& sol, const ProjectionContext& proj) {
    const FieldVector phi0 = proj.ritz_project(sol.phi_field(0.0));
    const FieldVector phi1 = proj.ritz_project(sol.phi_field(grid_.tau));
    auto [u0, p0] = proj.stokes_project(sol.velocity_field(0.0), sol.pressure_field(0.0));
    auto [u1, p1] = proj.stokes_project(sol.velocity_field(grid_.tau), sol.pressure_field(grid_.tau));
    (void)p0;
    set_first_levels(phi1, phi0, u1, u0, p1);
  }

  /// First level from data at t = 0 only: one first-order convex-splitting
  /// step (implicit phi^3 and full stiffness, explicit concave part and
  /// transport freeze) produces (phi^1, u^1, p^1).
  StepReport initialize_bootstrap(const FieldVector& phi0, const FieldVector& u0) {
    FieldVector p0(ops_->pressure);
    Stencil st;
    st.ubar_new = 1.0;
    st.ubar_cur = 0.0;
    st.pbar_new = 1.0;
    st.pbar_cur = 0.0;
    st.check_new = 1.0;
    st.check_prev = 0.0;
    st.conv_phase = &phi0;
    st.conv_vel = &u0;
    st.concave = &phi0;
    st.cubic = true;

    // Starting guesses: the previous level, with the potential predicted by a
    // mass solve that zeroes the potential rows at the guess.
    SpdSolver mass;
    mass.factorize(ops_->mass_phase);
    const ChiAssembly cube = assemble_cubic(phi0);
    FieldVector mu_guess(ops_->phase,
                         mass.solve((cube.residual - ops_->mass_phase * phi0.coeffs) / params_.epsilon +
                                    params_.epsilon * (ops_->stiff_phase * phi0.coeffs)));

    Solution sol;
    StepReport report = solve_coupled(st, phi0, phi0, u0, p0, phi0, mu_guess, u0, p0, nullptr, 0.0, sol);

    mass0_ = ops_->phase_moment.dot(phi0.coeffs);
    state_.m = 1;
    state_.phi_curr = sol.phi;
    state_.phi_prev = phi0;
    state_.u_curr = sol.u;
    state_.u_prev = u0;
    state_.p_curr = sol.p;
    state_.mu_half_prev = mu_half_initial(state_.phi_curr, state_.phi_prev, params_, *ops_);
    report.mass_drift = std::abs(ops_->phase_moment.dot(state_.phi_curr.coeffs) - mass0_);
    return report;
  }

  /// Spinodal start: per-vertex uniform values in [-amplitude, amplitude]
  /// from a seeded generator, quiescent flow, then the bootstrap step.
  StepReport initialize_random(std::uint64_t seed, double amplitude = 0.05) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> dist(-amplitude, amplitude);
    FieldVector phi0(ops_->phase);
    for (int i = 0; i < np_; ++i) phi0.coeffs[i] = dist(rng);
    return initialize_bootstrap(phi0, FieldVector(ops_->velocity));
  }

  /// Advance one step, m -> m + 1, for m >= 1.
  StepReport advance(const StepForcing* forcing = nullptr) {
    if (state_.m < 1) throw std::logic_error("Stepper::advance: state not initialized (m must be >= 1)");

    const FieldVector phi_tilde(ops_->phase, 1.5 * state_.phi_curr.coeffs - 0.5 * state_.phi_prev.coeffs);
    const FieldVector u_tilde(ops_->velocity, 1.5 * state_.u_curr.coeffs - 0.5 * state_.u_prev.coeffs);

    Stencil st;
    st.ubar_new = 0.5;
    st.ubar_cur = 0.5;
    st.pbar_new = 0.5;
    st.pbar_cur = 0.5;
    st.check_new = 0.75;
    st.check_prev = 0.25;
    st.conv_phase = &phi_tilde;
    st.conv_vel = &u_tilde;
    st.concave = &phi_tilde;
    st.cubic = false;

    const FieldVector u_guess(ops_->velocity, 2.0 * state_.u_curr.coeffs - state_.u_prev.coeffs);
    const double t_mid = grid_.time_at(state_.m + 0.5);

    Solution sol;
    StepReport report =
        solve_coupled(st, state_.phi_curr, state_.phi_prev, state_.u_curr, state_.p_curr, phi_tilde,
                      *state_.mu_half_prev, u_guess, state_.p_curr, forcing, t_mid, sol);

    // Single-step energy identity defect (telescopes into the energy law).
    const double f_old = energy_modified(state_.phi_curr, state_.phi_prev, state_.u_curr, params_, *ops_);
    const double f_new = energy_modified(sol.phi, state_.phi_curr, sol.u, params_, *ops_);
    const Vector ubar = 0.5 * (sol.u.coeffs + state_.u_curr.coeffs);
    const Vector jump = sol.phi.coeffs - 2.0 * state_.phi_curr.coeffs + state_.phi_prev.coeffs;
    const double gmu = sol.mu.coeffs.dot(ops_->stiff_phase * sol.mu.coeffs);
    const double gub = ubar.dot(ops_->stiff_vel * ubar);
    const double jl2 = jump.dot(ops_->mass_phase * jump);
    const double jh1 = jump.dot(ops_->stiff_phase * jump);
    report.energy_law_residual =
        std::abs(f_new - f_old + grid_.tau * (params_.epsilon * gmu + params_.eta / params_.gamma * gub) +
                 jl2 / (4.0 * params_.epsilon) + params_.epsilon / 8.0 * jh1);

    state_.phi_prev = std::move(state_.phi_curr);
    state_.phi_curr = std::move(sol.phi);
    state_.u_prev = std::move(state_.u_curr);
    state_.u_curr = std::move(sol.u);
    state_.p_curr = std::move(sol.p);
    state_.mu_half_prev = std::move(sol.mu);
    state_.m += 1;

    report.mass_drift = std::abs(ops_->phase_moment.dot(state_.phi_curr.coeffs) - mass0_);
    return report;
  }

  /// Diagnostics of the step that produced the current state.
  StepDiagnostics last_step_diagnostics() const {
    StepDiagnostics d;
    const Vector ubar = 0.5 * (state_.u_curr.coeffs + state_.u_prev.coeffs);
    d.grad_mu_sq = state_.mu_half_prev->coeffs.dot(ops_->stiff_phase * state_.mu_half_prev->coeffs);
    d.grad_ubar_sq = ubar.dot(ops_->stiff_vel * ubar);
    d.f_after = energy_modified(state_.phi_curr, state_.phi_prev, state_.u_curr, params_, *ops_);
    return d;
  }

 private:
  struct Stencil {
    double ubar_new = 0.5, ubar_cur = 0.5;
    double pbar_new = 0.5, pbar_cur = 0.5;
    double check_new = 0.75, check_prev = 0.25;
    const FieldVector* conv_phase = nullptr;  // frozen first slot of the b form
    const FieldVector* conv_vel = nullptr;    // frozen first slot of the B form
    const FieldVector* concave = nullptr;     // explicit part of the potential rows
    bool cubic = false;                       // phi^3 instead of chi(new, curr)
  };

  struct Solution {
    FieldVector phi, mu, u, p;
  };

  void set_first_levels(FieldVector phi1, FieldVector phi0, FieldVector u1, FieldVector u0, FieldVector p1) {
    mass0_ = ops_->phase_moment.dot(phi0.coeffs);
    state_.m = 1;
    state_.phi_curr = std::move(phi1);
    state_.phi_prev = std::move(phi0);
    state_.u_curr = std::move(u1);
    state_.u_prev = std::move(u0);
    state_.p_curr = std::move(p1);
    state_.mu_half_prev = mu_half_initial(state_.phi_curr, state_.phi_prev, params_, *ops_);
  }

  // Unknown layout: [phi | mu | u | p | lambda_mass | lambda_pressure].
  int off_phi() const { return 0; }
  int off_mu() const { return np_; }
  int off_u() const { return 2 * np_; }
  int off_p() const { return 2 * np_ + nu_; }
  int off_lm() const { return 3 * np_ + nu_; }
  int off_lp() const { return 3 * np_ + nu_ + 1; }

  ChiAssembly assemble_nonlinearity(const Stencil& st, const Vector& x, const FieldVector& phi_cur) const {
    const FieldVector phi_n_field(ops_->phase, x.segment(off_phi(), np_));
    return st.cubic ? assemble_cubic(phi_n_field) : assemble_chi(phi_n_field, phi_cur);
  }

  Vector residual(const Stencil& st, const Vector& x, const Vector& nl_residual, const FieldVector& phi_cur,
                  const FieldVector& phi_prev, const FieldVector& u_cur, const FieldVector& p_cur,
                  const SparseMatrix& conv_b, const SparseMatrix& conv_k, const Vector& load_phase,
                  const Vector& load_mom) const {
    const DiscreteOperators& o = *ops_;
    const double tau = grid_.tau;
    const double eps = params_.epsilon;

    const auto phi_n = x.segment(off_phi(), np_);
    const auto mu = x.segment(off_mu(), np_);
    const auto u_n = x.segment(off_u(), nu_);
    const auto p_n = x.segment(off_p(), np_);
    const double lm = x[off_lm()];
    const double lp = x[off_lp()];

    const Vector ubar = st.ubar_new * u_n + st.ubar_cur * u_cur.coeffs;
    const Vector pbar = st.pbar_new * p_n + st.pbar_cur * p_cur.coeffs;

    Vector r(total_);

    // transport rows, tested with the scalar basis
    r.segment(off_phi(), np_) = o.mass_phase * ((phi_n - phi_cur.coeffs) / tau) +
                                eps * (o.stiff_phase * mu) + conv_b * ubar + lm * o.phase_moment -
                                load_phase;

    // potential rows
    r.segment(off_mu(), np_) =
        nl_residual / eps - (o.mass_phase * st.concave->coeffs) / eps +
        eps * (o.stiff_phase * (st.check_new * phi_n + st.check_prev * phi_prev.coeffs)) - o.mass_phase * mu;

    // momentum rows; Dirichlet rows pin the boundary values
    Vector rm = o.mass_vel * ((u_n - u_cur.coeffs) / tau) + params_.eta * (o.stiff_vel * ubar) +
                conv_k * ubar - o.divergence.transpose() * pbar - params_.gamma * (conv_b.transpose() * mu) -
                load_mom;
    for (int d = 0; d < nu_; ++d)
      if (o.velocity->is_dirichlet(d)) rm[d] = u_n[d];
    r.segment(off_u(), nu_) = rm;

    // discrete divergence rows with the pressure-mean border
    r.segment(off_p(), np_) = o.divergence * ubar + lp * o.phase_moment;

    r[off_lm()] = o.phase_moment.dot(phi_n - phi_cur.coeffs);
    r[off_lp()] = o.phase_moment.dot(p_n);
    return r;
  }

  SparseMatrix base_jacobian(const Stencil& st, const SparseMatrix& conv_b, const SparseMatrix& conv_k) const {
    const DiscreteOperators& o = *ops_;
    const double tau = grid_.tau;
    const double eps = params_.epsilon;

    std::vector<Triplet> trips;
    trips.reserve(o.mass_phase.nonZeros() * 4 + o.stiff_vel.nonZeros() + 2 * conv_b.nonZeros() +
                  conv_k.nonZeros() + 2 * o.divergence.nonZeros() + 4 * np_ + nu_);

    const auto add_block = [&trips](const SparseMatrix& m, int row0, int col0, double scale) {
      for (int k = 0; k < m.outerSize(); ++k)
        for (SparseMatrix::InnerIterator it(m, k); it; ++it)
          trips.emplace_back(row0 + it.row(), col0 + it.col(), scale * it.value());
    };

    add_block(o.mass_phase, off_phi(), off_phi(), 1.0 / tau);
    add_block(o.stiff_phase, off_phi(), off_mu(), eps);
    add_block(conv_b, off_phi(), off_u(), st.ubar_new);
    add_block(o.stiff_phase, off_mu(), off_phi(), eps * st.check_new);
    add_block(o.mass_phase, off_mu(), off_mu(), -1.0);

    // momentum block, skipping Dirichlet rows
    const auto add_mom = [&](const SparseMatrix& m, int col0, double scale) {
      for (int k = 0; k < m.outerSize(); ++k)
        for (SparseMatrix::InnerIterator it(m, k); it; ++it)
          if (!o.velocity->is_dirichlet(static_cast<int>(it.row())))
            trips.emplace_back(off_u() + it.row(), col0 + it.col(), scale * it.value());
    };
    add_mom(o.mass_vel, off_u(), 1.0 / tau);
    add_mom(o.stiff_vel, off_u(), params_.eta * st.ubar_new);
    add_mom(conv_k, off_u(), st.ubar_new);
    for (int k = 0; k < o.divergence.outerSize(); ++k)
      for (SparseMatrix::InnerIterator it(o.divergence, k); it; ++it) {
        if (!o.velocity->is_dirichlet(static_cast<int>(it.col())))
          trips.emplace_back(off_u() + it.col(), off_p() + it.row(), -st.pbar_new * it.value());
        trips.emplace_back(off_p() + it.row(), off_u() + it.col(), st.ubar_new * it.value());
      }
    for (int k = 0; k < conv_b.outerSize(); ++k)
      for (SparseMatrix::InnerIterator it(conv_b, k); it; ++it)
        if (!o.velocity->is_dirichlet(static_cast<int>(it.col())))
          trips.emplace_back(off_u() + it.col(), off_mu() + it.row(), -params_.gamma * it.value());
    for (int d = 0; d < nu_; ++d)
      if (o.velocity->is_dirichlet(d)) trips.emplace_back(off_u() + d, off_u() + d, 1.0);

    for (int i = 0; i < np_; ++i) {
      trips.emplace_back(off_phi() + i, off_lm(), o.phase_moment[i]);
      trips.emplace_back(off_lm(), off_phi() + i, o.phase_moment[i]);
      trips.emplace_back(off_p() + i, off_lp(), o.phase_moment[i]);
      trips.emplace_back(off_lp(), off_p() + i, o.phase_moment[i]);
    }

    SparseMatrix j(total_, total_);
    j.setFromTriplets(trips.begin(), trips.end());
    return j;
  }

  SparseMatrix chi_jacobian_block(const SparseMatrix& block) const {
    std::vector<Triplet> trips;
    trips.reserve(block.nonZeros());
    for (int k = 0; k < block.outerSize(); ++k)
      for (SparseMatrix::InnerIterator it(block, k); it; ++it)
        trips.emplace_back(off_mu() + it.row(), off_phi() + it.col(), it.value() / params_.epsilon);
    SparseMatrix j(total_, total_);
    j.setFromTriplets(trips.begin(), trips.end());
    return j;
  }

  StepReport solve_coupled(const Stencil& st, const FieldVector& phi_cur, const FieldVector& phi_prev,
                           const FieldVector& u_cur, const FieldVector& p_cur,
                           const FieldVector& phi_guess, const FieldVector& mu_guess,
                           const FieldVector& u_guess, const FieldVector& p_guess,
                           const StepForcing* forcing, double t_mid, Solution& out) {
    const DiscreteOperators& o = *ops_;

    const SparseMatrix conv_b = assemble_phase_convection(*st.conv_phase, *o.velocity, *o.phase);
    const SparseMatrix conv_k = assemble_skew_convection(*st.conv_vel);

    Vector load_phase = Vector::Zero(np_);
    Vector load_mom = Vector::Zero(nu_);
    if (forcing) {
      if (forcing->phase)
        load_phase = assemble_load(*o.phase, [&](Vec2 x) { return forcing->phase(x, t_mid); });
      if (forcing->momentum)
        load_mom = assemble_vector_load(*o.velocity, [&](Vec2 x) { return forcing->momentum(x, t_mid); });
    }

    Vector x(total_);
    x.segment(off_phi(), np_) = phi_guess.coeffs;
    x.segment(off_mu(), np_) = mu_guess.coeffs;
    x.segment(off_u(), nu_) = u_guess.coeffs;
    x.segment(off_p(), np_) = p_guess.coeffs;
    x[off_lm()] = 0.0;
    x[off_lp()] = 0.0;

    const SparseMatrix base = base_jacobian(st, conv_b, conv_k);

    StepReport report;
    ChiAssembly nl = assemble_nonlinearity(st, x, phi_cur);
    Vector r = residual(st, x, nl.residual, phi_cur, phi_prev, u_cur, p_cur, conv_b, conv_k, load_phase,
                        load_mom);
    double res = r.cwiseAbs().maxCoeff();
    report.residual_history.push_back(res);

    while (res > newton_.tol) {
      if (report.newton_iters >= newton_.max_iters) {
        report.final_residual = res;
        throw SchemeError("Newton did not converge within " + std::to_string(newton_.max_iters) +
                              " iterations (residual " + std::to_string(res) + ")",
                          report);
      }
      const SparseMatrix j = base + chi_jacobian_block(nl.jacobian);
      lu_.factorize(j);
      x -= lu_.solve(r);
      nl = assemble_nonlinearity(st, x, phi_cur);
      r = residual(st, x, nl.residual, phi_cur, phi_prev, u_cur, p_cur, conv_b, conv_k, load_phase,
                   load_mom);
      res = r.cwiseAbs().maxCoeff();
      report.newton_iters += 1;
      report.residual_history.push_back(res);
    }
    report.final_residual = res;

    out.phi = FieldVector(o.phase, x.segment(off_phi(), np_));
    out.mu = FieldVector(o.phase, x.segment(off_mu(), np_));
    out.u = FieldVector(o.velocity, x.segment(off_u(), nu_));
    out.p = FieldVector(o.pressure, x.segment(off_p(), np_));
    return report;
  }

 public:
  /// Half-step chemical potential recovered from the first two phase levels:
  /// (mu, psi) = (chi(phi^1, phi^0), psi)/eps - (phibar, psi)/eps
  ///           + eps (grad phibar, grad psi).
  static FieldVector mu_half_initial(const FieldVector& phi1, const FieldVector& phi0, const PhysParams& p,
                                     const DiscreteOperators& ops) {
    require_same_space(phi1, phi0, "mu_half_initial");
    const Vector bar = 0.5 * (phi1.coeffs + phi0.coeffs);
    const Vector rhs = assemble_chi(phi1, phi0).residual / p.epsilon - (ops.mass_phase * bar) / p.epsilon +
                       p.epsilon * (ops.stiff_phase * bar);
    return FieldVector(phi1.space, solve_spd(ops.mass_phase, rhs));
  }

 private:
  std::shared_ptr<const DiscreteOperators> ops_;
  PhysParams params_;
  TimeGrid grid_;
  NewtonOptions newton_;
  SchemeState state_;
  LuSolver lu_;
  double mass0_ = 0.0;
  int np_ = 0, nu_ = 0, total_ = 0;
};

inline FieldVector mu_half_initial(const FieldVector& phi1, const FieldVector& phi0, const PhysParams& p,
                                   const DiscreteOperators& ops) {
  return Stepper::mu_half_initial(phi1, phi0, p, ops);
}

/// Residual of the transport equation over the first (initialization) step,
/// returned as a field: (rho, nu) = (dtau phi^{1/2}, nu) + eps a(mu^{1/2}, nu)
/// + b(phibar^{1/2}, ubar^{1/2}, nu). Not expected to vanish; tracked as a
/// diagnostic.
inline FieldVector rho_half_residual(const SchemeState& state, const PhysParams& p,
                                     const DiscreteOperators& ops, double tau) {
  if (state.m != 1 || !state.mu_half_prev)
    throw std::invalid_argument("rho_half_residual: expects the freshly initialized state (m = 1)");
  const FieldVector phibar(state.phi_curr.space, 0.5 * (state.phi_curr.coeffs + state.phi_prev.coeffs));
  const Vector ubar = 0.5 * (state.u_curr.coeffs + state.u_prev.coeffs);
  const SparseMatrix conv = assemble_phase_convection(phibar, *ops.velocity, *ops.phase);
  const Vector rhs = ops.mass_phase * ((state.phi_curr.coeffs - state.phi_prev.coeffs) / tau) +
                     p.epsilon * (ops.stiff_phase * state.mu_half_prev->coeffs) + conv * ubar;
  return FieldVector(state.phi_curr.space, solve_spd(ops.mass_phase, rhs));
}

}  // namespace chns
