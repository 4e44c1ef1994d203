#pragma once

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <random>

#include "chns/config.hpp"
#include "chns/csv.hpp"
#include "chns/diagnostics.hpp"
#include "chns/gronwall.hpp"
#include "chns/scheme.hpp"
#include "chns/study.hpp"
#include "chns/vtk.hpp"

namespace chns {

namespace detail {

inline void write_failure_marker(const std::string& out_dir, const std::string& message) {
  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  std::ofstream marker(out_dir + "/FAILED");
  marker << message << "\n";
}

inline std::string snapshot_name(const std::string& dir, int m) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "state_%06d.vtk", m);
  return dir + "/" + buf;
}

inline int run_simulate(const RunConfig& cfg) {
  auto mesh = std::make_shared<const Mesh>(build_structured_mesh(cfg.nx, cfg.ny, cfg.rect));
  auto ops = make_operators(mesh);
  Stepper stepper(ops, cfg.params, cfg.grid, cfg.newton);

  std::shared_ptr<const ManufacturedSolution> sol;
  StepForcing forcing;
  bool forced = false;
  if (cfg.init_mode == "constant") {
    stepper.initialize_constant(cfg.init_value);
  } else if (cfg.init_mode == "random-seed") {
    stepper.initialize_random(cfg.seed);
  } else {
    sol = builtin_solution(cfg.mms_name);
    const ProjectionContext proj(ops, cfg.params.eta);
    stepper.initialize_exact(*sol, proj);
    forcing = mms_forcing(*sol, cfg.params);
    forced = true;
  }

  std::unique_ptr<CsvWriter> csv;
  if (cfg.write_csv)
    csv = std::make_unique<CsvWriter>(
        cfg.out_dir + "/energy.csv",
        std::vector<std::string>{"m", "t", "E", "F", "grad_mu_sq", "grad_ubar_sq", "energy_law_residual",
                                 "mass", "linf_phi"});

  EnergyHistory history;
  history.tau = cfg.grid.tau;
  history.f_initial = energy_modified(stepper.state().phi_curr, stepper.state().phi_prev,
                                      stepper.state().u_curr, cfg.params, *ops);

  const auto snapshot = [&](int m) {
    if (!cfg.write_vtk) return;
    const SchemeState& s = stepper.state();
    write_vtk_snapshot(snapshot_name(cfg.out_dir, m), *mesh, s.phi_curr, *s.mu_half_prev, s.p_curr,
                       s.u_curr, "time level " + std::to_string(m));
  };

  const auto emit_row = [&](int m, double energy_residual, const StepDiagnostics* diag) {
    if (!csv) return;
    const SchemeState& s = stepper.state();
    const double e = energy_physical(s.phi_curr, s.u_curr, cfg.params, *ops);
    const double f = energy_modified(s.phi_curr, s.phi_prev, s.u_curr, cfg.params, *ops);
    double gmu, gub;
    if (diag) {
      gmu = diag->grad_mu_sq;
      gub = diag->grad_ubar_sq;
    } else {
      const StepDiagnostics init = stepper.last_step_diagnostics();
      gmu = init.grad_mu_sq;
      gub = init.grad_ubar_sq;
    }
    csv->row({static_cast<double>(m), cfg.grid.time_at(m), e, f, gmu, gub, energy_residual,
              ops->mass(s.phi_curr), s.phi_curr.coeffs.cwiseAbs().maxCoeff()});
  };

  emit_row(1, 0.0, nullptr);
  snapshot(1);

  for (int m = 1; m < cfg.grid.step_count; ++m) {
    const FieldVector phi_before = stepper.state().phi_curr;
    const FieldVector phi_prev_before = stepper.state().phi_prev;
    const FieldVector u_before = stepper.state().u_curr;
    stepper.advance(forced ? &forcing : nullptr);

    StepDiagnostics diag = stepper.last_step_diagnostics();
    const Vector jump = stepper.state().phi_curr.coeffs - 2.0 * phi_before.coeffs + phi_prev_before.coeffs;
    diag.jump_l2_sq = jump.dot(ops->mass_phase * jump);
    diag.jump_h1_sq = jump.dot(ops->stiff_phase * jump);
    history.steps.push_back(diag);

    const int level = m + 1;
    emit_row(level, forced ? 0.0 : history.residual_at(history.steps.size(), cfg.params), &diag);
    if (level % cfg.snapshot_every == 0 || level == cfg.grid.step_count) snapshot(level);
  }
  return 0;
}

inline int run_study(const RunConfig& cfg) {
  const StudyMode mode = study_mode_from_string(cfg.study_mode);
  std::vector<StudyLevel> levels;
  if (cfg.study_levels.empty()) {
    levels = default_study_levels(mode);
  } else {
    for (const auto& [nx, tau] : cfg.study_levels) levels.push_back({nx, tau});
  }
  const auto sol = builtin_solution(cfg.study_solution);
  const ConvergenceTable table =
      run_convergence_study(*sol, levels, cfg.params, mode, cfg.study_T, cfg.rect, cfg.newton);

  CsvWriter csv(cfg.out_dir + "/rates.csv",
                {"h", "tau", "err_phi_h1", "err_u_l2", "err_mu_h1", "err_ubar_h1", "proj_phi_h1",
                 "proj_u_l2", "proj_mu_h1", "proj_ubar_h1", "rate_phi_h1", "rate_u_l2", "rate_mu_h1",
                 "rate_ubar_h1", "rate_proj_phi_h1", "rate_proj_u_l2", "rate_proj_mu_h1",
                 "rate_proj_ubar_h1"});
  const auto rates = table.rates();
  for (std::size_t i = 0; i < table.rows.size(); ++i) {
    const auto& r = table.rows[i];
    std::vector<double> row{r.h,          r.tau,       r.err_phi_h1,  r.err_u_l2,
                            r.err_mu_h1,  r.err_ubar_h1, r.proj_phi_h1, r.proj_u_l2,
                            r.proj_mu_h1, r.proj_ubar_h1};
    for (int k = 0; k < 8; ++k) row.push_back(i == 0 ? 0.0 : rates[i - 1][k]);
    csv.row(row);
  }
  return 0;
}

inline int run_sweep(const RunConfig& cfg) {
  CsvWriter csv(cfg.out_dir + "/stability.csv",
                {"tau", "steps", "F1", "max_F_after", "monotone", "max_newton_iters",
                 "max_energy_residual", "max_mass_drift"});
  bool all_monotone = true;
  for (double tau : cfg.sweep_taus) {
    auto mesh = std::make_shared<const Mesh>(build_structured_mesh(cfg.nx, cfg.ny, cfg.rect));
    auto ops = make_operators(mesh);
    Stepper stepper(ops, cfg.params, TimeGrid{tau, cfg.grid.step_count}, cfg.newton);
    stepper.initialize_random(cfg.seed);

    const double f1 = energy_modified(stepper.state().phi_curr, stepper.state().phi_prev,
                                      stepper.state().u_curr, cfg.params, *ops);
    double max_f = -1.0, max_res = 0.0, max_drift = 0.0;
    int max_iters = 0;
    bool monotone = true;
    for (int m = 1; m < cfg.grid.step_count; ++m) {
      const StepReport rep = stepper.advance();
      const double f = energy_modified(stepper.state().phi_curr, stepper.state().phi_prev,
                                       stepper.state().u_curr, cfg.params, *ops);
      max_f = std::max(max_f, f);
      max_iters = std::max(max_iters, rep.newton_iters);
      max_res = std::max(max_res, rep.energy_law_residual);
      max_drift = std::max(max_drift, rep.mass_drift);
      if (f > f1 * (1.0 + 1e-12) + 1e-12) monotone = false;
    }
    all_monotone = all_monotone && monotone;
    csv.row({tau, static_cast<double>(cfg.grid.step_count), f1, max_f, monotone ? 1.0 : 0.0,
             static_cast<double>(max_iters), max_res, max_drift});
    std::cout << "tau = " << tau << ": " << (monotone ? "modified energy monotone" : "MONOTONICITY VIOLATED")
              << " (max Newton iters " << max_iters << ")\n";
  }
  return all_monotone ? 0 : 1;
}

inline GronwallInput random_saturating_standard(std::mt19937_64& rng, int big_m) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  GronwallInput in;
  in.tau = 0.001 + 0.1 * unit(rng);
  in.c2 = 0.1 + 10.0 * unit(rng);
  in.c.resize(big_m);
  double csum = 0.0;
  for (double& v : in.c) {
    v = 5.0 * unit(rng);
    csum += v;
  }
  in.c1 = in.tau * csum * (1.0 + unit(rng));
  in.b.assign(big_m + 1, 0.0);
  in.a.resize(big_m + 1);
  in.a[0] = in.c2 * unit(rng);
  double acsum = 0.0;
  for (int m = 1; m <= big_m; ++m) {
    acsum += in.tau * in.a[m - 1] * in.c[m - 1];
    in.a[m] = in.c2 + acsum;  // saturates the hypothesis with b = 0
  }
  return in;
}

inline GronwallInput random_saturating_weighted(std::mt19937_64& rng, int big_m) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  GronwallInput in;
  in.tau = 0.001 + 0.1 * unit(rng);
  in.c2 = 0.1 + 10.0 * unit(rng);
  in.alpha = 0.05 + 0.9 * unit(rng);
  in.c.resize(big_m);
  double csum = 0.0;
  for (double& v : in.c) {
    v = 5.0 * unit(rng);
    csum += v;
  }
  in.c1 = in.tau * csum * (1.0 + unit(rng));
  in.b.assign(big_m + 1, 0.0);
  in.a.resize(big_m + 1);
  in.a[0] = 2.0 * in.c2 * unit(rng);
  double history = 0.0, decayed = 0.0;
  for (int m = 1; m <= big_m; ++m) {
    decayed = in.alpha * decayed + in.a[m - 1];
    history += in.tau * in.c[m - 1] * decayed;
    in.a[m] = in.c2 + history;  // saturates the double-sum hypothesis
  }
  return in;
}

inline int run_gronwall(const RunConfig& cfg) {
  std::mt19937_64 rng(cfg.seed);
  std::uniform_int_distribution<int> length(2, 60);
  int violations_standard = 0, violations_weighted = 0;
  const int instances = 1000;
  for (int i = 0; i < instances; ++i) {
    const GronwallInput in = random_saturating_standard(rng, length(rng));
    if (!check_gronwall_standard(in).all_conclusions_hold()) ++violations_standard;
  }
  for (int i = 0; i < instances; ++i) {
    const GronwallInput in = random_saturating_weighted(rng, length(rng));
    if (!check_gronwall_weighted(in).all_conclusions_hold()) ++violations_weighted;
  }
  const bool weight_exact = alpha_weight(1.0 / 3.0) == 1.5;

  CsvWriter csv(cfg.out_dir + "/gronwall.csv", {"instances", "violations_standard", "violations_weighted",
                                                "alpha_third_weight_exact"});
  csv.row({static_cast<double>(instances), static_cast<double>(violations_standard),
           static_cast<double>(violations_weighted), weight_exact ? 1.0 : 0.0});
  std::cout << "standard: " << violations_standard << "/" << instances << " violations, weighted: "
            << violations_weighted << "/" << instances << " violations, A(1/3) == 3/2: "
            << (weight_exact ? "yes" : "no") << "\n";
  return (violations_standard == 0 && violations_weighted == 0 && weight_exact) ? 0 : 1;
}

}  // namespace detail

/// Execute one configured run. Any failure leaves a FAILED marker next to
/// the partial outputs and returns a nonzero status.
inline int run(const RunConfig& cfg) {
  try {
    validate(cfg);
    std::filesystem::create_directories(cfg.out_dir);
    if (cfg.mode == "simulate") return detail::run_simulate(cfg);
    if (cfg.mode == "mms-study") return detail::run_study(cfg);
    if (cfg.mode == "stability-sweep") return detail::run_sweep(cfg);
    if (cfg.mode == "gronwall-selftest") return detail::run_gronwall(cfg);
    throw ConfigError("run.mode: unknown mode '" + cfg.mode + "'");
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    detail::write_failure_marker(cfg.out_dir, e.what());
    return 1;
  }
}

}  // namespace chns
