#pragma once

#include <stdexcept>

namespace chns {

struct PhysParams {
  double epsilon = 0.1;  // interface width
  double eta = 1.0;      // viscosity (1/Re)
  double gamma = 1.0;    // capillary coefficient (1/We*)
};

inline void validate(const PhysParams& p) {
  if (!(p.epsilon > 0.0)) throw std::invalid_argument("params.epsilon must be positive");
  if (!(p.eta > 0.0)) throw std::invalid_argument("params.eta must be positive");
  if (!(p.gamma > 0.0)) throw std::invalid_argument("params.gamma must be positive");
}

/// Uniform partition of [0, T] with step tau: t_m = m * tau, m = 0..M.
struct TimeGrid {
  double tau = 0.01;
  int step_count = 100;

  double total_time() const { return tau * step_count; }
  double time_at(double m) const { return m * tau; }
};

inline void validate(const TimeGrid& g) {
  if (!(g.tau > 0.0)) throw std::invalid_argument("grid.tau must be positive");
  if (g.step_count < 1) throw std::invalid_argument("grid.steps must be >= 1");
}

struct NewtonOptions {
  double tol = 1e-11;  // absolute bound on the assembled residual, inf norm
  int max_iters = 30;
};

}  // namespace chns
