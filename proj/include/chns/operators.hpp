#pragma once

#include <memory>

#include "chns/assembly.hpp"

namespace chns {

/// Assembled constant operators over one mesh, shared by projections, the
/// time stepper, and diagnostics. Immutable after construction.
struct DiscreteOperators {
  std::shared_ptr<const Mesh> mesh;
  std::shared_ptr<const FunctionSpace> phase;     // P1
  std::shared_ptr<const FunctionSpace> pressure;  // P1, mean-zero
  std::shared_ptr<const FunctionSpace> velocity;  // P2 vector, homogeneous Dirichlet

  SparseMatrix mass_phase, stiff_phase;
  SparseMatrix mass_vel, stiff_vel;
  SparseMatrix divergence;  // pressure rows x velocity columns

  Vector phase_moment;  // (1, basis_i): mass-matrix row sums; the mean border
  double area = 0.0;

  double mean(const FieldVector& f) const { return phase_moment.dot(f.coeffs) / area; }
  double mass(const FieldVector& f) const { return phase_moment.dot(f.coeffs); }
};

inline std::shared_ptr<const DiscreteOperators> make_operators(std::shared_ptr<const Mesh> mesh) {
  auto ops = std::make_shared<DiscreteOperators>();
  ops->mesh = mesh;
  ops->phase = make_p1_space(mesh);
  ops->pressure = make_pressure_space(mesh);
  ops->velocity = make_velocity_space(mesh);
  ops->mass_phase = assemble_mass(*ops->phase);
  ops->stiff_phase = assemble_stiffness(*ops->phase);
  ops->mass_vel = assemble_mass(*ops->velocity);
  ops->stiff_vel = assemble_stiffness(*ops->velocity);
  ops->divergence = assemble_divergence(*ops->velocity, *ops->pressure);
  ops->phase_moment = ops->mass_phase * Vector::Ones(ops->phase->dof_count());
  ops->area = mesh->total_area();
  return ops;
}

}  // namespace chns
