#pragma once

#include <Eigen/Sparse>
#include <Eigen/SparseCholesky>
#include <Eigen/SparseLU>
#include <stdexcept>
#include <string>

#include "chns/assembly.hpp"

namespace chns {

class SolverError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct LinearSystem {
  SparseMatrix matrix;
  Vector rhs;
};

namespace detail {

inline double inf_norm(const SparseMatrix& a) {
  Vector row_sums = Vector::Zero(a.rows());
  for (int k = 0; k < a.outerSize(); ++k)
    for (SparseMatrix::InnerIterator it(a, k); it; ++it) row_sums[it.row()] += std::abs(it.value());
  return row_sums.size() ? row_sums.maxCoeff() : 0.0;
}

inline void check_residual(const SparseMatrix& a, const Vector& x, const Vector& b, const char* where) {
  const double res = (a * x - b).cwiseAbs().maxCoeff();
  const double bound = 1e-10 * (inf_norm(a) * x.cwiseAbs().maxCoeff() + b.cwiseAbs().maxCoeff());
  if (res > std::max(bound, 1e-300))
    throw SolverError(std::string(where) + ": residual " + std::to_string(res) + " exceeds contract " +
                      std::to_string(bound));
}

}  // namespace detail

/// Sparse LU with column pivoting for general (possibly nonsymmetric,
/// bordered saddle-point) systems. Keeps the symbolic analysis so repeated
/// factorizations with an identical pattern are cheaper.
class LuSolver {
 public:
  void factorize(const SparseMatrix& a) {
    if (a.rows() != a.cols()) throw SolverError("solve_direct: matrix not square");
    if (!analyzed_) {
      lu_.analyzePattern(a);
      analyzed_ = true;
    }
    lu_.factorize(a);
    if (lu_.info() != Eigen::Success) throw SolverError("solve_direct: singular matrix (" + lu_.lastErrorMessage() + ")");
  }

  Vector solve(const Vector& b) const {
    Vector x = lu_.solve(b);
    if (lu_.info() != Eigen::Success) throw SolverError("solve_direct: back substitution failed");
    return x;
  }

 private:
  Eigen::SparseLU<SparseMatrix, Eigen::COLAMDOrdering<int>> lu_;
  bool analyzed_ = false;
};

/// Simplicial LDLT for symmetric systems that are positive definite on the
/// constrained subspace (mass solves, bordered stiffness).
class SpdSolver {
 public:
  void factorize(const SparseMatrix& a) {
    if (a.rows() != a.cols()) throw SolverError("solve_spd: matrix not square");
    ldlt_.compute(a);
    if (ldlt_.info() != Eigen::Success) throw SolverError("solve_spd: factorization breakdown (matrix not SPD?)");
  }

  Vector solve(const Vector& b) const {
    Vector x = ldlt_.solve(b);
    if (ldlt_.info() != Eigen::Success) throw SolverError("solve_spd: back substitution failed");
    return x;
  }

 private:
  Eigen::SimplicialLDLT<SparseMatrix> ldlt_;
};

inline Vector solve_direct(const SparseMatrix& a, const Vector& b) {
  if (a.rows() != b.size()) throw SolverError("solve_direct: dimension mismatch");
  LuSolver lu;
  lu.factorize(a);
  Vector x = lu.solve(b);
  detail::check_residual(a, x, b, "solve_direct");
  return x;
}

inline Vector solve_spd(const SparseMatrix& a, const Vector& b) {
  if (a.rows() != b.size()) throw SolverError("solve_spd: dimension mismatch");
  SpdSolver chol;
  chol.factorize(a);
  Vector x = chol.solve(b);
  detail::check_residual(a, x, b, "solve_spd");
  return x;
}

inline Vector solve_direct(const LinearSystem& sys) { return solve_direct(sys.matrix, sys.rhs); }
inline Vector solve_spd(const LinearSystem& sys) { return solve_spd(sys.matrix, sys.rhs); }

/// Append a dense symmetric border: [[A, m], [m^T, 0]]. Used to pin means
/// (pressure, Ritz projection) exactly through a Lagrange multiplier instead
/// of perturbing the operator.
inline SparseMatrix bordered(const SparseMatrix& a, const Vector& border) {
  if (a.rows() != a.cols() || a.rows() != border.size()) throw SolverError("bordered: dimension mismatch");
  const int n = static_cast<int>(a.rows());
  std::vector<Triplet> trips;
  trips.reserve(a.nonZeros() + 2 * n);
  for (int k = 0; k < a.outerSize(); ++k)
    for (SparseMatrix::InnerIterator it(a, k); it; ++it) trips.emplace_back(it.row(), it.col(), it.value());
  for (int i = 0; i < n; ++i) {
    trips.emplace_back(i, n, border[i]);
    trips.emplace_back(n, i, border[i]);
  }
  SparseMatrix out(n + 1, n + 1);
  out.setFromTriplets(trips.begin(), trips.end());
  return out;
}

}  // namespace chns
