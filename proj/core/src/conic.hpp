#pragma once

// Shared pieces of the per-cell conic solvers. Vectors here are in scaled
// packed coordinates (svec): diagonal entries as-is, off-diagonal entries
// times sqrt(2), so that the Euclidean norm equals the Frobenius norm.

#include <Eigen/Core>
#include <Eigen/SparseCore>
#include <Eigen/SparseCholesky>

#include <memory>
#include <optional>

#include "polarcone/symmetric.hpp"

namespace polarcone::detail {

/// Factor mapping natural packed entries to svec entries, per cell.
Eigen::VectorXd svec_factor(int dim, std::size_t cells);

SymMatrix svec_block(const double* x, int dim);
void store_svec_block(const SymMatrix& m, double* x);

void project_psd_blocks(Eigen::VectorXd& x, int dim, int threads);
double min_eigenvalue_blocks(const Eigen::VectorXd& x, int dim);

/// Solves G y = r for a symmetric positive semidefinite G, in the
/// least-squares / minimum-norm sense when G is singular.
class GramSolver {
 public:
  explicit GramSolver(const Eigen::SparseMatrix<double>& gram);
  Eigen::VectorXd solve(const Eigen::VectorXd& r) const;
  bool dense() const { return dense_ != nullptr; }

 private:
  std::unique_ptr<Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>>> sparse_;
  struct Dense {
    Eigen::MatrixXd vectors;
    Eigen::VectorXd inv_values;
  };
  std::unique_ptr<Dense> dense_;
};

}  // namespace polarcone::detail
