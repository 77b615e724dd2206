#include "conic.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <limits>

namespace polarcone::detail {

namespace {
constexpr double kSqrt2 = 1.4142135623730950488;
}

Eigen::VectorXd svec_factor(int dim, std::size_t cells) {
  const int p = sym_size(dim);
  Eigen::VectorXd f(static_cast<Eigen::Index>(cells) * p);
  for (std::size_t c = 0; c < cells; ++c) {
    int k = 0;
    for (int i = 0; i < dim; ++i) {
      for (int j = i; j < dim; ++j, ++k) f[c * p + k] = i == j ? 1.0 : kSqrt2;
    }
  }
  return f;
}

SymMatrix svec_block(const double* x, int dim) {
  SymMatrix m(dim, dim);
  int k = 0;
  for (int i = 0; i < dim; ++i) {
    for (int j = i; j < dim; ++j, ++k) {
      const double v = i == j ? x[k] : x[k] / kSqrt2;
      m(i, j) = v;
      m(j, i) = v;
    }
  }
  return m;
}

void store_svec_block(const SymMatrix& m, double* x) {
  const int dim = static_cast<int>(m.rows());
  int k = 0;
  for (int i = 0; i < dim; ++i) {
    for (int j = i; j < dim; ++j, ++k) x[k] = i == j ? m(i, j) : kSqrt2 * m(i, j);
  }
}

void project_psd_blocks(Eigen::VectorXd& x, int dim, int threads) {
  const int p = sym_size(dim);
  const auto cells = static_cast<long>(x.size() / p);
  if (dim == 1) {
    x = x.cwiseMax(0.0);
    return;
  }
  (void)threads;
#if defined(POLARCONE_HAVE_OPENMP)
#pragma omp parallel for num_threads(threads) if (threads > 1)
#endif
  for (long c = 0; c < cells; ++c) {
    double* block = x.data() + c * p;
    store_svec_block(project_psd(svec_block(block, dim)), block);
  }
}

double min_eigenvalue_blocks(const Eigen::VectorXd& x, int dim) {
  const int p = sym_size(dim);
  double m = std::numeric_limits<double>::infinity();
  for (Eigen::Index c = 0; c < x.size() / p; ++c) {
    m = std::min(m, min_eigenvalue(svec_block(x.data() + c * p, dim)));
  }
  return x.size() == 0 ? 0.0 : m;
}

GramSolver::GramSolver(const Eigen::SparseMatrix<double>& gram) {
  auto ldlt = std::make_unique<Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>>>(gram);
  if (ldlt->info() == Eigen::Success) {
    const auto& d = ldlt->vectorD();
    if (d.size() > 0 && d.minCoeff() > 1e-11 * d.cwiseAbs().maxCoeff()) {
      sparse_ = std::move(ldlt);
      return;
    }
  }
  // Rank deficient: spectral pseudo-inverse.
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es{Eigen::MatrixXd(gram)};
  dense_ = std::make_unique<Dense>();
  dense_->vectors = es.eigenvectors();
  const auto& lambda = es.eigenvalues();
  const double cut = 1e-11 * std::max(1e-300, lambda.cwiseAbs().maxCoeff());
  dense_->inv_values = lambda.unaryExpr([cut](double l) { return l > cut ? 1.0 / l : 0.0; });
}

Eigen::VectorXd GramSolver::solve(const Eigen::VectorXd& r) const {
  if (sparse_) return sparse_->solve(r);
  return dense_->vectors *
         (dense_->inv_values.asDiagonal() * (dense_->vectors.transpose() * r));
}

}  // namespace polarcone::detail
