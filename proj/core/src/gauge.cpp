#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>

#include "conic.hpp"
#include "polarcone/error.hpp"
#include "polarcone/stress.hpp"

namespace polarcone {

namespace {

using Eigen::MatrixXd;
using Eigen::VectorXd;
using SparseCol = Eigen::SparseMatrix<double>;

double inf_norm(const VectorXd& v) { return v.size() ? v.cwiseAbs().maxCoeff() : 0.0; }

VectorXd svec_field(std::span<const SymMatrix> field, int dim) {
  const int p = sym_size(dim);
  VectorXd x(static_cast<Eigen::Index>(field.size()) * p);
  for (std::size_t c = 0; c < field.size(); ++c) {
    if (field[c].rows() != dim || field[c].cols() != dim) {
      throw Error(ErrorCode::GridMismatch, "test tensor has the wrong dimension");
    }
    detail::store_svec_block(symmetric_part(field[c]), x.data() + c * p);
  }
  return x;
}

double max_eigen_over_cells(std::span<const SymMatrix> v) {
  double m = -std::numeric_limits<double>::infinity();
  for (const auto& c : v) m = std::max(m, max_eigenvalue(c));
  return m;
}

}  // namespace

GaugeResult riedl_gauge(const RepresentationProblem& problem, std::span<const SymMatrix> v,
                        std::span<const TestDeformation> l_basis, const GaugeOptions& opts) {
  const Grid& grid = problem.grid;
  const int d = grid.dim();
  const std::size_t cells = grid.cell_count();
  if (v.size() != cells) throw Error(ErrorCode::GridMismatch, "v is not defined on the grid");
  if (l_basis.empty()) throw Error(ErrorCode::EmptyBasis, "empty basis");

  const auto k_count = static_cast<Eigen::Index>(l_basis.size());
  const int p = sym_size(d);
  const auto rows = static_cast<Eigen::Index>(cells) * p;

  // columns: svec(e(u_k)); g_k = F0(e(u_k)) = G(u_k)
  std::vector<Eigen::Triplet<double>> triplets;
  VectorXd g(k_count);
  for (Eigen::Index k = 0; k < k_count; ++k) {
    const auto col = svec_field(l_basis[k].tensor, d);
    if (col.size() != rows) throw Error(ErrorCode::GridMismatch, "basis member is not on the grid");
    for (Eigen::Index r = 0; r < rows; ++r) {
      if (col[r] != 0.0) triplets.emplace_back(r, k, col[r]);
    }
    g[k] = evaluate_G(grid, problem.F, problem.H, l_basis[k]);
  }
  SparseCol e(rows, k_count);
  e.setFromTriplets(triplets.begin(), triplets.end());
  const SparseCol et = e.transpose();
  const MatrixXd normal = MatrixXd(et * e);
  const Eigen::CompleteOrthogonalDecomposition<MatrixXd> normal_solver(normal);

  // coefficients reproducing the identity field
  const std::vector<SymMatrix> ident(cells, SymMatrix::Identity(d, d));
  const VectorXd id_field = svec_field(ident, d);
  const VectorXd c_id = normal_solver.solve(VectorXd(et * id_field));
  if (inf_norm(e * c_id - id_field) > 1e-8) {
    throw Error(ErrorCode::InvalidArgument, "basis span must contain the identity field");
  }
  const double f0_id = g.dot(c_id);
  if (f0_id < -1e-12 * std::max(1.0, inf_norm(g))) {
    throw Error(ErrorCode::Inconsistent, "gauge unbounded below: G(id) is negative");
  }

  GaugeResult result;
  const double lambda = max_eigen_over_cells(v);
  if (opts.fast) {
    result.value = lambda * f0_id;
    result.coefficients.resize(static_cast<std::size_t>(k_count));
    for (Eigen::Index k = 0; k < k_count; ++k) result.coefficients[k] = lambda * c_id[k];
    result.converged = true;
    return result;
  }

  // p is positively homogeneous: solve on v / |v| and rescale.
  double nu = 0.0;
  for (const auto& c : v) nu = std::max(nu, c.norm());
  const double unit = nu > 0.0 ? nu : 1.0;
  const VectorXd target = svec_field(v, d) / unit;

  // ADMM on  min g.c  s.t.  E c - target = s,  s PSD per cell.
  const auto n = rows;
  VectorXd c = VectorXd::Zero(k_count), s = VectorXd::Zero(n), w = VectorXd::Zero(n);
  VectorXd s_prev(n), ec(n);
  const double gscale = std::max(1.0, inf_norm(g));
  double rho = gscale;
  const double alpha = opts.relax;
  const double blowup = 1e10 * (1.0 + std::abs(f0_id)) * gscale;

  int it = 1;
  for (; it <= opts.max_iter; ++it) {
    c = normal_solver.solve(VectorXd(et * (target + s - w) - g / rho));
    ec = e * c;
    const VectorXd slack = alpha * (ec - target) + (1.0 - alpha) * s;
    s_prev = s;
    s = slack + w;
    detail::project_psd_blocks(s, d, 1);
    w += slack - s;

    if (it % 10 != 0) continue;
    if (!std::isfinite(c.squaredNorm()) || std::abs(g.dot(c)) > blowup) {
      throw Error(ErrorCode::Inconsistent,
                  "gauge unbounded below: G is not positive on the test span");
    }
    const double r_prim = inf_norm(ec - target - s);
    const double r_dual = rho * inf_norm(VectorXd(et * (s - s_prev)));
    if (r_prim <= opts.tol && r_dual <= opts.tol * gscale) {
      result.converged = true;
      break;
    }
    if (it % 50 == 0) {
      double mult = 1.0;
      if (r_prim > 10.0 * r_dual / gscale) mult = 2.0;
      else if (r_dual / gscale > 10.0 * r_prim) mult = 0.5;
      if (mult != 1.0) {
        rho *= mult;
        w /= mult;
      }
    }
  }
  result.iterations = std::min(it, opts.max_iter);

  // Move to an exactly feasible point along the identity direction, which is
  // interior to the cone: y + t 1 >= v once t covers the worst violation.
  ec = e * c;
  const VectorXd gap = ec - target;
  const double violation = -detail::min_eigenvalue_blocks(gap, d);
  if (violation > 0.0) c += violation * c_id;

  c *= unit;
  // lambda 1 >= v is feasible as well; keep the cheaper of the two
  if (lambda * f0_id < g.dot(c)) c = lambda * c_id;
  result.value = g.dot(c);
  result.coefficients.assign(c.data(), c.data() + k_count);
  return result;
}

GaugeResult riedl_gauge(const RepresentationProblem& problem, std::span<const SymMatrix> v,
                        const GaugeOptions& opts) {
  std::vector<TestDeformation> basis;
  basis.reserve(problem.basis.size() + 1);
  for (const auto& hat : problem.basis) basis.push_back(materialize(problem.grid, hat));
  basis.push_back(identity_deformation(problem.grid));
  return riedl_gauge(problem, v, basis, opts);
}

}  // namespace polarcone
