#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <limits>

#include "conic.hpp"
#include "polarcone/error.hpp"
#include "polarcone/stress.hpp"

namespace polarcone {

std::string_view to_string(RecoveryStatus s) {
  switch (s) {
    case RecoveryStatus::Converged: return "converged";
    case RecoveryStatus::MaxIter: return "max_iter";
    case RecoveryStatus::Infeasible: return "infeasible";
  }
  return "unknown";
}

namespace {

using Eigen::VectorXd;
using SparseRow = Eigen::SparseMatrix<double, Eigen::RowMajor>;
using SparseCol = Eigen::SparseMatrix<double>;

double inf_norm(const VectorXd& v) { return v.size() ? v.cwiseAbs().maxCoeff() : 0.0; }

// Minimizes <c, x> subject to A x = b and x in the product of PSD cones, in
// svec coordinates, by over-relaxed ADMM on the split x (affine) = z (cone).
class TraceAdmm {
 public:
  TraceAdmm(const Constraints& cons, std::size_t cells, const SolverOptions& opts)
      : dim_(cons.dim), opts_(opts), b_(cons.b) {
    const auto factor = detail::svec_factor(dim_, cells);
    // natural m = svec / factor, so A m = (A diag(1/factor)) svec
    a_ = cons.A * factor.cwiseInverse().asDiagonal();
    at_ = a_.transpose();
    gram_ = std::make_unique<detail::GramSolver>(SparseCol(a_ * at_));
    cost_ = VectorXd::Zero(a_.cols());
    const int p = sym_size(dim_);
    for (std::size_t c = 0; c < cells; ++c) {
      int k = 0;
      for (int i = 0; i < dim_; ++i) {
        for (int j = i; j < dim_; ++j, ++k) {
          if (i == j) cost_[c * p + k] = 1.0;
        }
      }
    }
    tol_rep_ = opts.tol * (1.0 + inf_norm(b_));
  }

  double tol_rep() const { return tol_rep_; }
  double residual(const VectorXd& x) const { return inf_norm(a_ * x - b_); }

  VectorXd project_affine(const VectorXd& x) const {
    return x - at_ * gram_->solve(VectorXd(a_ * x - b_));
  }

  /// Least-squares residual of A x = b ignoring the cone.
  double consistency_residual() const {
    const VectorXd x = at_ * gram_->solve(b_);
    return residual(x);
  }

  struct Outcome {
    VectorXd z;
    int iterations = 0;
    RecoveryStatus status = RecoveryStatus::MaxIter;
    bool polished = false;
  };

  Outcome run() const {
    const auto n = a_.cols();
    VectorXd x = VectorXd::Zero(n), z = VectorXd::Zero(n), u = VectorXd::Zero(n);
    VectorXd z_prev(n);
    double rho = 1.0 / std::max(opts_.trace_weight, 1e-12);
    const double alpha = opts_.relax;
    const double polish_tol = std::max(1e3 * tol_rep_, 1e-6 * (1.0 + inf_norm(b_)));

    Outcome out;
    VectorXd best = z;
    double best_res = std::numeric_limits<double>::infinity();
    double stall_ref = best_res;
    int stall_since = 0;
    bool polish_tried_at_loose = false;

    for (int it = 1; it <= opts_.max_iter; ++it) {
      x = project_affine(z - u - cost_ / rho);
      const VectorXd xh = alpha * x + (1.0 - alpha) * z;
      z_prev = z;
      z = xh + u;
      detail::project_psd_blocks(z, dim_, opts_.threads);
      u += xh - z;
      out.iterations = it;

      if (it % 10 != 0 && it != opts_.max_iter) continue;

      const double scale_z = 1.0 + inf_norm(z);
      const double r_prim = inf_norm(x - z);
      const double r_dual = inf_norm(z - z_prev);
      const double res = residual(z);
      if (res < best_res) {
        best_res = res;
        best = z;
      }

      const bool loose = r_prim <= polish_tol && r_dual <= polish_tol / rho + tol_rep_;
      const bool tight = r_prim <= tol_rep_ && r_dual <= tol_rep_ && res <= tol_rep_;
      if (opts_.polish && ((loose && !polish_tried_at_loose) || tight)) {
        polish_tried_at_loose = true;
        if (auto p = polish(z)) {
          out.z = std::move(*p);
          out.status = RecoveryStatus::Converged;
          out.polished = true;
          return out;
        }
      }
      if (tight) {
        out.z = z;
        out.status = RecoveryStatus::Converged;
        return out;
      }

      // stall detection on the constraint residual of the cone iterate
      if (best_res < 0.99 * stall_ref) {
        stall_ref = best_res;
        stall_since = it;
      } else if (it - stall_since >= opts_.stall_window && best_res > 1e3 * tol_rep_) {
        out.z = best;
        out.status = RecoveryStatus::Infeasible;
        return out;
      }

      // residual balancing of the penalty (rescales the scaled dual u)
      if (it % 50 == 0) {
        const double s = rho * r_dual;
        double mult = 1.0;
        if (r_prim > 10.0 * s) mult = 2.0;
        else if (s > 10.0 * r_prim) mult = 0.5;
        if (mult != 1.0) {
          rho *= mult;
          u /= mult;
        }
      }
      (void)scale_z;
    }
    out.z = best;
    out.status = RecoveryStatus::MaxIter;
    return out;
  }

  // Freezes the numerically zero eigen-directions of each cell and solves the
  // affine constraints exactly (minimum-norm correction) inside that face.
  std::optional<VectorXd> polish(const VectorXd& z) const {
    const int p = sym_size(dim_);
    const auto cells = static_cast<std::size_t>(z.size() / p);
    double zmax = 0.0;
    for (std::size_t c = 0; c < cells; ++c) {
      zmax = std::max(zmax, detail::svec_block(z.data() + c * p, dim_).norm());
    }
    const double unit = std::max(1.0, zmax);
    for (double rel : {1e-4, 1e-6, 1e-8, 1e-10}) {
      const double thr = rel * unit;
      VectorXd z0(z.size());
      std::vector<Eigen::Triplet<double>> basis;
      Eigen::Index face_cols = 0;
      for (std::size_t c = 0; c < cells; ++c) {
        const SymMatrix m = detail::svec_block(z.data() + c * p, dim_);
        Eigen::SelfAdjointEigenSolver<SymMatrix> es(m);
        std::vector<Point> keep;
        SymMatrix kept = SymMatrix::Zero(dim_, dim_);
        for (int i = 0; i < dim_; ++i) {
          if (es.eigenvalues()[i] > thr) {
            const Point v = es.eigenvectors().col(i);
            keep.push_back(v);
            kept += es.eigenvalues()[i] * v * v.transpose();
          }
        }
        detail::store_svec_block(kept, z0.data() + c * p);
        // face directions: v_i v_i^T and (v_i v_j^T + v_j v_i^T) / sqrt(2)
        std::vector<double> col(p);
        for (std::size_t i = 0; i < keep.size(); ++i) {
          for (std::size_t j = i; j < keep.size(); ++j) {
            SymMatrix dir = keep[i] * keep[j].transpose();
            dir = i == j ? dir : SymMatrix((dir + dir.transpose()) / std::sqrt(2.0));
            detail::store_svec_block(dir, col.data());
            for (int k = 0; k < p; ++k) {
              if (col[k] != 0.0) basis.emplace_back(c * p + k, face_cols, col[k]);
            }
            ++face_cols;
          }
        }
      }
      if (face_cols == 0) {
        if (residual(z0) <= 0.1 * tol_rep_) return z0;
        continue;
      }
      SparseCol face(z.size(), face_cols);
      face.setFromTriplets(basis.begin(), basis.end());
      const SparseCol af = SparseCol(a_) * face;
      const detail::GramSolver solver(SparseCol(af * af.transpose()));
      const VectorXd r = b_ - a_ * z0;
      const VectorXd delta = af.transpose() * solver.solve(r);
      VectorXd z1 = z0 + face * delta;
      const double min_eig = detail::min_eigenvalue_blocks(z1, dim_);
      if (min_eig < -1e-9 * unit) continue;
      detail::project_psd_blocks(z1, dim_, 1);
      if (residual(z1) <= 0.1 * tol_rep_) return z1;
    }
    return std::nullopt;
  }

  MatrixMeasureField to_field(const VectorXd& z, std::size_t cells) const {
    const VectorXd natural = z.cwiseQuotient(detail::svec_factor(dim_, cells));
    return unpack_field(natural, dim_);
  }

 private:
  int dim_;
  SolverOptions opts_;
  VectorXd b_;
  SparseRow a_;
  SparseRow at_;
  std::unique_ptr<detail::GramSolver> gram_;
  VectorXd cost_;
  double tol_rep_ = 0.0;
};

}  // namespace

RecoveryResult recover_stress(const RepresentationProblem& problem, const SolverOptions& opts) {
  if (!(opts.relax > 0.0 && opts.relax < 2.0)) {
    throw Error(ErrorCode::InvalidArgument, "relaxation must lie in (0, 2)");
  }
  if (opts.max_iter < 1 || !(opts.tol > 0.0)) {
    throw Error(ErrorCode::InvalidArgument, "max_iter and tol must be positive");
  }
  const auto cons = assemble_constraints(problem);
  const std::size_t cells = problem.grid.cell_count();
  const TraceAdmm admm(cons, cells, opts);

  RecoveryResult result;
  result.tol_rep = admm.tol_rep();
  result.trace_budget = problem.trace_budget();

  auto finish = [&](const VectorXd& z, RecoveryStatus status, int iterations, bool polished) {
    result.M = admm.to_field(z, cells);
    result.residual_inf = admm.residual(z);
    result.min_eigenvalue = result.M.min_eigenvalue();
    result.total_trace = result.M.total_trace();
    result.iterations = iterations;
    result.status = status;
    result.polished = polished;
    result.converged = status == RecoveryStatus::Converged;
    return result;
  };

  // Traces of PSD matrices are nonnegative, so a negative identity-row target
  // certifies infeasibility outright.
  if (cons.has_identity_row && cons.b[cons.b.size() - 1] < -admm.tol_rep()) {
    return finish(VectorXd::Zero(cons.A.cols()), RecoveryStatus::Infeasible, 0, false);
  }
  if (admm.consistency_residual() > 1e3 * admm.tol_rep()) {
    return finish(VectorXd::Zero(cons.A.cols()), RecoveryStatus::Infeasible, 0, false);
  }

  const auto outcome = admm.run();
  return finish(outcome.z, outcome.status, outcome.iterations, outcome.polished);
}

}  // namespace polarcone
