#pragma once

// Recovery of a PSD matrix-measure field M with
//   G(u) = sum_cells <e(u)_cell, M_cell>
// for every compactly supported nodal test deformation u, at minimum total
// trace, together with the sublinear gauge
//   p(v) = inf { F0(y) : y in span e(L), y - v PSD in every cell }
// that dominates every positive extension of F0 = G o e^{-1}.

#include <Eigen/SparseCore>

#include <cstdint>
#include <string>
#include <vector>

#include "polarcone/deformation.hpp"

namespace polarcone {

/// Piecewise-multilinear hat at an interior node, carried by one component.
struct HatFunction {
  std::size_t node = 0;
  int component = 0;
};

TestDeformation materialize(const Grid& grid, const HatFunction& hat);

/// All interior-node hats, component-major within each node.
std::vector<HatFunction> interior_hat_basis(const Grid& grid);

struct RepresentationProblem {
  Grid grid;
  VectorMeasure F;
  MatrixMeasureField H;
  std::vector<HatFunction> basis;
  bool include_identity_row = true;

  /// Problem on `grid` with the full interior hat basis.
  static RepresentationProblem make(Grid grid, VectorMeasure f, MatrixMeasureField h,
                                    bool include_identity_row = true);

  double trace_budget() const { return polarcone::trace_budget(F, H); }
};

/// Row k: sum_cells <e(u_k)_cell, M_cell> = G(u_k). Unknowns are the packed
/// upper-triangle entries of each M_cell (cell-major); off-diagonal
/// coefficients carry the factor 2 of the Frobenius pairing. With the
/// identity row the last row reads sum_cells trace(M_cell) = G(id).
struct Constraints {
  Eigen::SparseMatrix<double, Eigen::RowMajor> A;
  Eigen::VectorXd b;
  int dim = 1;
  bool has_identity_row = false;
};

Constraints assemble_constraints(const RepresentationProblem& problem);

/// Packed unknown vector <-> field.
Eigen::VectorXd pack_field(const MatrixMeasureField& m);
MatrixMeasureField unpack_field(const Eigen::VectorXd& x, int dim);

/// Nodal force measure -div M: atoms at the interior nodes such that
/// G(u) = sum <e(u), M> for every hat u when H = 0.
VectorMeasure divergence_measure(const Grid& grid, const MatrixMeasureField& m);

struct SolverOptions {
  /// tol_rep = tol * (1 + |b|_inf)
  double tol = 1e-8;
  int max_iter = 50000;
  /// ADMM over-relaxation in (0, 2).
  double relax = 1.8;
  /// Initial weight of the trace objective against the splitting penalty.
  double trace_weight = 1e-2;
  /// Try exact face-restricted correction of the final iterate.
  bool polish = true;
  /// Iterations without a 1% improvement of the constraint residual before
  /// the run is declared stalled.
  int stall_window = 2000;
  int threads = 1;
};

enum class RecoveryStatus { Converged, MaxIter, Infeasible };

std::string_view to_string(RecoveryStatus s);

struct RecoveryResult {
  MatrixMeasureField M;
  double residual_inf = 0.0;
  double min_eigenvalue = 0.0;
  double total_trace = 0.0;
  double trace_budget = 0.0;
  int iterations = 0;
  bool converged = false;
  RecoveryStatus status = RecoveryStatus::MaxIter;
  double tol_rep = 0.0;
  bool polished = false;
};

RecoveryResult recover_stress(const RepresentationProblem& problem,
                              const SolverOptions& opts = {});

struct VerifyOptions {
  std::uint64_t seed = 7;
  std::size_t fresh_count = 32;
  /// residual tolerance: tol_rep * (1 + |b|_inf)
  double tol_rep = 1e-6;
  /// PSD tolerance: tol_psd * max(1, max cell norm)
  double tol_psd = 1e-9;
  /// trace tolerance: tol_trace * max(1, |budget|)
  double tol_trace = 1e-6;
};

struct VerificationReport {
  double residual_inf = 0.0;        // fresh family, per unit nodal l1 mass
  double assembly_residual = 0.0;   // assembly basis rows
  double min_eigenvalue = 0.0;
  double total_trace = 0.0;
  double trace_budget = 0.0;
  bool representation_ok = false;
  bool psd_ok = false;
  bool trace_ok = false;
  /// Only meaningful with the identity row: trace equals the budget.
  bool identity_ok = true;
  bool passed() const { return representation_ok && psd_ok && trace_ok && identity_ok; }
};

/// Fresh random compactly supported nodal fields (bumps and random
/// combinations of hats), zero on the boundary.
std::vector<TestDeformation> fresh_test_family(const Grid& grid, std::size_t count,
                                               std::uint64_t seed);

VerificationReport verify_representation(const MatrixMeasureField& m,
                                         const RepresentationProblem& problem,
                                         const VerifyOptions& opts = {});

struct GaugeOptions {
  /// Identity-direction bound max_cell lambda_max(v) * F0(id) only.
  bool fast = false;
  double tol = 1e-10;
  int max_iter = 20000;
  double relax = 1.6;
};

struct GaugeResult {
  double value = 0.0;
  std::vector<double> coefficients;
  int iterations = 0;
  bool converged = false;
};

/// Gauge over span{e(u) : u in l_basis}; the span must contain the identity
/// field. The returned value is F0 at a point y >= v, so it never
/// undershoots the infimum. Throws Inconsistent when unbounded below.
GaugeResult riedl_gauge(const RepresentationProblem& problem, std::span<const SymMatrix> v,
                        std::span<const TestDeformation> l_basis, const GaugeOptions& opts = {});

/// Gauge over the problem's hat basis plus the identity.
GaugeResult riedl_gauge(const RepresentationProblem& problem, std::span<const SymMatrix> v,
                        const GaugeOptions& opts = {});

struct FlowData {
  Grid grid;
  std::vector<Point> f_nodes;
  std::vector<Point> h_nodes;
  std::vector<double> e_weights;
  double gamma = 2.0;
  ParticleMeasure rho;
  double det_floor = 1e-10;
};

struct FlowInstance {
  VectorMeasure F;
  MatrixMeasureField H;
};

/// F = (h - f) rho and H_cell = (gamma - 1) e det(Df^sym)^{-gamma}
/// cof(Df^sym)^T |cell|.
FlowInstance instance_from_flow(const FlowData& data);

}  // namespace polarcone
