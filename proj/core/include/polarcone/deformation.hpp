#pragma once

// Grid-discretized test deformations u: R^d -> R^d, their symmetric
// gradients e(u) = (Du)^sym, and the linear functional
//   G(u) = -sum_i u(x_i) . f_i - sum_cells <e(u)_cell, H_cell>.

#include <cstdint>
#include <span>
#include <vector>

#include "polarcone/grid.hpp"
#include "polarcone/symmetric.hpp"

namespace polarcone {

/// Atoms x_i in R^d carrying vectors f_i (force role).
class VectorMeasure {
 public:
  VectorMeasure() = default;
  VectorMeasure(int dim, std::vector<Point> atoms, std::vector<Point> vectors);

  static VectorMeasure zero(int dim) { return VectorMeasure(dim, {}, {}); }

  int dim() const { return dim_; }
  std::size_t size() const { return atoms_.size(); }
  const std::vector<Point>& atoms() const { return atoms_; }
  const std::vector<Point>& vectors() const { return vectors_; }
  /// sum_i |x_i| |f_i|
  double first_moment() const { return first_moment_; }
  /// sum_i x_i . f_i
  double moment() const;

  VectorMeasure scaled(double factor) const;

 private:
  int dim_ = 1;
  std::vector<Point> atoms_;
  std::vector<Point> vectors_;
  double first_moment_ = 0.0;
};

/// Weighted atoms in R^d (density role).
struct ParticleMeasure {
  std::vector<Point> atoms;
  std::vector<double> weights;
};

/// One symmetric d x d matrix per grid cell. Entries are cell masses, not
/// densities: the pairing with a test field is a plain sum over cells.
class MatrixMeasureField {
 public:
  MatrixMeasureField() = default;
  MatrixMeasureField(int dim, std::vector<SymMatrix> cells);

  static MatrixMeasureField zero(const Grid& grid);

  int dim() const { return dim_; }
  std::size_t size() const { return cells_.size(); }
  const std::vector<SymMatrix>& cells() const { return cells_; }
  const SymMatrix& operator[](std::size_t c) const { return cells_[c]; }
  SymMatrix& operator[](std::size_t c) { return cells_[c]; }

  double total_trace() const;
  double min_eigenvalue() const;
  /// Largest Frobenius norm over cells.
  double max_norm() const;
  bool is_psd(double tol) const;
  /// sum_cells <v_cell, this_cell>
  double pair(std::span<const SymMatrix> v) const;

  MatrixMeasureField scaled(double factor) const;

 private:
  int dim_ = 1;
  std::vector<SymMatrix> cells_;
};

/// Nodal values of u and the derived per-cell deformation tensor e(u).
struct TestDeformation {
  std::vector<Point> nodal;
  std::vector<SymMatrix> tensor;
};

/// Per-cell (Du)^sym from averaged forward differences over the cell's edges
/// (the gradient of the multilinear interpolant at the cell center).
std::vector<SymMatrix> deformation_tensor(const Grid& grid, std::span<const Point> nodal);

/// Full Jacobian per cell, same stencil as deformation_tensor.
std::vector<SymMatrix> cell_gradient(const Grid& grid, std::span<const Point> nodal);

TestDeformation make_deformation(const Grid& grid, std::vector<Point> nodal);

/// Samples a pointwise map at the grid nodes.
template <class Fn>
TestDeformation sample_deformation(const Grid& grid, Fn&& fn) {
  std::vector<Point> nodal(grid.node_count());
  for (std::size_t n = 0; n < nodal.size(); ++n) nodal[n] = fn(grid.node_position(n));
  return make_deformation(grid, std::move(nodal));
}

TestDeformation identity_deformation(const Grid& grid);

/// Multilinear interpolation of nodal values; throws SupportExceedsGrid.
Point interpolate(const Grid& grid, std::span<const Point> nodal, const Point& x);

/// Seeded family of monotone maps: the identity first, then symmetric
/// rank-one maps x -> (v.x) v (canonical axes first), then a rotation of
/// random linear maps S + B (S PSD, B antisymmetric), random rank-one maps
/// and gradients of convex bumps with linear growth.
std::vector<TestDeformation> monotone_test_family(const Grid& grid, std::size_t count,
                                                  std::uint64_t seed);

double evaluate_G(const Grid& grid, const VectorMeasure& f, const MatrixMeasureField& h,
                  const TestDeformation& u);

/// Right-hand side of the trace budget: -sum x_i . f_i - sum trace(H_cell).
double trace_budget(const VectorMeasure& f, const MatrixMeasureField& h);

struct InequalityReport {
  double min_G = 0.0;
  double tol_G = 0.0;
  std::vector<std::size_t> violating_members;
  bool passed() const { return violating_members.empty(); }
};

/// Evaluates G on every member. Passing is necessary, not sufficient, for
/// G >= 0 on all monotone maps. tol_G = 1e-9 (1 + |G(id)|).
InequalityReport check_inequality(const Grid& grid, const VectorMeasure& f,
                                  const MatrixMeasureField& h,
                                  std::span<const TestDeformation> family);

}  // namespace polarcone
