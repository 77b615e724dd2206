#include <cmath>
#include <unordered_map>

#include "polarcone/error.hpp"
#include "polarcone/stress.hpp"

namespace polarcone {

TestDeformation materialize(const Grid& grid, const HatFunction& hat) {
  const int d = grid.dim();
  std::vector<Point> nodal(grid.node_count(), Point::Zero(d));
  nodal.at(hat.node)[hat.component] = 1.0;
  return make_deformation(grid, std::move(nodal));
}

std::vector<HatFunction> interior_hat_basis(const Grid& grid) {
  std::vector<HatFunction> basis;
  for (std::size_t n = 0; n < grid.node_count(); ++n) {
    if (grid.is_boundary_node(n)) continue;
    for (int c = 0; c < grid.dim(); ++c) basis.push_back({n, c});
  }
  return basis;
}

RepresentationProblem RepresentationProblem::make(Grid grid, VectorMeasure f,
                                                  MatrixMeasureField h,
                                                  bool include_identity_row) {
  RepresentationProblem p;
  p.basis = interior_hat_basis(grid);
  p.grid = std::move(grid);
  p.F = std::move(f);
  p.H = std::move(h);
  p.include_identity_row = include_identity_row;
  return p;
}

Eigen::VectorXd pack_field(const MatrixMeasureField& m) {
  const int p = sym_size(m.dim());
  Eigen::VectorXd x(static_cast<Eigen::Index>(m.size()) * p);
  for (std::size_t c = 0; c < m.size(); ++c) {
    pack_upper(m[c], std::span<double>(x.data() + c * p, p));
  }
  return x;
}

MatrixMeasureField unpack_field(const Eigen::VectorXd& x, int dim) {
  const int p = sym_size(dim);
  std::vector<SymMatrix> cells(static_cast<std::size_t>(x.size() / p));
  for (std::size_t c = 0; c < cells.size(); ++c) {
    cells[c] = unpack_upper(std::span<const double>(x.data() + c * p, p), dim);
  }
  return MatrixMeasureField(dim, std::move(cells));
}

namespace {

using Triplet = Eigen::Triplet<double>;

// Deformation tensor of a hat on one adjacent cell. `upper` bit a is set
// when the hat's node is the upper corner of the cell along axis a.
SymMatrix hat_tensor(const Grid& grid, int component, unsigned upper) {
  const int d = grid.dim();
  const double edges = static_cast<double>(1u << (d - 1));
  SymMatrix jac = SymMatrix::Zero(d, d);
  for (int a = 0; a < d; ++a) {
    jac(component, a) = (((upper >> a) & 1u) ? 1.0 : -1.0) / (edges * grid.spacing(a));
  }
  return symmetric_part(jac);
}

void append_hat_row(const Grid& grid, const HatFunction& hat, Eigen::Index row,
                    std::vector<Triplet>& triplets) {
  const int d = grid.dim();
  const int p = sym_size(d);
  const auto node = grid.node_index(hat.node);
  for (unsigned upper = 0; upper < (1u << d); ++upper) {
    MultiIndex cell = node;
    for (int a = 0; a < d; ++a) cell[a] -= (upper >> a) & 1u;
    const auto e = hat_tensor(grid, hat.component, upper);
    const auto col0 = static_cast<Eigen::Index>(grid.cell_flat(cell)) * p;
    int k = 0;
    for (int i = 0; i < d; ++i) {
      for (int j = i; j < d; ++j, ++k) {
        if (e(i, j) != 0.0) triplets.emplace_back(row, col0 + k, (i == j ? 1.0 : 2.0) * e(i, j));
      }
    }
  }
}

}  // namespace

Constraints assemble_constraints(const RepresentationProblem& problem) {
  const Grid& grid = problem.grid;
  const int d = grid.dim();
  const int p = sym_size(d);
  if (problem.basis.empty()) throw Error(ErrorCode::EmptyBasis, "empty basis");
  if (problem.H.size() != grid.cell_count() || problem.H.dim() != d) {
    throw Error(ErrorCode::GridMismatch, "H is not defined on the grid");
  }
  if (problem.F.size() > 0 && problem.F.dim() != d) {
    throw Error(ErrorCode::GridMismatch, "F dimension differs from the grid");
  }

  const auto hats = static_cast<Eigen::Index>(problem.basis.size());
  const Eigen::Index rows = hats + (problem.include_identity_row ? 1 : 0);
  const auto cols = static_cast<Eigen::Index>(grid.cell_count()) * p;

  std::vector<Triplet> triplets;
  triplets.reserve(problem.basis.size() * (std::size_t{1} << d) * p + grid.cell_count() * d);
  std::unordered_map<std::size_t, Eigen::Index> row_of;  // node * d + component
  for (Eigen::Index k = 0; k < hats; ++k) {
    const auto& hat = problem.basis[k];
    if (hat.node >= grid.node_count() || hat.component < 0 || hat.component >= d) {
      throw Error(ErrorCode::GridMismatch, "hat function does not live on the grid");
    }
    if (grid.is_boundary_node(hat.node)) {
      throw Error(ErrorCode::InvalidArgument, "basis member does not vanish on the grid boundary");
    }
    append_hat_row(grid, hat, k, triplets);
    row_of[hat.node * d + hat.component] = k;
  }
  if (problem.include_identity_row) {
    for (Eigen::Index c = 0; c < static_cast<Eigen::Index>(grid.cell_count()); ++c) {
      int k = 0;
      for (int i = 0; i < d; ++i) {
        for (int j = i; j < d; ++j, ++k) {
          if (i == j) triplets.emplace_back(hats, c * p + k, 1.0);
        }
      }
    }
  }

  Constraints out;
  out.dim = d;
  out.has_identity_row = problem.include_identity_row;
  out.A.resize(rows, cols);
  out.A.setFromTriplets(triplets.begin(), triplets.end());
  out.A.makeCompressed();

  // b = -(nodal loads of F) - A_hats h
  out.b = Eigen::VectorXd::Zero(rows);
  for (std::size_t i = 0; i < problem.F.size(); ++i) {
    const auto loc = grid.locate(problem.F.atoms()[i]);
    if (!loc) throw Error(ErrorCode::SupportExceedsGrid, "support exceeds grid");
    const auto nodes = grid.cell_corners(loc->cell);
    for (std::size_t k = 0; k < nodes.size(); ++k) {
      for (int c = 0; c < d; ++c) {
        const auto it = row_of.find(nodes[k] * d + c);
        if (it != row_of.end()) out.b[it->second] -= loc->weights[k] * problem.F.vectors()[i][c];
      }
    }
  }
  const Eigen::VectorXd h = pack_field(problem.H);
  out.b.head(hats) -= out.A.topRows(hats) * h;
  if (problem.include_identity_row) out.b[hats] = problem.trace_budget();
  return out;
}

VectorMeasure divergence_measure(const Grid& grid, const MatrixMeasureField& m) {
  auto problem = RepresentationProblem::make(grid, VectorMeasure::zero(grid.dim()),
                                             MatrixMeasureField::zero(grid), false);
  const auto cons = assemble_constraints(problem);
  const Eigen::VectorXd pairing = cons.A * pack_field(m);
  const int d = grid.dim();
  std::vector<Point> atoms, vectors;
  for (std::size_t k = 0; k < problem.basis.size(); k += d) {
    atoms.push_back(grid.node_position(problem.basis[k].node));
    Point f(d);
    for (int c = 0; c < d; ++c) f[c] = -pairing[static_cast<Eigen::Index>(k) + c];
    vectors.push_back(f);
  }
  return VectorMeasure(d, std::move(atoms), std::move(vectors));
}

}  // namespace polarcone
