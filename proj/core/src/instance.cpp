#include <Eigen/LU>

#include <cmath>

#include "polarcone/cone.hpp"
#include "polarcone/error.hpp"
#include "polarcone/stress.hpp"

namespace polarcone {

FlowInstance instance_from_flow(const FlowData& data) {
  const Grid& grid = data.grid;
  const int d = grid.dim();
  if (data.f_nodes.size() != grid.node_count() || data.h_nodes.size() != grid.node_count()) {
    throw Error(ErrorCode::GridMismatch, "nodal fields do not match the grid");
  }
  if (data.e_weights.size() != grid.cell_count()) {
    throw Error(ErrorCode::GridMismatch, "cell weights do not match the grid");
  }
  if (!(data.gamma > 1.0)) throw Error(ErrorCode::InvalidArgument, "gamma must exceed 1");
  if (data.rho.atoms.size() != data.rho.weights.size()) {
    throw Error(ErrorCode::InvalidMeasure, "invalid measure: atoms/weights length mismatch");
  }
  for (double w : data.rho.weights) {
    if (!(w > 0.0)) throw Error(ErrorCode::InvalidMeasure, "invalid measure: nonpositive weight");
  }
  for (double e : data.e_weights) {
    if (!(e >= 0.0)) throw Error(ErrorCode::InvalidArgument, "cell weights must be nonnegative");
  }

  std::vector<Point> nodes(grid.node_count());
  for (std::size_t n = 0; n < nodes.size(); ++n) nodes[n] = grid.node_position(n);
  if (!is_monotone_map(nodes, data.f_nodes)) {
    throw Error(ErrorCode::NotMonotone, "f is not monotone on the grid nodes");
  }

  const auto strain = deformation_tensor(grid, data.f_nodes);
  const double vol = grid.cell_volume();
  std::vector<SymMatrix> h(grid.cell_count());
  for (std::size_t c = 0; c < h.size(); ++c) {
    const SymMatrix& s = strain[c];
    const double det = s.determinant();
    if (!(det > data.det_floor) || min_eigenvalue(s) <= 0.0) {
      throw Error(ErrorCode::DegenerateDeformation, "degenerate deformation");
    }
    const SymMatrix cof_t = cofactor(s).transpose();
    h[c] = (data.gamma - 1.0) * data.e_weights[c] * std::pow(det, -data.gamma) * vol *
           symmetric_part(cof_t);
  }

  std::vector<Point> vectors(data.rho.atoms.size());
  for (std::size_t i = 0; i < vectors.size(); ++i) {
    const Point& x = data.rho.atoms[i];
    vectors[i] = (interpolate(grid, data.h_nodes, x) - interpolate(grid, data.f_nodes, x)) *
                 data.rho.weights[i];
  }
  return {VectorMeasure(d, data.rho.atoms, std::move(vectors)),
          MatrixMeasureField(d, std::move(h))};
}

}  // namespace polarcone
