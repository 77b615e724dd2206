#include "polarcone/grid.hpp"

#include <algorithm>
#include <cmath>

#include "polarcone/error.hpp"

namespace polarcone {

Grid::Grid(std::vector<double> lo, std::vector<double> hi, std::vector<std::size_t> cells)
    : lo_(std::move(lo)), hi_(std::move(hi)), n_(std::move(cells)) {
  dim_ = static_cast<int>(lo_.size());
  if (dim_ < 1 || dim_ > 3) throw Error(ErrorCode::InvalidArgument, "grid dimension must be 1, 2 or 3");
  if (hi_.size() != lo_.size() || n_.size() != lo_.size()) {
    throw Error(ErrorCode::LengthMismatch, "grid extent and cell counts differ in dimension");
  }
  h_.resize(lo_.size());
  for (int a = 0; a < dim_; ++a) {
    if (n_[a] < 2) throw Error(ErrorCode::InvalidArgument, "grid needs at least 2 cells per axis");
    if (!(hi_[a] > lo_[a])) throw Error(ErrorCode::InvalidArgument, "grid extent must satisfy hi > lo");
    h_[a] = (hi_[a] - lo_[a]) / static_cast<double>(n_[a]);
  }
}

Grid Grid::cube(int dim, double lo, double hi, std::size_t n) {
  if (dim < 1 || dim > 3) throw Error(ErrorCode::InvalidArgument, "grid dimension must be 1, 2 or 3");
  return Grid(std::vector<double>(dim, lo), std::vector<double>(dim, hi),
              std::vector<std::size_t>(dim, n));
}

double Grid::cell_volume() const {
  double v = 1.0;
  for (double h : h_) v *= h;
  return v;
}

std::size_t Grid::node_count() const {
  std::size_t c = 1;
  for (auto n : n_) c *= n + 1;
  return c;
}

std::size_t Grid::cell_count() const {
  std::size_t c = 1;
  for (auto n : n_) c *= n;
  return c;
}

MultiIndex Grid::node_index(std::size_t flat) const {
  MultiIndex idx{0, 0, 0};
  for (int a = 0; a < dim_; ++a) {
    idx[a] = flat % (n_[a] + 1);
    flat /= n_[a] + 1;
  }
  return idx;
}

std::size_t Grid::node_flat(const MultiIndex& idx) const {
  std::size_t flat = 0;
  for (int a = dim_ - 1; a >= 0; --a) flat = flat * (n_[a] + 1) + idx[a];
  return flat;
}

MultiIndex Grid::cell_index(std::size_t flat) const {
  MultiIndex idx{0, 0, 0};
  for (int a = 0; a < dim_; ++a) {
    idx[a] = flat % n_[a];
    flat /= n_[a];
  }
  return idx;
}

std::size_t Grid::cell_flat(const MultiIndex& idx) const {
  std::size_t flat = 0;
  for (int a = dim_ - 1; a >= 0; --a) flat = flat * n_[a] + idx[a];
  return flat;
}

Point Grid::node_position(std::size_t flat) const {
  const auto idx = node_index(flat);
  Point p(dim_);
  for (int a = 0; a < dim_; ++a) p[a] = lo_[a] + static_cast<double>(idx[a]) * h_[a];
  return p;
}

Point Grid::cell_center(std::size_t flat) const {
  const auto idx = cell_index(flat);
  Point p(dim_);
  for (int a = 0; a < dim_; ++a) p[a] = lo_[a] + (static_cast<double>(idx[a]) + 0.5) * h_[a];
  return p;
}

bool Grid::is_boundary_node(std::size_t flat) const {
  const auto idx = node_index(flat);
  for (int a = 0; a < dim_; ++a) {
    if (idx[a] == 0 || idx[a] == n_[a]) return true;
  }
  return false;
}

bool Grid::is_boundary_cell(std::size_t flat) const {
  const auto idx = cell_index(flat);
  for (int a = 0; a < dim_; ++a) {
    if (idx[a] == 0 || idx[a] + 1 == n_[a]) return true;
  }
  return false;
}

std::vector<std::size_t> Grid::cell_corners(std::size_t cell) const {
  const auto base = cell_index(cell);
  const std::size_t corners = std::size_t{1} << dim_;
  std::vector<std::size_t> out(corners);
  for (std::size_t c = 0; c < corners; ++c) {
    MultiIndex idx = base;
    for (int a = 0; a < dim_; ++a) idx[a] += (c >> a) & 1u;
    out[c] = node_flat(idx);
  }
  return out;
}

std::optional<Grid::Location> Grid::locate(const Point& p) const {
  if (p.size() != dim_) return std::nullopt;
  MultiIndex idx{0, 0, 0};
  std::array<double, 3> theta{0.0, 0.0, 0.0};
  for (int a = 0; a < dim_; ++a) {
    const double s = (p[a] - lo_[a]) / h_[a];
    const double n = static_cast<double>(n_[a]);
    // allow points on the closed box, up to rounding in s
    if (!(s >= -1e-12) || !(s <= n + 1e-12)) return std::nullopt;
    const double i = std::clamp(std::floor(s), 0.0, n - 1.0);
    idx[a] = static_cast<std::size_t>(i);
    theta[a] = std::clamp(s - i, 0.0, 1.0);
  }
  Location loc;
  loc.cell = cell_flat(idx);
  const std::size_t corners = std::size_t{1} << dim_;
  loc.weights.resize(corners);
  for (std::size_t c = 0; c < corners; ++c) {
    double w = 1.0;
    for (int a = 0; a < dim_; ++a) w *= ((c >> a) & 1u) ? theta[a] : 1.0 - theta[a];
    loc.weights[c] = w;
  }
  return loc;
}

}  // namespace polarcone
