#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <vector>

#include "polarcone/symmetric.hpp"

namespace polarcone {

using MultiIndex = std::array<std::size_t, 3>;

/// Uniform tensor-product grid on a box [lo, hi] in R^d, d in {1, 2, 3}.
/// Nodes and cells are numbered with axis 0 varying fastest.
class Grid {
 public:
  Grid() = default;
  Grid(std::vector<double> lo, std::vector<double> hi, std::vector<std::size_t> cells);

  /// Square grid [lo, hi]^d with n cells per axis.
  static Grid cube(int dim, double lo, double hi, std::size_t n);

  int dim() const { return dim_; }
  double lo(int axis) const { return lo_[axis]; }
  double hi(int axis) const { return hi_[axis]; }
  std::size_t cells(int axis) const { return n_[axis]; }
  double spacing(int axis) const { return h_[axis]; }
  double cell_volume() const;

  std::size_t node_count() const;
  std::size_t cell_count() const;

  MultiIndex node_index(std::size_t flat) const;
  std::size_t node_flat(const MultiIndex& idx) const;
  MultiIndex cell_index(std::size_t flat) const;
  std::size_t cell_flat(const MultiIndex& idx) const;

  Point node_position(std::size_t flat) const;
  Point cell_center(std::size_t flat) const;
  bool is_boundary_node(std::size_t flat) const;
  /// Cells touching the boundary of the box.
  bool is_boundary_cell(std::size_t flat) const;

  /// Flat node indices of the 2^d corners of a cell; corner bit a set means
  /// the upper node along axis a.
  std::vector<std::size_t> cell_corners(std::size_t cell) const;

  /// Cell containing p and the multilinear weights of its corners (same
  /// ordering as cell_corners). Empty if p lies outside the box.
  struct Location {
    std::size_t cell;
    std::vector<double> weights;
  };
  std::optional<Location> locate(const Point& p) const;

  bool operator==(const Grid& other) const = default;

 private:
  int dim_ = 0;
  std::vector<double> lo_, hi_, h_;
  std::vector<std::size_t> n_;
};

}  // namespace polarcone
