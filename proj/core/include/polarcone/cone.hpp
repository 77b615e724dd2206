#pragma once

// One-dimensional monotone-map cone: metric projection (weighted isotonic
// regression), the sticky-particle flow X(t) = P_K(X0 + t V0) built on it,
// and certificates for membership in the polar cone of K.

#include <cstddef>
#include <span>
#include <vector>

#include "polarcone/symmetric.hpp"

namespace polarcone {

/// Weighted atoms on the real line. Weights are strictly positive; when
/// `normalized` is set the total mass must equal 1 (to 1e-12).
class DiscreteMeasure {
 public:
  DiscreteMeasure() = default;
  DiscreteMeasure(std::vector<double> atoms, std::vector<double> weights,
                  bool normalized = false);

  /// N equal cells of [0,1]: atoms at the cell midpoints, weights 1/N.
  static DiscreteMeasure uniform(std::size_t n);

  std::size_t size() const { return weights_.size(); }
  bool empty() const { return weights_.empty(); }
  const std::vector<double>& atoms() const { return atoms_; }
  const std::vector<double>& weights() const { return weights_; }
  bool normalized() const { return normalized_; }
  double total_mass() const;

 private:
  std::vector<double> atoms_;
  std::vector<double> weights_;
  bool normalized_ = false;
};

/// Nondecreasing vector X_1 <= ... <= X_N: a point of the discretized cone K.
class MonotoneMap1D {
 public:
  MonotoneMap1D() = default;
  /// Throws NotMonotone if the values decrease anywhere.
  explicit MonotoneMap1D(std::vector<double> values);

  std::size_t size() const { return values_.size(); }
  const std::vector<double>& values() const { return values_; }
  double operator[](std::size_t i) const { return values_[i]; }

 private:
  std::vector<double> values_;
};

/// Maximal pooled block [begin, end) of an isotonic fit.
struct PooledBlock {
  std::size_t begin = 0;
  std::size_t end = 0;
  double weight = 0.0;
  double mean = 0.0;
};

struct IsotonicFit {
  MonotoneMap1D map;
  std::vector<PooledBlock> blocks;
  /// block_of[i] is the index into `blocks` containing entry i.
  std::vector<std::size_t> block_of;
};

/// Weighted pool-adjacent-violators. Blocks are pooled only when the KKT
/// conditions force it: adjacent blocks with equal means stay separate.
IsotonicFit isotonic_fit(std::span<const double> y, std::span<const double> w);

/// argmin sum w_i (x_i - y_i)^2 over nondecreasing x.
MonotoneMap1D project_monotone_1d(std::span<const double> y, std::span<const double> w);

struct PolarCertificate1D {
  double inner_product = 0.0;
  std::vector<double> primitive;
  bool feasible = false;
  double scale = 1.0;
  double tol_eq = 0.0;
  double tol_pos = 0.0;
};

class StickyState {
 public:
  StickyState(MonotoneMap1D x0, std::vector<double> v0, DiscreteMeasure measure);

  const MonotoneMap1D& x0() const { return x0_; }
  const std::vector<double>& v0() const { return v0_; }
  const DiscreteMeasure& measure() const { return measure_; }
  std::size_t size() const { return v0_.size(); }

  /// X0 + t V0, the free-flight positions.
  std::vector<double> free_flight(double t) const;

 private:
  MonotoneMap1D x0_;
  std::vector<double> v0_;
  DiscreteMeasure measure_;
};

MonotoneMap1D sticky_evolve(const StickyState& state, double t);

/// Right derivative of t -> X(t) for t > 0: the weighted mean of V0 over each
/// pooled block. At a collision instant the post-collision velocity is returned.
std::vector<double> lagrangian_velocity(const StickyState& state, double t);

/// Positions, right-sided velocities and cluster ids at one instant, t >= 0.
struct StickySnapshot {
  std::vector<double> positions;
  std::vector<double> velocities;
  std::vector<std::size_t> block_id;
  /// Set at t = 0 when coincident initial atoms carry distinct velocities, so
  /// that the reported right-limit differs from V0.
  bool velocity_is_right_limit = false;
};

StickySnapshot sticky_snapshot(const StickyState& state, double t);

/// Image measure X # m. Values within `quantum` of the first value of a run
/// are merged into one atom located at the run's weighted mean.
DiscreteMeasure push_forward(const MonotoneMap1D& x, const DiscreteMeasure& m,
                             double quantum = 1e-12);

/// Y = (X0 + t V0) - X(t); an element of the polar cone N_K(X(t)).
std::vector<double> polar_residual(const StickyState& state, double t);

/// P_j = sum_{i <= j} Y_i m_i.
std::vector<double> nonneg_primitive(std::span<const double> y, const DiscreteMeasure& m);

PolarCertificate1D polar_membership_1d(std::span<const double> y, const MonotoneMap1D& x,
                                       const DiscreteMeasure& m);

/// (values_i - values_j) . (points_i - points_j) >= -tol for all pairs.
/// With tol < 0 the default 1e-12 * max(1, max|p| * max|v|) is used.
bool is_monotone_map(std::span<const Point> points, std::span<const Point> values,
                     double tol = -1.0);

}  // namespace polarcone
