#include "polarcone/cone.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <optional>
#include <string>

#include "polarcone/error.hpp"

namespace polarcone {

DiscreteMeasure::DiscreteMeasure(std::vector<double> atoms, std::vector<double> weights,
                                 bool normalized)
    : atoms_(std::move(atoms)), weights_(std::move(weights)), normalized_(normalized) {
  if (atoms_.size() != weights_.size()) {
    throw Error(ErrorCode::InvalidMeasure, "invalid measure: atoms/weights length mismatch");
  }
  for (double w : weights_) {
    if (!(w > 0.0) || !std::isfinite(w)) {
      throw Error(ErrorCode::InvalidMeasure, "invalid measure: nonpositive weight");
    }
  }
  for (double a : atoms_) {
    if (!std::isfinite(a)) throw Error(ErrorCode::InvalidMeasure, "invalid measure: non-finite atom");
  }
  if (normalized_ && std::abs(total_mass() - 1.0) > 1e-12) {
    throw Error(ErrorCode::InvalidMeasure, "invalid measure: total mass is not 1");
  }
}

DiscreteMeasure DiscreteMeasure::uniform(std::size_t n) {
  if (n == 0) throw Error(ErrorCode::EmptyMap, "empty map");
  std::vector<double> atoms(n), weights(n, 1.0 / static_cast<double>(n));
  for (std::size_t i = 0; i < n; ++i) {
    atoms[i] = (static_cast<double>(i) + 0.5) / static_cast<double>(n);
  }
  return DiscreteMeasure(std::move(atoms), std::move(weights), true);
}

double DiscreteMeasure::total_mass() const {
  return std::accumulate(weights_.begin(), weights_.end(), 0.0);
}

MonotoneMap1D::MonotoneMap1D(std::vector<double> values) : values_(std::move(values)) {
  for (std::size_t i = 0; i + 1 < values_.size(); ++i) {
    if (!(values_[i] <= values_[i + 1])) {
      throw Error(ErrorCode::NotMonotone,
                  "map is not monotone at index " + std::to_string(i));
    }
  }
}

namespace {

struct Pool {
  std::size_t begin;
  std::size_t end;
  double weight;
  double mean;
  double vmean;
};

Pool merge(const Pool& a, const Pool& b) {
  const double w = a.weight + b.weight;
  return {a.begin, b.end, w, (a.weight * a.mean + b.weight * b.mean) / w,
          (a.weight * a.vmean + b.weight * b.vmean) / w};
}

void check_inputs(std::span<const double> y, std::span<const double> w) {
  if (y.empty()) throw Error(ErrorCode::EmptyMap, "empty map");
  if (y.size() != w.size()) {
    throw Error(ErrorCode::LengthMismatch, "values and weights differ in length");
  }
  for (double wi : w) {
    if (!(wi > 0.0) || !std::isfinite(wi)) {
      throw Error(ErrorCode::InvalidMeasure, "invalid measure: nonpositive weight");
    }
  }
}

// Pool-adjacent-violators on a stack of blocks. Without a secondary key a
// block is pooled with its left neighbour only on a strict violation. With a
// secondary key v, blocks whose means tie within `tie` are additionally
// pooled when their v-means violate the order; this is the partition of
// P_K(y + eps v) as eps -> 0+.
std::vector<Pool> pava(std::span<const double> y, std::span<const double> w,
                       std::optional<std::span<const double>> v, double tie) {
  std::vector<Pool> stack;
  stack.reserve(y.size());
  for (std::size_t i = 0; i < y.size(); ++i) {
    stack.push_back({i, i + 1, w[i], y[i], v ? (*v)[i] : 0.0});
    while (stack.size() > 1) {
      const Pool& prev = stack[stack.size() - 2];
      const Pool& cur = stack.back();
      bool violated = prev.mean > cur.mean;
      if (v) {
        const double gap = prev.mean - cur.mean;
        violated = gap > tie || (gap >= -tie && prev.vmean > cur.vmean);
      }
      if (!violated) break;
      const Pool pooled = merge(prev, cur);
      stack.pop_back();
      stack.back() = pooled;
    }
  }
  return stack;
}

double max_abs(std::span<const double> x) {
  double m = 0.0;
  for (double xi : x) m = std::max(m, std::abs(xi));
  return m;
}

}  // namespace

IsotonicFit isotonic_fit(std::span<const double> y, std::span<const double> w) {
  check_inputs(y, w);
  const auto pools = pava(y, w, std::nullopt, 0.0);
  std::vector<double> x(y.size());
  IsotonicFit fit;
  fit.blocks.reserve(pools.size());
  fit.block_of.resize(y.size());
  for (std::size_t b = 0; b < pools.size(); ++b) {
    const Pool& p = pools[b];
    fit.blocks.push_back({p.begin, p.end, p.weight, p.mean});
    for (std::size_t i = p.begin; i < p.end; ++i) {
      x[i] = p.mean;
      fit.block_of[i] = b;
    }
  }
  fit.map = MonotoneMap1D(std::move(x));
  return fit;
}

MonotoneMap1D project_monotone_1d(std::span<const double> y, std::span<const double> w) {
  return isotonic_fit(y, w).map;
}

StickyState::StickyState(MonotoneMap1D x0, std::vector<double> v0, DiscreteMeasure measure)
    : x0_(std::move(x0)), v0_(std::move(v0)), measure_(std::move(measure)) {
  if (x0_.size() == 0) throw Error(ErrorCode::EmptyMap, "empty map");
  if (x0_.size() != v0_.size() || v0_.size() != measure_.size()) {
    throw Error(ErrorCode::LengthMismatch, "X0, V0 and weights differ in length");
  }
  for (double v : v0_) {
    if (!std::isfinite(v)) throw Error(ErrorCode::InvalidArgument, "non-finite velocity");
  }
}

std::vector<double> StickyState::free_flight(double t) const {
  std::vector<double> y(size());
  for (std::size_t i = 0; i < y.size(); ++i) y[i] = x0_[i] + t * v0_[i];
  return y;
}

namespace {

void require_nonnegative_time(double t) {
  if (t < 0.0 || std::isnan(t)) throw Error(ErrorCode::NegativeTime, "negative time");
}

}  // namespace

MonotoneMap1D sticky_evolve(const StickyState& state, double t) {
  require_nonnegative_time(t);
  const auto y = state.free_flight(t);
  return project_monotone_1d(y, state.measure().weights());
}

StickySnapshot sticky_snapshot(const StickyState& state, double t) {
  require_nonnegative_time(t);
  const auto y = state.free_flight(t);
  const auto& w = state.measure().weights();
  const double tie = 1e-12 * std::max(1.0, max_abs(y));
  const auto pools = pava(y, w, std::span<const double>(state.v0()), tie);

  StickySnapshot snap;
  snap.positions = project_monotone_1d(y, w).values();
  snap.velocities.resize(y.size());
  snap.block_id.resize(y.size());
  for (std::size_t b = 0; b < pools.size(); ++b) {
    for (std::size_t i = pools[b].begin; i < pools[b].end; ++i) {
      snap.velocities[i] = pools[b].vmean;
      snap.block_id[i] = b;
    }
  }
  if (t == 0.0) {
    for (std::size_t i = 0; i < y.size(); ++i) {
      if (snap.velocities[i] != state.v0()[i]) {
        snap.velocity_is_right_limit = true;
        break;
      }
    }
  }
  return snap;
}

std::vector<double> lagrangian_velocity(const StickyState& state, double t) {
  require_nonnegative_time(t);
  if (t == 0.0) {
    throw Error(ErrorCode::InvalidArgument,
                "lagrangian velocity requires t > 0; use sticky_snapshot for the right limit at 0");
  }
  return sticky_snapshot(state, t).velocities;
}

DiscreteMeasure push_forward(const MonotoneMap1D& x, const DiscreteMeasure& m, double quantum) {
  if (x.size() != m.size()) {
    throw Error(ErrorCode::LengthMismatch, "map and measure differ in length");
  }
  if (x.size() == 0) return {};
  std::vector<double> atoms, weights;
  const auto& v = x.values();
  const auto& w = m.weights();
  std::size_t run = 0;
  double mass = 0.0, moment = 0.0;
  for (std::size_t i = 0; i <= v.size(); ++i) {
    if (i == v.size() || v[i] - v[run] > quantum) {
      atoms.push_back(moment / mass);
      weights.push_back(mass);
      if (i == v.size()) break;
      run = i;
      mass = moment = 0.0;
    }
    mass += w[i];
    moment += w[i] * v[i];
  }
  return DiscreteMeasure(std::move(atoms), std::move(weights), m.normalized());
}

std::vector<double> polar_residual(const StickyState& state, double t) {
  const auto y = state.free_flight(t);
  const auto x = sticky_evolve(state, t);
  std::vector<double> r(y.size());
  for (std::size_t i = 0; i < y.size(); ++i) r[i] = y[i] - x[i];
  return r;
}

std::vector<double> nonneg_primitive(std::span<const double> y, const DiscreteMeasure& m) {
  if (y.size() != m.size()) {
    throw Error(ErrorCode::LengthMismatch, "residual and measure differ in length");
  }
  std::vector<double> p(y.size());
  double acc = 0.0;
  for (std::size_t i = 0; i < y.size(); ++i) {
    acc += y[i] * m.weights()[i];
    p[i] = acc;
  }
  return p;
}

PolarCertificate1D polar_membership_1d(std::span<const double> y, const MonotoneMap1D& x,
                                       const DiscreteMeasure& m) {
  if (y.size() != x.size() || y.size() != m.size()) {
    throw Error(ErrorCode::LengthMismatch, "residual, map and measure differ in length");
  }
  PolarCertificate1D cert;
  cert.primitive = nonneg_primitive(y, m);
  double inner = 0.0;
  for (std::size_t i = 0; i < y.size(); ++i) inner += y[i] * x[i] * m.weights()[i];
  cert.inner_product = inner;
  cert.scale = std::max(1.0, max_abs(y) * max_abs(x.values()));
  cert.tol_eq = 1e-9 * cert.scale;
  cert.tol_pos = 1e-12 * cert.scale;

  bool ok = std::abs(inner) <= cert.tol_eq;
  for (double p : cert.primitive) ok = ok && p >= -cert.tol_pos;
  if (!cert.primitive.empty()) ok = ok && std::abs(cert.primitive.back()) <= cert.tol_eq;
  cert.feasible = ok;
  return cert;
}

bool is_monotone_map(std::span<const Point> points, std::span<const Point> values, double tol) {
  if (points.size() != values.size()) {
    throw Error(ErrorCode::LengthMismatch, "points and values differ in length");
  }
  if (points.empty()) return true;
  const auto d = points.front().size();
  if (d < 1) throw Error(ErrorCode::InvalidArgument, "dimension must be at least 1");
  double pmax = 0.0, vmax = 0.0;
  for (std::size_t i = 0; i < points.size(); ++i) {
    if (points[i].size() != d || values[i].size() != d) {
      throw Error(ErrorCode::LengthMismatch, "inconsistent point dimension");
    }
    pmax = std::max(pmax, points[i].cwiseAbs().maxCoeff());
    vmax = std::max(vmax, values[i].cwiseAbs().maxCoeff());
  }
  if (tol < 0.0) tol = 1e-12 * std::max(1.0, pmax * vmax);
  for (std::size_t i = 0; i < points.size(); ++i) {
    for (std::size_t j = i + 1; j < points.size(); ++j) {
      if ((values[i] - values[j]).dot(points[i] - points[j]) < -tol) return false;
    }
  }
  return true;
}

}  // namespace polarcone
