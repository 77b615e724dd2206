#pragma once

// Test-only reference computations, independent of the library code paths
// they are compared against.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <limits>
#include <random>
#include <vector>

#include "polarcone/cone.hpp"
#include "polarcone/grid.hpp"

namespace polarcone::oracle {

/// Exact weighted isotonic regression by enumerating all 2^{n-1} ways to cut
/// the index range into consecutive blocks, solving each block in closed form
/// (weighted mean), keeping the monotone candidates and taking the cheapest.
inline std::vector<double> brute_force_isotonic(const std::vector<double>& y,
                                                const std::vector<double>& w) {
  const std::size_t n = y.size();
  std::vector<double> best;
  double best_cost = std::numeric_limits<double>::infinity();
  for (std::uint64_t cuts = 0; cuts < (std::uint64_t{1} << (n - 1)); ++cuts) {
    std::vector<double> x(n);
    std::size_t begin = 0;
    bool monotone = true;
    double prev_mean = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < n; ++i) {
      const bool cut_after = i + 1 == n || ((cuts >> i) & 1u);
      if (!cut_after) continue;
      double sw = 0.0, swy = 0.0;
      for (std::size_t k = begin; k <= i; ++k) {
        sw += w[k];
        swy += w[k] * y[k];
      }
      const double mean = swy / sw;
      if (mean < prev_mean - 1e-14) monotone = false;
      prev_mean = mean;
      for (std::size_t k = begin; k <= i; ++k) x[k] = mean;
      begin = i + 1;
    }
    if (!monotone) continue;
    double cost = 0.0;
    for (std::size_t k = 0; k < n; ++k) cost += w[k] * (x[k] - y[k]) * (x[k] - y[k]);
    if (cost < best_cost) {
      best_cost = cost;
      best = x;
    }
  }
  return best;
}

/// Random sticky-particle instance: strictly increasing X0, normal V0,
/// positive weights normalized to 1.
inline StickyState random_sticky_state(std::mt19937_64& rng, std::size_t n) {
  std::uniform_real_distribution<double> gap(0.05, 1.0), mass(0.2, 1.0);
  std::normal_distribution<double> vel(0.0, 1.0);
  std::vector<double> x(n), v(n), w(n);
  double pos = std::uniform_real_distribution<double>(-1.0, 1.0)(rng);
  double total = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    pos += gap(rng);
    x[i] = pos;
    v[i] = vel(rng);
    w[i] = mass(rng);
    total += w[i];
  }
  for (auto& wi : w) wi /= total;
  return StickyState(MonotoneMap1D(x), v, DiscreteMeasure(x, w));
}

/// Cell integrals of the right-continuous step function
/// P(x) = sum_{x_i <= x} f_i on a 1D grid, given the partial sums
/// primitive[i] = f_1 + ... + f_i of atoms sorted by position.
inline std::vector<double> primitive_cell_mass(const Grid& grid, const std::vector<double>& atoms,
                                               const std::vector<double>& primitive) {
  std::vector<double> out(grid.cells(0), 0.0);
  for (std::size_t c = 0; c < out.size(); ++c) {
    const double a = grid.lo(0) + static_cast<double>(c) * grid.spacing(0);
    const double b = a + grid.spacing(0);
    // P is constant primitive[i] on [atoms[i], atoms[i+1]) and 0 left of atoms[0]
    double integral = 0.0;
    for (std::size_t i = 0; i < atoms.size(); ++i) {
      const double lo = std::max(a, atoms[i]);
      const double hi = std::min(b, i + 1 < atoms.size() ? atoms[i + 1] : b);
      if (hi > lo) integral += primitive[i] * (hi - lo);
    }
    out[c] = integral;
  }
  return out;
}

/// Complex-step derivative: f'(x) = Im f(x + i h) / h, exact to rounding.
template <class Fn>
double complex_step(Fn&& f, double x) {
  constexpr double h = 1e-30;
  return std::imag(f(std::complex<double>(x, h))) / h;
}

}  // namespace polarcone::oracle
