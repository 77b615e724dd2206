#include "polarcone/symmetric.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cassert>
#include <cmath>

namespace polarcone {

void pack_upper(const SymMatrix& m, std::span<double> out) {
  const int d = static_cast<int>(m.rows());
  assert(static_cast<int>(out.size()) == sym_size(d));
  int k = 0;
  for (int i = 0; i < d; ++i) {
    for (int j = i; j < d; ++j) out[k++] = m(i, j);
  }
}

SymMatrix unpack_upper(std::span<const double> packed, int d) {
  assert(static_cast<int>(packed.size()) == sym_size(d));
  SymMatrix m(d, d);
  int k = 0;
  for (int i = 0; i < d; ++i) {
    for (int j = i; j < d; ++j) {
      m(i, j) = packed[k];
      m(j, i) = packed[k];
      ++k;
    }
  }
  return m;
}

double pairing_weight(int d, int packed_index) {
  int k = 0;
  for (int i = 0; i < d; ++i) {
    for (int j = i; j < d; ++j) {
      if (k == packed_index) return i == j ? 1.0 : 2.0;
      ++k;
    }
  }
  return 0.0;
}

double frobenius_pairing(const SymMatrix& a, const SymMatrix& b) {
  return a.cwiseProduct(b).sum();
}

namespace {

// Closed-form symmetric 2x2 eigendecomposition; the iterative solver is
// needlessly slow inside the per-cell loops of the conic solvers.
struct Eig2 {
  double lo, hi;
  double c, s;  // eigenvector of `hi` is (c, s)
};

Eig2 eig2(const SymMatrix& m) {
  const double a = m(0, 0), b = 0.5 * (m(0, 1) + m(1, 0)), d = m(1, 1);
  const double mean = 0.5 * (a + d);
  const double half_diff = 0.5 * (a - d);
  const double r = std::hypot(half_diff, b);
  Eig2 out{mean - r, mean + r, 1.0, 0.0};
  if (r > 0.0) {
    // angle of the principal axis
    const double theta = 0.5 * std::atan2(b, half_diff);
    out.c = std::cos(theta);
    out.s = std::sin(theta);
  }
  return out;
}

}  // namespace

SymMatrix project_psd(const SymMatrix& m) {
  const int d = static_cast<int>(m.rows());
  if (d == 1) {
    SymMatrix out(1, 1);
    out(0, 0) = std::max(0.0, m(0, 0));
    return out;
  }
  if (d == 2) {
    const Eig2 e = eig2(m);
    const double hi = std::max(0.0, e.hi), lo = std::max(0.0, e.lo);
    SymMatrix out(2, 2);
    // Q diag(hi, lo) Q^T with Q = [[c, -s], [s, c]]
    out(0, 0) = hi * e.c * e.c + lo * e.s * e.s;
    out(1, 1) = hi * e.s * e.s + lo * e.c * e.c;
    out(0, 1) = out(1, 0) = (hi - lo) * e.c * e.s;
    return out;
  }
  Eigen::SelfAdjointEigenSolver<SymMatrix> es(symmetric_part(m));
  const auto clipped = es.eigenvalues().cwiseMax(0.0);
  return es.eigenvectors() * clipped.asDiagonal() * es.eigenvectors().transpose();
}

double min_eigenvalue(const SymMatrix& m) {
  const int d = static_cast<int>(m.rows());
  if (d == 1) return m(0, 0);
  if (d == 2) return eig2(m).lo;
  Eigen::SelfAdjointEigenSolver<SymMatrix> es(symmetric_part(m), Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff();
}

double max_eigenvalue(const SymMatrix& m) {
  const int d = static_cast<int>(m.rows());
  if (d == 1) return m(0, 0);
  if (d == 2) return eig2(m).hi;
  Eigen::SelfAdjointEigenSolver<SymMatrix> es(symmetric_part(m), Eigen::EigenvaluesOnly);
  return es.eigenvalues().maxCoeff();
}

SymMatrix cofactor(const SymMatrix& m) {
  const int d = static_cast<int>(m.rows());
  SymMatrix c(d, d);
  if (d == 1) {
    c(0, 0) = 1.0;
  } else if (d == 2) {
    c(0, 0) = m(1, 1);
    c(0, 1) = -m(1, 0);
    c(1, 0) = -m(0, 1);
    c(1, 1) = m(0, 0);
  } else {
    for (int i = 0; i < 3; ++i) {
      for (int j = 0; j < 3; ++j) {
        const int i1 = (i + 1) % 3, i2 = (i + 2) % 3;
        const int j1 = (j + 1) % 3, j2 = (j + 2) % 3;
        c(i, j) = m(i1, j1) * m(i2, j2) - m(i1, j2) * m(i2, j1);
      }
    }
  }
  return c;
}

SymMatrix symmetric_part(const SymMatrix& m) {
  return 0.5 * (m + m.transpose());
}

}  // namespace polarcone
