#pragma once

#include <Eigen/Core>

#include <span>

namespace polarcone {

/// Point or vector in R^d, d <= 3.
using Point = Eigen::Matrix<double, Eigen::Dynamic, 1, 0, 3, 1>;

/// Small symmetric (or square) d x d matrix, d <= 3. Stack allocated.
using SymMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, 0, 3, 3>;

/// Number of independent entries of a symmetric d x d matrix.
constexpr int sym_size(int d) { return d * (d + 1) / 2; }

// Packing order is the upper triangle, row by row: for d = 2 that is
// (m11, m12, m22), for d = 3 (m11, m12, m13, m22, m23, m33).
void pack_upper(const SymMatrix& m, std::span<double> out);
SymMatrix unpack_upper(std::span<const double> packed, int d);

/// Weight of each packed entry in the Frobenius pairing <A,B> = sum a_ij b_ij:
/// 1 on the diagonal, 2 off the diagonal.
double pairing_weight(int d, int packed_index);

double frobenius_pairing(const SymMatrix& a, const SymMatrix& b);

/// Nearest positive semidefinite matrix in the Frobenius norm.
SymMatrix project_psd(const SymMatrix& m);

double min_eigenvalue(const SymMatrix& m);
double max_eigenvalue(const SymMatrix& m);

/// Cofactor matrix; for symmetric invertible A this is det(A) A^{-1}.
SymMatrix cofactor(const SymMatrix& m);

SymMatrix symmetric_part(const SymMatrix& m);

}  // namespace polarcone
