#pragma once

#include "permanental/linalg.hpp"

namespace perm {

/// Off-diagonal entries of A up to this value are accepted and clamped to 0.
inline constexpr double kOffDiagonalTol = 1e-12;
/// Entries of A^{-1} down to minus this value are accepted as nonnegative.
inline constexpr double kInverseNegTol = 1e-10;

/// A validated nonsingular M-matrix A together with its kernel K = A^{-1}
/// and the splitting A = D - B (D diagonal, B >= 0 with zero diagonal).
struct MMatrixPair {
  Matrix A;
  Matrix K;
  Vector diag_a;
  Matrix D;
  Matrix B;
  Vector row_sums;

  int n() const { return int(A.rows()); }
  /// D^{-1} B, the matrix whose Perron root controls every series expansion.
  Matrix scaled_offdiag() const { return diag_a.cwiseInverse().asDiagonal() * B; }
};

MMatrixPair validate_m_matrix(const Matrix& a);

/// Validate a kernel by inverting it first.
MMatrixPair validate_kernel(const Matrix& k);

}  // namespace perm
