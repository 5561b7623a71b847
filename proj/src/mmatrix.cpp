#include "permanental/mmatrix.hpp"

namespace perm {

MMatrixPair validate_m_matrix(const Matrix& a_in) {
  if (a_in.rows() != a_in.cols()) throw NotMMatrix(NotMReason::NotSquare, int(a_in.rows()), int(a_in.cols()), 0.0);
  if (!a_in.allFinite()) throw PreconditionViolated("validate_m_matrix: non-finite entry");
  const Eigen::Index n = a_in.rows();
  Matrix a = a_in;
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j) {
      if (i == j) continue;
      if (a(i, j) > kOffDiagonalTol) throw NotMMatrix(NotMReason::PositiveOffDiagonal, int(i), int(j), a(i, j));
      if (a(i, j) > 0) a(i, j) = 0;
    }
  for (Eigen::Index i = 0; i < n; ++i)
    if (!(a(i, i) > 0)) throw NotMMatrix(NotMReason::NonPositiveDiagonal, int(i), int(i), a(i, i));

  Matrix k;
  try {
    k = invert(a);
  } catch (const SingularMatrix& e) {
    throw NotMMatrix(NotMReason::Singular, -1, -1, e.pivot());
  }
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j)
      if (k(i, j) < -kInverseNegTol) throw NotMMatrix(NotMReason::NegativeInverse, int(i), int(j), k(i, j));

  MMatrixPair p;
  p.diag_a = a.diagonal();
  p.D = p.diag_a.asDiagonal();
  p.B = p.D - a;
  p.B.diagonal().setZero();
  p.row_sums = a.rowwise().sum();
  p.A = std::move(a);
  p.K = std::move(k);
  return p;
}

MMatrixPair validate_kernel(const Matrix& k) {
  if (k.rows() != k.cols()) throw NotMMatrix(NotMReason::NotSquare, int(k.rows()), int(k.cols()), 0.0);
  Matrix a;
  try {
    a = invert(k);
  } catch (const SingularMatrix& e) {
    throw NotMMatrix(NotMReason::Singular, -1, -1, e.pivot());
  }
  MMatrixPair p = validate_m_matrix(a);
  // Keep the caller's kernel rather than the round-tripped inverse.
  p.K = k;
  return p;
}

}  // namespace perm
