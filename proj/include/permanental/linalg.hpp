#pragma once

#include <Eigen/Dense>
#include <cmath>

#include "permanental/errors.hpp"

namespace perm {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

template <typename Derived>
typename Derived::Scalar inf_norm(const Eigen::MatrixBase<Derived>& m) {
  if (m.size() == 0) return typename Derived::Scalar(0);
  return m.cwiseAbs().rowwise().sum().maxCoeff();
}

template <typename Derived>
bool all_finite(const Eigen::MatrixBase<Derived>& m) {
  return m.allFinite();
}

/// Determinant by partial-pivot LU. The empty matrix has determinant 1.
template <typename Derived>
typename Derived::Scalar det_lu(const Eigen::MatrixBase<Derived>& m) {
  using Scalar = typename Derived::Scalar;
  if (m.rows() != m.cols()) throw PreconditionViolated("det_lu: matrix is not square");
  if (m.rows() == 0) return Scalar(1);
  Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> a = m;
  Eigen::PartialPivLU<decltype(a)> lu(a);
  const auto& f = lu.matrixLU();
  const Scalar scale = inf_norm(a);
  const Scalar eps = std::numeric_limits<Scalar>::epsilon();
  for (Eigen::Index i = 0; i < f.rows(); ++i)
    if (std::abs(f(i, i)) <= eps * scale) return Scalar(0);
  return lu.determinant();
}

/// Smallest pivot magnitude below this fraction of the infinity norm is singular.
inline constexpr double kSingularPivotRatio = 1e-13;

template <typename Derived>
Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, Eigen::Dynamic> invert(
    const Eigen::MatrixBase<Derived>& m) {
  using Scalar = typename Derived::Scalar;
  using Dense = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
  if (m.rows() != m.cols()) throw PreconditionViolated("invert: matrix is not square");
  if (m.rows() == 0) return Dense(0, 0);
  Dense a = m;
  Eigen::PartialPivLU<Dense> lu(a);
  Scalar min_pivot = std::abs(lu.matrixLU()(0, 0));
  for (Eigen::Index i = 1; i < a.rows(); ++i) min_pivot = std::min(min_pivot, std::abs(lu.matrixLU()(i, i)));
  if (!(min_pivot >= Scalar(kSingularPivotRatio) * inf_norm(a))) throw SingularMatrix(double(min_pivot));
  return lu.inverse();
}

/// Perron root of an entrywise nonnegative matrix.
///
/// Power iteration on M + I from the all-ones vector. The Collatz-Wielandt
/// maximum max_i (Mx)_i / x_i is an upper bound for the Perron root at every
/// iterate and decreases to it, so the returned value never underestimates.
/// The shift keeps periodic matrices such as [[0,1],[1,0]] from oscillating.
template <typename Derived>
typename Derived::Scalar spectral_radius_nonneg(const Eigen::MatrixBase<Derived>& m, double tol = 1e-13,
                                                int max_iter = 200000) {
  using Scalar = typename Derived::Scalar;
  using Vec = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
  if (m.rows() != m.cols()) throw PreconditionViolated("spectral_radius_nonneg: matrix is not square");
  if ((m.array() < Scalar(0)).any()) throw PreconditionViolated("spectral_radius_nonneg: negative entry");
  const Eigen::Index n = m.rows();
  if (n == 0 || m.isZero(0)) return Scalar(0);
  Vec x = Vec::Ones(n);
  Scalar upper = std::numeric_limits<Scalar>::infinity();
  Scalar lower = 0;
  int flat = 0;
  for (int it = 0; it < max_iter; ++it) {
    Vec y = m * x + x;
    Scalar hi = 0, lo = std::numeric_limits<Scalar>::infinity();
    for (Eigen::Index i = 0; i < n; ++i) {
      Scalar r = y(i) / x(i);
      hi = std::max(hi, r);
      lo = std::min(lo, r);
    }
    hi = std::min(hi, upper);
    lower = std::max(lower, lo);
    // Reducible matrices can leave the lower bound stuck; then stop once the
    // upper bound has been flat for a while.
    flat = (std::abs(upper - hi) <= Scalar(tol) * hi) ? flat + 1 : 0;
    upper = hi;
    if (upper - lower <= Scalar(tol) * upper || flat >= 200) return std::max(Scalar(0), upper - 1);
    x = y / y.maxCoeff();
  }
  throw NoConvergence("spectral_radius_nonneg", double(upper - 1));
}

}  // namespace perm
