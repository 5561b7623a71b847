#include "permanental/markov.hpp"

#include "permanental/mmatrix.hpp"
#include "permanental/rng.hpp"

namespace perm {

void validate_chain(const TransientChain& chain) {
  const Matrix& p = chain.P;
  if (p.rows() != p.cols() || p.rows() == 0) throw PreconditionViolated("transition matrix must be square and nonempty");
  if (!p.allFinite()) throw PreconditionViolated("transition matrix has a non-finite entry");
  if ((p.array() < 0).any()) throw PreconditionViolated("transition matrix has a negative entry");
  const Vector rs = p.rowwise().sum();
  for (Eigen::Index i = 0; i < rs.size(); ++i)
    if (rs(i) > 1 + 1e-12) throw PreconditionViolated("row " + std::to_string(i) + " of P sums to more than 1");
  const double rho = spectral_radius_nonneg(p);
  if (!(rho < 1 - 1e-9)) throw NotTransient(rho);
}

Matrix green_kernel(const TransientChain& chain) {
  validate_chain(chain);
  const Eigen::Index n = chain.P.rows();
  return invert(Matrix(Matrix::Identity(n, n) - chain.P));
}

TransientChain random_transient_chain(int n, double kill_min, std::uint64_t seed) {
  if (n < 2) throw PreconditionViolated("random_transient_chain needs n >= 2");
  if (!(kill_min > 0 && kill_min < 1)) throw PreconditionViolated("kill_min must lie in (0, 1)");
  RngStream rng(seed, 0);
  TransientChain c;
  c.P.resize(n, n);
  for (int i = 0; i < n; ++i) {
    double s = 0;
    for (int j = 0; j < n; ++j) {
      c.P(i, j) = rng.uniform_open();
      s += c.P(i, j);
    }
    const double kill = kill_min + (1.0 - kill_min) * rng.uniform();
    c.P.row(i) *= (1.0 - kill) / s;
  }
  return c;
}

AppendixReport validate_appendix_lemma(const Matrix& k, double tol) {
  AppendixReport r;
  const Eigen::Index n = k.rows();
  if (k.rows() != k.cols()) {
    r.reason = "not square";
    return r;
  }
  r.column_dominated = true;
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j) {
      const double excess = k(i, j) - k(j, j);
      r.max_column_excess = std::max(r.max_column_excess, excess);
      if (excess > tol * std::abs(k(j, j))) r.column_dominated = false;
    }
  Matrix a;
  try {
    a = invert(k);
  } catch (const SingularMatrix& e) {
    r.reason = "singular";
    return r;
  }
  r.row_sums = a.rowwise().sum();
  r.min_row_sum = r.row_sums.minCoeff();
  r.row_sums_positive = r.min_row_sum > tol;
  try {
    validate_m_matrix(a);
    r.is_m_matrix = true;
  } catch (const NotMMatrix& e) {
    r.reason = to_string(e.reason());
    r.row = e.row();
    r.col = e.col();
  }
  return r;
}

}  // namespace perm
