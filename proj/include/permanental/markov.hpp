#pragma once

#include <cstdint>
#include <string>

#include "permanental/linalg.hpp"

namespace perm {

/// Substochastic transition matrix of a transient chain with unit holding times.
struct TransientChain {
  Matrix P;
  int n() const { return int(P.rows()); }
};

/// Check P >= 0, row sums <= 1 + 1e-12 and Perron root < 1 - 1e-9.
void validate_chain(const TransientChain& chain);

/// K = (I - P)^{-1}, the expected number of visits to j starting from i.
Matrix green_kernel(const TransientChain& chain);

/// Row-normalized uniform weights scaled by 1 - kill_i, kill_i uniform on [kill_min, 1).
TransientChain random_transient_chain(int n, double kill_min, std::uint64_t seed);

struct AppendixReport {
  bool is_m_matrix = false;
  std::string reason;  // empty when K^{-1} is a nonsingular M-matrix
  int row = -1, col = -1;
  Vector row_sums;  // of K^{-1}
  bool row_sums_positive = false;
  double min_row_sum = 0;
  bool column_dominated = false;  // K_ij <= K_jj for all i, j
  double max_column_excess = 0;   // max_{i,j} K_ij - K_jj
  bool pass() const { return is_m_matrix && row_sums_positive; }
};

/// Report whether K^{-1} is a nonsingular M-matrix with positive row sums,
/// within tolerance `tol` on row-sum positivity.
AppendixReport validate_appendix_lemma(const Matrix& k, double tol = 1e-10);

}  // namespace perm
