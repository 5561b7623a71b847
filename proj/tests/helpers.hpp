#pragma once

#include <cstdint>

#include "permanental/linalg.hpp"
#include "permanental/markov.hpp"
#include "permanental/rng.hpp"

namespace testing {

inline perm::Matrix random_matrix(int n, std::uint64_t seed, double lo = 0.0, double hi = 1.0) {
  perm::RngStream rng(seed, 0);
  perm::Matrix m(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) m(i, j) = lo + (hi - lo) * rng.uniform();
  return m;
}

inline perm::Matrix min_kernel(int n) {
  perm::Matrix k(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) k(i, j) = double(std::min(i, j) + 1);
  return k;
}

inline perm::Matrix markov_kernel(int n, std::uint64_t seed, double kill_min = 0.2) {
  return perm::green_kernel(perm::random_transient_chain(n, kill_min, seed));
}

inline double rel(double a, double b) { return std::abs(a - b) / std::abs(b); }

}  // namespace testing
