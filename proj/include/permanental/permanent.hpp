#pragma once

#include <Eigen/Dense>
#include <numeric>
#include <vector>

#include "permanental/errors.hpp"

namespace perm {

/// Multi-index k = (k_1, ..., k_n) of nonnegative counts with cached order |k|.
class MultiIndex {
 public:
  MultiIndex() = default;
  explicit MultiIndex(std::vector<int> k) : k_(std::move(k)) {
    for (int v : k_)
      if (v < 0) throw PreconditionViolated("MultiIndex: negative component");
    order_ = std::accumulate(k_.begin(), k_.end(), 0);
  }
  static MultiIndex zeros(int n) { return MultiIndex(std::vector<int>(n, 0)); }

  int size() const { return int(k_.size()); }
  int order() const { return order_; }
  int operator[](int i) const { return k_[i]; }
  const std::vector<int>& components() const { return k_; }

  friend bool operator==(const MultiIndex&, const MultiIndex&) = default;

 private:
  std::vector<int> k_;
  int order_ = 0;
};

/// Hard cap on the dimension accepted by alpha_permanent (12! = 479001600 terms).
inline constexpr int kPermanentCap = 12;

/// alpha-permanent sum over permutations pi of alpha^{cycles(pi)} prod_i m(i, pi(i)).
///
/// Permutations are visited in Heap's order. Each step swaps two images,
/// which splits one cycle (+1) or merges two (-1); the cycle count is
/// updated from that instead of being recounted.
template <typename Derived>
typename Derived::Scalar alpha_permanent(const Eigen::MatrixBase<Derived>& m, typename Derived::Scalar alpha) {
  using Scalar = typename Derived::Scalar;
  if (m.rows() != m.cols()) throw PreconditionViolated("alpha_permanent: matrix is not square");
  if (!(alpha > Scalar(0))) throw PreconditionViolated("alpha_permanent: alpha must be positive");
  const int n = int(m.rows());
  if (n > kPermanentCap) throw DimensionTooLarge(n, kPermanentCap);
  if (n == 0) return Scalar(1);

  std::vector<int> image(n);
  std::iota(image.begin(), image.end(), 0);
  std::vector<Scalar> alpha_pow(n + 1, Scalar(1));
  for (int c = 1; c <= n; ++c) alpha_pow[c] = alpha_pow[c - 1] * alpha;

  auto term = [&](int cycles) {
    Scalar p = alpha_pow[cycles];
    for (int r = 0; r < n; ++r) {
      p *= m(r, image[r]);
      if (p == Scalar(0)) break;
    }
    return p;
  };
  auto same_cycle = [&](int i, int j) {
    for (int r = image[i]; r != i; r = image[r])
      if (r == j) return true;
    return false;
  };

  int cycles = n;
  Scalar total = term(cycles);
  std::vector<int> c(n, 0);
  int i = 1;
  while (i < n) {
    if (c[i] < i) {
      const int a = (i % 2 == 0) ? 0 : c[i];
      cycles += same_cycle(a, i) ? 1 : -1;
      std::swap(image[a], image[i]);
      total += term(cycles);
      ++c[i];
      i = 1;
    } else {
      c[i] = 0;
      ++i;
    }
  }
  return total;
}

/// The |k| x |k| matrix whose row/column p carries index i_p, where block j
/// repeats index j exactly k_j times.
template <typename Derived>
Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, Eigen::Dynamic> block_expand(
    const Eigen::MatrixBase<Derived>& c, const MultiIndex& k) {
  if (c.rows() != c.cols() || k.size() != c.rows())
    throw PreconditionViolated("block_expand: multi-index length must match the matrix dimension");
  std::vector<int> idx;
  idx.reserve(k.order());
  for (int j = 0; j < k.size(); ++j) idx.insert(idx.end(), k[j], j);
  const Eigen::Index m = Eigen::Index(idx.size());
  Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, Eigen::Dynamic> out(m, m);
  for (Eigen::Index p = 0; p < m; ++p)
    for (Eigen::Index q = 0; q < m; ++q) out(p, q) = c(idx[p], idx[q]);
  return out;
}

}  // namespace perm
