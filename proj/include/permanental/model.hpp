#pragma once

#include <memory>
#include <vector>

#include "permanental/mmatrix.hpp"
#include "permanental/permanent.hpp"

namespace perm {

struct PermanentalSpec {
  MMatrixPair pair;
  double alpha = 1.0;

  int n() const { return pair.n(); }
};

PermanentalSpec make_spec(const Matrix& a, double alpha);
PermanentalSpec make_spec_from_kernel(const Matrix& k, double alpha);

/// |A|^alpha / |A + S|^alpha.
double direct_laplace(const PermanentalSpec& spec, const Vector& s);
/// The same transform through the kernel, |I + K S|^{-alpha}.
double direct_laplace_kernel_form(const PermanentalSpec& spec, const Vector& s);

/// Graded lexicographic enumeration of multi-indices of one order.
///
/// Within order d the first index is (d, 0, ..., 0) and the last (0, ..., 0, d).
class GradedIndexer {
 public:
  explicit GradedIndexer(int n);

  int n() const { return n_; }
  /// Number of multi-indices of order d.
  long count(int d) const;
  /// Position of k within its order.
  long rank(const std::vector<int>& k) const;
  long rank(const MultiIndex& k) const { return rank(k.components()); }
  /// Advance k to its successor of the same order; false after the last one.
  static bool next(std::vector<int>& k);
  static std::vector<int> first(int n, int d);

 private:
  long binom(int top, int bottom) const;

  int n_;
  mutable std::vector<std::vector<long>> table_;
};

/// Hard cap on the number of stored series coefficients.
inline constexpr long kCoefficientCap = 20'000'000;

/// Coefficients f_k of the power series |I - Z W|^{-alpha} = sum_k f_k z^k,
/// W = D^{-1} B, Z = diag(z).
///
/// The probability P(Z = k) of the mixture equals prefactor() * f_k and each
/// f_k equals |W(k)|_alpha / k!. Coefficients are produced order by order from
/// the pair (f, H) with H(z) = f(z) (I - Z W)^{-1}:
///   k_i f_k = alpha sum_c W_ic H_ci[k - e_i]
///   H_ab[k] = f_k delta_ab + sum_c W_ac H_cb[k - e_a]   (k_a >= 1)
/// Every term is nonnegative, so there is no cancellation.
class SeriesExpansion {
 public:
  SeriesExpansion(const PermanentalSpec& spec, long coefficient_cap = kCoefficientCap);

  int n() const { return n_; }
  double alpha() const { return alpha_; }
  int order() const { return int(coef_.size()) - 1; }
  /// Compute coefficients through order m.
  void extend_to(int m);

  const std::vector<double>& degree(int d) const { return coef_.at(d); }
  double coefficient(const MultiIndex& k) const;
  long stored() const { return stored_; }
  const GradedIndexer& indexer() const { return indexer_; }

  /// |A|^alpha / prod_i a_i^alpha.
  double prefactor() const { return prefactor_; }
  /// Perron root of W.
  double radius() const { return radius_; }
  const Matrix& w() const { return w_; }

 private:
  int n_;
  double alpha_;
  long cap_;
  Matrix w_;
  double prefactor_;
  double radius_;
  GradedIndexer indexer_;
  std::vector<std::vector<double>> coef_;
  std::vector<double> h_prev_;  // H at the current order, [rank][a][b]
  long stored_ = 0;
};

/// Certified bound on sum_{d > m} phi_d where phi_d is the order-d part of
/// |I - t M|^{-alpha} at t = 1, for M >= 0 with Perron root rho.
///
/// phi_d is summed exactly from the trace recursion up to an order D, and the
/// remainder is dominated by the coefficients of (1 - t rho)^{-n alpha}.
struct TailCertificate {
  std::vector<double> phi;  // phi_0 .. phi_D
  double majorant = 0;      // bound on sum_{d > D} phi_d
  /// Bound on sum_{d > m} phi_d.
  double tail_after(int m) const;
  double total() const;
};

/// Spectral radii at or above this value make every truncation infeasible.
inline constexpr double kRadiusLimit = 1.0 - 1e-6;

TailCertificate tail_certificate(const Matrix& m, double alpha, double rho);

/// sum_{j > d} binom(c + j - 1, j) rho^j, bounded above.
double negative_binomial_tail(double c, double rho, int d);

struct SeriesResult {
  double value = 0;
  double tail_bound = 0;  // absolute
  double rel_err = 0;     // tail_bound / value
  long terms_used = 0;
  int order = 0;
};

/// Mixture form of the Laplace transform at s: sum over k of P(Z = k) prod_i (a_i/(a_i+s_i))^{alpha+k_i}.
/// Stops at the first order whose certified tail is below rel_tol times the partial sum.
SeriesResult series_laplace(SeriesExpansion& expansion, const Vector& diag_a, const Vector& s, double rel_tol);
SeriesResult series_laplace(const PermanentalSpec& spec, const Vector& s, double rel_tol);

/// Truncated law of the mixing variable Z.
struct ZDistribution {
  std::shared_ptr<const SeriesExpansion> expansion;
  std::vector<MultiIndex> support;  // graded order
  std::vector<double> masses;
  std::vector<double> cumulative;
  double covered_mass = 0;
  double tail_bound = 0;
  int max_order = 0;

  /// P(Z = k) for |k| <= max_order.
  double mass(const MultiIndex& k) const;
};

ZDistribution z_masses(const PermanentalSpec& spec, double target_mass);
/// Truncation at a fixed order.
ZDistribution z_masses_to_order(const PermanentalSpec& spec, int order);
ZDistribution z_masses_from(std::shared_ptr<const SeriesExpansion> expansion);

}  // namespace perm
