#pragma once

namespace perm {

/// Regularized lower incomplete gamma P(u, t).
double regularized_gamma_p(double u, double t);
/// Regularized upper incomplete gamma Q(u, t) = 1 - P(u, t).
double regularized_gamma_q(double u, double t);

/// P(xi_{u,v} >= t) for the gamma law with density v^u x^{u-1} e^{-vx} / Gamma(u).
double gamma_tail_exact(double u, double v, double t);

struct TailBounds {
  double lower;
  double upper;
};

/// 2 lam^{u-1} e^{-lam} / Gamma(u), valid for lam > 2(u-1) v 0.
double tail_upper_bound(double u, double lam);
/// (2/3) lam^{u-1} e^{-lam} / Gamma(u), valid for lam >= 2 (and lam > 2(1-u) when u < 1).
double tail_lower_bound(double u, double lam);
/// Both bounds on P(xi_{u,1} >= lam); throws if either precondition fails.
TailBounds tail_bounds(double u, double lam);

struct MaxIidBound {
  double threshold;    // (1 - eps) log n, for v = 1; divide by v in general
  double probability;  // 1 - e^{-q}
  double side_condition;  // n^eps / (q Gamma(u) log n), required >= 3/2
};

/// Lower bound on P(max_{i<=n} xi^{(i)}_{u,v} >= (1-eps) log n / v).
MaxIidBound max_iid_lower(long n, double u, double eps, double q);

/// Exact P(max of [n/p] iid xi_{alpha,1} >= log n).
double unbounded_lambda_check(long n, long p, double alpha);

}  // namespace perm
