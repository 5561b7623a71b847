#include "permanental/gamma.hpp"

#include <cmath>
#include <limits>

#include "permanental/errors.hpp"

namespace perm {

namespace {

constexpr double kEps = 1e-16;
constexpr int kMaxIter = 100000;

void check_args(double u, double t) {
  if (!(u > 0) || !std::isfinite(u)) throw PreconditionViolated("incomplete gamma: shape must be positive");
  if (!(t >= 0) || std::isnan(t)) throw PreconditionViolated("incomplete gamma: argument must be nonnegative");
}

// log(t^u e^{-t} / Gamma(u))
double log_prefactor(double u, double t) { return u * std::log(t) - t - std::lgamma(u); }

// P(u, t) by its power series, for t < u + 1.
double series_p(double u, double t) {
  double term = 1.0 / u;
  double sum = term;
  for (int n = 1; n < kMaxIter; ++n) {
    term *= t / (u + n);
    sum += term;
    if (std::abs(term) < std::abs(sum) * kEps) return sum * std::exp(log_prefactor(u, t));
  }
  throw NoConvergence("incomplete gamma series", sum);
}

// Q(u, t) by the modified Lentz continued fraction, for t >= u + 1.
double continued_fraction_q(double u, double t) {
  constexpr double tiny = 1e-300;
  double b = t + 1.0 - u;
  double c = 1.0 / tiny;
  double d = 1.0 / b;
  double h = d;
  for (int i = 1; i < kMaxIter; ++i) {
    const double an = -i * (i - u);
    b += 2.0;
    d = an * d + b;
    if (std::abs(d) < tiny) d = tiny;
    c = b + an / c;
    if (std::abs(c) < tiny) c = tiny;
    d = 1.0 / d;
    const double delta = d * c;
    h *= delta;
    if (std::abs(delta - 1.0) < kEps) return std::exp(log_prefactor(u, t)) * h;
  }
  throw NoConvergence("incomplete gamma continued fraction", h);
}

}  // namespace

double regularized_gamma_p(double u, double t) {
  check_args(u, t);
  if (t == 0) return 0.0;
  if (std::isinf(t)) return 1.0;
  return t < u + 1 ? series_p(u, t) : 1.0 - continued_fraction_q(u, t);
}

double regularized_gamma_q(double u, double t) {
  check_args(u, t);
  if (t == 0) return 1.0;
  if (std::isinf(t)) return 0.0;
  return t < u + 1 ? 1.0 - series_p(u, t) : continued_fraction_q(u, t);
}

double gamma_tail_exact(double u, double v, double t) {
  if (!(v > 0) || !std::isfinite(v)) throw PreconditionViolated("gamma_tail_exact: scale must be positive");
  return regularized_gamma_q(u, v * t);
}

double tail_upper_bound(double u, double lam) {
  if (!(u > 0)) throw PreconditionViolated("tail bound: shape must be positive");
  if (!(lam > std::max(2.0 * (u - 1.0), 0.0)))
    throw PreconditionViolated("upper tail bound needs lambda > 2(u-1) v 0");
  return 2.0 * std::exp((u - 1.0) * std::log(lam) - lam - std::lgamma(u));
}

double tail_lower_bound(double u, double lam) {
  if (!(u > 0)) throw PreconditionViolated("tail bound: shape must be positive");
  if (!(lam >= 2.0)) throw PreconditionViolated("lower tail bound needs lambda >= 2");
  if (u < 1 && !(lam > 2.0 * (1.0 - u))) throw PreconditionViolated("lower tail bound needs lambda > 2(1-u)");
  return (2.0 / 3.0) * std::exp((u - 1.0) * std::log(lam) - lam - std::lgamma(u));
}

TailBounds tail_bounds(double u, double lam) { return {tail_lower_bound(u, lam), tail_upper_bound(u, lam)}; }

MaxIidBound max_iid_lower(long n, double u, double eps, double q) {
  if (n < 10) throw PreconditionViolated("max_iid_lower needs n >= 10");
  if (!(u > 0) || !(eps > 0) || !(q > 0)) throw PreconditionViolated("max_iid_lower needs u, eps, q > 0");
  const double logn = std::log(double(n));
  const double side = std::exp(eps * logn - std::log(q) - std::lgamma(u) - std::log(logn));
  if (!(side >= 1.5))
    throw PreconditionViolated("max_iid_lower side condition n^eps/(q Gamma(u) log n) >= 3/2 fails (value " +
                               std::to_string(side) + ")");
  return {(1.0 - eps) * logn, 1.0 - std::exp(-q), side};
}

double unbounded_lambda_check(long n, long p, double alpha) {
  if (n < 10) throw PreconditionViolated("unbounded_lambda_check needs n >= 10");
  if (p < 1) throw PreconditionViolated("unbounded_lambda_check needs p >= 1");
  const double tail = regularized_gamma_q(alpha, std::log(double(n)));
  const long m = n / p;
  return -std::expm1(double(m) * std::log1p(-tail));
}

}  // namespace perm
