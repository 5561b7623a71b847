#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <limits>
#include <queue>
#include <vector>

namespace perm {

struct QuadResult {
  double value = 0;
  double error = 0;  // estimated absolute error
  long evaluations = 0;
};

using Integrand = std::function<double(double)>;

/// Globally adaptive 15-point Gauss-Kronrod quadrature on [a, b].
///
/// Bisects the interval with the largest error estimate until the total
/// estimate is below max(abs_tol, rel_tol |value|) or max_intervals is hit.
/// Returns the best estimate either way; callers compare `error` with their
/// own tolerance.
QuadResult integrate(const Integrand& f, double a, double b, double abs_tol, double rel_tol,
                     int max_intervals = 2000);

/// Integral over [a, inf) through x = a + t / (1 - t).
QuadResult integrate_to_infinity(const Integrand& f, double a, double abs_tol, double rel_tol,
                                 int max_intervals = 2000);

/// Limit of a sequence of partial sums by Wynn's epsilon algorithm.
///
/// The error estimate is the distance between the last two diagonal entries.
struct SeriesLimit {
  double value = 0;
  double error = 0;
};
SeriesLimit wynn_epsilon(const std::vector<double>& partial_sums);

namespace detail {

inline constexpr double kXgk[8] = {0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
                                   0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
                                   0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
                                   0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
inline constexpr double kWgk[8] = {0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
                                   0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
                                   0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
                                   0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
inline constexpr double kWg[4] = {0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
                                  0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

template <size_t N>
struct PanelN {
  double a, b;
  std::array<double, N> value, error, absval;
  double priority = 0;
  bool operator<(const PanelN& o) const { return priority < o.priority; }
};

template <size_t N, class F>
PanelN<N> kronrod_n(F& f, double a, double b) {
  PanelN<N> p{a, b, {}, {}, {}};
  const double c = 0.5 * (a + b), h = 0.5 * (b - a);
  std::array<double, N> rk{}, rg{}, ra{};
  auto add = [&](const std::array<double, N>& v, double wk, double wg) {
    for (size_t k = 0; k < N; ++k) {
      rk[k] += wk * v[k];
      rg[k] += wg * v[k];
      ra[k] += wk * std::abs(v[k]);
    }
  };
  add(f(c), kWgk[7], kWg[3]);
  for (int j = 0; j < 7; ++j) {
    const double dx = h * kXgk[j];
    const double wg = (j % 2 == 1) ? kWg[j / 2] : 0.0;
    add(f(c - dx), kWgk[j], wg);
    add(f(c + dx), kWgk[j], wg);
  }
  for (size_t k = 0; k < N; ++k) {
    p.value[k] = rk[k] * h;
    p.absval[k] = ra[k] * std::abs(h);
    double err = std::abs((rk[k] - rg[k]) * h);
    if (err > 0 && p.absval[k] > 0) err = p.absval[k] * std::min(1.0, std::pow(200.0 * err / p.absval[k], 1.5));
    p.error[k] = std::max(err, 50.0 * std::numeric_limits<double>::epsilon() * p.absval[k]);
  }
  return p;
}

}  // namespace detail

template <size_t N>
struct QuadResultN {
  std::array<double, N> value{};
  std::array<double, N> error{};
  long evaluations = 0;
};

/// Adaptive Gauss-Kronrod for N integrands sharing their evaluation points.
///
/// f(x) returns std::array<double, N>. Component k is converged when its
/// error estimate is below max(abs_tol, rel_tol * int |f_k|).
template <size_t N, class F>
QuadResultN<N> integrate_n(F&& f, double a, double b, double abs_tol, double rel_tol, int max_intervals = 2000) {
  QuadResultN<N> out;
  if (a == b) return out;
  std::priority_queue<detail::PanelN<N>> heap;
  detail::PanelN<N> first = detail::kronrod_n<N>(f, a, b);
  std::array<double, N> tol, err = first.error, absval = first.absval;
  auto update_tol = [&] {
    for (size_t k = 0; k < N; ++k) tol[k] = std::max(abs_tol, rel_tol * absval[k]);
  };
  auto priority = [&](detail::PanelN<N>& p) {
    double m = 0;
    for (size_t k = 0; k < N; ++k) m = std::max(m, p.error[k] / tol[k]);
    p.priority = m;
  };
  update_tol();
  priority(first);
  heap.push(first);
  out.evaluations = 15;
  int intervals = 1;
  auto converged = [&] {
    for (size_t k = 0; k < N; ++k)
      if (err[k] > tol[k]) return false;
    return true;
  };
  while (!converged() && intervals < max_intervals) {
    detail::PanelN<N> worst = heap.top();
    heap.pop();
    const double mid = 0.5 * (worst.a + worst.b);
    if (!(mid > std::min(worst.a, worst.b) && mid < std::max(worst.a, worst.b))) {
      heap.push(worst);
      break;
    }
    detail::PanelN<N> l = detail::kronrod_n<N>(f, worst.a, mid), r = detail::kronrod_n<N>(f, mid, worst.b);
    out.evaluations += 30;
    for (size_t k = 0; k < N; ++k) {
      err[k] += l.error[k] + r.error[k] - worst.error[k];
      absval[k] += l.absval[k] + r.absval[k] - worst.absval[k];
    }
    update_tol();
    priority(l);
    priority(r);
    heap.push(l);
    heap.push(r);
    ++intervals;
  }
  while (!heap.empty()) {
    for (size_t k = 0; k < N; ++k) {
      out.value[k] += heap.top().value[k];
      out.error[k] += heap.top().error[k];
    }
    heap.pop();
  }
  return out;
}

}  // namespace perm
