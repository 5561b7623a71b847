#include "permanental/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>

namespace perm {

namespace {

using detail::kWg;
using detail::kWgk;
using detail::kXgk;

struct Panel {
  double a, b, value, error;
  bool operator<(const Panel& o) const { return error < o.error; }
};

Panel kronrod(const Integrand& f, double a, double b) {
  const double c = 0.5 * (a + b);
  const double h = 0.5 * (b - a);
  const double fc = f(c);
  double resk = fc * kWgk[7];
  double resg = fc * kWg[3];
  double resabs = std::abs(fc) * kWgk[7];
  for (int j = 0; j < 7; ++j) {
    const double dx = h * kXgk[j];
    const double f1 = f(c - dx);
    const double f2 = f(c + dx);
    resk += kWgk[j] * (f1 + f2);
    resabs += kWgk[j] * (std::abs(f1) + std::abs(f2));
    if (j % 2 == 1) resg += kWg[j / 2] * (f1 + f2);
  }
  const double value = resk * h;
  resabs *= std::abs(h);
  double err = std::abs((resk - resg) * h);
  // QUADPACK scaling: the raw Gauss/Kronrod gap overstates the error of
  // smooth integrands; keep a floor of a few ulps of the panel magnitude.
  if (err > 0 && resabs > 0) err = resabs * std::min(1.0, std::pow(200.0 * err / resabs, 1.5));
  err = std::max(err, 50.0 * std::numeric_limits<double>::epsilon() * resabs);
  return {a, b, value, err};
}

}  // namespace

QuadResult integrate(const Integrand& f, double a, double b, double abs_tol, double rel_tol, int max_intervals) {
  QuadResult out;
  if (a == b) return out;
  std::priority_queue<Panel> heap;
  Panel first = kronrod(f, a, b);
  out.evaluations = 15;
  double value = first.value, error = first.error;
  heap.push(first);
  int intervals = 1;
  while (error > std::max(abs_tol, rel_tol * std::abs(value)) && intervals < max_intervals) {
    Panel worst = heap.top();
    heap.pop();
    const double mid = 0.5 * (worst.a + worst.b);
    if (mid <= std::min(worst.a, worst.b) || mid >= std::max(worst.a, worst.b)) {
      heap.push(worst);
      break;
    }
    Panel left = kronrod(f, worst.a, mid);
    Panel right = kronrod(f, mid, worst.b);
    out.evaluations += 30;
    value += left.value + right.value - worst.value;
    error += left.error + right.error - worst.error;
    heap.push(left);
    heap.push(right);
    ++intervals;
  }
  // Re-sum from the panels to avoid drift from the running updates.
  value = 0;
  error = 0;
  while (!heap.empty()) {
    value += heap.top().value;
    error += heap.top().error;
    heap.pop();
  }
  out.value = value;
  out.error = error;
  return out;
}

QuadResult integrate_to_infinity(const Integrand& f, double a, double abs_tol, double rel_tol, int max_intervals) {
  auto g = [&](double t) {
    if (t >= 1.0) return 0.0;
    const double one_minus = 1.0 - t;
    const double x = a + t / one_minus;
    return f(x) / (one_minus * one_minus);
  };
  return integrate(g, 0.0, 1.0, abs_tol, rel_tol, max_intervals);
}

SeriesLimit wynn_epsilon(const std::vector<double>& s) {
  const size_t n = s.size();
  if (n == 0) return {0, 0};
  if (n < 3) return {s.back(), n == 2 ? std::abs(s[1] - s[0]) : std::abs(s[0])};
  // e[k][j]: column k of the epsilon table; even columns are estimates.
  std::vector<std::vector<double>> e(n + 1);
  e[0].assign(n + 1, 0.0);
  e[1] = s;
  for (size_t k = 2; k <= n; ++k) {
    e[k].resize(n - k + 1);
    for (size_t j = 0; j + k <= n; ++j) {
      const double diff = e[k - 1][j + 1] - e[k - 1][j];
      const double prev = k >= 2 ? e[k - 2][j + 1] : 0.0;
      e[k][j] = prev + (diff == 0 ? std::numeric_limits<double>::max() : 1.0 / diff);
    }
  }
  // Odd table columns (1-based even order) hold the accelerated estimates.
  double best = s.back(), best_err = std::abs(s[n - 1] - s[n - 2]);
  for (size_t k = 3; k <= n; k += 2) {
    const std::vector<double>& col = e[k];
    if (col.size() < 2) break;
    const double v = col.back(), w = col[col.size() - 2];
    if (!std::isfinite(v) || !std::isfinite(w)) continue;
    const double err = std::abs(v - w);
    if (err < best_err) {
      best = v;
      best_err = err;
    }
  }
  return {best, best_err};
}

}  // namespace perm
