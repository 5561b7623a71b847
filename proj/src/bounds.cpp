#include "permanental/bounds.hpp"

#include <algorithm>
#include <cmath>

#include "permanental/quadrature.hpp"

namespace perm {

namespace {

constexpr double kRelTol = 1e-12;

void require_square(const Matrix& k, const char* who) {
  if (k.rows() != k.cols()) throw PreconditionViolated(std::string(who) + ": matrix is not square");
}

double column_max_offdiag(const Matrix& k, Eigen::Index i) {
  double m = -std::numeric_limits<double>::infinity();
  for (Eigen::Index j = 0; j < k.rows(); ++j)
    if (j != i) m = std::max(m, k(j, i));
  return m;
}

void require_positive_row_sums(const MMatrixPair& pair) {
  for (int i = 0; i < pair.n(); ++i)
    if (!(pair.row_sums(i) > 0))
      throw HypothesisFailed(i, "row sum of A is " + std::to_string(pair.row_sums(i)) + ", not positive");
}

}  // namespace

SigmaMatrix sigma_matrix(const Matrix& k) {
  require_square(k, "sigma_matrix");
  const Eigen::Index n = k.rows();
  SigmaMatrix s;
  s.sigma2 = Matrix::Zero(n, n);
  s.sigma_star2 = std::numeric_limits<double>::infinity();
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j) {
      if (i == j) continue;
      const double v = k(i, i) + k(j, j) - k(i, j) - k(j, i);
      s.sigma2(i, j) = v;
      if (v < -1e-12) s.negative_square = true;
      if (v < s.sigma_star2) {
        s.sigma_star2 = v;
        s.argmin_i = int(i);
        s.argmin_j = int(j);
      }
    }
  if (n < 2) s.sigma_star2 = 0;
  return s;
}

RowBounds diag_bound_simple(const MMatrixPair& pair) {
  const Matrix& k = pair.K;
  const int n = pair.n();
  RowBounds out;
  out.diagonal = pair.diag_a;
  out.bound.resize(n);
  for (int i = 0; i < n; ++i) {
    const double gap = k(i, i) - column_max_offdiag(k, i);
    if (!(gap > 0)) throw HypothesisFailed(i, "K_ii - max_{j != i} K_ji = " + std::to_string(gap) + ", not positive");
  }
  require_positive_row_sums(pair);
  for (int i = 0; i < n; ++i) {
    out.bound(i) = 1.0 / (k(i, i) - column_max_offdiag(k, i));
    if (out.diagonal(i) > out.bound(i) * (1 + kRelTol)) out.holds = false;
  }
  return out;
}

double asymmetry_constant(const Matrix& k, AsymmetryVariant variant) {
  require_square(k, "asymmetry_constant");
  const Eigen::Index n = k.rows();
  double c = 0;
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = i + 1; j < n; ++j) {
      double asym, s2, scale;
      if (variant == AsymmetryVariant::Plain) {
        asym = std::abs(k(i, j) - k(j, i));
        s2 = k(i, i) + k(j, j) - k(i, j) - k(j, i);
        scale = std::abs(k(i, i)) + std::abs(k(j, j));
      } else {
        const double x = k(i, j) / k(j, j), y = k(j, i) / k(i, i);
        asym = std::abs(x - y);
        s2 = 2.0 - x - y;
        scale = 2.0;
      }
      if (s2 <= kRelTol * scale) {
        if (asym > kRelTol * scale) throw DegenerateSigma(int(i), int(j));
        continue;
      }
      c = std::max(c, asym / s2);
    }
  return c;
}

SigmaBound diag_bound_sigma(const MMatrixPair& pair, double c) {
  const Matrix& k = pair.K;
  const int n = pair.n();
  const double d0 = k(0, 0);
  for (int i = 1; i < n; ++i)
    if (std::abs(k(i, i) - d0) > 1e-12 * std::abs(d0))
      throw NotConstantDiagonal("K is not constant along the diagonal (K_00 = " + std::to_string(d0) + ", K_" +
                                std::to_string(i) + std::to_string(i) + " = " + std::to_string(k(i, i)) + ")");
  SigmaBound out;
  out.minimal_c = asymmetry_constant(k, AsymmetryVariant::Plain);
  if (out.minimal_c >= 1.0 || (c >= 0 && (c >= 1.0 || c < out.minimal_c - 1e-12))) throw AsymmetryTooLarge(out.minimal_c);
  out.c = c >= 0 ? c : out.minimal_c;
  require_positive_row_sums(pair);
  out.sigma_star2 = sigma_matrix(k).sigma_star2;
  if (!(out.sigma_star2 > 0)) throw HypothesisFailed(-1, "sigma*^2 is not positive");
  out.bound = 2.0 / ((1.0 - out.c) * out.sigma_star2);
  out.diagonal = pair.diag_a;
  out.holds = out.diagonal.maxCoeff() <= out.bound * (1 + kRelTol);
  return out;
}

ScaledBound diag_bound_scaled(const MMatrixPair& pair, double k_hat) {
  if (!(k_hat > 0)) throw PreconditionViolated("K_hat must be positive");
  const Matrix& k = pair.K;
  const int n = pair.n();
  for (int i = 0; i < n; ++i) {
    const double gap = k(i, i) - column_max_offdiag(k, i);
    if (!(gap > 0)) throw HypothesisFailed(i, "K_ii - max_{j != i} K_ji = " + std::to_string(gap) + ", not positive");
  }
  require_positive_row_sums(pair);
  ScaledBound out;
  out.k_hat = k_hat;
  out.r = k.diagonal() / k_hat;
  // The scaled kernel K R^{-1} has constant diagonal K_hat.
  const Matrix ky = k * out.r.cwiseInverse().asDiagonal();
  out.c = asymmetry_constant(ky, AsymmetryVariant::Plain);
  if (out.c >= 1.0) throw AsymmetryTooLarge(out.c);
  out.sigma_hat_star2 = sigma_matrix(ky).sigma_star2;
  out.bound = 2.0 / ((1.0 - out.c) * out.sigma_hat_star2);
  out.rows.diagonal = out.r.cwiseProduct(pair.diag_a);
  out.rows.bound = Vector::Constant(n, out.bound);
  out.rows.holds = out.rows.diagonal.maxCoeff() <= out.bound * (1 + kRelTol);
  return out;
}

PointConfig make_config(const std::vector<double>& points, const std::function<double(double, double)>& kernel) {
  if (points.size() < 2) throw PreconditionViolated("a point configuration needs at least 2 points");
  PointConfig c;
  c.points = points;
  const Eigen::Index n = Eigen::Index(points.size());
  c.kernel_values.resize(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j) c.kernel_values(i, j) = kernel(points[i], points[j]);
  if (!c.kernel_values.allFinite()) throw PreconditionViolated("kernel produced a non-finite value");
  return c;
}

double psi_star(const PointConfig& config, int p) {
  if (p < 1) throw PreconditionViolated("p must be at least 1");
  const MMatrixPair pair = validate_kernel(config.kernel_values);
  const int n = pair.n();
  const int m = n / p;
  if (m < 1) throw PreconditionViolated("[n/p] must be at least 1");
  std::vector<double> d(pair.diag_a.data(), pair.diag_a.data() + n);
  std::nth_element(d.begin(), d.begin() + (m - 1), d.end());
  return d[size_t(m - 1)];
}

std::vector<UnboundednessRow> unboundedness_statistic(const std::function<double(double, double)>& kernel,
                                                      const std::vector<double>& deltas,
                                                      const std::vector<long>& n_grid, int p) {
  std::vector<UnboundednessRow> rows;
  for (double delta : deltas)
    for (long n : n_grid) {
      UnboundednessRow row;
      row.delta = delta;
      row.n = n;
      try {
        if (!(delta > 0)) throw PreconditionViolated("delta must be positive");
        std::vector<double> pts(size_t(std::max<long>(n, 0)));
        for (long j = 1; j <= n; ++j) pts[size_t(j - 1)] = double(j) * delta / double(n);
        const PointConfig cfg = make_config(pts, kernel);
        const double logn = std::log(double(n));
        row.psi_star = psi_star(cfg, p);
        row.log_n_over_psi = logn / row.psi_star;
        row.sigma_star2 = sigma_matrix(cfg.kernel_values).sigma_star2;
        row.sigma_star2_log_n = row.sigma_star2 * logn;
      } catch (const Error& e) {
        row.error = e.what();
      }
      rows.push_back(row);
    }
  return rows;
}

double expected_max_normal(long n, bool absolute, double* error) {
  if (n < 1) throw PreconditionViolated("expected_max_normal needs n >= 1");
  const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
  const double inv_sqrt2pi = 1.0 / std::sqrt(2.0 * M_PI);
  auto phi = [&](double x) { return inv_sqrt2pi * std::exp(-0.5 * x * x); };
  QuadResult q;
  if (absolute) {
    // density of max |zeta_i|: n 2 phi(x) (2 Phi(x) - 1)^{n-1} = n 2 phi(x) erf(x/sqrt2)^{n-1}
    auto f = [&](double x) { return x * n * 2.0 * phi(x) * std::pow(std::erf(x * inv_sqrt2), double(n - 1)); };
    q = integrate(f, 0.0, 40.0, 1e-14, 1e-13);
  } else {
    auto f = [&](double x) {
      const double cdf = 0.5 * std::erfc(-x * inv_sqrt2);
      return x * n * phi(x) * std::pow(cdf, double(n - 1));
    };
    q = integrate(f, -40.0, 40.0, 1e-14, 1e-13);
  }
  if (error) *error = q.error;
  return q.value;
}

SudakovReport sudakov_compare(const MMatrixPair& pair) {
  const Matrix& k = pair.K;
  if ((k - k.transpose()).cwiseAbs().maxCoeff() > 1e-12 * k.cwiseAbs().maxCoeff())
    throw NotSymmetric("sudakov_compare needs a symmetric kernel");
  if (Eigen::LLT<Matrix>(k).info() != Eigen::Success)
    throw PreconditionViolated("sudakov_compare needs a positive definite kernel");
  SudakovReport r;
  const long n = pair.n();
  r.max_a = pair.diag_a.maxCoeff();
  r.sigma_star2 = sigma_matrix(k).sigma_star2;
  r.two_over_sigma2 = 2.0 / r.sigma_star2;
  double e1 = 0, e2 = 0;
  r.expected_max_abs = expected_max_normal(n, true, &e1);
  r.expected_max = expected_max_normal(n, false, &e2);
  r.quadrature_error = e1 + e2;
  r.permanental_lower = r.expected_max_abs / std::sqrt(r.max_a);
  r.sudakov_lower = std::sqrt(r.sigma_star2 / 2.0) * r.expected_max;
  const double gap = r.two_over_sigma2 - r.max_a;
  if (std::abs(gap) <= 1e-10 * r.max_a)
    r.stronger = "tie";
  else
    r.stronger = gap > 0 ? "permanental" : "sudakov";
  return r;
}

}  // namespace perm
