#include "permanental/model.hpp"

#include <algorithm>
#include <climits>
#include <cmath>

namespace perm {

PermanentalSpec make_spec(const Matrix& a, double alpha) {
  if (!(alpha > 0) || !std::isfinite(alpha)) throw PreconditionViolated("alpha must be a positive finite number");
  return PermanentalSpec{validate_m_matrix(a), alpha};
}

PermanentalSpec make_spec_from_kernel(const Matrix& k, double alpha) {
  if (!(alpha > 0) || !std::isfinite(alpha)) throw PreconditionViolated("alpha must be a positive finite number");
  return PermanentalSpec{validate_kernel(k), alpha};
}

namespace {

void check_s(const PermanentalSpec& spec, const Vector& s) {
  if (s.size() != spec.n())
    throw PreconditionViolated("s has " + std::to_string(s.size()) + " entries, expected " + std::to_string(spec.n()));
  for (Eigen::Index i = 0; i < s.size(); ++i)
    if (!(s(i) >= 0) || !std::isfinite(s(i))) throw PreconditionViolated("s must be finite and nonnegative");
}

}  // namespace

double direct_laplace(const PermanentalSpec& spec, const Vector& s) {
  check_s(spec, s);
  const Matrix& a = spec.pair.A;
  Matrix as = a;
  as.diagonal() += s;
  const double num = det_lu(a);
  const double den = det_lu(as);
  return std::exp(spec.alpha * (std::log(num) - std::log(den)));
}

double direct_laplace_kernel_form(const PermanentalSpec& spec, const Vector& s) {
  check_s(spec, s);
  const Eigen::Index n = spec.n();
  Matrix m = Matrix::Identity(n, n) + spec.pair.K * s.asDiagonal();
  return std::pow(det_lu(m), -spec.alpha);
}

// ---------------------------------------------------------------------------
// GradedIndexer

GradedIndexer::GradedIndexer(int n) : n_(n) {
  if (n < 1) throw PreconditionViolated("GradedIndexer: dimension must be positive");
}

long GradedIndexer::binom(int top, int bottom) const {
  if (bottom < 0 || top < bottom) return 0;
  bottom = std::min(bottom, top - bottom);
  unsigned __int128 r = 1;
  for (int i = 0; i < bottom; ++i) {
    r = r * unsigned(top - i) / unsigned(i + 1);
    if (r > (unsigned __int128)(LONG_MAX)) return LONG_MAX;
  }
  return long(r);
}

long GradedIndexer::count(int d) const { return d < 0 ? 0 : binom(d + n_ - 1, n_ - 1); }

long GradedIndexer::rank(const std::vector<int>& k) const {
  // Monomials before k: sum over suffix lengths L of C(t_L + L - 1, L), t_L the
  // sum of the last L components.
  long r = 0;
  int t = 0;
  for (int l = 1; l < n_; ++l) {
    t += k[n_ - l];
    r += binom(t + l - 1, l);
  }
  return r;
}

std::vector<int> GradedIndexer::first(int n, int d) {
  std::vector<int> k(n, 0);
  k[0] = d;
  return k;
}

bool GradedIndexer::next(std::vector<int>& k) {
  const int n = int(k.size());
  for (int i = n - 2; i >= 0; --i) {
    if (k[i] > 0) {
      int rest = 0;
      for (int j = i + 1; j < n; ++j) {
        rest += k[j];
        k[j] = 0;
      }
      --k[i];
      k[i + 1] = rest + 1;
      return true;
    }
  }
  return false;
}

// ---------------------------------------------------------------------------
// SeriesExpansion

SeriesExpansion::SeriesExpansion(const PermanentalSpec& spec, long coefficient_cap)
    : n_(spec.n()), alpha_(spec.alpha), cap_(coefficient_cap), indexer_(std::max(1, spec.n())) {
  const MMatrixPair& p = spec.pair;
  w_ = p.scaled_offdiag();
  radius_ = spectral_radius_nonneg(w_);
  if (radius_ >= kRadiusLimit)
    throw TruncationInfeasible("Perron root of D^{-1}B is " + std::to_string(radius_) + ", too close to 1");
  prefactor_ = std::exp(alpha_ * (std::log(det_lu(p.A)) - p.diag_a.array().log().sum()));
  coef_.push_back({1.0});
  h_prev_.assign(size_t(n_) * n_, 0.0);
  for (int a = 0; a < n_; ++a) h_prev_[size_t(a) * n_ + a] = 1.0;
  stored_ = 1;
}

void SeriesExpansion::extend_to(int m) {
  const size_t nn = size_t(n_) * n_;
  for (int d = order() + 1; d <= m; ++d) {
    const long cnt = indexer_.count(d);
    if (cnt == LONG_MAX || stored_ + cnt > cap_ || cnt > cap_ / long(std::max<size_t>(nn, 1)))
      throw DimensionTooLarge(cnt == LONG_MAX ? LONG_MAX : stored_ + cnt, cap_);
    std::vector<double> f(cnt);
    std::vector<double> h(size_t(cnt) * nn);
    std::vector<int> k = GradedIndexer::first(n_, d);
    for (long r = 0; r < cnt; ++r, GradedIndexer::next(k)) {
      int i = 0;
      while (k[i] == 0) ++i;
      --k[i];
      const double* hp = &h_prev_[size_t(indexer_.rank(k)) * nn];
      ++k[i];
      double acc = 0;
      for (int c = 0; c < n_; ++c) acc += w_(i, c) * hp[size_t(c) * n_ + i];
      const double fk = alpha_ * acc / k[i];
      f[r] = fk;

      double* hr = &h[size_t(r) * nn];
      for (int a = 0; a < n_; ++a) {
        double* row = hr + size_t(a) * n_;
        if (k[a] > 0) {
          --k[a];
          const double* hq = &h_prev_[size_t(indexer_.rank(k)) * nn];
          ++k[a];
          for (int b = 0; b < n_; ++b) {
            double s = 0;
            for (int c = 0; c < n_; ++c) s += w_(a, c) * hq[size_t(c) * n_ + b];
            row[b] = s;
          }
        } else {
          std::fill(row, row + n_, 0.0);
        }
        row[a] += fk;
      }
    }
    coef_.push_back(std::move(f));
    h_prev_ = std::move(h);
    stored_ += cnt;
  }
}

double SeriesExpansion::coefficient(const MultiIndex& k) const {
  if (k.size() != n_) throw PreconditionViolated("multi-index length does not match the dimension");
  if (k.order() > order()) throw PreconditionViolated("order " + std::to_string(k.order()) + " not computed");
  return coef_[k.order()][indexer_.rank(k)];
}

// ---------------------------------------------------------------------------
// Tail certificate

double negative_binomial_tail(double c, double rho, int d) {
  if (rho <= 0) return 0;
  if (rho >= 1) return std::numeric_limits<double>::infinity();
  int j = d + 1;
  double term = std::exp(std::lgamma(c + j) - std::lgamma(c) - std::lgamma(j + 1.0) + j * std::log(rho));
  double sum = 0;
  for (long it = 0; it < 100'000'000; ++it, ++j) {
    sum += term;
    const double ratio = (c + j) / (j + 1.0) * rho;
    // Successive ratios decrease to rho when c >= 1 and increase to rho otherwise.
    const double rb = c >= 1 ? ratio : rho;
    if (rb < 1) {
      const double rest = term * rb / (1 - rb);
      if (rest <= 1e-3 * sum || rest < 1e-300) return sum + rest;
    }
    term *= ratio;
  }
  return std::numeric_limits<double>::infinity();
}

TailCertificate tail_certificate(const Matrix& m, double alpha, double rho) {
  const Eigen::Index n = m.rows();
  const double c = alpha * double(n);
  constexpr int kMaxOrder = 5000;
  int order = 0;
  if (rho > 0) {
    order = 16;
    while (order < kMaxOrder && negative_binomial_tail(c, rho, order) > 1e-18) order += 16;
  }
  std::vector<double> tau(order + 1, 0.0);
  Matrix p = Matrix::Identity(n, n);
  for (int j = 1; j <= order; ++j) {
    p = m * p;
    tau[j] = p.trace();
  }
  TailCertificate cert;
  cert.phi.assign(order + 1, 0.0);
  cert.phi[0] = 1.0;
  for (int d = 1; d <= order; ++d) {
    double s = 0;
    for (int j = 1; j <= d; ++j) s += tau[j] * cert.phi[d - j];
    cert.phi[d] = alpha * s / d;
  }
  cert.majorant = negative_binomial_tail(c, rho, order);
  return cert;
}

double TailCertificate::tail_after(int m) const {
  double s = majorant;
  for (int d = int(phi.size()) - 1; d > m; --d) s += phi[d];
  return s;
}

double TailCertificate::total() const { return tail_after(-1); }

// ---------------------------------------------------------------------------
// Series at s

SeriesResult series_laplace(SeriesExpansion& ex, const Vector& diag_a, const Vector& s, double rel_tol) {
  const int n = ex.n();
  if (!(rel_tol > 1e-14 && rel_tol < 1e-2)) throw PreconditionViolated("rel_tol must lie in (1e-14, 1e-2)");
  if (s.size() != n || diag_a.size() != n) throw PreconditionViolated("s length does not match the dimension");
  for (int i = 0; i < n; ++i)
    if (!(s(i) >= 0) || !std::isfinite(s(i))) throw PreconditionViolated("s must be finite and nonnegative");

  const Vector r = diag_a.cwiseQuotient(diag_a + s);
  const Matrix rw = r.asDiagonal() * ex.w();
  const double rho = spectral_radius_nonneg(rw);
  const TailCertificate cert = tail_certificate(rw, ex.alpha(), rho);
  const double scale = ex.prefactor() * std::exp(ex.alpha() * r.array().log().sum());

  int m = 0;
  double predicted = cert.phi[0];
  while (cert.tail_after(m) >= rel_tol * predicted) {
    ++m;
    predicted += m < int(cert.phi.size()) ? cert.phi[m] : 0.0;
    if (m > 100000) throw TruncationInfeasible("series order exceeds 100000");
  }

  std::vector<std::vector<double>> pw(n);
  SeriesResult out;
  double partial = 0;
  for (int d = 0;; ++d) {
    ex.extend_to(d);
    for (int i = 0; i < n; ++i) {
      pw[i].resize(d + 1);
      pw[i][d] = d == 0 ? 1.0 : pw[i][d - 1] * r(i);
    }
    const std::vector<double>& f = ex.degree(d);
    std::vector<int> k = GradedIndexer::first(n, d);
    double layer = 0;
    for (size_t idx = 0; idx < f.size(); ++idx, GradedIndexer::next(k)) {
      double t = f[idx];
      for (int i = 0; i < n; ++i) t *= pw[i][k[i]];
      layer += t;
    }
    partial += layer;
    out.terms_used += long(f.size());
    const double tail = cert.tail_after(d);
    if (d >= m && tail < rel_tol * partial) {
      out.order = d;
      out.value = scale * partial;
      out.tail_bound = scale * tail;
      out.rel_err = out.tail_bound / out.value;
      return out;
    }
  }
}

SeriesResult series_laplace(const PermanentalSpec& spec, const Vector& s, double rel_tol) {
  SeriesExpansion ex(spec);
  return series_laplace(ex, spec.pair.diag_a, s, rel_tol);
}

// ---------------------------------------------------------------------------
// Z distribution

double ZDistribution::mass(const MultiIndex& k) const {
  if (k.order() > max_order) throw PreconditionViolated("order beyond the enumerated truncation");
  return expansion->prefactor() * expansion->coefficient(k);
}

ZDistribution z_masses_from(std::shared_ptr<const SeriesExpansion> ex) {
  ZDistribution z;
  z.max_order = ex->order();
  const int n = ex->n();
  const double pref = ex->prefactor();
  double covered = 0;
  for (int d = 0; d <= z.max_order; ++d) {
    const std::vector<double>& f = ex->degree(d);
    std::vector<int> k = GradedIndexer::first(n, d);
    double layer = 0;
    for (size_t idx = 0; idx < f.size(); ++idx, GradedIndexer::next(k)) {
      const double mk = pref * f[idx];
      z.support.emplace_back(k);
      z.masses.push_back(mk);
      layer += mk;
      z.cumulative.push_back(covered + layer);
    }
    covered += layer;
  }
  z.covered_mass = covered;
  const TailCertificate cert = tail_certificate(ex->w(), ex->alpha(), ex->radius());
  z.tail_bound = pref * cert.tail_after(z.max_order);
  z.expansion = std::move(ex);
  return z;
}

ZDistribution z_masses(const PermanentalSpec& spec, double target_mass) {
  if (!(target_mass > 0 && target_mass < 1 - 1e-12)) throw PreconditionViolated("target_mass must lie in (0, 1 - 1e-12)");
  auto ex = std::make_shared<SeriesExpansion>(spec);
  double covered = ex->prefactor();
  for (int d = 1; covered < target_mass; ++d) {
    ex->extend_to(d);
    double layer = 0;
    for (double f : ex->degree(d)) layer += f;
    covered += ex->prefactor() * layer;
    if (d > 100000) throw TruncationInfeasible("target mass not reached by order 100000");
  }
  return z_masses_from(std::move(ex));
}

ZDistribution z_masses_to_order(const PermanentalSpec& spec, int order) {
  if (order < 0) throw PreconditionViolated("order must be nonnegative");
  auto ex = std::make_shared<SeriesExpansion>(spec);
  ex->extend_to(order);
  return z_masses_from(std::move(ex));
}

}  // namespace perm
