#include "permanental/levy.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <sstream>

#include "permanental/parallel.hpp"
#include "permanental/quadrature.hpp"

namespace perm {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kInf = std::numeric_limits<double>::infinity();

// Spectral integrals.
constexpr double kPsiRelTol = 1e-12;
constexpr double kPsiFailRel = 1e-7;
constexpr double kSmallSpan = 60.0;     // decades of e below the first piece
constexpr double kPanelLimit = 64 * kPi;  // start of the integration-by-parts tail
constexpr double kDirectTau = 64.0;

// Transforms.
constexpr double kTransformRelTol = 1e-9;
constexpr int kBodyPeriods = 16;
constexpr int kLobes = 40;
constexpr double kTailT = 1e300;
constexpr double kFailRel = 1e-5;

double one_minus_cos(double s) {
  const double h = std::sin(0.5 * s);
  return 2.0 * h * h;
}

double s_minus_sin(double s) {
  if (std::abs(s) < 1e-2) {
    const double s2 = s * s;
    return s * s2 / 6.0 * (1.0 - s2 / 20.0 * (1.0 - s2 / 42.0));
  }
  return s - std::sin(s);
}

// Value, first and second derivative of G at tau without the cut.
struct GDerivs {
  double g0, g1, g2;
};

}  // namespace

GProfile GProfile::log_power(double gamma, double delta, double cut) {
  if (!std::isfinite(gamma) || !std::isfinite(delta) || !std::isfinite(cut))
    throw PreconditionViolated("log_power: parameters must be finite");
  if (!(cut >= 1.0)) throw PreconditionViolated("log_power: cut must be at least 1");
  if (delta != 0 && !(cut > std::numbers::e))
    throw PreconditionViolated("log_power: cut must exceed e when delta is nonzero");
  GProfile g;
  g.kind_ = Kind::LogPower;
  g.gamma_ = gamma;
  g.delta_ = delta;
  g.cut_ = cut;
  g.log_cut_ = std::log(cut);
  return g;
}

GProfile GProfile::constant(double value) {
  if (!(value > 0) || !std::isfinite(value)) throw PreconditionViolated("constant profile must be positive");
  GProfile g;
  g.kind_ = Kind::Constant;
  g.value_ = value;
  g.log_cut_ = -kInf;
  return g;
}

GProfile GProfile::tabulated(std::vector<double> y, std::vector<double> gv) {
  if (y.empty() || y.size() != gv.size()) throw PreconditionViolated("tabulated profile: need matching nonempty y and g");
  GProfile g;
  g.kind_ = Kind::Tabulated;
  for (size_t i = 0; i < y.size(); ++i) {
    if (!(y[i] > 0) || !std::isfinite(y[i])) throw PreconditionViolated("tabulated profile: y must be positive");
    if (i > 0 && !(y[i] > y[i - 1])) throw PreconditionViolated("tabulated profile: y must be increasing");
    if (!(gv[i] > 0) || !std::isfinite(gv[i])) throw PreconditionViolated("tabulated profile: g must be positive");
    g.logy_.push_back(std::log(y[i]));
  }
  g.g_ = std::move(gv);
  g.cut_ = y.front();
  g.log_cut_ = g.logy_.front();
  return g;
}

double GProfile::at_log(double tau) const {
  switch (kind_) {
    case Kind::Constant: return value_;
    case Kind::LogPower: {
      if (!(tau > log_cut_)) return 0.0;
      double v = std::pow(tau, gamma_);
      if (delta_ != 0) v *= std::pow(std::log(tau), delta_);
      return v;
    }
    case Kind::Tabulated: {
      if (tau < log_cut_) return 0.0;
      if (tau >= logy_.back()) return g_.back();
      const size_t k = size_t(std::upper_bound(logy_.begin(), logy_.end(), tau) - logy_.begin());
      const double w = (tau - logy_[k - 1]) / (logy_[k] - logy_[k - 1]);
      return g_[k - 1] + w * (g_[k] - g_[k - 1]);
    }
  }
  return 0.0;
}

double GProfile::operator()(double y) const { return y > 0 ? at_log(std::log(y)) : 0.0; }

double GProfile::mass_near_zero() const {
  switch (kind_) {
    case Kind::Constant: return value_;
    case Kind::LogPower: return 0.0;
    case Kind::Tabulated: {
      if (cut_ >= 1.0) return 0.0;
      QuadResult r = integrate([&](double y) { return (*this)(y); }, cut_, 1.0, 0.0, 1e-10);
      return r.value;
    }
  }
  return 0.0;
}

std::string GProfile::describe() const {
  std::ostringstream os;
  switch (kind_) {
    case Kind::Constant: os << "constant " << value_; break;
    case Kind::LogPower: os << "log-power gamma=" << gamma_ << " delta=" << delta_ << " cut=" << cut_; break;
    case Kind::Tabulated: os << "tabulated (" << g_.size() << " nodes)"; break;
  }
  return os.str();
}

namespace {

GDerivs derivs(const GProfile& g, double tau) {
  switch (g.kind()) {
    case GProfile::Kind::Constant: return {g.at_log(tau), 0, 0};
    case GProfile::Kind::LogPower: {
      const double ga = g.gamma(), de = g.delta();
      double v = std::pow(tau, ga);
      double a = ga / tau, da = -ga / (tau * tau);
      if (de != 0) {
        const double lt = std::log(tau);
        v *= std::pow(lt, de);
        a += de / (tau * lt);
        da -= de * (lt + 1.0) / ((tau * lt) * (tau * lt));
      }
      return {v, v * a, v * (a * a + da)};
    }
    case GProfile::Kind::Tabulated: {
      const double h = 1e-6;
      const double v = g.at_log(tau);
      return {v, (g.at_log(tau + h) - g.at_log(std::max(tau - h, g.log_cut()))) / (2 * h), 0};
    }
  }
  return {0, 0, 0};
}

// Value of G at the cut approached from above.
double g_at_cut(const GProfile& g) {
  const double tc = g.log_cut();
  if (g.kind() == GProfile::Kind::LogPower) return derivs(g, tc).g0;
  return g.at_log(tc);
}

// int_a^b G(tau) d tau, switching to tau = e^w for long ranges.
QuadResult integrate_G(const GProfile& g, double a, double b, double rel_tol) {
  QuadResult out;
  if (!(b > a)) return out;
  auto G = [&](double tau) { return g.at_log(tau); };
  const double mid = std::min(b, a + kDirectTau);
  for (double lo = a; lo < mid;) {
    const double hi = std::min(mid, lo + 8.0);
    QuadResult r = integrate(G, lo, hi, 0.0, rel_tol);
    out.value += r.value;
    out.error += r.error;
    out.evaluations += r.evaluations;
    lo = hi;
  }
  if (b > mid) {
    auto f = [&](double w) {
      const double tau = std::exp(w);
      return g.at_log(tau) * tau;
    };
    const double wa = std::log(mid), wb = std::log(b);
    for (double lo = wa; lo < wb;) {
      const double hi = std::min(wb, lo + 16.0);
      QuadResult r = integrate(f, lo, hi, 0.0, rel_tol);
      out.value += r.value;
      out.error += r.error;
      out.evaluations += r.evaluations;
      lo = hi;
    }
  }
  return out;
}

// int_a^infinity dtau / G(tau) through tau = e^w.
QuadResult integrate_inverse_G(const GProfile& g, double a, double rel_tol) {
  auto f = [&](double w) {
    if (!std::isfinite(w)) return 0.0;
    const double tau = std::exp(w);
    const double v = g.at_log(tau);
    if (!std::isfinite(tau)) {
      // Continue the log-power form past the overflow of tau.
      const double lg = g.gamma() * w + (g.delta() != 0 ? g.delta() * std::log(w) : 0.0);
      return std::exp(w - lg);
    }
    return v > 0 ? tau / v : 0.0;
  };
  return integrate_to_infinity(f, std::log(a), 0.0, rel_tol, 4000);
}

// Integration-by-parts expansion of int_a^b trig(s) phi(s) ds with
// phi(s) = G(t - log s) / s^2. Returns the boundary terms and an error bound.
struct TailTerms {
  double cos_part = 0, sin_part = 0, error = 0;
};

TailTerms trig_tail(const GProfile& g, double t, double a, double log_b) {
  auto phis = [&](double s, double tau, double out[3]) {
    const GDerivs d = derivs(g, tau);
    const double s2 = s * s;
    out[0] = d.g0 / s2;
    out[1] = -(d.g1 + 2 * d.g0) / (s2 * s);
    out[2] = (d.g2 + 5 * d.g1 + 6 * d.g0) / (s2 * s2);
  };
  TailTerms tt;
  double pa[3];
  phis(a, t - std::log(a), pa);
  const double sa = std::sin(a), ca = std::cos(a);
  // int cos(s) phi = [sin phi + cos phi' - sin phi''], int sin(s) phi = [-cos phi + sin phi' + cos phi''].
  tt.cos_part = -(sa * pa[0] + ca * pa[1] - sa * pa[2]);
  tt.sin_part = -(-ca * pa[0] + sa * pa[1] + ca * pa[2]);
  tt.error = 4.0 * std::abs(pa[2]) / a;
  if (log_b < 700.0) {
    const double b = std::exp(log_b);
    double pb[3];
    const GDerivs d = derivs(g, g.log_cut());
    const double b2 = b * b;
    pb[0] = g_at_cut(g) / b2;
    pb[1] = -(d.g1 + 2 * d.g0) / (b2 * b);
    pb[2] = (d.g2 + 5 * d.g1 + 6 * d.g0) / (b2 * b2);
    const double sb = std::sin(b), cb = std::cos(b);
    tt.cos_part += sb * pb[0] + cb * pb[1] - sb * pb[2];
    tt.sin_part += -cb * pb[0] + sb * pb[1] + cb * pb[2];
    tt.error += 4.0 * std::abs(pb[2]) / b;
  }
  if (g.kind() == GProfile::Kind::Tabulated) tt.error += 2.0 * std::abs(pa[0]) / a;
  return tt;
}

}  // namespace

LevyModel make_levy_model(double beta, double p, const GProfile& g) {
  if (!(beta > 0) || !std::isfinite(beta)) throw PreconditionViolated("levy model: beta must be positive");
  if (!(p >= 0 && p <= 1)) throw PreconditionViolated("levy model: p must lie in [0, 1]");
  if (g.kind() == GProfile::Kind::LogPower && !(g.cut() >= std::numbers::e))
    throw PreconditionViolated("levy model: the log-power cut must be at least e");
  const double mass = g.mass_near_zero();
  if (!std::isfinite(mass)) throw PreconditionViolated("levy model: int_0^1 g(v) dv is not finite");
  LevyModel m;
  m.beta = beta;
  m.p = p;
  m.q = 1.0 - p;
  m.g = g;
  return m;
}

ScaledPsi psi_over_lambda(const LevyModel& m, double t) {
  const GProfile& g = m.g;
  const double tc = g.log_cut();
  const double log_smax = t - tc;  // +inf for an uncut profile
  const double pq = m.p - m.q;
  const bool want_im = pq != 0;
  const double log_panel = std::log(kPanelLimit);
  ScaledPsi out;
  if (!(log_smax > -700.0)) return out;
  double re = 0, im = 0, err = 0;
  auto acc = [&](const QuadResult& r, double& target) {
    target += r.value;
    err += r.error;
  };

  // s in (0, min(1, S)]: s = e^{-v}.
  {
    const double v0 = std::max(0.0, -log_smax);
    const double v1 = v0 + kSmallSpan;
    const double vb = -t;  // s = lambda
    auto fr = [&](double v) {
      const double s = std::exp(-v);
      return one_minus_cos(s) / s * g.at_log(t + v);
    };
    auto fi_below = [&](double v) {
      const double s = std::exp(-v);
      return s_minus_sin(s) / s * g.at_log(t + v);
    };
    auto fi_above = [&](double v) {
      const double s = std::exp(-v);
      return -std::sin(s) / s * g.at_log(t + v);
    };
    const double edges[3] = {v0, v0 + 4.0, v1};
    for (int k = 0; k < 2; ++k) {
      const double a = edges[k], b = edges[k + 1];
      acc(integrate(fr, a, b, 0.0, kPsiRelTol), re);
      if (!want_im) continue;
      const double split = std::clamp(vb, a, b);
      if (split > a) acc(integrate(fi_above, a, split, 0.0, kPsiRelTol), im);
      if (b > split) acc(integrate(fi_below, split, b, 0.0, kPsiRelTol), im);
    }
    // Below the span (1 - cos s)/s^2 <= 1/2 and |s 1_{s<lambda} - sin s|/s^2 <= 1.
    const double sc = std::exp(-v1);
    err += 2.0 * sc * g.at_log(t + v1 + 1.0);
  }

  // s in [1, min(64 pi, S)] on half-periods, split at s = lambda.
  if (log_smax > 0) {
    const double b = std::exp(std::min(log_smax, log_panel));
    std::vector<double> cuts{1.0};
    for (int k = 1; k * kPi < b; ++k) cuts.push_back(k * kPi);
    const double lam = t < 700 ? std::exp(t) : kInf;
    if (lam > 1.0 && lam < b) cuts.push_back(lam);
    cuts.push_back(b);
    std::sort(cuts.begin(), cuts.end());
    cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
    for (size_t k = 0; k + 1 < cuts.size(); ++k) {
      const double a = cuts[k], c = cuts[k + 1];
      if (!(c > a)) continue;
      const bool below = 0.5 * (a + c) < lam;
      auto f = [&](double s) -> std::array<double, 2> {
        const double h = g.at_log(t - std::log(s));
        const double s2 = s * s;
        const double fi = want_im ? ((below ? s : 0.0) - std::sin(s)) / s2 * h : 0.0;
        return {one_minus_cos(s) / s2 * h, fi};
      };
      QuadResultN<2> r = integrate_n<2>(f, a, c, 0.0, kPsiRelTol);
      re += r.value[0];
      im += r.value[1];
      err += r.error[0] + r.error[1];
    }
  }

  // s > 64 pi: smooth parts in tau = t - log s, oscillating parts by parts.
  if (log_smax > log_panel) {
    const double tau_hi = t - log_panel;
    const double span = std::min(tau_hi - tc, 80.0);
    auto fr = [&](double u) { return g.at_log(tau_hi - u) * std::exp(-u); };
    for (double lo = 0; lo < span;) {
      const double hi = std::min(span, lo + (lo < 4 ? 4.0 : 38.0));
      QuadResult r = integrate(fr, lo, hi, 0.0, kPsiRelTol);
      re += r.value / kPanelLimit;
      err += r.error / kPanelLimit;
      lo = hi;
    }
    if (want_im && t > log_panel) acc(integrate_G(g, std::max(0.0, tc), tau_hi, kPsiRelTol), im);
    TailTerms tt = trig_tail(g, t, kPanelLimit, log_smax);
    re -= tt.cos_part;
    im -= want_im ? tt.sin_part : 0.0;
    err += tt.error;
  }

  out.re = re;
  out.im = pq * im;
  out.error = err;
  const double scale = std::abs(out.re) + std::abs(out.im);
  if (std::isfinite(scale) && scale > 0 && !(err <= kPsiFailRel * scale))
    throw QuadratureFailure("psi quadrature at log lambda = " + std::to_string(t), err);
  return out;
}

std::complex<double> psi(const LevyModel& m, double lambda) {
  if (lambda == 0) return {0, 0};
  const ScaledPsi s = psi_over_lambda(m, std::log(std::abs(lambda)));
  const double a = std::abs(lambda);
  std::complex<double> v(a * s.re, a * s.im);
  return lambda > 0 ? v : std::conj(v);
}

namespace {

struct RI {
  double r, i;
};

// 1/(x + i y) with scaling against overflow.
RI reciprocal(double x, double y) {
  if (!std::isfinite(x) || !std::isfinite(y)) return {0.0, 0.0};
  const double m = std::max(std::abs(x), std::abs(y));
  if (m == 0) return {kInf, 0.0};
  const double a = x / m, b = y / m;
  const double d = (a * a + b * b) * m;
  return {a / d, -b / d};
}

RI spectral_at(const LevyModel& m, double lam) {
  const ScaledPsi s = psi_over_lambda(m, std::log(lam));
  return reciprocal(m.beta + lam * s.re, lam * s.im);
}

// lambda R_beta(lambda) at lambda = e^t.
double lambda_R(const LevyModel& m, double t) {
  const ScaledPsi s = psi_over_lambda(m, t);
  const double b = t > -700 ? m.beta * std::exp(-t) : kInf;
  return reciprocal(b + s.re, s.im).r;
}

void add(QuadResult& into, const QuadResult& r) {
  into.value += r.value;
  into.error += r.error;
  into.evaluations += r.evaluations;
}

// int_{e^{t0}}^infinity R_beta = int_{t0}^infinity lambda R dt.
QuadResult tail_in_t(const LevyModel& m, double t0) {
  QuadResult out;
  auto f = [&](double t) { return lambda_R(m, t); };
  const double t1 = std::max(t0 + 40.0, 1.0);
  // Later chunks only need accuracy relative to the running total.
  auto floor_tol = [&] { return 1e-3 * kTransformRelTol * std::abs(out.value); };
  for (double lo = t0; lo < t1;) {
    const double hi = std::min(t1, lo + 8.0);
    add(out, integrate(f, lo, hi, floor_tol(), kTransformRelTol));
    lo = hi;
  }
  auto fw = [&](double w) {
    const double t = std::exp(w);
    return lambda_R(m, t) * t;
  };
  const double w1 = std::log(t1), w_max = std::log(kTailT);
  for (double lo = w1; lo < w_max;) {
    const double hi = std::min(w_max, lo + (lo < 8 ? 2.0 : 64.0));
    add(out, integrate(fw, lo, hi, floor_tol(), kTransformRelTol));
    lo = hi;
  }
  // Beyond t = 1e300 the leading asymptotic form is used.
  double rem = 0;
  if (m.p != m.q) {
    const ScaledPsi s = psi_over_lambda(m, kTailT);
    if (std::isfinite(s.im) && s.im != 0) {
      rem = (kPi / 2) / (std::abs(m.p - m.q) * std::abs(s.im));
      const double ratio = std::isfinite(s.re) ? s.re / s.im : 0.0;
      out.error += rem * std::max(1e-6, ratio * ratio);
    }
  } else {
    // lambda R ~ 2 / (pi G(t)) with log G = gamma w + delta log w at t = e^w.
    const double ga = m.g.asym_gamma(), de = m.g.asym_delta();
    auto fr = [&](double w) {
      if (!std::isfinite(w)) return 0.0;
      return (2.0 / kPi) * std::exp(w - ga * w - (de != 0 ? de * std::log(w) : 0.0));
    };
    QuadResult r = integrate_to_infinity(fr, w_max, 0.0, 1e-8, 4000);
    rem = r.value;
    out.error += r.error + 1e-6 * rem;
  }
  out.value += rem;
  return out;
}

QuadResult l1_tail(const LevyModel& m, double lambda) {
  QuadResult out;
  if (lambda < 1.0) {
    const double a = std::max(lambda, 0.0);
    add(out, integrate([&](double x) { return x > 0 ? spectral_at(m, x).r : 1.0 / m.beta; }, a, 1.0, 0.0,
                       kTransformRelTol));
    add(out, tail_in_t(m, 0.0));
  } else {
    add(out, tail_in_t(m, std::log(lambda)));
  }
  return out;
}

void check_result(const char* what, double value, double error) {
  if (!std::isfinite(value) || !(error <= kFailRel * std::max(std::abs(value), 1e-300)))
    throw QuadratureFailure(what, error);
}

}  // namespace

double R_beta(const LevyModel& m, double lambda) {
  if (lambda == 0) return 1.0 / m.beta;
  return spectral_at(m, std::abs(lambda)).r;
}

double I_beta(const LevyModel& m, double lambda) {
  if (lambda == 0) return 0.0;
  const double v = spectral_at(m, std::abs(lambda)).i;
  return lambda > 0 ? v : -v;
}

Integrability certify_integrability(const LevyModel& m) {
  const bool logpow = m.g.kind() == GProfile::Kind::LogPower;
  const double ga = m.g.asym_gamma(), de = m.g.asym_delta();
  if (m.p == m.q) {
    if (!logpow) return {false, "p = q needs int^infinity ds/(s g(s)) < infinity; g tends to a constant"};
    if (ga > 1 || (ga == 1 && de > 1)) return {true, "p = q: R ~ 2/(pi lambda g(lambda)) is integrable"};
    return {false, "p = q: int^infinity ds/(s g(s)) diverges for gamma <= 1 (or gamma = 1, delta <= 1)"};
  }
  if (!logpow || ga > -1 || (ga == -1 && de >= -1))
    return {true, "p != q: int_1^n g(s)/s ds diverges and R ~ -(pi/2)/|p-q| d/dlambda ell(lambda)"};
  return {false, "p != q: int_1^n g(s)/s ds stays bounded (gamma < -1 or gamma = -1, delta < -1)"};
}

SpectralFns::SpectralFns(LevyModel m) : m_(std::move(m)) {
  const Integrability c = certify_integrability(m_);
  if (!c.integrable) throw NotIntegrable(c.reason);
}

double SpectralFns::log_integral(double lambda) const {
  if (!(lambda > 1)) return 0.0;
  return integrate_G(m_.g, std::max(0.0, m_.g.log_cut()), std::log(lambda), 1e-12).value;
}

double SpectralFns::R_asymptotic(double lambda) const {
  const double g = m_.g(lambda);
  if (m_.p == m_.q) return 2.0 / (kPi * lambda * g);
  const double pq = std::abs(m_.p - m_.q), li = log_integral(lambda);
  return (kPi / 2) * g / (pq * pq * lambda * li * li);
}

double SpectralFns::I_asymptotic(double lambda) const {
  if (m_.p == m_.q) return 0.0;
  return -1.0 / ((m_.p - m_.q) * lambda * log_integral(lambda));
}

double SpectralFns::L1_tail(double lambda, double* error) const {
  QuadResult r = l1_tail(m_, lambda);
  if (error) *error = r.error;
  return r.value;
}

Transform u_beta(const SpectralFns& sf, double z) {
  const LevyModel& m = sf.model();
  Transform out;
  out.z = z;
  if (!std::isfinite(z)) throw PreconditionViolated("u_beta: z must be finite");
  if (z == 0) {
    QuadResult r = l1_tail(m, 0.0);
    check_result("u_beta at 0", r.value, r.error);
    out.u0 = out.u_plus = out.u_minus = out.r_part = r.value / kPi;
    out.error = r.error / kPi;
    return out;
  }
  const double az = std::abs(z);
  const double period = kPi / az;
  const double body_end = kBodyPeriods * period;

  std::vector<double> cuts{0.0};
  if (period > 1.0) {
    for (double x = 1.0; x < period; x *= 2.0) cuts.push_back(x);
  }
  for (int k = 1; k <= kBodyPeriods; ++k) cuts.push_back(k * period);

  auto f = [&](double lam) -> std::array<double, 4> {
    const RI ri = spectral_at(m, lam);
    const double c = std::cos(lam * az), s = std::sin(lam * az);
    return {c * ri.r, s * ri.i, one_minus_cos(lam * az) * ri.r, ri.r};
  };
  std::array<double, 4> body{}, body_err{};
  for (size_t k = 0; k + 1 < cuts.size(); ++k) {
    const double a = cuts[k], b = cuts[k + 1];
    QuadResultN<4> r = integrate_n<4>(f, a, b, 1e-16 * (b - a) / m.beta, kTransformRelTol);
    for (int j = 0; j < 4; ++j) {
      body[j] += r.value[j];
      body_err[j] += r.error[j];
    }
  }

  // Lobes between consecutive zeros of sin(lambda z); the cos lobes
  // alternate as well because R is eventually monotone.
  std::vector<double> sc{0.0}, ss{0.0};
  double lobe_err_c = 0, lobe_err_s = 0;
  auto g2 = [&](double lam) -> std::array<double, 2> {
    const RI ri = spectral_at(m, lam);
    return {std::cos(lam * az) * ri.r, std::sin(lam * az) * ri.i};
  };
  for (int k = 0; k < kLobes; ++k) {
    const double a = body_end + k * period, b = a + period;
    QuadResultN<2> r = integrate_n<2>(g2, a, b, 1e-300, kTransformRelTol);
    sc.push_back(sc.back() + r.value[0]);
    ss.push_back(ss.back() + r.value[1]);
    lobe_err_c += r.error[0];
    lobe_err_s += r.error[1];
  }
  const SeriesLimit osc_c = wynn_epsilon(sc);
  const SeriesLimit osc_s = wynn_epsilon(ss);

  const QuadResult tail = l1_tail(m, body_end);

  out.r_part = (body[0] + osc_c.value) / kPi;
  out.h_part = (body[1] + osc_s.value) / kPi;
  out.sigma2 = (2.0 / kPi) * (body[2] + tail.value - osc_c.value);
  out.u0 = (body[3] + tail.value) / kPi;
  const double err_c = body_err[0] + lobe_err_c + osc_c.error;
  const double err_s = body_err[1] + lobe_err_s + osc_s.error;
  const double err_1c = body_err[2] + tail.error + osc_c.error + lobe_err_c;
  out.error = (err_c + err_s + 2.0 * err_1c + body_err[3] + tail.error) / kPi;
  out.u_plus = out.r_part + out.h_part;
  out.u_minus = out.r_part - out.h_part;
  if (z < 0) {
    std::swap(out.u_plus, out.u_minus);
    out.h_part = -out.h_part;
  }
  check_result("u_beta", out.u0, out.error);
  return out;
}

Transform u_beta(const LevyModel& m, double z) { return u_beta(SpectralFns(m), z); }

double sigma2_beta(const LevyModel& m, double z, double* error) {
  const Transform t = u_beta(m, z);
  if (error) *error = t.error;
  return t.sigma2;
}

Thm15Report check_thm15(const LevyModel& m, const std::vector<double>& z_grid) {
  SpectralFns sf(m);
  Thm15Report rep;
  rep.rows.resize(z_grid.size());
  parallel_for(long(z_grid.size()), default_workers(), [&](long k) {
    const double z = z_grid[size_t(k)];
    if (z == 0) throw PreconditionViolated("check_thm15: z must be nonzero");
    const Transform t = u_beta(sf, z);
    const double ratio = t.sigma2 > 0 ? std::abs(t.h_part) / t.sigma2 : 0.0;
    rep.rows[size_t(k)] = {z, t.h_part, t.sigma2, ratio, 2.0 * ratio, t.error};
  });
  for (const Thm15Row& r : rep.rows) rep.sup_ratio = std::max(rep.sup_ratio, r.ratio);
  rep.below_half = rep.sup_ratio < 0.5;

  // Local exponent from the two smallest |z|: sigma^2 ~ c (log 1/|z|)^{-a}.
  std::vector<const Thm15Row*> small;
  for (const Thm15Row& r : rep.rows)
    if (std::abs(r.z) < 1.0 / std::numbers::e && r.sigma2 > 0) small.push_back(&r);
  std::sort(small.begin(), small.end(), [](auto* a, auto* b) { return std::abs(a->z) < std::abs(b->z); });
  if (small.size() >= 2 && std::abs(small[0]->z) < std::abs(small[1]->z)) {
    const double x0 = std::log(std::log(1.0 / std::abs(small[0]->z)));
    const double x1 = std::log(std::log(1.0 / std::abs(small[1]->z)));
    rep.fit_a = -(std::log(small[0]->sigma2) - std::log(small[1]->sigma2)) / (x0 - x1);
    rep.fit_c = small[0]->sigma2 * std::exp(rep.fit_a * x0);
    rep.minorant_c = kInf;
    for (const Thm15Row* r : small)
      rep.minorant_c = std::min(rep.minorant_c, r->sigma2 * std::pow(std::log(1.0 / std::abs(r->z)), rep.fit_a));
    rep.minorant_diverges = rep.fit_a < 1.0;
  }
  return rep;
}

Cor14Report check_cor14(const LevyModel& m, const std::vector<double>& z_grid) {
  SpectralFns sf(m);
  Cor14Report rep;
  const double pq = std::abs(m.p - m.q);
  rep.two_abs_pq = 2.0 * pq;
  rep.rows.resize(z_grid.size());
  parallel_for(long(z_grid.size()), default_workers(), [&](long k) {
    const double z = std::abs(z_grid[size_t(k)]);
    if (z == 0) throw PreconditionViolated("check_cor14: z must be nonzero");
    Cor14Row row{};
    row.z = z_grid[size_t(k)];
    const double top = kPi / z;
    std::vector<double> cuts{0.0};
    for (double x = 1.0; x < top; x *= 2.0) cuts.push_back(x);
    cuts.push_back(top);
    double lhs = 0, err = 0;
    for (size_t j = 0; j + 1 < cuts.size(); ++j) {
      QuadResult r = integrate([&](double lam) { return lam * std::abs(spectral_at(m, lam).i); }, cuts[j],
                               cuts[j + 1], 1e-300, kTransformRelTol);
      lhs += r.value;
      err += r.error;
    }
    row.lhs = z * lhs;
    double e1 = 0, e2 = 0;
    row.rhs_tail = sf.L1_tail(kPi / (2 * z), &e1);
    row.c_needed = 2.0 * row.lhs / row.rhs_tail;
    row.holds = row.c_needed < 1.0;
    row.tail_1z = sf.L1_tail(1.0 / z, &e2);
    row.divergence = row.tail_1z * std::log(1.0 / z);
    if (pq > 0) {
      row.ell = 1.0 / (pq * sf.log_integral(1.0 / z));
      row.tail_asymptotic = (kPi / 2) / pq * row.ell;
    } else {
      const double tau = std::max(std::log(1.0 / z), m.g.log_cut());
      row.tail_asymptotic = tau > 0 ? (2.0 / kPi) * integrate_inverse_G(m.g, tau, 1e-10).value : kInf;
    }
    row.error = z * err + e1 + e2;
    rep.rows[size_t(k)] = row;
  });

  // Monotone decrease of R and |I| on the tail covered by the grid.
  double zmin = kInf, zmax = 0;
  for (double z : z_grid) {
    zmin = std::min(zmin, std::abs(z));
    zmax = std::max(zmax, std::abs(z));
  }
  const double lo = std::log(kPi / (2 * zmax)), hi = std::log(1e3 / zmin);
  const int pts = 80;
  std::vector<RI> v(pts);
  parallel_for(pts, default_workers(), [&](long k) {
    v[size_t(k)] = spectral_at(m, std::exp(lo + (hi - lo) * double(k) / (pts - 1)));
  });
  rep.monotonicity_verified = true;
  for (int k = 1; k < pts; ++k) {
    if (v[k].r > v[k - 1].r * (1 + 1e-9)) rep.monotonicity_verified = false;
    if (std::abs(v[k].i) > std::abs(v[k - 1].i) * (1 + 1e-9) + 1e-300) rep.monotonicity_verified = false;
  }
  rep.holds_on_grid = !rep.rows.empty();
  for (const Cor14Row& r : rep.rows) rep.holds_on_grid = rep.holds_on_grid && r.holds;
  return rep;
}

const char* to_string(Ex11Label l) {
  switch (l) {
    case Ex11Label::UnboundedByThm16: return "unbounded-by-Thm1.6";
    case Ex11Label::UnboundedPerDiscussion: return "unbounded-per-paper-discussion";
    case Ex11Label::BoundedPerDiscussion: return "bounded-per-paper-discussion";
    case Ex11Label::Indeterminate: return "indeterminate-by-this-paper";
  }
  return "unknown";
}

namespace {

void check_example_ranges(double gamma, double delta, double p, double q) {
  if (!std::isfinite(gamma) || !std::isfinite(delta)) throw PreconditionViolated("gamma and delta must be finite");
  if (!(p >= 0 && q >= 0) || std::abs(p + q - 1.0) > 1e-12) throw PreconditionViolated("p and q must be weights summing to 1");
  const bool sym = std::abs(p - q) <= 1e-12;
  if (sym && !(gamma > 1)) throw OutOfRange("p = q requires gamma > 1");
  if (!sym && !(gamma > -1)) throw OutOfRange("p != q requires gamma > -1");
}

}  // namespace

Ex11Label classify_example11(double gamma, double delta, double p, double q) {
  check_example_ranges(gamma, delta, p, q);
  const bool sym = std::abs(p - q) <= 1e-12;
  const double edge = sym ? 2.0 : 0.0;
  if (gamma < edge || (gamma == edge && delta < 0)) return Ex11Label::UnboundedByThm16;
  if (gamma == edge && delta <= 2) return Ex11Label::UnboundedPerDiscussion;
  if (gamma == edge) return Ex11Label::BoundedPerDiscussion;
  return Ex11Label::Indeterminate;
}

std::vector<Thm16Row> check_thm16_integrals(double gamma, double delta, double p, double q,
                                            const std::vector<double>& n_grid, double cut) {
  check_example_ranges(gamma, delta, p, q);
  const GProfile g = GProfile::log_power(gamma, delta, cut);
  const bool sym = std::abs(p - q) <= 1e-12;
  std::vector<Thm16Row> rows;
  for (double n : n_grid) {
    if (!(n > 1) || !std::isfinite(n)) throw PreconditionViolated("check_thm16_integrals: n must exceed 1");
    const double ln = std::log(n);
    QuadResult r;
    double stat;
    if (!sym) {
      r = integrate_G(g, std::max(0.0, g.log_cut()), ln, 1e-12);
      stat = r.value;
    } else {
      const double a = std::max(ln, g.log_cut());
      r = integrate_inverse_G(g, a, 1e-12);
      stat = 1.0 / r.value;
      r.error = r.error * stat * stat;
    }
    rows.push_back({n, stat, ln, stat / ln, r.error});
  }
  return rows;
}

std::vector<AsymmetryRow> asymmetry_asymptotics(const LevyModel& m, const std::vector<double>& z_grid) {
  SpectralFns sf(m);
  const double pq = std::abs(m.p - m.q);
  std::vector<AsymmetryRow> rows(z_grid.size());
  parallel_for(long(z_grid.size()), default_workers(), [&](long k) {
    const double z = z_grid[size_t(k)];
    if (!(z > 0)) throw PreconditionViolated("asymmetry_asymptotics: z must be positive");
    const Transform t = u_beta(sf, z);
    AsymmetryRow r{};
    r.z = z;
    r.u0 = t.u0;
    r.u_plus = t.u_plus;
    r.u_minus = t.u_minus;
    r.sigma2 = t.sigma2;
    const double d_plus = 0.5 * t.sigma2 * (1 - pq), d_minus = 0.5 * t.sigma2 * (1 + pq);
    r.pred_plus = t.u0 - d_plus;
    r.pred_minus = t.u0 - d_minus;
    r.rel_err_plus = std::abs(t.u_plus - r.pred_plus) / std::abs(r.pred_plus);
    r.rel_err_minus = std::abs(t.u_minus - r.pred_minus) / std::abs(r.pred_minus);
    const double hi = std::max(t.u_plus, t.u_minus), lo = std::min(t.u_plus, t.u_minus);
    r.flipped = t.u_minus > t.u_plus;
    r.oriented_err_plus = std::abs(hi - r.pred_plus) / std::abs(r.pred_plus);
    r.oriented_err_minus = std::abs(lo - r.pred_minus) / std::abs(r.pred_minus);
    r.increment_err_plus = d_plus > 0 ? std::abs((t.u0 - hi) - d_plus) / d_plus : 0.0;
    r.increment_err_minus = d_minus > 0 ? std::abs((t.u0 - lo) - d_minus) / d_minus : 0.0;
    r.identity_err = std::abs(t.u_plus + t.u_minus - 2 * t.r_part);
    r.error = t.error;
    rows[size_t(k)] = r;
  });
  return rows;
}

PointConfig kernel_matrix(const LevyModel& m, const std::vector<double>& points, double* error) {
  SpectralFns sf(m);
  for (double x : points)
    if (!std::isfinite(x)) throw PreconditionViolated("kernel_matrix: points must be finite");
  std::vector<double> gaps{0.0};
  for (double a : points)
    for (double b : points) gaps.push_back(std::abs(b - a));
  std::sort(gaps.begin(), gaps.end());
  gaps.erase(std::unique(gaps.begin(), gaps.end()), gaps.end());
  std::vector<Transform> vals(gaps.size());
  parallel_for(long(gaps.size()), default_workers(), [&](long k) { vals[size_t(k)] = u_beta(sf, gaps[size_t(k)]); });
  std::map<double, const Transform*> lookup;
  for (size_t k = 0; k < gaps.size(); ++k) lookup[gaps[k]] = &vals[k];

  PointConfig cfg;
  cfg.points = points;
  const Eigen::Index n = Eigen::Index(points.size());
  cfg.kernel_values.resize(n, n);
  double err = 0;
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j) {
      const double d = points[size_t(j)] - points[size_t(i)];
      const Transform& t = *lookup.at(std::abs(d));
      cfg.kernel_values(i, j) = d > 0 ? t.u_plus : (d < 0 ? t.u_minus : t.u0);
      err = std::max(err, t.error);
    }
  if (error) *error = err;
  return cfg;
}

}  // namespace perm
