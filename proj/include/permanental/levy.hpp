#pragma once

#include <complex>
#include <string>
#include <vector>

#include "permanental/bounds.hpp"

namespace perm {

/// Slowly varying profile g of the Levy measure
/// nu(dx) = x^{-2} g(1/|x|) (p 1_{x>0} + q 1_{x<0}) dx.
///
/// Internally g is evaluated on the log scale, G(tau) = g(e^tau).
class GProfile {
 public:
  enum class Kind { LogPower, Constant, Tabulated };

  /// g(y) = (log y)^gamma (log log y)^delta 1_{y > cut}.
  static GProfile log_power(double gamma, double delta, double cut = kDefaultCut);
  static GProfile constant(double value = 1.0);
  /// Linear interpolation in log y between nodes, zero below the first node
  /// and constant beyond the last.
  static GProfile tabulated(std::vector<double> y, std::vector<double> g);

  static constexpr double kDefaultCut = 7.38905609893065;  // e^2

  Kind kind() const { return kind_; }
  double gamma() const { return gamma_; }
  double delta() const { return delta_; }
  double cut() const { return cut_; }

  double operator()(double y) const;
  double at_log(double tau) const;
  /// log of the cut point; g vanishes for log y below it.
  double log_cut() const { return log_cut_; }
  /// Exponents (a, b) with g(y) ~ c (log y)^a (log log y)^b as y -> infinity.
  double asym_gamma() const { return kind_ == Kind::LogPower ? gamma_ : 0.0; }
  double asym_delta() const { return kind_ == Kind::LogPower ? delta_ : 0.0; }
  /// int_0^1 g(v) dv.
  double mass_near_zero() const;
  std::string describe() const;

 private:
  Kind kind_ = Kind::Constant;
  double gamma_ = 0, delta_ = 0, cut_ = 0, value_ = 1;
  double log_cut_ = -1e308;
  std::vector<double> logy_, g_;
};

struct LevyModel {
  double beta = 1;
  double p = 0.5, q = 0.5;
  GProfile g = GProfile::constant();

  bool symmetric() const { return p == q; }
};

LevyModel make_levy_model(double beta, double p, const GProfile& g);

/// psi(e^t) / e^t split into real and imaginary parts.
struct ScaledPsi {
  double re = 0, im = 0;
  double error = 0;
};

ScaledPsi psi_over_lambda(const LevyModel& m, double t);
std::complex<double> psi(const LevyModel& m, double lambda);

/// Real and imaginary parts of 1/(beta + psi(lambda)).
double R_beta(const LevyModel& m, double lambda);
double I_beta(const LevyModel& m, double lambda);

struct Integrability {
  bool integrable = false;
  std::string reason;
};

Integrability certify_integrability(const LevyModel& m);

/// Spectral functions of a model whose R_beta is certified integrable.
class SpectralFns {
 public:
  explicit SpectralFns(LevyModel m);

  const LevyModel& model() const { return m_; }
  double R(double lambda) const { return R_beta(m_, lambda); }
  double I(double lambda) const { return I_beta(m_, lambda); }
  /// Leading-order forms as lambda -> infinity.
  double R_asymptotic(double lambda) const;
  double I_asymptotic(double lambda) const;
  /// int_1^lambda g(s)/s ds.
  double log_integral(double lambda) const;
  /// int_Lambda^infinity R_beta, with its error estimate.
  double L1_tail(double lambda, double* error = nullptr) const;

 private:
  LevyModel m_;
};

struct Transform {
  double z = 0;
  double u_plus = 0;   // u(z)
  double u_minus = 0;  // u(-z)
  double r_part = 0;
  double h_part = 0;
  double sigma2 = 0;
  double u0 = 0;
  double error = 0;
};

/// Potential density values at z and -z with sigma^2(z) and u(0).
Transform u_beta(const SpectralFns& s, double z);
Transform u_beta(const LevyModel& m, double z);
double sigma2_beta(const LevyModel& m, double z, double* error = nullptr);

struct Thm15Row {
  double z, h, sigma2, ratio, lemma61_ratio, error;
};

struct Thm15Report {
  std::vector<Thm15Row> rows;
  double sup_ratio = 0;
  bool below_half = false;
  /// sigma^2(z) ~ c (log 1/z)^{-a} through the two smallest |z|;
  /// the minorant f(1/n) log n diverges iff a < 1.
  double fit_c = 0, fit_a = 0;
  double minorant_c = 0;
  bool minorant_diverges = false;
};

Thm15Report check_thm15(const LevyModel& m, const std::vector<double>& z_grid);

struct Cor14Row {
  double z;
  double lhs;
  double rhs_tail;   // int_{pi/(2|z|)}^infinity R
  double c_needed;   // smallest C with lhs <= (C/2) rhs_tail
  bool holds;
  double divergence;  // (int_n^infinity R) log n at n = 1/|z|
  double ell;         // 1/(|p-q| int_1^{1/|z|} g(s)/s ds)
  double tail_1z;     // int_{1/|z|}^infinity R
  double tail_asymptotic;
  double error;
};

struct Cor14Report {
  std::vector<Cor14Row> rows;
  bool monotonicity_verified = false;
  double two_abs_pq = 0;
  bool holds_on_grid = false;
};

Cor14Report check_cor14(const LevyModel& m, const std::vector<double>& z_grid);

enum class Ex11Label { UnboundedByThm16, UnboundedPerDiscussion, BoundedPerDiscussion, Indeterminate };

const char* to_string(Ex11Label l);

Ex11Label classify_example11(double gamma, double delta, double p, double q);

struct Thm16Row {
  double n, statistic, log_n, ratio, error;
};

std::vector<Thm16Row> check_thm16_integrals(double gamma, double delta, double p, double q,
                                            const std::vector<double>& n_grid,
                                            double cut = GProfile::kDefaultCut);

struct AsymmetryRow {
  double z, u0, u_plus, u_minus, sigma2;
  double pred_plus, pred_minus;
  double rel_err_plus, rel_err_minus;        // literal, u(z) against the first relation
  double oriented_err_plus, oriented_err_minus;  // larger of u(+-z) against the first relation
  double increment_err_plus, increment_err_minus;
  double identity_err;
  bool flipped;  // true when u(-z) is the larger value
  double error;
};

std::vector<AsymmetryRow> asymmetry_asymptotics(const LevyModel& m, const std::vector<double>& z_grid);

/// K_ij = u(t_j - t_i).
PointConfig kernel_matrix(const LevyModel& m, const std::vector<double>& points, double* error = nullptr);

}  // namespace perm
