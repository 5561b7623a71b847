#include <doctest.h>

#include <numbers>

#include "oracles.hpp"
#include "permanental/levy.hpp"
#include "permanental/markov.hpp"

using namespace perm;

namespace {

constexpr double kPi = std::numbers::pi;

LevyModel log_model(double gamma, double delta, double p) {
  return make_levy_model(1.0, p, GProfile::log_power(gamma, delta));
}

}  // namespace

TEST_CASE("g profiles") {
  const GProfile g = GProfile::log_power(-0.5, 1.0);
  CHECK(g(2.0) == 0.0);
  CHECK(g(100.0) == doctest::Approx(std::pow(std::log(100.0), -0.5) * std::log(std::log(100.0))));
  CHECK(GProfile::constant(2.0)(1e-3) == 2.0);
  const GProfile t = GProfile::tabulated({1, 10, 100}, {1, 2, 3});
  CHECK(t(0.5) == 0.0);
  CHECK(t(std::sqrt(10.0)) == doctest::Approx(1.5));
  CHECK(t(1e6) == 3.0);
  CHECK_THROWS_AS(make_levy_model(1.0, 0.5, GProfile::log_power(0, 0, 2.0)), PreconditionViolated);
  CHECK_THROWS_AS(make_levy_model(1.0, 1.5, GProfile::constant()), PreconditionViolated);
  CHECK_THROWS_AS(make_levy_model(0.0, 0.5, GProfile::constant()), PreconditionViolated);
}

TEST_CASE("psi for g = 1 is (pi/2)|lambda|") {
  const LevyModel m = make_levy_model(1.0, 0.5, GProfile::constant());
  for (double lam : {1e-3, 1.0, 10.0, 1e4, 1e8}) {
    const std::complex<double> v = psi(m, lam);
    CHECK(std::abs(v.real() / (kPi / 2 * lam) - 1) <= 1e-9);
    CHECK(std::abs(v.imag()) <= 1e-12 * lam);
  }
  for (double lam : {1.0, 7.5, 100.0}) CHECK(std::abs(oracle::one_minus_cos_integral(lam) / (kPi / 2 * lam) - 1) <= 1e-6);
}

TEST_CASE("psi for g = 1 and p != q") {
  const LevyModel m = make_levy_model(1.0, 0.8, GProfile::constant());
  for (double lam : {10.0, 1e3, 1e6}) {
    const std::complex<double> v = psi(m, lam);
    // int_0^infinity (sin(lambda x) - lambda x 1_{x<1}) / x^2 dx = lambda (1 - gamma_E - log lambda).
    const double expect = -0.6 * lam * (1 - std::numbers::egamma - std::log(lam));
    CHECK(std::abs(v.imag() - expect) <= 1e-10 * std::abs(expect));
  }
}

TEST_CASE("psi / lambda against high-precision quadrature at lambda = 1e4") {
  const double lam = 1e4;
  const std::complex<double> a = psi(log_model(1, 0, 0.8), lam) / lam;
  CHECK(std::abs(a.real() - oracle::kPsiLogRe) <= 1e-9 * oracle::kPsiLogRe);
  CHECK(std::abs(a.imag() / 0.6 - oracle::kPsiLogImOverPq) <= 1e-9 * oracle::kPsiLogImOverPq);
  const std::complex<double> b = psi(log_model(-0.5, 0, 0.8), lam) / lam;
  CHECK(std::abs(b.real() - oracle::kPsiInvSqrtLogRe) <= 1e-9 * oracle::kPsiInvSqrtLogRe);
  CHECK(std::abs(b.imag() / 0.6 - oracle::kPsiInvSqrtLogImOverPq) <= 1e-9 * oracle::kPsiInvSqrtLogImOverPq);
}

TEST_CASE("Hermitian symmetry") {
  const LevyModel m = log_model(-0.5, 0, 0.8);
  for (double lam : {0.3, 5.0, 2e3}) {
    const std::complex<double> a = psi(m, lam), b = psi(m, -lam);
    CHECK(a.real() == doctest::Approx(b.real()).epsilon(1e-14));
    CHECK(a.imag() == doctest::Approx(-b.imag()).epsilon(1e-14));
    CHECK(R_beta(m, lam) == doctest::Approx(R_beta(m, -lam)).epsilon(1e-14));
    CHECK(I_beta(m, lam) == doctest::Approx(-I_beta(m, -lam)).epsilon(1e-14));
    CHECK(R_beta(m, lam) > 0);
  }
  CHECK(psi(m, 0.0) == std::complex<double>(0, 0));
}

TEST_CASE("large beta") {
  const LevyModel m = make_levy_model(1e8, 0.8, GProfile::log_power(1, 0));
  for (double lam : {0.1, 1.0, 10.0}) CHECK(R_beta(m, lam) * 1e8 == doctest::Approx(1.0).epsilon(1e-6));
}

TEST_CASE("integrability certificate") {
  CHECK(certify_integrability(log_model(1.5, 0, 0.5)).integrable);
  CHECK_FALSE(certify_integrability(log_model(0.5, 0, 0.5)).integrable);
  CHECK_FALSE(certify_integrability(make_levy_model(1.0, 0.5, GProfile::constant())).integrable);
  CHECK(certify_integrability(log_model(-0.5, 0, 0.8)).integrable);
  CHECK_THROWS_AS(SpectralFns(log_model(0.5, 0, 0.5)), NotIntegrable);
}

TEST_CASE("transform identities") {
  const SpectralFns sf(log_model(-0.5, 0, 0.8));
  const Transform zero = u_beta(sf, 0.0);
  CHECK(zero.h_part == 0.0);
  CHECK(zero.sigma2 == 0.0);
  CHECK(zero.u_plus == zero.u0);
  CHECK(zero.u_minus == zero.r_part);
  const Transform t = u_beta(sf, 0.05);
  CHECK(std::abs(t.u_plus + t.u_minus - 2 * t.r_part) <= 1e-14 * t.u0);
  CHECK(std::abs(t.sigma2 - (2 * t.u0 - t.u_plus - t.u_minus)) <= t.error);
  CHECK(t.sigma2 > 0);
  CHECK(t.u0 == doctest::Approx(zero.u0).epsilon(1e-9));
  const Transform neg = u_beta(sf, -0.05);
  CHECK(neg.u_plus == t.u_minus);
  CHECK(neg.u_minus == t.u_plus);

  const Transform sym = u_beta(log_model(1.5, 0, 0.5), 0.05);
  CHECK(std::abs(sym.h_part) <= sym.error);
  CHECK(std::abs(sym.u_plus - (sym.u0 - sym.sigma2 / 2)) <= 2 * sym.error);
}

TEST_CASE("sigma^2 against its tail integral for p = q") {
  // g = (log)^{3/2}: int_{1/z}^infinity dl / (l g(l)) = 2 (log 1/z)^{-1/2}.
  const double z = 1e-4;
  const double s2 = sigma2_beta(log_model(1.5, 0, 0.5), z);
  const double asym = 4 / (kPi * kPi) * 2 / std::sqrt(std::log(1 / z));
  CHECK(std::abs(s2 / asym - 1) <= 0.15);
}

TEST_CASE("asymmetric model at small z") {
  const LevyModel m = log_model(-0.5, 0, 0.8);
  const Thm15Report r = check_thm15(m, {1e-2, 1e-3, 1e-4, 1e-5});
  CHECK(std::abs(r.rows[2].ratio / 0.3 - 1) <= 0.2);
  for (size_t k = 1; k < r.rows.size(); ++k) CHECK(r.rows[k - 1].sigma2 > r.rows[k].sigma2);
  CHECK(r.below_half);
  CHECK(r.minorant_diverges);

  const Cor14Report c = check_cor14(m, {1e-4});
  CHECK(std::abs(c.rows[0].tail_1z / c.rows[0].tail_asymptotic - 1) <= 0.15);
  CHECK(c.monotonicity_verified);

  const Thm15Report s = check_thm15(log_model(1.5, 0, 0.5), {1e-3});
  CHECK(s.sup_ratio <= 1e-6);
}

TEST_CASE("Corollary 1.4 condition") {
  const Cor14Report mild = check_cor14(log_model(-0.5, 0, 0.55), {1e-2, 1e-4});
  CHECK(mild.holds_on_grid);
  const Cor14Report strong = check_cor14(log_model(-0.5, 0, 0.8), {1e-4});
  CHECK_FALSE(strong.holds_on_grid);
  const Cor14Report sym = check_cor14(log_model(1.5, 0, 0.5), {1e-3});
  CHECK(sym.rows[0].lhs <= 1e-10);
  CHECK(sym.holds_on_grid);
}

TEST_CASE("log-power family classifier") {
  CHECK(classify_example11(-0.5, 0, 0.8, 0.2) == Ex11Label::UnboundedByThm16);
  CHECK(classify_example11(1.5, 0, 0.5, 0.5) == Ex11Label::UnboundedByThm16);
  CHECK(classify_example11(0, 3, 0.8, 0.2) == Ex11Label::BoundedPerDiscussion);
  CHECK(classify_example11(0, -1, 0.8, 0.2) == Ex11Label::UnboundedByThm16);
  CHECK(classify_example11(0, 1, 0.8, 0.2) == Ex11Label::UnboundedPerDiscussion);
  CHECK(classify_example11(2, 2, 0.5, 0.5) == Ex11Label::UnboundedPerDiscussion);
  CHECK(classify_example11(0.5, 0, 0.8, 0.2) == Ex11Label::Indeterminate);
  CHECK_THROWS_AS(classify_example11(1.0, 0, 0.5, 0.5), OutOfRange);
  CHECK_THROWS_AS(classify_example11(-1.0, 0, 0.8, 0.2), OutOfRange);
  CHECK_THROWS_AS(classify_example11(0, 0, 0.8, 0.3), PreconditionViolated);
  CHECK(std::string(to_string(Ex11Label::UnboundedByThm16)) == "unbounded-by-Thm1.6");
}

TEST_CASE("Theorem 1.6 integrals") {
  const auto a = check_thm16_integrals(-0.5, 0, 0.8, 0.2, {1e2, 1e4, 1e8, 1e16}, 1.0);
  for (const Thm16Row& r : a) CHECK(r.statistic == doctest::Approx(2 * std::sqrt(std::log(r.n))).epsilon(1e-10));
  for (size_t k = 1; k < a.size(); ++k) CHECK(a[k].ratio < a[k - 1].ratio);

  const auto b = check_thm16_integrals(1.5, 0, 0.5, 0.5, {1e2, 1e4, 1e8, 1e16}, 1.0);
  for (const Thm16Row& r : b) CHECK(r.statistic == doctest::Approx(0.5 * std::sqrt(std::log(r.n))).epsilon(1e-8));
  for (size_t k = 1; k < b.size(); ++k) CHECK(b[k].ratio < b[k - 1].ratio);

  const auto c = check_thm16_integrals(2, 1, 0.5, 0.5, {1e4, 1e8, 1e16, 1e32});
  for (size_t k = 1; k < c.size(); ++k) CHECK(c[k].ratio > c[k - 1].ratio);
}

TEST_CASE("asymmetry relations") {
  const auto rows = asymmetry_asymptotics(log_model(-0.5, 0, 0.8), {1e-4});
  const AsymmetryRow& r = rows[0];
  CHECK(r.flipped);
  CHECK(r.oriented_err_plus <= 0.2);
  CHECK(r.oriented_err_minus <= 0.2);
  CHECK(r.identity_err <= 1e-14 * r.u0);
  const auto sym = asymmetry_asymptotics(log_model(1.5, 0, 0.5), {1e-2});
  CHECK(std::abs(sym[0].u_plus - sym[0].pred_plus) <= 2 * sym[0].error);
}

TEST_CASE("kernel matrices") {
  const LevyModel sym = log_model(2, 0, 0.5);
  double err = 0;
  const PointConfig two = kernel_matrix(sym, {0.0, 0.3}, &err);
  CHECK(std::abs(two.kernel_values(0, 1) - two.kernel_values(1, 0)) <= 2 * err);
  CHECK(two.kernel_values(0, 0) == two.kernel_values(1, 1));

  std::vector<double> pts;
  for (int j = 1; j <= 8; ++j) pts.push_back(0.05 * j);
  const PointConfig eight = kernel_matrix(sym, pts, &err);
  for (int i = 1; i < 8; ++i) CHECK(eight.kernel_values(i, i) == eight.kernel_values(0, 0));
  const AppendixReport rep = validate_appendix_lemma(eight.kernel_values);
  CHECK(rep.is_m_matrix);

  const PointConfig asym = kernel_matrix(log_model(-0.5, 0, 0.8), {0.0, 0.1}, &err);
  CHECK(asym.kernel_values(0, 1) < asym.kernel_values(1, 0));
}
