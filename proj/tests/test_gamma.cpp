#include <doctest.h>

#include "oracles.hpp"
#include "permanental/errors.hpp"
#include "permanental/gamma.hpp"
#include "permanental/rng.hpp"
#include "permanental/sampler.hpp"

using namespace perm;

TEST_CASE("regularized incomplete gamma against high-precision references") {
  for (const oracle::GammaRef& r : oracle::gamma_refs()) {
    CHECK(std::abs(regularized_gamma_p(r.u, r.t) - r.p) <= 1e-13 * r.p);
    CHECK(std::abs(regularized_gamma_q(r.u, r.t) - r.q) <= 1e-12 * r.q);
  }
}

TEST_CASE("gamma tail closed forms") {
  for (double lam : {0.1, 1.0, 3.0, 10.0, 40.0}) {
    CHECK(gamma_tail_exact(1, 1, lam) == doctest::Approx(std::exp(-lam)).epsilon(1e-13));
    CHECK(gamma_tail_exact(2, 1, lam) == doctest::Approx((1 + lam) * std::exp(-lam)).epsilon(1e-13));
    CHECK(gamma_tail_exact(2, 2, lam / 2) == doctest::Approx((1 + lam) * std::exp(-lam)).epsilon(1e-13));
  }
  CHECK(gamma_tail_exact(1, 1, 0) == 1.0);
  CHECK_THROWS_AS(gamma_tail_exact(0, 1, 1), PreconditionViolated);
  CHECK_THROWS_AS(gamma_tail_exact(1, -1, 1), PreconditionViolated);
}

TEST_CASE("gamma tail against direct quadrature of the density") {
  for (double u : {0.5, 0.8, 1.5, 3.0, 6.0})
    for (double t : {0.2, 1.0, 2.0, 5.0}) {
      const double ref = double(oracle::gamma_tail_quadrature(u, t));
      CHECK(std::abs(gamma_tail_exact(u, 1, t) - ref) <= 1e-13);
    }
}

TEST_CASE("tail bounds") {
  const TailBounds b = tail_bounds(1, 3);
  CHECK(b.lower == doctest::Approx(2.0 / 3 * std::exp(-3.0)));
  CHECK(b.upper == doctest::Approx(2 * std::exp(-3.0)));
  const TailBounds c = tail_bounds(2, 5);
  CHECK(c.lower == doctest::Approx(10.0 / 3 * std::exp(-5.0)));
  CHECK(c.upper == doctest::Approx(10 * std::exp(-5.0)));
  for (double u : {0.3, 0.5, 1.0, 2.0, 5.0})
    for (double lam = 2; lam <= 20; lam += 1) {
      if (lam <= 2 * (u - 1) || lam <= 2 * (1 - u)) continue;
      const TailBounds tb = tail_bounds(u, lam);
      const double exact = gamma_tail_exact(u, 1, lam);
      CHECK(tb.lower <= exact);
      CHECK(exact <= tb.upper);
    }
  CHECK_THROWS_AS(tail_upper_bound(5, 4), PreconditionViolated);
  CHECK_THROWS_AS(tail_lower_bound(1, 1), PreconditionViolated);
}

TEST_CASE("max of iid gammas") {
  const MaxIidBound b = max_iid_lower(1000000, 1, 0.5, 1);
  CHECK(b.probability == doctest::Approx(1 - std::exp(-1.0)));
  CHECK(b.side_condition >= 1.5);
  const long n = 1000000;
  const double exact = -std::expm1(n * std::log1p(-std::pow(double(n), -0.5)));
  CHECK(exact >= b.probability);
  CHECK_THROWS_AS(max_iid_lower(10, 1, 0.01, 1), PreconditionViolated);

  // 200 replications of the max of 10^4 unit exponentials against (1 - eps) log n.
  const long m = 10000;
  const MaxIidBound bm = max_iid_lower(m, 1, 0.5, 1);
  int hits = 0;
  for (int rep = 0; rep < 200; ++rep) {
    RngStream rng(77, std::uint64_t(rep));
    double mx = 0;
    for (long i = 0; i < m; ++i) mx = std::max(mx, sample_unit_gamma(1, rng));
    hits += mx >= bm.threshold;
  }
  CHECK(hits / 200.0 >= bm.probability);
}

TEST_CASE("unbounded lambda check") {
  for (long n : {10L, 100L, 1000L}) {
    const double v = unbounded_lambda_check(n, 1, 1);
    CHECK(v == doctest::Approx(-std::expm1(double(n) * std::log1p(-1.0 / double(n)))).epsilon(1e-12));
  }
  double prev = 1.0;
  for (int j = 4; j <= 20; ++j) {
    const double v = unbounded_lambda_check(1L << j, 1, 1);
    CHECK(v <= prev + 1e-15);
    CHECK(v > 1 - std::exp(-1.0));
    prev = v;
  }
  const double h = unbounded_lambda_check(10000, 2, 0.5);
  CHECK(h > 0);
  CHECK(h < 1);
}
