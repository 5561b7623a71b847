#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "permanental/model.hpp"
#include "permanental/parallel.hpp"
#include "permanental/rng.hpp"

namespace perm {

/// xi_{u,1}: Marsaglia-Tsang squeeze for u >= 1, boosted from u + 1 below that.
double sample_unit_gamma(double u, RngStream& rng);
/// xi_{u,v} = xi_{u,1} / v, so the scaling law holds draw by draw.
double sample_gamma(double u, double v, RngStream& rng);

/// Covered mass a ZDistribution needs before it can be sampled.
inline constexpr double kSamplingCoverage = 1.0 - 1e-9;
/// Target mass used when the sampler builds its own Z distribution.
inline constexpr double kSamplingTarget = 1.0 - 1e-10;
/// Extra orders tried when a uniform falls beyond the enumerated mass.
inline constexpr int kTailEscalations = 5;

/// Inverse-CDF draw of Z over the enumerated masses in graded order.
MultiIndex sample_z(const ZDistribution& z, RngStream& rng);

/// Draws per substream; block b of a batch uses stream b.
inline constexpr long kBlockSize = 4096;

struct SampleBatch {
  Matrix draws;                         // N x n
  std::optional<Matrix> coupled_lower;  // a_i^{-1} xi^{(i)}_{alpha,1}
  Eigen::MatrixXi z_draws;              // N x n
  std::uint64_t seed = 0;
  double alpha = 0;
  Vector diag_a;

  long size() const { return long(draws.rows()); }
};

SampleBatch sample_permanental(const PermanentalSpec& spec, long n_draws, std::uint64_t seed, bool with_coupling,
                               int workers = default_workers());
SampleBatch sample_permanental(const PermanentalSpec& spec, const ZDistribution& z, long n_draws,
                               std::uint64_t seed, bool with_coupling, int workers = default_workers());

struct Estimate {
  double value = 0;
  double se = 0;
};

/// Mean of exp(-<s, X>) over the batch with its standard error.
Estimate empirical_laplace(const SampleBatch& batch, const Vector& s);

/// Number of draws with X_i < coupled lower bound; zero by construction.
long coupling_violations(const SampleBatch& batch);

struct TailComparison {
  double lambda;
  double lhs;        // empirical P(max a_i X_i >= lambda)
  double rhs;        // empirical P(max xi^{(i)}_{alpha,1} >= lambda)
  double rhs_exact;  // 1 - (1 - Q(alpha, lambda))^n
  double margin;
  double se;
};

struct RearrangementComparison {
  long p;
  double lambda;
  double a_star;  // a*_{[n/p]}
  double lhs;     // empirical P(max X_i >= lambda)
  double rhs;     // exact P((a*)^{-1} max_{i <= [n/p]} xi^{(i)}_{alpha,1} >= lambda)
  double margin;
  double se;
};

struct InequalityReport {
  Estimate lhs;     // E max a_i X_i
  Estimate rhs;     // E max xi^{(i)}_{alpha,1}
  Estimate margin;  // lhs - rhs
  std::vector<TailComparison> tail;
  std::vector<RearrangementComparison> rearrangement;
};

/// Compare E f(a_1 X_1, ..., a_n X_n) with E f(xi^{(1)}_{alpha,1}, ...) for f = max,
/// from independent samples, plus tail and rearranged-diagonal versions on a lambda grid.
InequalityReport check_permanental_inequality(const PermanentalSpec& spec, long n_draws, std::uint64_t seed,
                                              const std::vector<double>& lambdas = {0.5, 1, 2, 3, 4},
                                              int workers = default_workers());

enum class Functional { Max, Sum, MaxIndicator };

struct MixtureResult {
  double value = 0;
  double se = 0;          // Monte Carlo standard error
  double deficiency = 0;  // 1 - covered mass of the enumerated terms
  long terms = 0;
};

/// sum_k P(Z = k) E f(xi_{alpha+k_1, a_1}, ..., xi_{alpha+k_n, a_n}) with the
/// inner expectations estimated from mc_per_term draws on stream = term index.
MixtureResult mixture_expectation(const PermanentalSpec& spec, const std::function<double(const Vector&)>& f,
                                  long mc_per_term, std::uint64_t seed, double target_mass = 1.0 - 1e-6,
                                  int workers = default_workers());
MixtureResult mixture_expectation(const PermanentalSpec& spec, Functional f, double lambda, long mc_per_term,
                                  std::uint64_t seed, double target_mass = 1.0 - 1e-6,
                                  int workers = default_workers());

}  // namespace perm
