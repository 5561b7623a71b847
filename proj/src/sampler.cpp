#include "permanental/sampler.hpp"

#include <algorithm>
#include <cmath>

#include "permanental/gamma.hpp"

namespace perm {

double sample_unit_gamma(double u, RngStream& rng) {
  if (!(u > 0) || !std::isfinite(u)) throw PreconditionViolated("gamma shape must be positive");
  if (u < 1) {
    const double g = sample_unit_gamma(u + 1.0, rng);
    return g * std::pow(rng.uniform_open(), 1.0 / u);
  }
  const double d = u - 1.0 / 3.0;
  const double c = 1.0 / std::sqrt(9.0 * d);
  for (;;) {
    double x, v;
    do {
      x = rng.normal();
      v = 1.0 + c * x;
    } while (v <= 0);
    v = v * v * v;
    const double w = rng.uniform_open();
    const double x2 = x * x;
    if (w < 1.0 - 0.0331 * x2 * x2) return d * v;
    if (std::log(w) < 0.5 * x2 + d * (1.0 - v + std::log(v))) return d * v;
  }
}

double sample_gamma(double u, double v, RngStream& rng) {
  if (!(v > 0) || !std::isfinite(v)) throw PreconditionViolated("gamma scale must be positive");
  return sample_unit_gamma(u, rng) / v;
}

MultiIndex sample_z(const ZDistribution& z, RngStream& rng) {
  if (!(z.covered_mass >= kSamplingCoverage))
    throw PreconditionViolated("Z distribution covers " + std::to_string(z.covered_mass) + ", below 1 - 1e-9");
  const double u = rng.uniform();
  auto it = std::upper_bound(z.cumulative.begin(), z.cumulative.end(), u);
  if (it != z.cumulative.end()) return z.support[size_t(it - z.cumulative.begin())];

  // The draw fell in the unenumerated tail: continue the CDF order by order.
  SeriesExpansion ex = *z.expansion;
  double cum = z.cumulative.empty() ? 0.0 : z.cumulative.back();
  const int n = ex.n();
  for (int step = 1; step <= kTailEscalations; ++step) {
    const int d = z.max_order + step;
    ex.extend_to(d);
    const std::vector<double>& f = ex.degree(d);
    std::vector<int> k = GradedIndexer::first(n, d);
    double layer = 0;
    for (size_t idx = 0; idx < f.size(); ++idx, GradedIndexer::next(k)) {
      layer += ex.prefactor() * f[idx];
      if (u < cum + layer) return MultiIndex(k);
    }
    cum += layer;
  }
  throw TruncationInfeasible("Z draw beyond " + std::to_string(kTailEscalations) + " extra orders");
}

SampleBatch sample_permanental(const PermanentalSpec& spec, long n_draws, std::uint64_t seed, bool with_coupling,
                               int workers) {
  const ZDistribution z = z_masses(spec, kSamplingTarget);
  return sample_permanental(spec, z, n_draws, seed, with_coupling, workers);
}

SampleBatch sample_permanental(const PermanentalSpec& spec, const ZDistribution& z, long n_draws,
                               std::uint64_t seed, bool with_coupling, int workers) {
  if (n_draws < 1) throw PreconditionViolated("sample count must be at least 1");
  const int n = spec.n();
  const double alpha = spec.alpha;
  const Vector& a = spec.pair.diag_a;

  SampleBatch batch;
  batch.seed = seed;
  batch.alpha = alpha;
  batch.diag_a = a;
  batch.draws.resize(n_draws, n);
  batch.z_draws.resize(n_draws, n);
  if (with_coupling) batch.coupled_lower = Matrix(n_draws, n);

  const long blocks = (n_draws + kBlockSize - 1) / kBlockSize;
  parallel_for(blocks, workers, [&](long b) {
    RngStream rng(seed, std::uint64_t(b));
    const long end = std::min(n_draws, (b + 1) * kBlockSize);
    for (long r = b * kBlockSize; r < end; ++r) {
      const MultiIndex k = sample_z(z, rng);
      for (int i = 0; i < n; ++i) {
        batch.z_draws(r, i) = k[i];
        if (with_coupling) {
          const double lower = sample_unit_gamma(alpha, rng) / a(i);
          const double extra = k[i] > 0 ? sample_unit_gamma(double(k[i]), rng) / a(i) : 0.0;
          (*batch.coupled_lower)(r, i) = lower;
          batch.draws(r, i) = lower + extra;
        } else {
          batch.draws(r, i) = sample_unit_gamma(alpha + k[i], rng) / a(i);
        }
      }
    }
  });
  return batch;
}

Estimate empirical_laplace(const SampleBatch& batch, const Vector& s) {
  if (batch.size() == 0) throw PreconditionViolated("empty batch");
  if (s.size() != batch.draws.cols()) throw PreconditionViolated("s length does not match the dimension");
  const long n = batch.size();
  double sum = 0, sum2 = 0;
  for (long r = 0; r < n; ++r) {
    const double v = std::exp(-batch.draws.row(r).dot(s));
    sum += v;
    sum2 += v * v;
  }
  const double mean = sum / n;
  const double var = n > 1 ? std::max(0.0, (sum2 - n * mean * mean) / (n - 1)) : 0.0;
  return {mean, std::sqrt(var / n)};
}

long coupling_violations(const SampleBatch& batch) {
  if (!batch.coupled_lower) return 0;
  return long((batch.draws.array() < batch.coupled_lower->array()).count());
}

namespace {

struct Moments {
  double sum = 0, sum2 = 0;
  long n = 0;
  void add(double v) {
    sum += v;
    sum2 += v * v;
    ++n;
  }
  double mean() const { return n ? sum / n : 0.0; }
  double var() const { return n > 1 ? std::max(0.0, (sum2 - n * mean() * mean()) / (n - 1)) : 0.0; }
};

// Streams for the independent comparison sample start here, far from batch blocks.
constexpr std::uint64_t kReferenceStreamBase = std::uint64_t(1) << 40;

}  // namespace

InequalityReport check_permanental_inequality(const PermanentalSpec& spec, long n_draws, std::uint64_t seed,
                                              const std::vector<double>& lambdas, int workers) {
  if (n_draws < 10000) throw PreconditionViolated("check_permanental_inequality needs N >= 10^4");
  const int n = spec.n();
  const double alpha = spec.alpha;
  const Vector& a = spec.pair.diag_a;
  const SampleBatch batch = sample_permanental(spec, n_draws, seed, false, workers);

  Vector scaled_max(n_draws), plain_max(n_draws), ref_max(n_draws);
  for (long r = 0; r < n_draws; ++r) {
    scaled_max(r) = batch.draws.row(r).cwiseProduct(a.transpose()).maxCoeff();
    plain_max(r) = batch.draws.row(r).maxCoeff();
  }
  const long blocks = (n_draws + kBlockSize - 1) / kBlockSize;
  parallel_for(blocks, workers, [&](long b) {
    RngStream rng(seed, kReferenceStreamBase + std::uint64_t(b));
    const long end = std::min(n_draws, (b + 1) * kBlockSize);
    for (long r = b * kBlockSize; r < end; ++r) {
      double m = 0;
      for (int i = 0; i < n; ++i) m = std::max(m, sample_unit_gamma(alpha, rng));
      ref_max(r) = m;
    }
  });

  InequalityReport rep;
  Moments ml, mr;
  for (long r = 0; r < n_draws; ++r) {
    ml.add(scaled_max(r));
    mr.add(ref_max(r));
  }
  rep.lhs = {ml.mean(), std::sqrt(ml.var() / n_draws)};
  rep.rhs = {mr.mean(), std::sqrt(mr.var() / n_draws)};
  rep.margin = {rep.lhs.value - rep.rhs.value, std::hypot(rep.lhs.se, rep.rhs.se)};

  std::vector<double> sorted_a(a.data(), a.data() + n);
  std::sort(sorted_a.begin(), sorted_a.end());
  for (double lam : lambdas) {
    const double pl = double((scaled_max.array() >= lam).count()) / n_draws;
    const double pr = double((ref_max.array() >= lam).count()) / n_draws;
    const double se = std::sqrt((pl * (1 - pl) + pr * (1 - pr)) / n_draws);
    const double exact = -std::expm1(n * std::log1p(-regularized_gamma_q(alpha, lam)));
    rep.tail.push_back({lam, pl, pr, exact, pl - pr, se});
    const double px = double((plain_max.array() >= lam).count()) / n_draws;
    const double sx = std::sqrt(px * (1 - px) / n_draws);
    for (long p : {1L, 2L}) {
      const long m = n / p;
      if (m < 1) continue;
      const double astar = sorted_a[size_t(m - 1)];
      const double rhs = -std::expm1(double(m) * std::log1p(-regularized_gamma_q(alpha, astar * lam)));
      rep.rearrangement.push_back({p, lam, astar, px, rhs, px - rhs, sx});
    }
  }
  return rep;
}

MixtureResult mixture_expectation(const PermanentalSpec& spec, const std::function<double(const Vector&)>& f,
                                  long mc_per_term, std::uint64_t seed, double target_mass, int workers) {
  if (mc_per_term < 1000) throw PreconditionViolated("mc_per_term must be at least 10^3");
  const ZDistribution z = z_masses(spec, target_mass);
  const int n = spec.n();
  const double alpha = spec.alpha;
  const Vector& a = spec.pair.diag_a;
  const long terms = long(z.support.size());
  std::vector<double> means(terms), vars(terms);
  parallel_for(terms, workers, [&](long t) {
    RngStream rng(seed, std::uint64_t(t));
    const MultiIndex& k = z.support[size_t(t)];
    Vector x(n);
    Moments m;
    for (long r = 0; r < mc_per_term; ++r) {
      for (int i = 0; i < n; ++i) x(i) = sample_unit_gamma(alpha + k[i], rng) / a(i);
      m.add(f(x));
    }
    means[size_t(t)] = m.mean();
    vars[size_t(t)] = m.var();
  });
  MixtureResult res;
  double var = 0;
  for (long t = 0; t < terms; ++t) {
    const double p = z.masses[size_t(t)];
    res.value += p * means[size_t(t)];
    var += p * p * vars[size_t(t)] / mc_per_term;
  }
  res.se = std::sqrt(var);
  res.deficiency = std::max(0.0, 1.0 - z.covered_mass);
  res.terms = terms;
  return res;
}

MixtureResult mixture_expectation(const PermanentalSpec& spec, Functional f, double lambda, long mc_per_term,
                                  std::uint64_t seed, double target_mass, int workers) {
  switch (f) {
    case Functional::Max:
      return mixture_expectation(spec, [](const Vector& x) { return x.maxCoeff(); }, mc_per_term, seed, target_mass,
                                 workers);
    case Functional::Sum:
      return mixture_expectation(spec, [](const Vector& x) { return x.sum(); }, mc_per_term, seed, target_mass,
                                 workers);
    case Functional::MaxIndicator:
      return mixture_expectation(
          spec, [lambda](const Vector& x) { return x.maxCoeff() >= lambda ? 1.0 : 0.0; }, mc_per_term, seed,
          target_mass, workers);
  }
  throw PreconditionViolated("unknown functional");
}

}  // namespace perm
