#include "permanental/cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <map>
#include <optional>
#include <numbers>
#include <ostream>
#include <sstream>

#include "permanental/bounds.hpp"
#include "permanental/gamma.hpp"
#include "permanental/levy.hpp"
#include "permanental/linalg.hpp"
#include "permanental/markov.hpp"
#include "permanental/matrix_io.hpp"
#include "permanental/model.hpp"
#include "permanental/parallel.hpp"
#include "permanental/permanent.hpp"
#include "permanental/sampler.hpp"

namespace perm::cli {

namespace {

using json = nlohmann::ordered_json;

constexpr double kEps = std::numeric_limits<double>::epsilon();

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string trim(const std::string& s) {
  const size_t a = s.find_first_not_of(" \t\n\r");
  if (a == std::string::npos) return "";
  return s.substr(a, s.find_last_not_of(" \t\n\r") - a + 1);
}

std::vector<double> parse_list(const std::string& text, const std::string& flag) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (item.empty()) continue;
    size_t used = 0;
    double v = 0;
    try {
      v = std::stod(item, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != item.size() || !std::isfinite(v))
      throw PreconditionViolated(flag + ": cannot parse '" + item + "' as a number");
    out.push_back(v);
  }
  if (out.empty()) throw PreconditionViolated(flag + ": empty list");
  return out;
}

std::vector<long> parse_counts(const std::string& text, const std::string& flag) {
  std::vector<long> out;
  for (double v : parse_list(text, flag)) {
    if (v != std::floor(v) || v < 1) throw PreconditionViolated(flag + ": expected positive integers");
    out.push_back(long(v));
  }
  return out;
}

Vector to_vector(const std::vector<double>& v) { return Eigen::Map<const Vector>(v.data(), Eigen::Index(v.size())); }

json vec_json(const Vector& v) {
  json a = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v(i));
  return a;
}

json matrix_json(const Matrix& m) { return json::parse(matrix_to_json(m)); }

json read_json(const std::string& path) {
  const std::string text = read_text_file(path);
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw PreconditionViolated(path + ": invalid JSON (" + e.what() + ")");
  }
}

Matrix matrix_from(const json& j, const std::string& what) {
  if (j.is_object() || j.is_array()) {
    json w = j.is_array() ? json{{"n", j.size()}, {"rows", j}} : j;
    return parse_matrix(w.dump());
  }
  throw PreconditionViolated(what + ": expected a matrix object or an array of rows");
}

/// Spec files hold {"alpha": a, "A": matrix} or {"alpha": a, "K": matrix}.
PermanentalSpec read_spec(const std::string& path) {
  const json j = read_json(path);
  if (!j.is_object() || !j.contains("alpha") || !j["alpha"].is_number())
    throw PreconditionViolated(path + ": spec needs a numeric \"alpha\"");
  const double alpha = j["alpha"].get<double>();
  if (j.contains("A")) return make_spec(matrix_from(j["A"], path), alpha);
  if (j.contains("K")) return make_spec_from_kernel(matrix_from(j["K"], path), alpha);
  throw PreconditionViolated(path + ": spec needs an \"A\" or \"K\" matrix");
}

Matrix read_kernel(const std::string& path) {
  const json j = read_json(path);
  if (j.is_object() && j.contains("K")) return matrix_from(j["K"], path);
  return matrix_from(j, path);
}

double inverse_residual(const MMatrixPair& p) {
  return inf_norm(Matrix(p.A * p.K - Matrix::Identity(p.n(), p.n())));
}

struct Output {
  std::string path;
  std::string format = "json";
};

void emit(const std::string& text, const Output& o, std::ostream& out) {
  if (o.path.empty()) {
    out << text;
    return;
  }
  std::ofstream f(o.path, std::ios::binary);
  if (!f) throw PreconditionViolated("--out: cannot open " + o.path);
  f << text;
}

std::string dump(const json& j) { return j.dump(2) + "\n"; }

void add_output(CLI::App* sub, Output& o, bool with_format) {
  sub->add_option("--out", o.path, "Write the result to this file instead of stdout");
  if (with_format) sub->add_option("--format", o.format, "Output format")->check(CLI::IsMember({"json", "csv"}));
}

// Commands ------------------------------------------------------------------

struct PermanentArgs {
  std::string matrix;
  double alpha = 1.0;
  Output out;
};

std::string cmd_permanent(const PermanentArgs& a) {
  const Matrix m = read_matrix_file(a.matrix);
  const double value = alpha_permanent(m, a.alpha);
  const double magnitude = (m.array() < 0).any() ? alpha_permanent(Matrix(m.cwiseAbs()), a.alpha) : std::abs(value);
  json j;
  j["n"] = m.rows();
  j["alpha"] = a.alpha;
  j["value"] = value;
  j["abs_error"] = 2.0 * double(std::max<Eigen::Index>(m.rows(), 1)) * kEps * magnitude;
  return dump(j);
}

struct LaplaceArgs {
  std::string spec, s, method = "det";
  double rel_tol = 1e-10;
  Output out;
};

std::string cmd_laplace(const LaplaceArgs& a) {
  const PermanentalSpec spec = read_spec(a.spec);
  const Vector s = to_vector(parse_list(a.s, "--s"));
  if (s.size() != spec.pair.n()) throw PreconditionViolated("--s: expected " + std::to_string(spec.pair.n()) + " values");
  json j;
  j["method"] = a.method;
  if (a.method == "det") {
    Matrix as = spec.pair.A;
    as.diagonal() += s;
    const double cond = inf_norm(as) * inf_norm(invert(as));
    j["value"] = direct_laplace(spec, s);
    j["rel_err"] = double(spec.pair.n()) * spec.alpha * kEps * cond;
    j["terms_used"] = 1;
  } else {
    const SeriesResult r = series_laplace(spec, s, a.rel_tol);
    j["value"] = r.value;
    j["rel_err"] = r.rel_err;
    j["terms_used"] = r.terms_used;
    j["order"] = r.order;
    j["tail_bound"] = r.tail_bound;
  }
  return dump(j);
}

struct ZArgs {
  std::string spec;
  double target = 1.0 - 1e-8;
  int order = -1;
  Output out;
};

std::string cmd_zdist(const ZArgs& a) {
  const PermanentalSpec spec = read_spec(a.spec);
  const ZDistribution z = a.order >= 0 ? z_masses_to_order(spec, a.order) : z_masses(spec, a.target);
  const int n = spec.pair.n();
  if (a.out.format == "csv") {
    std::string text;
    for (int i = 0; i < n; ++i) text += "k_" + std::to_string(i + 1) + ",";
    text += "mass\n";
    for (size_t r = 0; r < z.support.size(); ++r) {
      for (int i = 0; i < n; ++i) text += std::to_string(z.support[r][i]) + ",";
      text += fmt(z.masses[r]) + "\n";
    }
    return text;
  }
  json j;
  j["n"] = n;
  j["alpha"] = spec.alpha;
  j["covered_mass"] = z.covered_mass;
  j["tail_bound"] = z.tail_bound;
  j["max_order"] = z.max_order;
  j["terms"] = z.support.size();
  json sup = json::array();
  for (size_t r = 0; r < z.support.size(); ++r) sup.push_back({{"k", z.support[r].components()}, {"mass", z.masses[r]}});
  j["support"] = std::move(sup);
  return dump(j);
}

struct SampleArgs {
  std::string spec;
  long n = 1000;
  std::uint64_t seed = 1;
  bool couple = false;
  int workers = 1;
  Output out;
};

std::string cmd_sample(const SampleArgs& a) {
  const PermanentalSpec spec = read_spec(a.spec);
  const SampleBatch b = sample_permanental(spec, a.n, a.seed, a.couple, a.workers);
  const int n = spec.pair.n();
  std::string text;
  for (int i = 0; i < n; ++i) text += (i ? ",X_" : "X_") + std::to_string(i + 1);
  if (a.couple) {
    for (int i = 0; i < n; ++i) text += ",L_" + std::to_string(i + 1);
    for (int i = 0; i < n; ++i) text += ",Z_" + std::to_string(i + 1);
  }
  text += "\n";
  text.reserve(text.size() + size_t(a.n) * size_t(n) * (a.couple ? 48 : 24));
  for (long r = 0; r < b.size(); ++r) {
    for (int i = 0; i < n; ++i) {
      if (i) text += ',';
      text += fmt(b.draws(r, i));
    }
    if (a.couple) {
      for (int i = 0; i < n; ++i) text += "," + fmt((*b.coupled_lower)(r, i));
      for (int i = 0; i < n; ++i) text += "," + std::to_string(b.z_draws(r, i));
    }
    text += '\n';
  }
  return text;
}

struct McArgs {
  std::string spec, s;
  long n = 1000000;
  std::uint64_t seed = 1;
  int points = 10;
  int workers = 1;
  Output out;
};

std::string cmd_mc_validate(const McArgs& a) {
  const PermanentalSpec spec = read_spec(a.spec);
  const int n = spec.pair.n();
  std::vector<Vector> pts;
  if (!a.s.empty()) {
    std::stringstream ss(a.s);
    std::string item;
    while (std::getline(ss, item, ';')) {
      const Vector v = to_vector(parse_list(item, "--s"));
      if (v.size() != n) throw PreconditionViolated("--s: every point needs " + std::to_string(n) + " values");
      pts.push_back(v);
    }
  } else {
    // Points drawn from a stream of their own, separate from the sampler's.
    RngStream rng(a.seed, std::uint64_t(1) << 50);
    for (int k = 0; k < a.points; ++k) {
      Vector v(n);
      for (int i = 0; i < n; ++i) v(i) = 0.1 + 1.9 * rng.uniform();
      pts.push_back(v);
    }
  }
  const SampleBatch b = sample_permanental(spec, a.n, a.seed, true, a.workers);
  json j;
  j["n_draws"] = a.n;
  j["seed"] = a.seed;
  json lt = json::array();
  int within = 0;
  for (const Vector& s : pts) {
    const Estimate e = empirical_laplace(b, s);
    const double exact = direct_laplace(spec, s);
    const double z = e.se > 0 ? (e.value - exact) / e.se : 0.0;
    within += std::abs(z) <= 4.0;
    lt.push_back({{"s", vec_json(s)}, {"empirical", e.value}, {"se", e.se}, {"exact", exact}, {"z", z},
                  {"within_4se", std::abs(z) <= 4.0}});
  }
  j["laplace"] = std::move(lt);
  j["within_4se"] = within;
  j["points"] = pts.size();
  j["coupling_violations"] = coupling_violations(b);
  const InequalityReport ir = check_permanental_inequality(spec, a.n, a.seed, {0.5, 1, 2, 3, 4}, a.workers);
  json ineq;
  ineq["lhs"] = {{"value", ir.lhs.value}, {"se", ir.lhs.se}};
  ineq["rhs"] = {{"value", ir.rhs.value}, {"se", ir.rhs.se}};
  ineq["margin"] = {{"value", ir.margin.value}, {"se", ir.margin.se}};
  json tail = json::array();
  for (const TailComparison& t : ir.tail)
    tail.push_back({{"lambda", t.lambda}, {"lhs", t.lhs}, {"rhs", t.rhs}, {"rhs_exact", t.rhs_exact},
                    {"margin", t.margin}, {"se", t.se}});
  ineq["tail"] = std::move(tail);
  json rear = json::array();
  for (const RearrangementComparison& r : ir.rearrangement)
    rear.push_back({{"p", r.p}, {"lambda", r.lambda}, {"a_star", r.a_star}, {"lhs", r.lhs}, {"rhs", r.rhs},
                    {"margin", r.margin}, {"se", r.se}});
  ineq["rearrangement"] = std::move(rear);
  j["inequality"] = std::move(ineq);
  return dump(j);
}

struct GammaArgs {
  double u = 1, v = 1, t = 1;
  bool bounds = false;
  Output out;
};

std::string cmd_gamma_tail(const GammaArgs& a) {
  json j;
  j["u"] = a.u;
  j["v"] = a.v;
  j["t"] = a.t;
  j["exact"] = gamma_tail_exact(a.u, a.v, a.t);
  j["rel_err"] = 1e-13;
  if (a.bounds) {
    const double lam = a.v * a.t;
    json b;
    b["lambda"] = lam;
    try {
      b["upper"] = tail_upper_bound(a.u, lam);
    } catch (const PreconditionViolated& e) {
      b["upper"] = nullptr;
      b["upper_note"] = e.what();
    }
    try {
      b["lower"] = tail_lower_bound(a.u, lam);
    } catch (const PreconditionViolated& e) {
      b["lower"] = nullptr;
      b["lower_note"] = e.what();
    }
    j["bounds"] = std::move(b);
  }
  return dump(j);
}

struct BoundsArgs {
  std::string kernel, which = "simple";
  double c = -1, k_hat = -1;
  int p = 1;
  Output out;
};

std::string cmd_bounds(const BoundsArgs& a) {
  const Matrix k = read_kernel(a.kernel);
  const MMatrixPair pair = validate_kernel(k);
  json j;
  j["which"] = a.which;
  j["n"] = pair.n();
  j["inverse_residual"] = inverse_residual(pair);
  if (a.which == "simple") {
    const RowBounds r = diag_bound_simple(pair);
    j["diagonal"] = vec_json(r.diagonal);
    j["bound"] = vec_json(r.bound);
    j["holds"] = r.holds;
  } else if (a.which == "sigma") {
    const SigmaBound r = diag_bound_sigma(pair, a.c);
    j["bound"] = r.bound;
    j["c"] = r.c;
    j["minimal_c"] = r.minimal_c;
    j["sigma_star2"] = r.sigma_star2;
    j["diagonal"] = vec_json(r.diagonal);
    j["holds"] = r.holds;
  } else if (a.which == "scaled") {
    const double kh = a.k_hat > 0 ? a.k_hat : pair.K.diagonal().maxCoeff();
    const ScaledBound r = diag_bound_scaled(pair, kh);
    j["k_hat"] = r.k_hat;
    j["r"] = vec_json(r.r);
    j["c"] = r.c;
    j["sigma_hat_star2"] = r.sigma_hat_star2;
    j["bound"] = r.bound;
    j["scaled_diagonal"] = vec_json(r.rows.diagonal);
    j["holds"] = r.rows.holds;
  } else if (a.which == "psi-star") {
    PointConfig cfg;
    for (int i = 0; i < pair.n(); ++i) cfg.points.push_back(i + 1);
    cfg.kernel_values = k;
    j["p"] = a.p;
    j["psi_star"] = psi_star(cfg, a.p);
    j["diagonal"] = vec_json(pair.diag_a);
  } else {
    const SudakovReport r = sudakov_compare(pair);
    j["max_a"] = r.max_a;
    j["two_over_sigma2"] = r.two_over_sigma2;
    j["sigma_star2"] = r.sigma_star2;
    j["expected_max_abs"] = r.expected_max_abs;
    j["expected_max"] = r.expected_max;
    j["permanental_lower"] = r.permanental_lower;
    j["sudakov_lower"] = r.sudakov_lower;
    j["quadrature_error"] = r.quadrature_error;
    j["stronger"] = r.stronger;
  }
  return dump(j);
}

struct LevyParams {
  double beta = 1, p = 0.5, gamma = 0, delta = 0, cut = GProfile::kDefaultCut;
  bool constant_g = false;
  std::string g_table;

  GProfile profile() const {
    if (constant_g) return GProfile::constant();
    if (!g_table.empty()) {
      const json j = read_json(g_table);
      if (!j.is_object() || !j.contains("y") || !j.contains("g"))
        throw PreconditionViolated("--g-table: expected {\"y\": [...], \"g\": [...]}");
      return GProfile::tabulated(j["y"].get<std::vector<double>>(), j["g"].get<std::vector<double>>());
    }
    return GProfile::log_power(gamma, delta, cut);
  }
  LevyModel model() const { return make_levy_model(beta, p, profile()); }
};

void add_levy_params(CLI::App* sub, LevyParams& lp) {
  sub->add_option("--beta", lp.beta, "Killing rate");
  sub->add_option("--p", lp.p, "Weight of positive jumps; q = 1 - p");
  sub->add_option("--gamma", lp.gamma, "Exponent of log y");
  sub->add_option("--delta", lp.delta, "Exponent of log log y");
  sub->add_option("--cut", lp.cut, "g vanishes for y <= cut");
  sub->add_flag("--constant-g", lp.constant_g, "Use g = 1");
  sub->add_option("--g-table", lp.g_table, "JSON {y, g} table for g");
}

struct ScanArgs {
  std::string model = "exp", n = "16,32,64", deltas = "1";
  int p = 1;
  LevyParams levy;
  Output out;
};

std::string cmd_unbounded_scan(const ScanArgs& a) {
  const std::vector<long> ns = parse_counts(a.n, "--n");
  const std::vector<double> ds = parse_list(a.deltas, "--delta-grid");
  std::function<double(double, double)> kernel;
  std::map<double, Transform> cache;
  if (a.model == "exp") {
    kernel = [](double s, double t) { return std::exp(-std::abs(t - s)); };
  } else if (a.model == "min") {
    kernel = [](double s, double t) { return std::min(s, t); };
  } else {
    // Potential densities are costly; evaluate every gap the scan needs once.
    const SpectralFns sf(a.levy.model());
    std::vector<double> gaps{0.0};
    for (double d : ds)
      for (long n : ns) {
        std::vector<double> pts;
        for (long j = 1; j <= n; ++j) pts.push_back(double(j) * d / double(n));
        for (double x : pts)
          for (double y : pts) gaps.push_back(std::abs(y - x));
      }
    std::sort(gaps.begin(), gaps.end());
    gaps.erase(std::unique(gaps.begin(), gaps.end()), gaps.end());
    std::vector<Transform> vals(gaps.size());
    parallel_for(long(gaps.size()), default_workers(), [&](long k) { vals[size_t(k)] = u_beta(sf, gaps[size_t(k)]); });
    for (size_t k = 0; k < gaps.size(); ++k) cache[gaps[k]] = vals[k];
    kernel = [&cache](double s, double t) {
      const Transform& v = cache.at(std::abs(t - s));
      return t > s ? v.u_plus : (t < s ? v.u_minus : v.u0);
    };
  }
  const std::vector<UnboundednessRow> rows = unboundedness_statistic(kernel, ds, ns, a.p);
  double qerr = 0;
  for (const auto& [g, t] : cache) qerr = std::max(qerr, t.error);
  if (a.out.format == "json") {
    json j;
    j["model"] = a.model;
    j["note"] = "numerical evidence only; a diverging column does not prove unboundedness";
    j["kernel_abs_error"] = qerr;
    json r = json::array();
    for (const UnboundednessRow& x : rows)
      r.push_back({{"delta", x.delta}, {"n", x.n}, {"psi_star", x.psi_star}, {"log_n_over_psi", x.log_n_over_psi},
                   {"sigma_star2", x.sigma_star2}, {"sigma_star2_log_n", x.sigma_star2_log_n}, {"error", x.error}});
    j["rows"] = std::move(r);
    return dump(j);
  }
  std::string text = "delta,n,psi_star,log_n_over_psi,sigma_star2,sigma_star2_log_n,kernel_abs_error,error\n";
  for (const UnboundednessRow& x : rows)
    text += fmt(x.delta) + "," + std::to_string(x.n) + "," + fmt(x.psi_star) + "," + fmt(x.log_n_over_psi) + "," +
            fmt(x.sigma_star2) + "," + fmt(x.sigma_star2_log_n) + "," + fmt(qerr) + "," + x.error + "\n";
  return text;
}

struct GenArgs {
  int n = 4;
  std::uint64_t seed = 1;
  double kill_min = 0.2;
  Output out;
};

std::string cmd_gen_kernel(const GenArgs& a) {
  const TransientChain c = random_transient_chain(a.n, a.kill_min, a.seed);
  return matrix_to_json(green_kernel(c)) + "\n";
}

struct LevyArgs {
  LevyParams lp;
  std::optional<double> psi, u, sigma2;
  bool classify = false;
  std::string thm16, kernel, thm15, cor14, asym;
  double thm16_cut = -1;
  Output out;
};

json transform_json(const Transform& t) {
  return {{"z", t.z},         {"u_plus", t.u_plus}, {"u_minus", t.u_minus}, {"r_part", t.r_part},
          {"h_part", t.h_part}, {"sigma2", t.sigma2}, {"u0", t.u0},           {"abs_error", t.error}};
}

std::string cmd_levy(const LevyArgs& a) {
  const double q = 1.0 - a.lp.p;
  const int modes = a.psi.has_value() + a.u.has_value() + a.sigma2.has_value() + a.classify + !a.thm16.empty() +
                    !a.kernel.empty() + !a.thm15.empty() + !a.cor14.empty() + !a.asym.empty();
  if (modes != 1)
    throw PreconditionViolated(
        "levy: choose exactly one of --psi, --u, --sigma2, --classify, --scan-thm16, --kernel, --thm15, --cor14, "
        "--asymmetry");
  json j;
  if (a.classify) {
    j["gamma"] = a.lp.gamma;
    j["delta"] = a.lp.delta;
    j["p"] = a.lp.p;
    j["q"] = q;
    j["label"] = to_string(classify_example11(a.lp.gamma, a.lp.delta, a.lp.p, q));
    return dump(j);
  }
  if (!a.thm16.empty()) {
    const double cut = a.thm16_cut > 0 ? a.thm16_cut : (a.lp.delta == 0 ? 1.0 : GProfile::kDefaultCut);
    const auto rows = check_thm16_integrals(a.lp.gamma, a.lp.delta, a.lp.p, q, parse_list(a.thm16, "--scan-thm16"), cut);
    if (a.out.format == "csv") {
      std::string text = "n,statistic,log_n,ratio,abs_error\n";
      for (const Thm16Row& r : rows)
        text += fmt(r.n) + "," + fmt(r.statistic) + "," + fmt(r.log_n) + "," + fmt(r.ratio) + "," + fmt(r.error) + "\n";
      return text;
    }
    json arr = json::array();
    for (const Thm16Row& r : rows)
      arr.push_back({{"n", r.n}, {"statistic", r.statistic}, {"log_n", r.log_n}, {"ratio", r.ratio}, {"abs_error", r.error}});
    j["cut"] = cut;
    j["rows"] = std::move(arr);
    return dump(j);
  }
  const LevyModel m = a.lp.model();
  j["beta"] = m.beta;
  j["p"] = m.p;
  j["q"] = m.q;
  j["g"] = m.g.describe();
  if (a.psi) {
    const double lam = *a.psi;
    const std::complex<double> v = psi(m, lam);
    const double err = lam == 0 ? 0.0 : psi_over_lambda(m, std::log(std::abs(lam))).error * std::abs(lam);
    j["lambda"] = lam;
    j["re"] = v.real();
    j["im"] = v.imag();
    j["abs_error"] = err;
    j["R_beta"] = R_beta(m, lam);
    j["I_beta"] = I_beta(m, lam);
    return dump(j);
  }
  if (a.u || a.sigma2) {
    const SpectralFns sf(m);
    const Transform t = u_beta(sf, a.u ? *a.u : *a.sigma2);
    if (a.u) {
      j["transform"] = transform_json(t);
    } else {
      j["z"] = t.z;
      j["sigma2"] = t.sigma2;
      j["difference_form"] = 2 * t.u0 - t.u_plus - t.u_minus;
      j["abs_error"] = t.error;
    }
    return dump(j);
  }
  if (!a.kernel.empty()) {
    const json pj = read_json(a.kernel);
    const json arr = pj.is_object() && pj.contains("points") ? pj["points"] : pj;
    if (!arr.is_array()) throw PreconditionViolated("--kernel: expected an array of points or {\"points\": [...]}");
    double err = 0;
    const PointConfig cfg = kernel_matrix(m, arr.get<std::vector<double>>(), &err);
    j["points"] = cfg.points;
    j["kernel"] = matrix_json(cfg.kernel_values);
    j["abs_error"] = err;
    return dump(j);
  }
  if (!a.thm15.empty()) {
    const Thm15Report r = check_thm15(m, parse_list(a.thm15, "--thm15"));
    json rows = json::array();
    for (const Thm15Row& x : r.rows)
      rows.push_back({{"z", x.z}, {"h", x.h}, {"sigma2", x.sigma2}, {"ratio", x.ratio},
                      {"lemma61_ratio", x.lemma61_ratio}, {"abs_error", x.error}});
    j["rows"] = std::move(rows);
    j["sup_ratio"] = r.sup_ratio;
    j["below_half"] = r.below_half;
    j["fit_c"] = r.fit_c;
    j["fit_a"] = r.fit_a;
    j["minorant_c"] = r.minorant_c;
    j["minorant_diverges"] = r.minorant_diverges;
    return dump(j);
  }
  if (!a.cor14.empty()) {
    const Cor14Report r = check_cor14(m, parse_list(a.cor14, "--cor14"));
    json rows = json::array();
    for (const Cor14Row& x : r.rows)
      rows.push_back({{"z", x.z}, {"lhs", x.lhs}, {"rhs_tail", x.rhs_tail}, {"c_needed", x.c_needed},
                      {"holds", x.holds}, {"divergence", x.divergence}, {"ell", x.ell}, {"tail_1z", x.tail_1z},
                      {"tail_asymptotic", x.tail_asymptotic}, {"abs_error", x.error}});
    j["rows"] = std::move(rows);
    j["two_abs_pq"] = r.two_abs_pq;
    j["monotonicity_verified"] = r.monotonicity_verified;
    j["holds_on_grid"] = r.holds_on_grid;
    return dump(j);
  }
  const auto rows = asymmetry_asymptotics(m, parse_list(a.asym, "--asymmetry"));
  json arr = json::array();
  for (const AsymmetryRow& x : rows)
    arr.push_back({{"z", x.z},
                   {"u0", x.u0},
                   {"u_plus", x.u_plus},
                   {"u_minus", x.u_minus},
                   {"sigma2", x.sigma2},
                   {"pred_plus", x.pred_plus},
                   {"pred_minus", x.pred_minus},
                   {"rel_err_plus", x.rel_err_plus},
                   {"rel_err_minus", x.rel_err_minus},
                   {"oriented_err_plus", x.oriented_err_plus},
                   {"oriented_err_minus", x.oriented_err_minus},
                   {"increment_err_plus", x.increment_err_plus},
                   {"increment_err_minus", x.increment_err_minus},
                   {"identity_err", x.identity_err},
                   {"flipped", x.flipped},
                   {"abs_error", x.error}});
  j["rows"] = std::move(arr);
  return dump(j);
}

struct ClassifyArgs {
  double gamma = 0, delta = 0, p = 0.5;
  double q = -1;
  Output out;
};

std::string cmd_classify(const ClassifyArgs& a) {
  const double q = a.q >= 0 ? a.q : 1.0 - a.p;
  json j;
  j["gamma"] = a.gamma;
  j["delta"] = a.delta;
  j["p"] = a.p;
  j["q"] = q;
  j["label"] = to_string(classify_example11(a.gamma, a.delta, a.p, q));
  return dump(j);
}

struct ValidateArgs {
  std::string kernel;
  double tol = 1e-10;
  Output out;
};

std::string cmd_validate_kernel(const ValidateArgs& a, bool& passed) {
  const Matrix k = read_kernel(a.kernel);
  const AppendixReport r = validate_appendix_lemma(k, a.tol);
  passed = r.pass();
  json j;
  j["n"] = k.rows();
  j["is_m_matrix"] = r.is_m_matrix;
  j["reason"] = r.reason;
  if (r.row >= 0) j["at"] = {r.row, r.col};
  j["row_sums"] = vec_json(r.row_sums);
  j["row_sums_positive"] = r.row_sums_positive;
  j["min_row_sum"] = r.min_row_sum;
  j["column_dominated"] = r.column_dominated;
  j["max_column_excess"] = r.max_column_excess;
  j["tolerance"] = a.tol;
  j["pass"] = passed;
  return dump(j);
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Permanental vectors: series, sampling, bounds and Levy potential kernels", "permtool"};
  app.require_subcommand(1);
  int workers = default_workers();
  app.add_option("--workers", workers, "Worker threads (default from PERM_WORKERS)")->check(CLI::Range(1, 256));

  PermanentArgs perm_a;
  auto* s_perm = app.add_subcommand("permanent", "alpha-permanent of a square matrix");
  s_perm->add_option("--matrix", perm_a.matrix, "Matrix file (JSON or text)")->required();
  s_perm->add_option("--alpha", perm_a.alpha, "alpha > 0");
  add_output(s_perm, perm_a.out, false);

  LaplaceArgs lap_a;
  auto* s_lap = app.add_subcommand("laplace", "Laplace transform |I + KS|^{-alpha}");
  s_lap->add_option("--spec", lap_a.spec, "Spec file")->required();
  s_lap->add_option("--s", lap_a.s, "Comma-separated s values")->required();
  s_lap->add_option("--method", lap_a.method, "det or series")->check(CLI::IsMember({"det", "series"}));
  s_lap->add_option("--rel-tol", lap_a.rel_tol, "Series tolerance");
  add_output(s_lap, lap_a.out, false);

  ZArgs z_a;
  auto* s_z = app.add_subcommand("z-dist", "Distribution of the mixing multi-index Z");
  s_z->add_option("--spec", z_a.spec, "Spec file")->required();
  s_z->add_option("--target", z_a.target, "Mass to cover");
  s_z->add_option("--order", z_a.order, "Enumerate through this order instead");
  add_output(s_z, z_a.out, true);

  SampleArgs smp_a;
  auto* s_smp = app.add_subcommand("sample", "Draw permanental vectors (CSV)");
  s_smp->add_option("--spec", smp_a.spec, "Spec file")->required();
  s_smp->add_option("--n", smp_a.n, "Number of draws")->check(CLI::PositiveNumber);
  s_smp->add_option("--seed", smp_a.seed, "Seed");
  s_smp->add_flag("--couple", smp_a.couple, "Also emit the coupled lower bounds and Z");
  add_output(s_smp, smp_a.out, false);

  McArgs mc_a;
  auto* s_mc = app.add_subcommand("mc-validate", "Monte Carlo validation of a spec");
  s_mc->add_option("--spec", mc_a.spec, "Spec file")->required();
  s_mc->add_option("--n", mc_a.n, "Number of draws")->check(CLI::PositiveNumber);
  s_mc->add_option("--seed", mc_a.seed, "Seed");
  s_mc->add_option("--s", mc_a.s, "Points 's11,s12;s21,s22'");
  s_mc->add_option("--points", mc_a.points, "Number of random points when --s is absent")->check(CLI::Range(1, 1000));
  add_output(s_mc, mc_a.out, false);

  GammaArgs g_a;
  auto* s_g = app.add_subcommand("gamma-tail", "P(xi_{u,v} >= t) with optional bounds");
  s_g->add_option("--u", g_a.u, "Shape")->required();
  s_g->add_option("--v", g_a.v, "Rate");
  s_g->add_option("--t", g_a.t, "Threshold")->required();
  s_g->add_flag("--bounds", g_a.bounds, "Also evaluate the two-sided bounds at lambda = v t");
  add_output(s_g, g_a.out, false);

  BoundsArgs b_a;
  auto* s_b = app.add_subcommand("bounds", "Diagonal bounds for A = K^{-1}");
  s_b->add_option("--kernel", b_a.kernel, "Kernel file")->required();
  s_b->add_option("--which", b_a.which, "Bound")->check(CLI::IsMember({"simple", "sigma", "scaled", "psi-star", "sudakov"}));
  s_b->add_option("--c", b_a.c, "Asymmetry constant (default: minimal)");
  s_b->add_option("--k-hat", b_a.k_hat, "Scale constant (default: max K_ii)");
  s_b->add_option("--p", b_a.p, "Rearrangement fraction for psi-star")->check(CLI::PositiveNumber);
  add_output(s_b, b_a.out, false);

  ScanArgs sc_a;
  auto* s_sc = app.add_subcommand("unbounded-scan", "log n / a*_{[n/p]} and sigma*^2 log n on a grid");
  s_sc->add_option("--kernel-model", sc_a.model, "exp, min or levy")->check(CLI::IsMember({"exp", "min", "levy"}));
  s_sc->add_option("--n", sc_a.n, "Comma-separated n values");
  s_sc->add_option("--delta-grid", sc_a.deltas, "Comma-separated interval lengths");
  s_sc->add_option("--rearrange-p", sc_a.p, "Rearrangement fraction p")->check(CLI::PositiveNumber);
  add_levy_params(s_sc, sc_a.levy);
  sc_a.out.format = "csv";
  add_output(s_sc, sc_a.out, true);

  GenArgs gen_a;
  auto* s_gen = app.add_subcommand("gen-kernel", "Green kernel of a random transient chain");
  s_gen->add_option("--n", gen_a.n, "States")->check(CLI::Range(1, 1000));
  s_gen->add_option("--seed", gen_a.seed, "Seed");
  s_gen->add_option("--kill-min", gen_a.kill_min, "Smallest killing probability")->check(CLI::Range(0.0, 1.0));
  add_output(s_gen, gen_a.out, false);

  LevyArgs lv_a;
  auto* s_lv = app.add_subcommand("levy", "Levy potential kernels and the log-power family");
  add_levy_params(s_lv, lv_a.lp);
  s_lv->add_option("--psi", lv_a.psi, "Characteristic exponent at lambda");
  s_lv->add_option("--u", lv_a.u, "u(z), u(-z) and their parts");
  s_lv->add_option("--sigma2", lv_a.sigma2, "sigma^2(z)");
  s_lv->add_flag("--classify", lv_a.classify, "Classify (gamma, delta, p)");
  s_lv->add_option("--scan-thm16", lv_a.thm16, "Comma-separated n values");
  s_lv->add_option("--thm16-cut", lv_a.thm16_cut, "Cut for the scan (default 1 if delta = 0, else e^2)");
  s_lv->add_option("--kernel", lv_a.kernel, "Points file");
  s_lv->add_option("--thm15", lv_a.thm15, "Comma-separated z values");
  s_lv->add_option("--cor14", lv_a.cor14, "Comma-separated z values");
  s_lv->add_option("--asymmetry", lv_a.asym, "Comma-separated z values");
  add_output(s_lv, lv_a.out, true);

  ClassifyArgs cl_a;
  auto* s_cl = app.add_subcommand("classify", "Boundedness verdict for the log-power family (gamma, delta, p, q)");
  s_cl->add_option("--gamma", cl_a.gamma, "gamma")->required();
  s_cl->add_option("--delta", cl_a.delta, "delta");
  s_cl->add_option("--p", cl_a.p, "p");
  s_cl->add_option("--q", cl_a.q, "q (default 1 - p)");
  add_output(s_cl, cl_a.out, false);

  ValidateArgs va_a;
  auto* s_va = app.add_subcommand("validate-kernel", "Check that K^{-1} is an M-matrix with positive row sums");
  s_va->add_option("kernel", va_a.kernel, "Kernel file")->required();
  s_va->add_option("--tol", va_a.tol, "Tolerance");
  add_output(s_va, va_a.out, false);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitValidation;
  }

  try {
    if (s_perm->parsed()) emit(cmd_permanent(perm_a), perm_a.out, out);
    if (s_lap->parsed()) emit(cmd_laplace(lap_a), lap_a.out, out);
    if (s_z->parsed()) emit(cmd_zdist(z_a), z_a.out, out);
    if (s_smp->parsed()) {
      smp_a.workers = workers;
      emit(cmd_sample(smp_a), smp_a.out, out);
    }
    if (s_mc->parsed()) {
      mc_a.workers = workers;
      emit(cmd_mc_validate(mc_a), mc_a.out, out);
    }
    if (s_g->parsed()) emit(cmd_gamma_tail(g_a), g_a.out, out);
    if (s_b->parsed()) emit(cmd_bounds(b_a), b_a.out, out);
    if (s_sc->parsed()) emit(cmd_unbounded_scan(sc_a), sc_a.out, out);
    if (s_gen->parsed()) emit(cmd_gen_kernel(gen_a), gen_a.out, out);
    if (s_lv->parsed()) emit(cmd_levy(lv_a), lv_a.out, out);
    if (s_cl->parsed()) emit(cmd_classify(cl_a), cl_a.out, out);
    if (s_va->parsed()) {
      bool passed = false;
      emit(cmd_validate_kernel(va_a, passed), va_a.out, out);
      if (!passed) return kExitValidation;
    }
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return e.is_validation() ? kExitValidation : kExitInternal;
  } catch (const std::exception& e) {
    err << "internal error: " << e.what() << "\n";
    return kExitInternal;
  }
  return kExitOk;
}

}  // namespace perm::cli
