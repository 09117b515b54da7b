#include "acceptance.hpp"

#include <unistd.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <map>
#include <memory>
#include <numbers>
#include <optional>
#include <sstream>

#include "cli.hpp"
#include "sdgp/entropy.hpp"
#include "sdgp/errors.hpp"
#include "sdgp/io.hpp"
#include "sdgp/kernels.hpp"
#include "sdgp/parallel.hpp"
#include "sdgp/params.hpp"
#include "sdgp/paths.hpp"
#include "sdgp/smallball.hpp"

namespace sdgp::acceptance {
namespace {

using Json = nlohmann::ordered_json;

const char* const kNames[kCriterionCount] = {
    "saddlepoint-oracles",   "nystrom-rank-one",   "laptev-slope",    "entropy-rate",
    "sup-entropy-sandwich",  "l2-small-ball-rate", "saddlepoint-vs-mc", "covariance-reproduction",
    "sup-small-ball-properties", "determinism"};

std::vector<std::size_t> k_grid() {
  std::vector<std::size_t> k;
  for (int i = 0; i <= 12; ++i) {
    k.push_back(static_cast<std::size_t>(std::llround(64.0 * std::pow(2.0, i / 2.0))));
  }
  return k;
}

double rel_err(double value, double expected) { return std::fabs(value - expected) / std::fabs(expected); }

struct ParamData {
  ProcessParams params;
  QuadGrid grid;
  Spectrum spec;
  HybridSpectrum uustar;
  HybridSpectrum kl;
};

class Runner {
 public:
  explicit Runner(const Options& o) : o_(o) {}

  CriterionResult evaluate(int id) {
    CriterionResult r;
    r.id = id;
    r.name = kNames[id - 1];
    progress("criterion " + std::to_string(id) + " (" + r.name + ")");
    try {
      switch (id) {
        case 1: c1(r); break;
        case 2: c2(r); break;
        case 3: c3(r); break;
        case 4: c4(r); break;
        case 5: c5(r); break;
        case 6: c6(r); break;
        case 7: c7(r); break;
        case 8: c8(r); break;
        case 9: c9(r); break;
        case 10: c10(r); break;
        default: throw DomainError("no criterion " + std::to_string(id));
      }
    } catch (const std::exception& e) {
      r.pass = false;
      r.detail = std::string("error: ") + e.what();
    }
    return r;
  }

 private:
  void progress(const std::string& line) const {
    if (o_.progress) o_.progress(line);
  }

  const ParamData& data(double alpha, double beta) {
    auto key = std::make_pair(alpha, beta);
    auto it = cache_.find(key);
    if (it != cache_.end()) return *it->second;
    auto d = std::make_unique<ParamData>();
    d->params = validate(alpha, beta, Regime::L2);
    d->grid = build_grid(o_.grid, o_.precision);
    SpectrumOptions opts;
    opts.retain_vectors = regime_info(d->params).sup_valid;
    progress("spectrum (" + format_double(alpha) + "," + format_double(beta) + ") on " +
             std::to_string(d->grid.size()) + " nodes at " + std::to_string(o_.precision.bits) +
             " bits");
    d->spec = spectrum(KernelId::UUStar, d->params, d->grid, std::min(o_.count, d->grid.size()), opts);
    progress("trusted eigenvalues: " + std::to_string(d->spec.trusted_count));
    d->uustar = extend_tail(d->spec, std::max(o_.n_target, d->spec.trusted_count));
    d->kl = d->uustar.scaled(-std::log(uustar_to_covariance_ratio(beta)));
    return *cache_.emplace(key, std::move(d)).first->second;
  }

  void c1(CriterionResult& r) {
    const double exact2 = 1.0 - std::exp(-1.0);
    const double exact1 = std::erf(1.0 / std::numbers::sqrt2);
    const LogProbEstimate two = saddlepoint(make_chi_square({1.0, 1.0}), 2.0);
    const LogProbEstimate one = saddlepoint(make_chi_square({1.0}), 1.0);
    const double e2 = rel_err(two.p, exact2);
    const double e1 = rel_err(one.p, exact1);
    r.measured = {{"two_weights", {{"p", two.p}, {"exact", exact2}, {"relative_error", e2}, {"tolerance", 0.02}}},
                  {"one_weight", {{"p", one.p}, {"exact", exact1}, {"relative_error", e1}, {"tolerance", 0.03}}}};
    r.pass = e2 <= 0.02 && e1 <= 0.03;
    std::ostringstream s;
    s << "P(1,1;2)=" << two.p << " err " << e2 << ", P(1;1)=" << one.p << " err " << e1;
    r.detail = s.str();
  }

  void c2(CriterionResult& r) {
    GridSpec g{20, 10, true};
    const QuadGrid grid = build_grid(g, o_.precision);
    SpectrumOptions opts;
    opts.check_refinement = false;
    KernelFn ts = [](const BigReal& t, const BigReal& s) { return t * s; };
    const Spectrum spec = spectrum(ts, "ts", grid, 4, opts);
    const BigReal third = BigReal(1L, o_.precision) / BigReal(3L, o_.precision);
    const BigReal err = abs(spec.eigenvalues.front() - third);
    const double e = err.to_double();
    r.measured = {{"top_eigenvalue", spec.eigenvalues.front().to_string(40)},
                  {"abs_error", e},
                  {"tolerance", 1e-20},
                  {"precision_bits", o_.precision.bits},
                  {"nodes", grid.size()}};
    r.pass = e <= 1e-20;
    r.detail = "lambda_1 - 1/3 = " + err.to_string(3);
  }

  void c3(CriterionResult& r) {
    r.pass = true;
    std::ostringstream s;
    for (double alpha : {1.0, 2.0}) {
      const ParamData& d = data(alpha, 0.0);
      const LaptevFit f = laptev_fit(d.spec);
      const double expected = 2.0 * std::numbers::pi * std::sqrt(alpha);
      const double e = rel_err(f.slope, expected);
      const bool ok = d.spec.trusted_count >= 60 && e <= 0.10;
      r.measured[key(alpha, 0.0)] = {{"trusted_count", d.spec.trusted_count},
                                     {"slope", f.slope},
                                     {"expected", expected},
                                     {"relative_error", e},
                                     {"r_squared", f.r_squared},
                                     {"fit_range", {f.n_first, f.n_last}}};
      r.pass = r.pass && ok;
      s << key(alpha, 0.0) << ": slope " << f.slope << " vs " << expected << " (trusted "
        << d.spec.trusted_count << ") ";
    }
    r.detail = s.str();
  }

  void c4(CriterionResult& r) {
    r.pass = true;
    std::ostringstream s;
    for (double alpha : {1.0, 2.0}) {
      const ParamData& d = data(alpha, 0.0);
      const EntropySequence seq = entropy_curve(d.uustar, k_grid());
      const SlopeFit f = asymptotic_slope(seq);
      const double expected = entropy_constant(alpha, 0.0);
      const double e = rel_err(f.slope, expected);
      r.measured[key(alpha, 0.0)] = {{"slope", f.slope},
                                     {"expected", expected},
                                     {"relative_error", e},
                                     {"r_squared", f.r_squared},
                                     {"max_optimizing_n", seq.points.back().optimizing_n}};
      r.pass = r.pass && e <= 0.15;
      s << key(alpha, 0.0) << ": slope " << f.slope << " vs d=" << expected << " ";
    }
    r.detail = s.str();
  }

  void c5(CriterionResult& r) {
    const ParamData& d = data(1.0, 0.0);
    const TheoryConstants c = theory_constants(d.params);
    const HolderNormEstimate m = holder_norm(d.params, 400);
    const EntropySequence sup = interpolate_sup(entropy_curve(d.uustar, k_grid()), m);
    const SlopeFit f = asymptotic_slope(sup);
    const double lo = 0.85 * *c.d_sup_lower;
    const double hi = 1.15 * *c.d_sup_upper;
    r.measured = {{"slope", f.slope},
                  {"lower_limit", lo},
                  {"upper_limit", hi},
                  {"d_sup_lower", *c.d_sup_lower},
                  {"d_sup_upper", *c.d_sup_upper},
                  {"holder_norm", m.norm_value}};
    r.pass = f.slope >= lo && f.slope <= hi;
    std::ostringstream s;
    s << "slope " << f.slope << " in [" << lo << ", " << hi << "]";
    r.detail = s.str();
  }

  void c6(CriterionResult& r) {
    r.pass = true;
    std::ostringstream s;
    std::vector<double> eps;
    for (int i = 2; i <= 12; ++i) eps.push_back(std::pow(10.0, -i));
    for (double alpha : {1.0, 2.0}) {
      const ParamData& d = data(alpha, 0.0);
      const WeightedChiSquare w = truncate_for(d.kl, eps.back() * eps.back());
      std::vector<std::pair<double, double>> pts;
      Json curve = Json::array();
      for (double e : eps) {
        const LogProbEstimate est = saddlepoint(w, e * e);
        pts.emplace_back(e, est.minus_log_p);
        curve.push_back({e, est.minus_log_p});
      }
      const RateFit f = rate_fit(pts, RateModel::CubicPlusQuadratic);
      const double expected = small_ball_constant(alpha, 0.0);
      const double e = rel_err(f.kappa, expected);
      r.measured[key(alpha, 0.0)] = {{"kappa", f.kappa},
                                     {"quadratic", f.quadratic},
                                     {"expected", expected},
                                     {"relative_error", e},
                                     {"r_squared", f.r_squared},
                                     {"terms", w.size()},
                                     {"curve", curve}};
      r.pass = r.pass && e <= 0.20;
      s << key(alpha, 0.0) << ": kappa " << f.kappa << " vs " << expected << " ";
    }
    r.detail = s.str();
  }

  void c7(CriterionResult& r) {
    const ParamData& d = data(1.0, 0.0);
    const std::vector<double> eps = {0.1, 0.12, 0.15, 0.2, 0.25, 0.3, 0.4, 0.5, 0.6, 0.7};
    const WeightedChiSquare w = truncate_for(d.kl, eps.front() * eps.front());
    Json rows = Json::array();
    std::size_t used = 0;
    double worst = 0.0;
    r.pass = true;
    for (double e : eps) {
      const LogProbEstimate sp = saddlepoint(w, e * e);
      if (sp.p < 0.05 || sp.p > 0.8) continue;
      progress("Monte Carlo L2, eps=" + format_double(e));
      const LogProbEstimate mc = mc_l2(w, e, o_.mc_samples, o_.seed);
      const double se = mc.p_std_error.value_or(0.0);
      const double z = std::fabs(sp.p - mc.p) / se;
      worst = std::max(worst, z);
      ++used;
      r.pass = r.pass && z <= 3.0;
      rows.push_back({{"epsilon", e}, {"p_saddlepoint", sp.p}, {"p_mc", mc.p}, {"mc_std_error", se},
                      {"z", z}, {"form", std::string(to_string(*sp.form))}});
    }
    r.pass = r.pass && used >= 3;
    r.measured = {{"samples", o_.mc_samples}, {"seed", o_.seed}, {"rows", rows}, {"max_z", worst}};
    r.detail = std::to_string(used) + " radii with P in [0.05, 0.8], max |z| = " + format_double(worst);
  }

  void c8(CriterionResult& r) {
    const ParamData& d = data(1.0, 0.0);
    const std::vector<double> times = {0.1, 0.25, 0.5, 0.75, 1.0};
    const std::vector<std::pair<std::size_t, std::size_t>> pairs = {{4, 4}, {4, 2}, {2, 1}, {3, 0}, {1, 1}};
    progress("KL and integral ensembles, " + std::to_string(o_.path_samples) + " paths each");
    const PathEnsemble kl = kl_paths(make_kl_basis(d.params, d.spec, d.grid, times), o_.path_samples, o_.seed);
    const PathEnsemble in = integral_paths(d.params, integral_x_rule(d.params, times), times,
                                           o_.path_samples, o_.seed + 1);
    Json rows = Json::array();
    double worst = 0.0;
    for (auto [i, j] : pairs) {
      const double exact = covariance_k(d.params, times[i], times[j]);
      const CovEstimate a = empirical_cov(kl, i, j);
      const CovEstimate b = empirical_cov(in, i, j);
      const double za = std::fabs(a.value - exact) / a.std_error;
      const double zb = std::fabs(b.value - exact) / b.std_error;
      const double zab = std::fabs(a.value - b.value) / std::hypot(a.std_error, b.std_error);
      worst = std::max({worst, za, zb, zab});
      rows.push_back({{"t", times[i]}, {"s", times[j]}, {"exact", exact}, {"kl", a.value},
                      {"kl_se", a.std_error}, {"integral", b.value}, {"integral_se", b.std_error},
                      {"z_kl", za}, {"z_integral", zb}, {"z_between", zab}});
    }
    r.pass = worst <= 3.0;
    r.measured = {{"paths", o_.path_samples}, {"kl_generator", kl.generator},
                  {"integral_generator", in.generator}, {"rows", rows}, {"max_z", worst}};
    r.detail = "max |z| over 5 pairs and 3 comparisons = " + format_double(worst);
  }

  void c9(CriterionResult& r) {
    const ParamData& d = data(1.0, 0.0);
    const ProcessParams& p = d.params;
    const KlBasis basis = make_kl_basis(p, d.spec, d.grid, graded_time_grid(257));
    const WeightedChiSquare w = make_chi_square(basis.weights);
    const std::vector<double> eps = {0.5, 0.75, 1.0, 1.5, 2.0};
    bool dominated = true;
    bool monotone = true;
    Json rows = Json::array();
    std::optional<LogProbEstimate> prev_sup, prev_l2;
    auto combined = [](const LogProbEstimate& a, const LogProbEstimate& b) {
      return 3.0 * std::hypot(a.p_std_error.value_or(0.0), b.p_std_error.value_or(0.0));
    };
    for (double e : eps) {
      progress("Monte Carlo sup and L2, eps=" + format_double(e));
      const LogProbEstimate sup = mc_sup(p, basis, e, o_.mc_samples, o_.seed);
      const LogProbEstimate l2 = mc_l2(w, e, o_.mc_samples, o_.seed);
      dominated = dominated && sup.p <= l2.p + combined(sup, l2);
      if (prev_sup) monotone = monotone && sup.p + combined(sup, *prev_sup) >= prev_sup->p;
      if (prev_l2) monotone = monotone && l2.p + combined(l2, *prev_l2) >= prev_l2->p;
      prev_sup = sup;
      prev_l2 = l2;
      rows.push_back({{"epsilon", e}, {"p_sup", sup.p}, {"p_l2", l2.p},
                      {"sup_refinement_ok", sup.refinement_ok.value_or(false)}});
    }

    // S on [1, T]: the horizon leaves sd(S(T)) <= eps/10 with variance still
    // decreasing, and doubling it does not move the estimate.
    bool horizon_ok = true;
    Json s_rows = Json::array();
    std::optional<LogProbEstimate> prev_s;
    for (double e : {0.2, 0.3, 0.5}) {
      const double horizon = std::max(s_horizon(p, e), 2.0);
      const double target = 0.01 * e * e;
      bool decay = s_covariance(p, horizon, horizon) <= target * (1.0 + 1e-12);
      double last = s_covariance(p, horizon, horizon);
      for (double f = 1.25; f <= 100.0; f *= 1.25) {
        const double v = s_covariance(p, f * horizon, f * horizon);
        decay = decay && v <= last * (1.0 + 1e-12);
        last = v;
      }
      progress("Monte Carlo S, eps=" + format_double(e) + ", horizon " + format_double(horizon));
      const LogProbEstimate a = mc_s(p, e, s_time_grid(horizon, 200), o_.mc_samples, o_.seed);
      const LogProbEstimate b = mc_s(p, e, s_time_grid(2.0 * horizon, 200), o_.mc_samples, o_.seed);
      const bool stable = std::fabs(a.p - b.p) <= combined(a, b);
      horizon_ok = horizon_ok && decay && stable;
      if (prev_s) monotone = monotone && a.p + combined(a, *prev_s) >= prev_s->p;
      prev_s = a;
      s_rows.push_back({{"epsilon", e}, {"horizon", horizon}, {"variance_decays", decay},
                        {"p", a.p}, {"p_double_horizon", b.p}});
    }
    r.pass = dominated && monotone && horizon_ok;
    r.measured = {{"sup_vs_l2", rows},
                  {"s_process", s_rows},
                  {"sd_s_at_1", std::sqrt(s_covariance(p, 1.0, 1.0))},
                  {"dominated", dominated},
                  {"monotone", monotone},
                  {"horizon_ok", horizon_ok}};
    r.detail = std::string("sup <= L2: ") + (dominated ? "yes" : "no") + ", monotone: " +
               (monotone ? "yes" : "no") + ", S horizon: " + (horizon_ok ? "valid" : "invalid");
  }

  void c10(CriterionResult& r) {
    namespace fs = std::filesystem;
    const fs::path dir = fs::temp_directory_path() / ("sdgp-determinism-" + std::to_string(::getpid()));
    fs::create_directories(dir);
    const std::vector<std::string> small = {"--precision", "256", "--levels", "30", "--order", "8",
                                            "--count", "60", "--n-target", "600"};
    auto with = [&](std::vector<std::string> head, const std::vector<std::string>& tail) {
      head.insert(head.end(), tail.begin(), tail.end());
      return head;
    };
    const std::vector<std::pair<std::string, std::vector<std::string>>> commands = {
        {"constants", {"constants", "--alpha", "2", "--beta", "0.5"}},
        {"spectrum", with({"spectrum", "--alpha", "1", "--beta", "0"}, small)},
        {"entropy", with({"entropy", "--k", "8,16,32,64,128,256"}, small)},
        {"smallball-l2", with({"smallball-l2", "--method", "both", "--samples", "5000",
                               "--epsilon", "0.1,0.3,0.5", "--seed", "7"}, small)},
        {"smallball-sup", with({"smallball-sup", "--samples", "5000", "--seed", "7"}, small)},
        {"smallball-s", {"smallball-s", "--samples", "5000", "--seed", "7", "--epsilon", "0.5,1"}},
        {"simulate-kl", with({"simulate", "--samples", "1000", "--seed", "7"}, small)},
        {"simulate-integral", {"simulate", "--generator", "integral", "--format", "binary",
                               "--samples", "1000", "--seed", "7"}},
    };
    const int saved = thread_count();
    bool all_same = true;
    Json rows = Json::array();
    for (const auto& [name, args] : commands) {
      progress("determinism: " + name);
      std::vector<std::string> outputs;
      bool ok = true;
      for (int threads : {1, 8, 8}) {
        const fs::path file = dir / (name + "-" + std::to_string(outputs.size()));
        std::vector<std::string> a = args;
        a.insert(a.begin(), {"--threads", std::to_string(threads)});
        a.insert(a.end(), {"--output", file.string()});
        std::ostringstream out, err;
        const int code = cli::run(a, out, err);
        if (code != 0) {
          ok = false;
          rows.push_back({{"command", name}, {"exit_code", code}, {"stderr", err.str()}});
          break;
        }
        outputs.push_back(read_text_file(file.string()) + "\n--summary--\n" + out.str());
      }
      const bool same = ok && std::all_of(outputs.begin(), outputs.end(),
                                          [&](const std::string& s) { return s == outputs.front(); });
      if (ok) rows.push_back({{"command", name}, {"identical", same}, {"bytes", outputs.front().size()}});
      all_same = all_same && same;
    }
    set_thread_count(saved);
    std::error_code ec;
    fs::remove_all(dir, ec);
    r.pass = all_same;
    r.measured = {{"runs", "threads 1, 8, 8"}, {"commands", rows}};
    r.detail = all_same ? "all outputs byte-identical" : "outputs differ or a command failed";
  }

  static std::string key(double alpha, double beta) {
    return "(" + format_double(alpha) + "," + format_double(beta) + ")";
  }

  Options o_;
  std::map<std::pair<double, double>, std::unique_ptr<ParamData>> cache_;
};

}  // namespace

std::vector<CriterionResult> run(const Options& options, const std::vector<int>& ids) {
  Runner runner(options);
  std::vector<CriterionResult> out;
  out.reserve(ids.size());
  for (int id : ids) out.push_back(runner.evaluate(id));
  return out;
}

std::vector<CriterionResult> run_all(const Options& options) {
  std::vector<int> ids(kCriterionCount);
  for (int i = 0; i < kCriterionCount; ++i) ids[i] = i + 1;
  return run(options, ids);
}

nlohmann::ordered_json to_json(const std::vector<CriterionResult>& results) {
  Json list = Json::array();
  bool all = true;
  for (const auto& r : results) {
    list.push_back({{"id", r.id}, {"name", r.name}, {"pass", r.pass}, {"measured", r.measured},
                    {"detail", r.detail}});
    all = all && r.pass;
  }
  return {{"criteria", list}, {"all_pass", all}};
}

std::string verdict_line(const CriterionResult& r) {
  return "criterion " + std::to_string(r.id) + " " + (r.pass ? "PASS" : "FAIL") + " " + r.name +
         ": " + r.detail;
}

}  // namespace sdgp::acceptance
