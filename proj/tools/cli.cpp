#include "cli.hpp"

#include <CLI11.hpp>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <json.hpp>
#include <map>
#include <numbers>
#include <optional>
#include <set>
#include <sstream>

#include "acceptance.hpp"
#include "sdgp/entropy.hpp"
#include "sdgp/errors.hpp"
#include "sdgp/io.hpp"
#include "sdgp/kernels.hpp"
#include "sdgp/nystrom.hpp"
#include "sdgp/parallel.hpp"
#include "sdgp/params.hpp"
#include "sdgp/paths.hpp"
#include "sdgp/smallball.hpp"

namespace sdgp::cli {
namespace {

using Json = nlohmann::ordered_json;

/// Every field is optional so that a config file and command-line flags can
/// be layered; defaults are applied per command.
struct ExperimentConfig {
  std::optional<std::string> command;
  std::optional<double> alpha;
  std::optional<double> beta;
  std::optional<int> precision_bits;
  std::optional<int> levels;
  std::optional<int> order;
  std::optional<std::size_t> count;
  std::optional<std::size_t> n_target;
  std::optional<bool> refine;
  std::optional<std::string> kernel;
  std::vector<std::size_t> k_list;
  std::vector<double> epsilon_list;
  std::optional<std::size_t> n_samples;
  std::optional<std::size_t> path_samples;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> output;
  std::optional<std::string> method;
  std::optional<std::string> generator;
  std::optional<std::string> format;
  std::vector<double> times;
  std::optional<std::size_t> points;
  std::optional<std::size_t> holder_resolution;
};

template <typename T>
void take(const Json& j, const char* key, std::optional<T>& dst) {
  if (j.contains(key)) dst = j.at(key).get<T>();
}

template <typename T>
void take(const Json& j, const char* key, std::vector<T>& dst) {
  if (j.contains(key)) dst = j.at(key).get<std::vector<T>>();
}

ExperimentConfig parse_config(const std::string& text) {
  static const std::set<std::string> kKeys = {
      "command", "alpha",   "beta",        "precision_bits", "grid",   "count",
      "n_target", "refine", "kernel",      "k_list",         "epsilon_list",
      "n_samples", "path_samples", "seed", "output",         "method", "generator",
      "format",  "times",   "points",      "holder_resolution"};
  Json j;
  try {
    j = Json::parse(text);
  } catch (const Json::parse_error& e) {
    throw DomainError(std::string("config is not valid JSON: ") + e.what());
  }
  if (!j.is_object()) throw DomainError("config must be a JSON object");
  for (const auto& item : j.items()) {
    if (!kKeys.contains(item.key())) throw DomainError("unknown config key '" + item.key() + "'");
  }
  ExperimentConfig c;
  try {
    take(j, "command", c.command);
    take(j, "alpha", c.alpha);
    take(j, "beta", c.beta);
    take(j, "precision_bits", c.precision_bits);
    if (j.contains("grid")) {
      const Json& g = j.at("grid");
      if (!g.is_object()) throw DomainError("config key 'grid' must be an object");
      for (const auto& item : g.items()) {
        if (item.key() != "levels" && item.key() != "order") {
          throw DomainError("unknown config key 'grid." + item.key() + "'");
        }
      }
      take(g, "levels", c.levels);
      take(g, "order", c.order);
    }
    take(j, "count", c.count);
    take(j, "n_target", c.n_target);
    take(j, "refine", c.refine);
    take(j, "kernel", c.kernel);
    take(j, "k_list", c.k_list);
    take(j, "epsilon_list", c.epsilon_list);
    take(j, "n_samples", c.n_samples);
    take(j, "path_samples", c.path_samples);
    take(j, "seed", c.seed);
    take(j, "output", c.output);
    take(j, "method", c.method);
    take(j, "generator", c.generator);
    take(j, "format", c.format);
    take(j, "times", c.times);
    take(j, "points", c.points);
    take(j, "holder_resolution", c.holder_resolution);
  } catch (const Json::exception& e) {
    throw DomainError(std::string("config value has the wrong type: ") + e.what());
  }
  return c;
}

template <typename T>
void put(std::optional<T>& dst, const std::optional<T>& src) {
  if (src) dst = src;
}

template <typename T>
void put(std::vector<T>& dst, const std::vector<T>& src) {
  if (!src.empty()) dst = src;
}

void overlay(ExperimentConfig& base, const ExperimentConfig& top) {
  put(base.alpha, top.alpha);
  put(base.beta, top.beta);
  put(base.precision_bits, top.precision_bits);
  put(base.levels, top.levels);
  put(base.order, top.order);
  put(base.count, top.count);
  put(base.n_target, top.n_target);
  put(base.refine, top.refine);
  put(base.kernel, top.kernel);
  put(base.k_list, top.k_list);
  put(base.epsilon_list, top.epsilon_list);
  put(base.n_samples, top.n_samples);
  put(base.path_samples, top.path_samples);
  put(base.seed, top.seed);
  put(base.output, top.output);
  put(base.method, top.method);
  put(base.generator, top.generator);
  put(base.format, top.format);
  put(base.times, top.times);
  put(base.points, top.points);
  put(base.holder_resolution, top.holder_resolution);
}

// Command-line flag, then SDGP_PRECISION_BITS, then the library default.
Precision resolve_precision(const ExperimentConfig& c) {
  if (c.precision_bits) return Precision::checked(*c.precision_bits);
  if (const char* env = std::getenv("SDGP_PRECISION_BITS")) {
    char* end = nullptr;
    const long bits = std::strtol(env, &end, 10);
    if (end == env || *end != '\0') throw DomainError("SDGP_PRECISION_BITS is not an integer");
    return Precision::checked(static_cast<int>(bits));
  }
  return Precision{};
}

std::vector<std::size_t> default_k_list() {
  // 64 .. 4096 in steps of sqrt(2).
  std::vector<std::size_t> k;
  for (int i = 0; i <= 12; ++i) k.push_back(static_cast<std::size_t>(std::llround(64.0 * std::pow(2.0, i / 2.0))));
  return k;
}

std::vector<double> decades(int from, int to) {
  std::vector<double> e;
  for (int i = from; i <= to; ++i) e.push_back(std::pow(10.0, -i));
  return e;
}

struct Context {
  const ExperimentConfig& cfg;
  std::ostream& out;
  std::ostream& err;

  void progress(const std::string& line) const { err << "sdgp: " << line << '\n' << std::flush; }

  ProcessParams params(Regime regime) const {
    return validate(cfg.alpha.value_or(1.0), cfg.beta.value_or(0.0), regime);
  }
  GridSpec grid() const { return {cfg.levels.value_or(40), cfg.order.value_or(12)}; }
  std::uint64_t seed() const { return cfg.seed.value_or(1); }

  void emit(const std::string& artifact, const Json& summary) const {
    if (cfg.output) {
      write_text_file(*cfg.output, artifact);
      out << summary.dump(2) << '\n';
    } else {
      out << artifact;
      err << summary.dump() << '\n';
    }
  }
};

Json fit_json(const LaptevFit& f, double expected) {
  return Json{{"slope", f.slope},
              {"intercept", f.intercept},
              {"r_squared", f.r_squared},
              {"n_first", f.n_first},
              {"n_last", f.n_last},
              {"expected_slope", expected},
              {"relative_error", std::fabs(f.slope - expected) / expected}};
}

struct SpectrumRun {
  QuadGrid grid;
  Spectrum spec;
};

SpectrumRun uustar_spectrum(const Context& ctx, const ProcessParams& p, bool vectors) {
  SpectrumRun r;
  r.grid = build_grid(ctx.grid(), resolve_precision(ctx.cfg));
  SpectrumOptions opts;
  opts.retain_vectors = vectors;
  opts.check_refinement = ctx.cfg.refine.value_or(true);
  const std::size_t count = std::min(ctx.cfg.count.value_or(160), r.grid.size());
  ctx.progress("spectrum uu* on " + std::to_string(r.grid.size()) + " nodes at " +
               std::to_string(r.grid.precision.bits) + " bits");
  r.spec = spectrum(KernelId::UUStar, p, r.grid, count, opts);
  ctx.progress("trusted eigenvalues: " + std::to_string(r.spec.trusted_count));
  return r;
}

HybridSpectrum uustar_hybrid(const Context& ctx, const Spectrum& spec) {
  return extend_tail(spec, std::max(ctx.cfg.n_target.value_or(2000), spec.trusted_count));
}

HybridSpectrum kl_hybrid(const ProcessParams& p, const HybridSpectrum& uu) {
  return uu.scaled(-std::log(uustar_to_covariance_ratio(p.beta)));
}

std::optional<Json> rate_summary(const std::vector<LogProbEstimate>& rows, double kappa) {
  std::vector<std::pair<double, double>> pts;
  for (const auto& r : rows) {
    if (!r.bound_only) pts.emplace_back(r.epsilon, r.minus_log_p);
  }
  try {
    Json j = Json::object();
    for (auto [model, name] : {std::pair{RateModel::CubicLog, "cubic_log"},
                               std::pair{RateModel::CubicPlusQuadratic, "cubic_plus_quadratic"}}) {
      const RateFit f = rate_fit(pts, model);
      j[name] = {{"kappa", f.kappa}, {"quadratic", f.quadratic}, {"r_squared", f.r_squared},
                 {"relative_error", std::fabs(f.kappa - kappa) / kappa}};
    }
    return j;
  } catch (const NumericalError&) {
    return std::nullopt;  // too few points or too short a span
  } catch (const DomainError&) {
    return std::nullopt;  // radii outside (0, 1)
  }
}

int cmd_constants(const Context& ctx) {
  const ProcessParams p = ctx.params(Regime::L2);
  const TheoryConstants c = theory_constants(p);
  const RegimeInfo info = regime_info(p);
  Json j{{"alpha", p.alpha}, {"beta", p.beta},          {"H", info.H},
         {"l2_valid", info.l2_valid}, {"sup_valid", info.sup_valid},
         {"kappa_l2", c.kappa_l2}, {"d_l2", c.d_l2},    {"rho", c.rho}};
  if (info.sup_valid) j["lambda"] = info.lambda;
  if (c.d_sup_lower) j["d_sup_lower"] = *c.d_sup_lower;
  if (c.d_sup_upper) j["d_sup_upper"] = *c.d_sup_upper;
  if (c.kappa_sup_interval) {
    j["kappa_sup_interval"] = {c.kappa_sup_interval->first, c.kappa_sup_interval->second};
  }
  const std::string text = j.dump(2) + "\n";
  if (ctx.cfg.output) {
    write_text_file(*ctx.cfg.output, text);
  } else {
    ctx.out << text;
  }
  return kOk;
}

int cmd_spectrum(const Context& ctx) {
  const KernelId id = kernel_from_string(ctx.cfg.kernel.value_or("UUSTAR"));
  const ProcessParams p = ctx.params(id == KernelId::UUStar ? Regime::L2 : Regime::ANY);
  QuadGrid grid = build_grid(ctx.grid(), resolve_precision(ctx.cfg));
  SpectrumOptions opts;
  opts.check_refinement = ctx.cfg.refine.value_or(true);
  ctx.progress("spectrum " + std::string(to_string(id)) + " on " + std::to_string(grid.size()) +
               " nodes at " + std::to_string(grid.precision.bits) + " bits");
  const Spectrum s = spectrum(id, p, grid, std::min(ctx.cfg.count.value_or(160), grid.size()), opts);
  Json summary{{"kernel", s.kernel}, {"trusted_count", s.trusted_count},
               {"floor_count", s.floor_count}, {"rank", s.rank}};
  if (s.trusted_count >= 20) {
    double expected = 2.0 * std::numbers::pi * std::sqrt(p.alpha - p.beta);
    summary["laptev_fit"] = fit_json(laptev_fit(s), expected);
  } else {
    summary["laptev_fit"] = nullptr;
  }
  ctx.emit(spectrum_to_json(s) + "\n", summary);
  return kOk;
}

int cmd_entropy(const Context& ctx) {
  const ProcessParams p = ctx.params(Regime::L2);
  const TheoryConstants c = theory_constants(p);
  const SpectrumRun run = uustar_spectrum(ctx, p, false);
  const HybridSpectrum hybrid = uustar_hybrid(ctx, run.spec);
  std::vector<std::size_t> k_list = ctx.cfg.k_list.empty() ? default_k_list() : ctx.cfg.k_list;

  std::vector<EntropySequence> curves{entropy_curve(hybrid, k_list)};
  curves[0].source = "l2";
  auto slope_json = [&](const EntropySequence& seq) -> Json {
    try {
      const SlopeFit f = asymptotic_slope(seq);
      return {{"slope", f.slope}, {"intercept", f.intercept}, {"r_squared", f.r_squared}};
    } catch (const DomainError&) {
      return nullptr;
    }
  };
  Json summary{{"l2", {{"fit", slope_json(curves[0])}, {"d_l2", c.d_l2}}}};
  if (regime_info(p).sup_valid) {
    const std::size_t resolution = ctx.cfg.holder_resolution.value_or(400);
    ctx.progress("Hoelder norm estimate, resolution " + std::to_string(resolution));
    const HolderNormEstimate m = holder_norm(p, resolution);
    curves.push_back(interpolate_sup(curves[0], m));
    curves[1].source = "sup";
    summary["sup"] = {{"fit", slope_json(curves[1])},
                      {"d_sup_lower", *c.d_sup_lower},
                      {"d_sup_upper", *c.d_sup_upper},
                      {"holder_norm", m.norm_value}};
  }
  ctx.emit(entropy_to_csv(curves), summary);
  return kOk;
}

int cmd_smallball_l2(const Context& ctx) {
  const ProcessParams p = ctx.params(Regime::L2);
  const double kappa = theory_constants(p).kappa_l2;
  const std::string method = ctx.cfg.method.value_or("saddlepoint");
  if (method != "saddlepoint" && method != "mc" && method != "both") {
    throw DomainError("method must be saddlepoint, mc or both");
  }
  std::vector<double> eps = ctx.cfg.epsilon_list.empty() ? decades(2, 12) : ctx.cfg.epsilon_list;
  std::sort(eps.begin(), eps.end());
  const SpectrumRun run = uustar_spectrum(ctx, p, false);
  const HybridSpectrum kl = kl_hybrid(p, uustar_hybrid(ctx, run.spec));
  const WeightedChiSquare w = truncate_for(kl, eps.front() * eps.front());
  ctx.progress("weighted chi-square with " + std::to_string(w.size()) + " terms");

  std::vector<LogProbEstimate> sp_rows, mc_rows;
  for (double e : eps) {
    if (method != "mc") sp_rows.push_back(saddlepoint(w, e * e));
    if (method != "saddlepoint") {
      mc_rows.push_back(mc_l2(w, e, ctx.cfg.n_samples.value_or(100000), ctx.seed()));
    }
  }
  std::vector<LogProbEstimate> rows = sp_rows;
  rows.insert(rows.end(), mc_rows.begin(), mc_rows.end());
  Json summary{{"kappa_l2", kappa}, {"terms", w.size()}, {"tail_mass", w.tail_mass}};
  auto fit = [&](const std::vector<LogProbEstimate>& r) -> Json {
    if (r.empty()) return nullptr;
    const auto j = rate_summary(r, kappa);
    return j ? *j : Json(nullptr);
  };
  summary["rate_fit_saddlepoint"] = fit(sp_rows);
  summary["rate_fit_mc"] = fit(mc_rows);
  ctx.emit(estimates_to_csv(rows), summary);
  return kOk;
}

int cmd_smallball_sup(const Context& ctx) {
  const ProcessParams p = ctx.params(Regime::SUP);
  const TheoryConstants c = theory_constants(p);
  std::vector<double> eps =
      ctx.cfg.epsilon_list.empty() ? std::vector<double>{0.5, 0.75, 1.0, 1.5, 2.0} : ctx.cfg.epsilon_list;
  std::sort(eps.begin(), eps.end());
  const SpectrumRun run = uustar_spectrum(ctx, p, true);
  const std::vector<double> times = graded_time_grid(ctx.cfg.points.value_or(257));
  ctx.progress("KL basis on " + std::to_string(times.size()) + " times");
  const KlBasis basis = make_kl_basis(p, run.spec, run.grid, times);
  std::vector<LogProbEstimate> rows;
  Json flags = Json::array();
  for (double e : eps) {
    rows.push_back(mc_sup(p, basis, e, ctx.cfg.n_samples.value_or(100000), ctx.seed()));
    flags.push_back(rows.back().refinement_ok.value_or(false));
  }
  Json summary{{"terms", basis.weights.size()}, {"refinement_ok", flags}};
  const auto fit = rate_summary(rows, c.kappa_l2);
  summary["rate_fit"] = fit ? *fit : Json(nullptr);
  if (c.kappa_sup_interval) {
    summary["kappa_sup_interval"] = {c.kappa_sup_interval->first, c.kappa_sup_interval->second};
  }
  ctx.emit(estimates_to_csv(rows), summary);
  return kOk;
}

int cmd_smallball_s(const Context& ctx) {
  const ProcessParams p = ctx.params(Regime::SUP);
  const TheoryConstants c = theory_constants(p);
  std::vector<double> eps =
      ctx.cfg.epsilon_list.empty() ? std::vector<double>{0.2, 0.3, 0.5} : ctx.cfg.epsilon_list;
  std::sort(eps.begin(), eps.end());
  std::vector<LogProbEstimate> rows;
  Json horizons = Json::array();
  for (double e : eps) {
    const double horizon = std::max(s_horizon(p, e), 2.0);
    horizons.push_back(horizon);
    ctx.progress("S process, eps=" + format_double(e) + ", horizon " + format_double(horizon));
    const std::vector<double> t = s_time_grid(horizon, ctx.cfg.points.value_or(200));
    rows.push_back(mc_s(p, e, t, ctx.cfg.n_samples.value_or(100000), ctx.seed()));
  }
  Json summary{{"horizons", horizons}};
  const auto fit = rate_summary(rows, c.kappa_l2);
  summary["rate_fit"] = fit ? *fit : Json(nullptr);
  ctx.emit(estimates_to_csv(rows), summary);
  return kOk;
}

int cmd_simulate(const Context& ctx) {
  const std::string generator = ctx.cfg.generator.value_or("kl");
  const std::string format = ctx.cfg.format.value_or("csv");
  if (generator != "kl" && generator != "integral") throw DomainError("generator must be kl or integral");
  if (format != "csv" && format != "binary") throw DomainError("format must be csv or binary");
  const ProcessParams p = ctx.params(generator == "kl" ? Regime::L2 : Regime::ANY);
  const std::vector<double> times =
      ctx.cfg.times.empty() ? std::vector<double>{0.1, 0.25, 0.5, 0.75, 1.0} : ctx.cfg.times;
  const std::size_t n = ctx.cfg.n_samples.value_or(20000);

  PathEnsemble ens;
  if (generator == "kl") {
    for (double t : times) {
      if (!(t >= 0.0 && t <= 1.0)) throw DomainError("kl generator needs times in [0, 1]");
    }
    const SpectrumRun run = uustar_spectrum(ctx, p, true);
    ens = kl_paths(make_kl_basis(p, run.spec, run.grid, times), n, ctx.seed());
  } else {
    ens = integral_paths(p, integral_x_rule(p, times), times, n, ctx.seed());
  }

  Json table = Json::array();
  if (n >= 2) {
    for (std::size_t i = 0; i < times.size(); ++i) {
      for (std::size_t j = 0; j <= i; ++j) {
        const CovEstimate e = empirical_cov(ens, i, j);
        const double exact = covariance_k(p, times[i], times[j]);
        table.push_back({{"t", times[i]}, {"s", times[j]}, {"exact", exact},
                         {"empirical", e.value}, {"std_error", e.std_error}});
      }
    }
  }
  Json summary{{"generator", ens.generator}, {"n_samples", n}, {"covariance", table}};
  ctx.emit(format == "csv" ? ensemble_to_csv(ens) : ensemble_to_binary(ens), summary);
  return kOk;
}

int cmd_report(const Context& ctx) {
  acceptance::Options o;
  o.precision = resolve_precision(ctx.cfg);
  o.grid = ctx.grid();
  o.count = ctx.cfg.count.value_or(o.count);
  o.n_target = ctx.cfg.n_target.value_or(o.n_target);
  o.mc_samples = ctx.cfg.n_samples.value_or(o.mc_samples);
  o.path_samples = ctx.cfg.path_samples.value_or(o.path_samples);
  o.seed = ctx.cfg.seed.value_or(o.seed);
  o.progress = [&](const std::string& line) { ctx.progress(line); };
  const std::vector<acceptance::CriterionResult> results = acceptance::run_all(o);
  const Json report = acceptance::to_json(results);
  const std::string text = report.dump(2) + "\n";
  if (ctx.cfg.output) {
    write_text_file(*ctx.cfg.output, text);
  } else {
    ctx.out << text;
  }
  for (const auto& r : results) ctx.progress(acceptance::verdict_line(r));
  return kOk;
}

void add_process_options(CLI::App* s, ExperimentConfig& c) {
  s->add_option("--alpha", c.alpha, "exponent alpha (default 1)");
  s->add_option("--beta", c.beta, "exponent beta (default 0)");
}

void add_spectrum_options(CLI::App* s, ExperimentConfig& c) {
  s->add_option("--precision", c.precision_bits, "working precision in bits (default 640)");
  s->add_option("--levels", c.levels, "geometric panels (default 40)");
  s->add_option("--order", c.order, "Gauss-Legendre order per panel (default 12)");
  s->add_option("--count", c.count, "eigenvalues to compute (default 160)");
  s->add_option("--n-target", c.n_target, "length of the extrapolated spectrum (default 2000)");
  s->add_flag_callback("--no-refine", [&c] { c.refine = false; }, "skip the refined-grid check");
}

void add_mc_options(CLI::App* s, ExperimentConfig& c) {
  s->add_option("--samples", c.n_samples, "Monte Carlo samples");
  s->add_option("--seed", c.seed, "64-bit seed (default 1)");
}

void add_output_option(CLI::App* s, ExperimentConfig& c) {
  s->add_option("-o,--output", c.output, "artifact path (default: standard output)");
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Small deviations of the Gaussian process family X_{alpha,beta}", "sdgp"};
  app.require_subcommand(0, 1);
  app.fallthrough();
  std::optional<std::string> config_path;
  std::optional<int> threads;
  app.add_option("--config", config_path, "JSON experiment config");
  app.add_option("--threads", threads, "worker cap (default: available cores)")
      ->check(CLI::PositiveNumber);

  ExperimentConfig flags;
  std::map<std::string, CLI::App*> subs;
  auto* constants = subs["constants"] = app.add_subcommand("constants", "closed-form constants");
  add_process_options(constants, flags);
  add_output_option(constants, flags);

  auto* spec = subs["spectrum"] = app.add_subcommand("spectrum", "Nystrom eigenvalues and Laptev fit");
  add_process_options(spec, flags);
  add_spectrum_options(spec, flags);
  spec->add_option("--kernel", flags.kernel, "UUSTAR (default) or COVARIANCE_X");
  add_output_option(spec, flags);

  auto* ent = subs["entropy"] = app.add_subcommand("entropy", "entropy number bounds");
  add_process_options(ent, flags);
  add_spectrum_options(ent, flags);
  ent->add_option("--k", flags.k_list, "k values")->delimiter(',');
  ent->add_option("--holder-resolution", flags.holder_resolution, "grid size of the norm estimate");
  add_output_option(ent, flags);

  auto* l2 = subs["smallball-l2"] = app.add_subcommand("smallball-l2", "L2 small-ball probabilities");
  add_process_options(l2, flags);
  add_spectrum_options(l2, flags);
  add_mc_options(l2, flags);
  l2->add_option("--epsilon", flags.epsilon_list, "radii")->delimiter(',');
  l2->add_option("--method", flags.method, "saddlepoint (default), mc or both");
  add_output_option(l2, flags);

  auto* sup = subs["smallball-sup"] = app.add_subcommand("smallball-sup", "sup-norm Monte Carlo");
  add_process_options(sup, flags);
  add_spectrum_options(sup, flags);
  add_mc_options(sup, flags);
  sup->add_option("--epsilon", flags.epsilon_list, "radii")->delimiter(',');
  sup->add_option("--points", flags.points, "time grid size (default 257)");
  add_output_option(sup, flags);

  auto* s = subs["smallball-s"] = app.add_subcommand("smallball-s", "sup of S on [1, T]");
  add_process_options(s, flags);
  add_mc_options(s, flags);
  s->add_option("--epsilon", flags.epsilon_list, "radii")->delimiter(',');
  s->add_option("--points", flags.points, "time grid size (default 200)");
  add_output_option(s, flags);

  auto* sim = subs["simulate"] = app.add_subcommand("simulate", "sample paths");
  add_process_options(sim, flags);
  add_spectrum_options(sim, flags);
  add_mc_options(sim, flags);
  sim->add_option("--generator", flags.generator, "kl (default) or integral");
  sim->add_option("--times", flags.times, "time grid")->delimiter(',');
  sim->add_option("--format", flags.format, "csv (default) or binary");
  add_output_option(sim, flags);

  auto* rep = subs["report"] = app.add_subcommand("report", "acceptance verdicts");
  add_spectrum_options(rep, flags);
  add_mc_options(rep, flags);
  rep->add_option("--path-samples", flags.path_samples, "paths per generator (default 20000)");
  add_output_option(rep, flags);

  std::vector<const char*> argv{"sdgp"};
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kValidation;
  }

  try {
    ExperimentConfig cfg;
    if (config_path) cfg = parse_config(read_text_file(*config_path));
    std::string command;
    for (const auto& [name, sub] : subs) {
      if (sub->parsed()) command = name;
    }
    if (command.empty()) {
      if (!cfg.command) throw DomainError("no command given (on the command line or in the config)");
      command = *cfg.command;
      if (!subs.contains(command)) throw DomainError("unknown command '" + command + "'");
    } else if (cfg.command && *cfg.command != command) {
      throw DomainError("config command '" + *cfg.command + "' differs from '" + command + "'");
    }
    overlay(cfg, flags);
    cfg.command = command;
    if (threads) set_thread_count(*threads);

    const Context ctx{cfg, out, err};
    if (command == "constants") return cmd_constants(ctx);
    if (command == "spectrum") return cmd_spectrum(ctx);
    if (command == "entropy") return cmd_entropy(ctx);
    if (command == "smallball-l2") return cmd_smallball_l2(ctx);
    if (command == "smallball-sup") return cmd_smallball_sup(ctx);
    if (command == "smallball-s") return cmd_smallball_s(ctx);
    if (command == "simulate") return cmd_simulate(ctx);
    return cmd_report(ctx);
  } catch (const DomainError& e) {
    err << "error: " << e.what() << '\n';
    return kValidation;
  } catch (const NumericalError& e) {
    err << "numerical failure in " << e.stage() << ": " << e.what() << '\n';
    return kNumerical;
  } catch (const IoError& e) {
    err << "i/o error: " << e.what() << '\n';
    return kIo;
  }
}

int run(int argc, const char* const* argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return run(args);
}

}  // namespace sdgp::cli
