#include "sdgp/nystrom.hpp"

#include <algorithm>
#include <cmath>
#include <json.hpp>

#include "sdgp/errors.hpp"
#include "sdgp/linalg.hpp"
#include "sdgp/parallel.hpp"
#include "sdgp/quadrature.hpp"

namespace sdgp {

QuadGrid build_grid(const GridSpec& spec, Precision precision) {
  const int levels = spec.levels;
  const int order = spec.order;
  if (levels < 1) throw DomainError("grid levels must be >= 1");
  if (order < 2) throw DomainError("grid order must be >= 2");
  QuadGrid g;
  g.spec = spec;
  g.precision = precision;
  const GaussLegendreRule rule = gauss_legendre(static_cast<std::size_t>(order), precision);
  const std::size_t n =
      static_cast<std::size_t>(levels + (spec.origin_panel ? 1 : 0)) * static_cast<std::size_t>(order);
  g.nodes.reserve(n);
  g.weights.reserve(n);
  const BigReal one(1L, precision);
  if (spec.origin_panel) {
    BigReal half = ldexp(one, -(levels + 1));
    for (int i = 0; i < order; ++i) {
      g.nodes.push_back(half + half * rule.nodes[i]);
      g.weights.push_back(half * rule.weights[i]);
    }
  }
  for (int j = levels - 1; j >= 0; --j) {
    BigReal half = ldexp(one, -(j + 2));  // panel half-width 2^-(j+2)
    BigReal mid = ldexp(one, -(j + 1)) + half;
    for (int i = 0; i < order; ++i) {
      g.nodes.push_back(mid + half * rule.nodes[i]);
      g.weights.push_back(half * rule.weights[i]);
    }
  }
  g.nodes_d.reserve(n);
  g.weights_d.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    g.nodes_d.push_back(g.nodes[i].to_double());
    g.weights_d.push_back(g.weights[i].to_double());
  }
  return g;
}

namespace {

using Assembler = std::function<void(const QuadGrid&, SymMatrix&)>;

constexpr std::size_t kRowChunk = 4;

Assembler generic_assembler(const KernelFn& kernel) {
  return [kernel](const QuadGrid& g, SymMatrix& m) {
    const std::size_t n = g.size();
    std::vector<BigReal> root_w;
    root_w.reserve(n);
    for (const auto& w : g.weights) root_w.push_back(sqrt(w));
    parallel_for(n, kRowChunk, [&](std::size_t lo, std::size_t hi) {
      for (std::size_t i = lo; i < hi; ++i) {
        for (std::size_t j = i; j < n; ++j) {
          m(i, j) = root_w[i] * root_w[j] * kernel(g.nodes[i], g.nodes[j]);
        }
      }
    });
  };
}

// c (x_i x_j)^a / (x_i + x_j)^{2b+1} with the row factors sqrt(w_i) x_i^a
// computed once.
Assembler homogeneous_assembler(KernelId id, const ProcessParams& p) {
  return [id, p](const QuadGrid& g, SymMatrix& m) {
    const Precision prec = g.precision;
    const std::size_t n = g.size();
    const double b1 = 2.0 * p.beta + 1.0;
    BigReal c = id == KernelId::CovarianceX ? pow(BigReal(2L, prec), b1)
                                            : tgamma(BigReal(b1, prec));
    std::vector<BigReal> f;
    f.reserve(n);
    for (std::size_t i = 0; i < n; ++i) f.push_back(sqrt(g.weights[i]) * pow(g.nodes[i], p.alpha));
    parallel_for(n, kRowChunk, [&](std::size_t lo, std::size_t hi) {
      BigReal ci(prec);
      for (std::size_t i = lo; i < hi; ++i) {
        ci = c * f[i];
        for (std::size_t j = i; j < n; ++j) {
          m(i, j) = ci * f[j] / pow(g.nodes[i] + g.nodes[j], b1);
        }
      }
    });
  };
}

struct RawSpectrum {
  std::vector<BigReal> values;
  std::vector<BigReal> vectors;
  BigReal grid_trace;
  BigReal residual_trace;
  std::size_t rank = 0;
  std::size_t floor_count = 0;
};

RawSpectrum solve(const Assembler& assemble, const QuadGrid& grid, std::size_t count,
                  bool want_vectors, int rank_tol_bits) {
  const std::size_t n = grid.size();
  if (count == 0 || count > n) throw DomainError("spectrum count must be in [1, grid size]");
  const Precision prec = grid.precision;
  SymMatrix m(n, prec);
  assemble(grid, m);

  PsdEigenOptions opts;
  opts.count = count;
  opts.rank_tol_bits = rank_tol_bits;
  opts.jacobi.want_vectors = want_vectors;
  PsdEigenDecomposition d = psd_eigh(m, opts);

  RawSpectrum out;
  out.grid_trace = m.trace();
  out.residual_trace = d.residual_trace;
  for (std::size_t k = count; k < d.eig.values.size(); ++k) out.residual_trace += d.eig.values[k];
  out.rank = d.rank;
  out.values.reserve(count);
  for (std::size_t k = 0; k < count; ++k) {
    out.values.push_back(k < d.eig.values.size() ? d.eig.values[k] : BigReal(prec));
  }
  if (want_vectors) {
    out.vectors.reserve(n * count);
    for (std::size_t row = 0; row < n; ++row) {
      for (std::size_t k = 0; k < count; ++k) {
        out.vectors.push_back(k < d.eig.columns ? d.eig.vector(row, k) : BigReal(prec));
      }
    }
  }
  if (!out.values.empty() && out.values[0].sign() > 0) {
    BigReal floor = ldexp(out.values[0], -(prec.bits - 64));
    while (out.floor_count < count && out.values[out.floor_count] >= floor) ++out.floor_count;
  }
  return out;
}

Spectrum run_spectrum(const Assembler& assemble, KernelFn kernel_fn, std::string name,
                      const ProcessParams& params, const QuadGrid& grid, std::size_t count,
                      const SpectrumOptions& options) {
  RawSpectrum raw = solve(assemble, grid, count, options.retain_vectors, options.rank_tol_bits);

  Spectrum s;
  s.kernel = std::move(name);
  s.params = params;
  s.grid = grid.spec;
  s.precision = grid.precision;
  s.floor_count = raw.floor_count;
  s.grid_trace = std::move(raw.grid_trace);
  s.residual_trace = std::move(raw.residual_trace);
  s.rank = raw.rank;
  s.vectors = std::move(raw.vectors);
  s.kernel_fn = std::move(kernel_fn);

  if (options.check_refinement) {
    GridSpec fine = options.refinement.value_or(GridSpec{grid.spec.levels + 10, grid.spec.order + 2, grid.spec.origin_panel});
    QuadGrid fine_grid = build_grid(fine, grid.precision);
    RawSpectrum ref = solve(assemble, fine_grid, std::min(count, fine_grid.size()), false,
                            options.rank_tol_bits);
    s.refinement_checked = true;
    s.refinement_grid = fine;
    const std::size_t limit = std::min(raw.floor_count, ref.floor_count);
    std::size_t trusted = 0;
    s.refinement_change.reserve(limit);
    for (std::size_t k = 0; k < limit; ++k) {
      const double change = abs((raw.values[k] - ref.values[k]) / ref.values[k]).to_double();
      s.refinement_change.push_back(change);
      if (trusted == k && change < options.refinement_tol) ++trusted;
    }
    s.trusted_count = trusted;
  } else {
    s.trusted_count = raw.floor_count;
  }
  s.eigenvalues = std::move(raw.values);
  return s;
}

}  // namespace

Spectrum spectrum(KernelId id, const ProcessParams& params, const QuadGrid& grid, std::size_t count,
                  const SpectrumOptions& options) {
  if (id == KernelId::CovarianceS) {
    throw DomainError("COVARIANCE_S lives on [1, inf) and has no spectrum on (0, 1]");
  }
  if (!(params.beta > -0.5) || !(params.alpha > 0.0)) {
    throw DomainError("spectrum needs beta > -1/2 and alpha > 0");
  }
  KernelFn fn = [id, params](const BigReal& t, const BigReal& s) {
    return kernel_value(id, params, t, s);
  };
  return run_spectrum(homogeneous_assembler(id, params), std::move(fn), std::string(to_string(id)),
                      params, grid, count, options);
}

Spectrum spectrum(const KernelFn& kernel, const std::string& name, const QuadGrid& grid,
                  std::size_t count, const SpectrumOptions& options) {
  return run_spectrum(generic_assembler(kernel), kernel, name, ProcessParams{}, grid, count, options);
}

namespace {

void check_eigen_index(const Spectrum& spec, std::size_t n) {
  if (!spec.has_vectors()) throw DomainError("spectrum was computed without eigenvectors");
  if (n < 1 || n > spec.trusted_count) {
    throw DomainError("eigenfunction index " + std::to_string(n) + " outside trusted range 1.." +
                      std::to_string(spec.trusted_count));
  }
}

}  // namespace

BigReal eigenfunction_eval(const Spectrum& spec, const QuadGrid& grid, std::size_t n,
                           const BigReal& t) {
  check_eigen_index(spec, n);
  if (!(grid.spec == spec.grid)) throw DomainError("grid does not match the spectrum");
  const std::size_t k = n - 1;
  BigReal acc(spec.precision);
  for (std::size_t j = 0; j < grid.size(); ++j) {
    acc += sqrt(grid.weights[j]) * spec.kernel_fn(t, grid.nodes[j]) * spec.vector(j, k);
  }
  return acc / spec.eigenvalues[k];
}

double eigenfunction_eval(const Spectrum& spec, const QuadGrid& grid, std::size_t n, double t) {
  return eigenfunction_eval(spec, grid, n, BigReal(t, spec.precision)).to_double();
}

std::vector<double> eigenfunction_table(const Spectrum& spec, const QuadGrid& grid,
                                        std::size_t count, const std::vector<double>& times) {
  if (count == 0) return {};
  check_eigen_index(spec, count);
  if (!(grid.spec == spec.grid)) throw DomainError("grid does not match the spectrum");
  const Precision prec = spec.precision;
  const std::size_t n = grid.size();
  std::vector<BigReal> root_w;
  root_w.reserve(n);
  for (const auto& w : grid.weights) root_w.push_back(sqrt(w));
  std::vector<BigReal> inv_lambda;
  inv_lambda.reserve(count);
  for (std::size_t k = 0; k < count; ++k) inv_lambda.push_back(1.0 / spec.eigenvalues[k]);

  std::vector<double> table(times.size() * count);
  parallel_for(times.size(), 1, [&](std::size_t lo, std::size_t hi) {
    std::vector<BigReal> kt;
    kt.reserve(n);
    for (std::size_t j = 0; j < n; ++j) kt.emplace_back(prec);
    BigReal acc(prec), tmp(prec);
    for (std::size_t i = lo; i < hi; ++i) {
      const BigReal t(times[i], prec);
      for (std::size_t j = 0; j < n; ++j) kt[j] = root_w[j] * spec.kernel_fn(t, grid.nodes[j]);
      for (std::size_t k = 0; k < count; ++k) {
        mpfr_set_zero(acc.raw(), 1);
        for (std::size_t j = 0; j < n; ++j) {
          mpfr_mul(tmp.raw(), kt[j].raw(), spec.vector(j, k).raw(), MPFR_RNDN);
          mpfr_add(acc.raw(), acc.raw(), tmp.raw(), MPFR_RNDN);
        }
        table[i * count + k] = (acc * inv_lambda[k]).to_double();
      }
    }
  });
  return table;
}

std::vector<double> kl_weights(const ProcessParams& params, const Spectrum& uustar) {
  const double factor = 1.0 / uustar_to_covariance_ratio(params.beta);
  std::vector<double> w;
  w.reserve(uustar.trusted_count);
  for (std::size_t k = 0; k < uustar.trusted_count; ++k) {
    w.push_back(factor * uustar.eigenvalues[k].to_double());
  }
  return w;
}

LaptevFit laptev_fit(const std::vector<double>& log_values, std::size_t n_first,
                     std::size_t n_last) {
  if (n_first < 1 || n_last > log_values.size() || n_last < n_first + 2) {
    throw NumericalError("laptev_fit", "need at least 3 points in range");
  }
  double sx = 0, sy = 0, sxx = 0, sxy = 0, syy = 0;
  const double m = static_cast<double>(n_last - n_first + 1);
  for (std::size_t n = n_first; n <= n_last; ++n) {
    const double x = std::sqrt(static_cast<double>(n));
    const double y = -log_values[n - 1];
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
    syy += y * y;
  }
  const double vx = sxx - sx * sx / m;
  const double vy = syy - sy * sy / m;
  const double cxy = sxy - sx * sy / m;
  LaptevFit fit;
  fit.slope = cxy / vx;
  fit.intercept = -(sy - fit.slope * sx) / m;
  fit.r_squared = vy > 0 ? std::clamp(cxy * cxy / (vx * vy), 0.0, 1.0) : 1.0;
  fit.n_first = n_first;
  fit.n_last = n_last;
  return fit;
}

LaptevFit laptev_fit(const Spectrum& spec) {
  if (spec.trusted_count < 20) {
    throw NumericalError("laptev_fit", "only " + std::to_string(spec.trusted_count) +
                                           " trusted eigenvalues (need 20)");
  }
  std::vector<double> logs;
  logs.reserve(spec.trusted_count);
  for (std::size_t k = 0; k < spec.trusted_count; ++k) {
    logs.push_back(log(spec.eigenvalues[k]).to_double());
  }
  return laptev_fit(logs, std::max<std::size_t>(1, spec.trusted_count / 4), spec.trusted_count);
}

double HybridSpectrum::tail_mass_after(std::size_t m) const {
  // sum_{n>m} e^{a - b sqrt n} <= int_m^inf e^{a - b sqrt x} dx
  const double b = fit.slope;
  const double root = std::sqrt(static_cast<double>(m));
  return std::exp(fit.intercept - b * root) * 2.0 * (b * root + 1.0) / (b * b);
}

double HybridSpectrum::tail_mass() const { return tail_mass_after(size()); }

HybridSpectrum HybridSpectrum::scaled(double log_factor) const {
  HybridSpectrum h = *this;
  for (double& v : h.log_values) v += log_factor;
  h.fit.intercept += log_factor;
  return h;
}

HybridSpectrum extend_tail(const Spectrum& spec, const LaptevFit& fit, std::size_t n_target) {
  if (fit.r_squared < 0.999) {
    throw NumericalError("extend_tail", "Laptev fit r^2 = " + std::to_string(fit.r_squared) +
                                            " below 0.999");
  }
  if (n_target < spec.trusted_count) throw DomainError("extend_tail: N_target below trusted count");
  HybridSpectrum h;
  h.fit = fit;
  h.computed_count = spec.trusted_count;
  h.log_values.reserve(n_target);
  for (std::size_t k = 0; k < spec.trusted_count; ++k) {
    h.log_values.push_back(log(spec.eigenvalues[k]).to_double());
  }
  for (std::size_t n = spec.trusted_count + 1; n <= n_target; ++n) {
    double v = fit.intercept - fit.slope * std::sqrt(static_cast<double>(n));
    if (!h.log_values.empty()) v = std::min(v, h.log_values.back());
    h.log_values.push_back(v);
  }
  return h;
}

HybridSpectrum extend_tail(const Spectrum& spec, std::size_t n_target) {
  return extend_tail(spec, laptev_fit(spec), n_target);
}

std::string spectrum_to_json(const Spectrum& spec, int digits) {
  nlohmann::ordered_json j;
  j["kernel"] = spec.kernel;
  j["alpha"] = spec.params.alpha;
  j["beta"] = spec.params.beta;
  j["precision_bits"] = spec.precision.bits;
  j["grid"] = {{"levels", spec.grid.levels}, {"order", spec.grid.order}};
  if (spec.grid.origin_panel) j["grid"]["origin_panel"] = true;
  auto values = nlohmann::json::array();
  for (const auto& v : spec.eigenvalues) values.push_back(v.to_string(digits));
  j["eigenvalues"] = std::move(values);
  j["trusted_count"] = spec.trusted_count;
  return j.dump(2);
}

}  // namespace sdgp
