#include "sdgp/paths.hpp"

#include <bit>
#include <cmath>
#include <cstring>
#include <sstream>

#include "sdgp/errors.hpp"
#include "sdgp/io.hpp"
#include "sdgp/kernels.hpp"
#include "sdgp/parallel.hpp"
#include "sdgp/quadrature.hpp"
#include "sdgp/rng.hpp"
#include "sdgp/special.hpp"

namespace sdgp {

namespace {

constexpr std::size_t kPathChunk = 256;
constexpr std::uint16_t kBinaryVersion = 1;

// Shared sampler: path s is coeff (nt x m) applied to m normals of stream s.
PathEnsemble sample_linear(const std::vector<double>& coeff, std::size_t m,
                           const std::vector<double>& times, std::size_t n_samples,
                           std::uint64_t seed) {
  PathEnsemble e;
  e.times = times;
  e.n_samples = n_samples;
  e.seed = seed;
  const std::size_t nt = times.size();
  e.samples.assign(n_samples * nt, 0.0);
  parallel_for(n_samples, kPathChunk, [&](std::size_t lo, std::size_t hi) {
    std::vector<double> z(m);
    for (std::size_t s = lo; s < hi; ++s) {
      const NormalStream xi(seed, s);
      for (std::size_t k = 0; k < m; ++k) z[k] = xi.normal(k);
      for (std::size_t i = 0; i < nt; ++i) {
        const double* row = &coeff[i * m];
        double x = 0.0;
        for (std::size_t k = 0; k < m; ++k) x += row[k] * z[k];
        e.samples[s * nt + i] = x;
      }
    }
  });
  return e;
}

}  // namespace

PathEnsemble kl_paths(const KlBasis& basis, std::size_t n_samples, std::uint64_t seed) {
  const std::size_t m = basis.weights.size();
  const std::size_t nt = basis.times.size();
  if (basis.phi.size() != nt * m) throw DomainError("KL basis table has the wrong shape");
  std::vector<double> coeff(nt * m);
  for (std::size_t i = 0; i < nt; ++i) {
    for (std::size_t k = 0; k < m; ++k) coeff[i * m + k] = std::sqrt(basis.weights[k]) * basis.phi[i * m + k];
  }
  PathEnsemble e = sample_linear(coeff, m, basis.times, n_samples, seed);
  e.generator = "kl(terms=" + std::to_string(m) + ")";
  return e;
}

double integral_cutoff(const ProcessParams& params, double t_min, double tol) {
  if (!(t_min > 0.0)) throw DomainError("integral_cutoff needs t_min > 0");
  if (!(params.beta > -0.5)) throw DomainError("integral_cutoff needs beta > -1/2");
  const double a = 2.0 * params.beta + 1.0;
  auto q = [&](double x) { return gamma_q(a, 2.0 * t_min * x); };
  double hi = 1.0 / t_min;
  while (q(hi) > tol) {
    hi *= 2.0;
    if (!std::isfinite(hi)) throw DomainError("integral cutoff condition unsatisfiable");
  }
  double lo = 0.0;
  for (int it = 0; it < 200 && hi - lo > 1e-12 * hi; ++it) {
    const double mid = 0.5 * (lo + hi);
    (q(mid) > tol ? lo : hi) = mid;
  }
  return hi;
}

XRule integral_x_rule(const ProcessParams& params, const std::vector<double>& times, int order,
                      double tol) {
  if (times.empty()) throw DomainError("integral_x_rule needs a time grid");
  double t_min = times.front(), t_max = times.front();
  for (double t : times) {
    if (!(t > 0.0)) throw DomainError("integral representation needs times > 0");
    t_min = std::min(t_min, t);
    t_max = std::max(t_max, t);
  }
  XRule rule;
  rule.cutoff = integral_cutoff(params, t_min, tol);
  const GaussLegendreRuleD gl = gauss_legendre_d(static_cast<std::size_t>(order));
  auto add_panel = [&](double a, double b) {
    const double half = 0.5 * (b - a), mid = 0.5 * (a + b);
    for (std::size_t i = 0; i < gl.nodes.size(); ++i) {
      rule.nodes.push_back(mid + half * gl.nodes[i]);
      rule.weights.push_back(half * gl.weights[i]);
    }
  };
  double x0 = std::ldexp(1.0, -6) / t_max;
  if (x0 >= rule.cutoff) x0 = rule.cutoff;
  add_panel(0.0, x0);
  for (double a = x0; a < rule.cutoff; a *= 2.0) add_panel(a, std::min(2.0 * a, rule.cutoff));
  return rule;
}

PathEnsemble integral_paths(const ProcessParams& params, const XRule& rule,
                            const std::vector<double>& times, std::size_t n_samples,
                            std::uint64_t seed) {
  const std::size_t m = rule.nodes.size();
  const std::size_t nt = times.size();
  const double c = std::sqrt(1.0 / uustar_to_covariance_ratio(params.beta));
  std::vector<double> coeff(nt * m);
  for (std::size_t i = 0; i < nt; ++i) {
    const double t = times[i];
    if (!(t > 0.0)) throw DomainError("integral representation needs times > 0");
    for (std::size_t j = 0; j < m; ++j) {
      const double x = rule.nodes[j];
      coeff[i * m + j] = c * std::pow(t, params.alpha) * std::pow(x, params.beta) *
                         std::exp(-x * t) * std::sqrt(rule.weights[j]);
    }
  }
  PathEnsemble e = sample_linear(coeff, m, times, n_samples, seed);
  e.generator = "integral(cutoff=" + format_double(rule.cutoff) + ",nodes=" + std::to_string(m) + ")";
  return e;
}

PathEnsemble lamperti(const PathEnsemble& ensemble, const ProcessParams& params) {
  const auto& t = ensemble.times;
  if (t.size() < 2) throw DomainError("lamperti needs at least 2 grid times");
  for (double v : t) {
    if (!(v > 0.0)) throw DomainError("lamperti needs positive grid times");
  }
  const double step = std::log(t[1] / t[0]);
  for (std::size_t i = 1; i < t.size(); ++i) {
    if (std::fabs(std::log(t[i] / t[i - 1]) - step) > 1e-9 * std::max(1.0, std::fabs(step))) {
      throw DomainError("lamperti needs an exponential grid t_i = e^{u_i} with equal steps");
    }
  }
  const double h = regime_info(params).H;
  PathEnsemble out = ensemble;
  out.generator = "lamperti(" + ensemble.generator + ")";
  const std::size_t nt = t.size();
  for (std::size_t i = 0; i < nt; ++i) {
    const double u = std::log(t[i]);
    out.times[i] = u;
    const double scale = std::exp(-h * u);
    for (std::size_t s = 0; s < ensemble.n_samples; ++s) out.samples[s * nt + i] *= scale;
  }
  return out;
}

CovEstimate empirical_cov(const PathEnsemble& e, std::size_t i, std::size_t j) {
  const std::size_t n = e.n_samples;
  if (n < 2) throw DomainError("empirical_cov needs at least 2 samples");
  if (i >= e.times.size() || j >= e.times.size()) throw DomainError("grid index out of range");
  double mx = 0.0, my = 0.0;
  for (std::size_t s = 0; s < n; ++s) {
    mx += e.at(s, i);
    my += e.at(s, j);
  }
  const double nn = static_cast<double>(n);
  mx /= nn;
  my /= nn;
  double sxy = 0.0;
  for (std::size_t s = 0; s < n; ++s) sxy += (e.at(s, i) - mx) * (e.at(s, j) - my);
  CovEstimate est;
  est.value = sxy / (nn - 1.0);
  if (n < 3) {
    est.std_error = INFINITY;
    return est;
  }
  // Leave-one-out covariance on centred data (sums of dx, dy vanish):
  // c_k = (sxy - dx dy - dx dy / (n-1)) / (n-2) = (sxy - dx dy n/(n-1)) / (n-2)
  double mean = 0.0, sq = 0.0;
  for (std::size_t s = 0; s < n; ++s) {
    const double p = (e.at(s, i) - mx) * (e.at(s, j) - my);
    const double ck = (sxy - p * nn / (nn - 1.0)) / (nn - 2.0);
    mean += ck;
    sq += ck * ck;
  }
  mean /= nn;
  const double var = std::max(0.0, sq / nn - mean * mean);
  est.std_error = std::sqrt((nn - 1.0) * var);
  return est;
}

std::string ensemble_to_csv(const PathEnsemble& e) {
  std::ostringstream out;
  out << kCsvSchemaLine << '\n';
  const std::size_t nt = e.times.size();
  for (std::size_t i = 0; i < nt; ++i) out << (i ? "," : "") << format_double(e.times[i]);
  out << '\n';
  for (std::size_t s = 0; s < e.n_samples; ++s) {
    for (std::size_t i = 0; i < nt; ++i) out << (i ? "," : "") << format_double(e.at(s, i));
    out << '\n';
  }
  return out.str();
}

namespace {

template <typename T>
void put_le(std::string& out, T v) {
  for (std::size_t b = 0; b < sizeof(T); ++b) out.push_back(static_cast<char>((v >> (8 * b)) & 0xFF));
}

template <typename T>
T get_le(const std::string& in, std::size_t& pos) {
  if (pos + sizeof(T) > in.size()) throw IoError("truncated SDGP binary");
  T v = 0;
  for (std::size_t b = 0; b < sizeof(T); ++b) {
    v |= static_cast<T>(static_cast<unsigned char>(in[pos + b])) << (8 * b);
  }
  pos += sizeof(T);
  return v;
}

}  // namespace

std::string ensemble_to_binary(const PathEnsemble& e) {
  std::string out = "SDGP";
  put_le<std::uint16_t>(out, kBinaryVersion);
  put_le<std::uint32_t>(out, static_cast<std::uint32_t>(e.times.size()));
  put_le<std::uint32_t>(out, static_cast<std::uint32_t>(e.n_samples));
  out.reserve(out.size() + 8 * (e.times.size() + e.samples.size()));
  for (double v : e.times) put_le<std::uint64_t>(out, std::bit_cast<std::uint64_t>(v));
  for (double v : e.samples) put_le<std::uint64_t>(out, std::bit_cast<std::uint64_t>(v));
  return out;
}

PathEnsemble ensemble_from_binary(const std::string& bytes) {
  if (bytes.size() < 4 || bytes.compare(0, 4, "SDGP") != 0) throw IoError("missing SDGP magic");
  std::size_t pos = 4;
  const auto version = get_le<std::uint16_t>(bytes, pos);
  if (version != kBinaryVersion) throw IoError("unsupported SDGP version " + std::to_string(version));
  const auto nt = get_le<std::uint32_t>(bytes, pos);
  const auto ns = get_le<std::uint32_t>(bytes, pos);
  PathEnsemble e;
  e.n_samples = ns;
  e.times.resize(nt);
  e.samples.resize(static_cast<std::size_t>(nt) * ns);
  for (auto& v : e.times) v = std::bit_cast<double>(get_le<std::uint64_t>(bytes, pos));
  for (auto& v : e.samples) v = std::bit_cast<double>(get_le<std::uint64_t>(bytes, pos));
  if (pos != bytes.size()) throw IoError("trailing bytes in SDGP binary");
  return e;
}

}  // namespace sdgp
