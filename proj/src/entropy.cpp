#include "sdgp/entropy.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "sdgp/errors.hpp"
#include "sdgp/io.hpp"
#include "sdgp/kernels.hpp"
#include "sdgp/parallel.hpp"

namespace sdgp {

namespace {

void check_log_sigma(const std::vector<double>& log_sigma) {
  if (log_sigma.empty()) throw DomainError("gks: empty singular value list");
  for (std::size_t i = 0; i < log_sigma.size(); ++i) {
    if (!std::isfinite(log_sigma[i])) throw DomainError("gks: singular values must be positive");
    if (i > 0 && log_sigma[i] > log_sigma[i - 1]) {
      throw DomainError("gks: singular values must be non-increasing (index " +
                        std::to_string(i + 1) + ")");
    }
  }
}

GksBound gks_prefix(const std::vector<double>& prefix, std::size_t k) {
  // prefix[n] = sum_{i<n} log sigma_i; maximize (prefix[n] - k log 2) / n
  const double k_log2 = static_cast<double>(k) * std::numbers::ln2;
  GksBound best;
  best.log_lower = -INFINITY;
  for (std::size_t n = 1; n < prefix.size(); ++n) {
    const double v = (prefix[n] - k_log2) / static_cast<double>(n);
    if (v > best.log_lower) {
      best.log_lower = v;
      best.optimizing_n = n;
    }
  }
  best.log_upper = best.log_lower + std::log(6.0);
  return best;
}

std::vector<double> prefix_sums(const std::vector<double>& log_sigma) {
  std::vector<double> prefix(log_sigma.size() + 1, 0.0);
  for (std::size_t i = 0; i < log_sigma.size(); ++i) prefix[i + 1] = prefix[i] + log_sigma[i];
  return prefix;
}

}  // namespace

GksBound gks_log(const std::vector<double>& log_sigma, std::size_t k) {
  if (k < 1) throw DomainError("gks: k must be >= 1");
  check_log_sigma(log_sigma);
  return gks_prefix(prefix_sums(log_sigma), k);
}

GksBound gks(const std::vector<double>& sigma, std::size_t k) {
  std::vector<double> logs;
  logs.reserve(sigma.size());
  for (double s : sigma) {
    if (!(s > 0.0)) throw DomainError("gks: singular values must be positive");
    logs.push_back(std::log(s));
  }
  return gks_log(logs, k);
}

EntropySequence entropy_curve(const HybridSpectrum& uustar, const std::vector<std::size_t>& k_list) {
  std::vector<double> log_sigma;
  log_sigma.reserve(uustar.size());
  for (double v : uustar.log_values) log_sigma.push_back(0.5 * v);
  check_log_sigma(log_sigma);
  const std::vector<double> prefix = prefix_sums(log_sigma);

  EntropySequence seq;
  seq.source = "gks(sqrt(lambda(uu*)))";
  seq.points.resize(k_list.size());
  parallel_for(k_list.size(), 1, [&](std::size_t lo, std::size_t hi) {
    for (std::size_t i = lo; i < hi; ++i) {
      const std::size_t k = k_list[i];
      if (k < 1) throw DomainError("entropy_curve: k must be >= 1");
      const GksBound b = gks_prefix(prefix, k);
      if (b.optimizing_n == log_sigma.size()) {
        throw NumericalError("entropy_curve", "tail too short: optimum for k=" + std::to_string(k) +
                                                  " sits at the last index " +
                                                  std::to_string(log_sigma.size()));
      }
      seq.points[i] = {k, b.log_lower, b.log_upper, b.optimizing_n};
    }
  });
  return seq;
}

HolderNormEstimate holder_norm(const ProcessParams& params, std::size_t resolution,
                               double safety_factor) {
  const RegimeInfo info = regime_info(params);
  if (!info.sup_valid) throw DomainError("holder_norm needs alpha > beta+1/2");
  if (resolution < 2) throw DomainError("holder_norm resolution must be >= 2");
  // Increments between close points cancel to many digits; 192 bits keeps
  // sqrt(A) accurate for the finest spacing (i/R)^3 with R up to ~10^4.
  const Precision prec{192};
  const double lambda = info.lambda;
  std::vector<BigReal> t;
  t.reserve(resolution + 1);
  const BigReal r(static_cast<long>(resolution), prec);
  for (std::size_t i = 0; i <= resolution; ++i) {
    BigReal x = BigReal(static_cast<long>(i), prec) / r;
    t.push_back(x * x * x);
  }

  std::vector<double> row_max(resolution + 1, 0.0);
  parallel_for(resolution + 1, 8, [&](std::size_t lo, std::size_t hi) {
    for (std::size_t j = lo; j < hi; ++j) {
      double best = 0.0;
      for (std::size_t i = 0; i < j; ++i) {
        BigReal a = holder_A(params, t[i], t[j]);
        const double q = (sqrt(a) / pow(t[j] - t[i], lambda)).to_double();
        best = std::max(best, q);
      }
      row_max[j] = best;
    }
  });

  HolderNormEstimate est;
  est.lambda = lambda;
  est.resolution = resolution;
  est.safety_factor = safety_factor;
  est.holder_part = *std::max_element(row_max.begin(), row_max.end());
  // rho t^gamma with gamma > 0 peaks at t = 1
  est.sup_part = std::sqrt(uustar_to_covariance_ratio(params.beta));
  est.norm_value = safety_factor * (est.holder_part + est.sup_part);
  return est;
}

double interpolate_sup(double e_l2_log, const HolderNormEstimate& m) {
  const double l = m.lambda;
  if (!(l > 0.0 && l <= 1.0)) throw DomainError("interpolate_sup needs lambda in (0, 1]");
  if (!(m.norm_value > 0.0)) throw DomainError("interpolate_sup needs a positive norm");
  return std::numbers::ln2 + std::log(m.norm_value) / (2.0 * l + 1.0) +
         (2.0 * l / (2.0 * l + 1.0)) * e_l2_log;
}

EntropySequence interpolate_sup(const EntropySequence& l2, const HolderNormEstimate& m) {
  EntropySequence out;
  out.source = "interpolated sup from " + l2.source;
  out.points.reserve(l2.points.size());
  for (const auto& p : l2.points) {
    out.points.push_back({p.k, interpolate_sup(p.log_lower, m), interpolate_sup(p.log_upper, m),
                          p.optimizing_n});
  }
  return out;
}

SlopeFit asymptotic_slope(const EntropySequence& seq, double exponent, BoundSide side) {
  const auto& pts = seq.points;
  if (pts.size() < 6) throw NumericalError("asymptotic_slope", "need at least 6 points");
  std::size_t kmin = pts.front().k, kmax = pts.front().k;
  for (const auto& p : pts) {
    kmin = std::min(kmin, p.k);
    kmax = std::max(kmax, p.k);
  }
  if (static_cast<double>(kmax) < 8.0 * static_cast<double>(kmin)) {
    throw NumericalError("asymptotic_slope", "k range spans less than a factor 8");
  }
  const double m = static_cast<double>(pts.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0, syy = 0;
  for (const auto& p : pts) {
    const double x = std::pow(static_cast<double>(p.k), exponent);
    const double y = -(side == BoundSide::Lower ? p.log_lower : p.log_upper);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
    syy += y * y;
  }
  const double vx = sxx - sx * sx / m;
  const double vy = syy - sy * sy / m;
  const double cxy = sxy - sx * sy / m;
  SlopeFit f;
  f.slope = cxy / vx;
  f.intercept = (sy - f.slope * sx) / m;
  f.r_squared = vy > 0 ? std::clamp(cxy * cxy / (vx * vy), 0.0, 1.0) : 1.0;
  return f;
}

std::string entropy_to_csv(const EntropySequence& seq) {
  std::ostringstream out;
  out << kCsvSchemaLine << '\n' << "k,log_lower,log_upper,optimizing_n\n";
  for (const auto& p : seq.points) {
    out << p.k << ',' << format_double(p.log_lower) << ',' << format_double(p.log_upper) << ','
        << p.optimizing_n << '\n';
  }
  return out.str();
}

std::string entropy_to_csv(const std::vector<EntropySequence>& curves) {
  std::ostringstream out;
  out << kCsvSchemaLine << '\n' << "source,k,log_lower,log_upper,optimizing_n\n";
  for (const auto& seq : curves) {
    for (const auto& p : seq.points) {
      out << seq.source << ',' << p.k << ',' << format_double(p.log_lower) << ','
          << format_double(p.log_upper) << ',' << p.optimizing_n << '\n';
    }
  }
  return out.str();
}

}  // namespace sdgp
