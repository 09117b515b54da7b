#include "sdgp/smallball.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "sdgp/errors.hpp"
#include "sdgp/io.hpp"
#include "sdgp/kernels.hpp"
#include "sdgp/linalg.hpp"
#include "sdgp/parallel.hpp"
#include "sdgp/quadrature.hpp"
#include "sdgp/rng.hpp"
#include "sdgp/special.hpp"

namespace sdgp {

namespace {

constexpr std::size_t kSampleChunk = 1024;
constexpr double kZ95 = 1.959963984540054;

}  // namespace

double WeightedChiSquare::total() const {
  double s = 0.0;
  for (double w : weights) s += w;
  return s;
}

WeightedChiSquare make_chi_square(std::vector<double> weights, double tail_mass) {
  if (weights.empty()) throw DomainError("weighted chi-square needs at least one weight");
  for (std::size_t i = 0; i < weights.size(); ++i) {
    if (!(weights[i] > 0.0) || !std::isfinite(weights[i])) {
      throw DomainError("weights must be positive and finite");
    }
    if (i > 0 && weights[i] > weights[i - 1]) throw DomainError("weights must be non-increasing");
  }
  if (!(tail_mass >= 0.0)) throw DomainError("tail mass must be >= 0");
  return {std::move(weights), tail_mass};
}

WeightedChiSquare truncate_for(const HybridSpectrum& kl, double y_min) {
  if (!(y_min > 0.0)) throw DomainError("truncate_for needs y_min > 0");
  const std::size_t size = kl.size();
  // suffix[n] = sum of listed values with index >= n (0-based) plus the
  // closed-form tail beyond the list.
  std::vector<double> suffix(size + 1);
  suffix[size] = kl.tail_mass();
  for (std::size_t n = size; n-- > 0;) suffix[n] = suffix[n + 1] + std::exp(kl.log_values[n]);
  const double target = 1e-2 * y_min;
  for (std::size_t n = 1; n <= size; ++n) {
    if (suffix[n] <= target) {
      std::vector<double> w;
      w.reserve(n);
      for (std::size_t i = 0; i < n; ++i) w.push_back(std::exp(kl.log_values[i]));
      return make_chi_square(std::move(w), suffix[n]);
    }
  }
  throw DomainError("hybrid spectrum of length " + std::to_string(size) +
                    " too short for tail <= 1e-2 * " + format_double(y_min));
}

std::string_view to_string(Method m) {
  return m == Method::Saddlepoint ? "SADDLEPOINT" : "MONTE_CARLO";
}

double log_mgf(const WeightedChiSquare& w, double theta) {
  if (!(theta >= 0.0)) throw DomainError("log_mgf needs theta >= 0");
  double s = 0.0;
  for (double l : w.weights) s += std::log1p(2.0 * theta * l);
  return -0.5 * s;
}

namespace {

double tilted_mean(const WeightedChiSquare& w, double theta) {
  double s = 0.0;
  for (double l : w.weights) s += l / (1.0 + 2.0 * theta * l);
  return s;
}

double tilted_variance(const WeightedChiSquare& w, double theta) {
  double s = 0.0;
  for (double l : w.weights) {
    const double q = l / (1.0 + 2.0 * theta * l);
    s += 2.0 * q * q;
  }
  return s;
}

}  // namespace

double saddlepoint_theta(const WeightedChiSquare& w, double y) {
  const double mean = w.total();
  if (!(y > w.tail_mass)) throw DomainError("saddlepoint needs y above the tail mass");
  if (y > mean) throw DomainError("saddlepoint needs y <= sum of weights");
  if (y == mean) return 0.0;

  // m(theta) < N / (2 theta), so theta = N / (2y) is above the root.
  double hi = static_cast<double>(w.size()) / (2.0 * y);
  double m_hi = tilted_mean(w, hi);
  double lo = hi;
  double m_lo = m_hi;
  while (m_lo <= y) {
    lo *= 0.5;
    if (lo < 1e-300) return 0.0;
    const double m = tilted_mean(w, lo);
    if (!(m >= m_lo)) throw NumericalError("saddlepoint", "m(theta) not decreasing");
    m_lo = m;
  }
  if (m_hi >= y) throw NumericalError("saddlepoint", "root not bracketed");
  double log_lo = std::log(lo), log_hi = std::log(hi);
  for (int it = 0; it < 400 && log_hi - log_lo > 1e-10; ++it) {
    const double mid = 0.5 * (log_lo + log_hi);
    const double m = tilted_mean(w, std::exp(mid));
    if (!(m <= m_lo && m >= m_hi)) throw NumericalError("saddlepoint", "m(theta) not decreasing");
    if (m > y) {
      log_lo = mid;
      m_lo = m;
    } else {
      log_hi = mid;
      m_hi = m;
    }
  }
  return std::exp(0.5 * (log_lo + log_hi));
}

std::string_view to_string(SaddlepointForm f) {
  switch (f) {
    case SaddlepointForm::Contour: return "contour";
    case SaddlepointForm::Direct: return "direct";
    case SaddlepointForm::LugannaniRice: return "lugannani-rice";
    case SaddlepointForm::MeanLimit: return "mean-limit";
  }
  return "?";
}

namespace {

constexpr double kLogTwoPi = 1.8378770664093453;

LogProbEstimate finish(double y, double log_p, SaddlepointForm form) {
  LogProbEstimate est;
  est.epsilon = std::sqrt(y);
  est.method = Method::Saddlepoint;
  est.minus_log_p = std::max(0.0, -log_p);
  est.p = std::exp(-est.minus_log_p);
  est.form = form;
  return est;
}

double mean_limit_log_p(const WeightedChiSquare& w) {
  // 1/2 + k3 / (6 sqrt(2 pi) k2^{3/2})
  double k2 = 0.0, k3 = 0.0;
  for (double l : w.weights) {
    k2 += 2.0 * l * l;
    k3 += 8.0 * l * l * l;
  }
  return std::log(0.5 + k3 / (6.0 * std::sqrt(2.0 * std::numbers::pi) * std::pow(k2, 1.5)));
}

// Lugannani-Rice; returns nullopt-like NaN at the mean.
double lr_log_p(const WeightedChiSquare& w, double y, double theta) {
  const double legendre = -theta * y - log_mgf(w, theta);
  const double w_hat = -std::sqrt(std::max(0.0, 2.0 * legendre));
  const double u_hat = -theta * std::sqrt(tilted_variance(w, theta));
  if (w_hat > -1e-3) return NAN;
  // P = phi(w) [R(-w) + 1/w - 1/u] with R the Mills ratio.
  const double x = -w_hat;
  const double bracket = mills_ratio(x) - 1.0 / x - 1.0 / u_hat;
  if (!(bracket > 0.0)) throw NumericalError("saddlepoint", "non-positive tail correction");
  return -0.5 * x * x - 0.5 * kLogTwoPi + std::log(bracket);
}

// P(sum_{n >= k} lambda_n xi_n^2 <= z). With x = a sin t, a = sqrt(z /
// lambda_k), the remaining budget is z cos^2 t and the integrand is smooth
// on [0, pi/2]; only |x| <= 9 carries mass.
double direct_p(const std::vector<double>& lambda, std::size_t k, double z,
                const GaussLegendreRuleD& gl) {
  if (!(z > 0.0)) return 0.0;
  if (k + 1 == lambda.size()) return std::erf(std::sqrt(z / (2.0 * lambda[k])));
  const double a = std::sqrt(z / lambda[k]);
  const double t_max = std::asin(std::min(1.0, 9.0 / a));
  const double half = 0.5 * t_max;
  double sum = 0.0;
  for (std::size_t i = 0; i < gl.nodes.size(); ++i) {
    const double t = half * (gl.nodes[i] + 1.0);
    const double x = a * std::sin(t), c = std::cos(t);
    sum += gl.weights[i] * normal_pdf(x) * a * c * direct_p(lambda, k + 1, z * c * c, gl);
  }
  return 2.0 * half * sum;
}

double direct_log_p(const WeightedChiSquare& w, double y) {
  static const GaussLegendreRuleD gl = gauss_legendre_d(64);
  return std::log(direct_p(w.weights, 0, y, gl));
}

constexpr std::size_t kMaxContourTerms = 1'000'000;

// Trapezoidal sum of the inversion integral along Re s = -theta. Returns
// NaN when the integrand has not decayed within kMaxContourTerms steps.
double contour_log_p(const WeightedChiSquare& w, double y, double theta_hat) {
  const double v_hat = tilted_variance(w, theta_hat);
  // Three tilted standard deviations past the saddle: costs ~e^4.5 of
  // relative precision, keeps the pole at s = 0 far away and allows a larger
  // step.
  const double theta = theta_hat + 3.0 / std::sqrt(v_hat);
  const double depth = std::max(0.0, -(log_mgf(w, theta_hat) + theta_hat * y));
  const double log_scale = log_mgf(w, theta) + theta * y;
  // Aliasing is at most e^{-2 pi theta / h} <= e^{-(depth + 40)}, about e^-35
  // relative to P; h < 2 pi / y keeps the shifted copies at Y < 0.
  const double budget = std::max(depth + 40.0, 1.001 * theta * y + 1.0);
  const double h = 2.0 * std::numbers::pi * theta / budget;

  std::vector<double> a(w.size());
  double m = 0.0;
  for (std::size_t n = 0; n < w.size(); ++n) {
    a[n] = w.weights[n] / (1.0 + 2.0 * theta * w.weights[n]);
    m += a[n];
  }
  const double drift = y - m;  // zero on the saddle itself

  // Real part of G(u) = e^{Phi(u)} / (theta - iu). Also reports |G|, the
  // decay exponent p = -d log|G| / d log u and the phase speed of G.
  struct Term {
    double re, modulus, decay, speed;
  };
  auto term = [&](double u) {
    double re_phi = 0.0, im_phi = 0.0, decay = 0.0, speed = drift;
    for (std::size_t n = 0; n < a.size(); ++n) {
      const double x = 2.0 * u * a[n];
      if (x < 1e-9) {
        re_phi -= 0.25 * x * x * static_cast<double>(a.size() - n);
        break;
      }
      const double q = x * x / (1.0 + x * x);
      re_phi -= 0.25 * std::log1p(x * x);
      im_phi += 0.5 * (std::atan(x) - x);
      decay += 0.5 * q;
      speed += a[n] * q;
    }
    im_phi -= u * drift;
    const double mag = std::exp(re_phi);
    const double denom = theta * theta + u * u;
    return Term{mag * (theta * std::cos(im_phi) - u * std::sin(im_phi)) / denom,
                mag / std::sqrt(denom), decay + u * u / denom, speed - theta / denom};
  };

  double sum = 0.5 * term(0.0).re;
  const double core = 10.0 / std::sqrt(v_hat);  // past the Gaussian peak
  for (std::size_t j = 1; j <= kMaxContourTerms; ++j) {
    const double u = static_cast<double>(j) * h;
    const Term g = term(u);
    sum += g.re;
    if (u <= core) continue;
    // |G| is decreasing and its phase turns monotonically, so the remaining
    // terms sum to at most |G| (1 + u / (h (p - 1))) (power decay) and to
    // about 2 |G| / |sin(speed h / 2)| (Abel summation of the oscillation).
    double tail = INFINITY;
    if (g.decay > 1.0) tail = g.modulus * (1.0 + u / (h * (g.decay - 1.0)));
    const double turn = std::fabs(std::sin(0.5 * g.speed * h));
    if (g.speed > 0.0 && turn > 1e-3) tail = std::min(tail, 2.0 * g.modulus / turn);
    if (tail <= 1e-10 * std::fabs(sum)) {
      const double integral = h * sum / std::numbers::pi;
      if (!(integral > 0.0)) return NAN;
      return log_scale + std::log(integral);
    }
  }
  return NAN;
}

}  // namespace

LogProbEstimate saddlepoint_lr(const WeightedChiSquare& w, double y) {
  const double theta = saddlepoint_theta(w, y);
  const double lp = lr_log_p(w, y, theta);
  if (std::isnan(lp)) return finish(y, mean_limit_log_p(w), SaddlepointForm::MeanLimit);
  return finish(y, lp, SaddlepointForm::LugannaniRice);
}

LogProbEstimate saddlepoint(const WeightedChiSquare& w, double y) {
  const double theta = saddlepoint_theta(w, y);
  if (w.size() <= kDirectMaxWeights) {
    return finish(y, std::min(0.0, direct_log_p(w, y)), SaddlepointForm::Direct);
  }
  const double lp = contour_log_p(w, y, theta);
  if (!std::isnan(lp)) return finish(y, std::min(0.0, lp), SaddlepointForm::Contour);
  return saddlepoint_lr(w, y);
}

namespace {

LogProbEstimate binomial_estimate(double epsilon, std::size_t hits, std::size_t n,
                                  std::uint64_t seed) {
  LogProbEstimate est;
  est.epsilon = epsilon;
  est.method = Method::MonteCarlo;
  est.n_samples = n;
  est.seed = seed;
  const double nn = static_cast<double>(n);
  const double p = static_cast<double>(hits) / nn;
  const double z2 = kZ95 * kZ95;
  const double centre = (p + z2 / (2 * nn)) / (1 + z2 / nn);
  const double half = kZ95 / (1 + z2 / nn) * std::sqrt(p * (1 - p) / nn + z2 / (4 * nn * nn));
  est.p_low = std::max(0.0, centre - half);
  est.p_high = std::min(1.0, centre + half);
  if (hits == 0) {
    est.bound_only = true;
    est.p = 1.0 - std::pow(0.05, 1.0 / nn);
    est.minus_log_p = -std::log(est.p);
    est.p_std_error = 0.0;
    return est;
  }
  est.p = p;
  const double se = std::sqrt(p * (1 - p) / nn);
  est.p_std_error = se;
  est.minus_log_p = std::max(0.0, -std::log(p));
  est.std_error = se / p;
  return est;
}

void check_mc_args(std::size_t n_samples, double epsilon) {
  if (n_samples < 1000) throw DomainError("Monte Carlo needs n_samples >= 1000");
  if (!(epsilon > 0.0)) throw DomainError("epsilon must be > 0");
}

}  // namespace

LogProbEstimate mc_l2(const WeightedChiSquare& w, double epsilon, std::size_t n_samples,
                      std::uint64_t seed) {
  check_mc_args(n_samples, epsilon);
  const double y = epsilon * epsilon;
  const std::size_t chunks = (n_samples + kSampleChunk - 1) / kSampleChunk;
  std::vector<std::size_t> hits(chunks, 0);
  parallel_for(n_samples, kSampleChunk, [&](std::size_t lo, std::size_t hi) {
    std::size_t h = 0;
    for (std::size_t i = lo; i < hi; ++i) {
      const NormalStream xi(seed, i);
      double s = 0.0;
      for (std::size_t n = 0; n < w.size() && s <= y; ++n) {
        const double z = xi.normal(n);
        s += w.weights[n] * z * z;
      }
      if (s <= y) ++h;
    }
    hits[lo / kSampleChunk] = h;
  });
  std::size_t total = 0;
  for (std::size_t h : hits) total += h;
  return binomial_estimate(epsilon, total, n_samples, seed);
}

std::vector<double> graded_time_grid(std::size_t points, double power) {
  if (points < 2) throw DomainError("time grid needs at least 2 points");
  std::vector<double> t(points);
  for (std::size_t i = 0; i < points; ++i) {
    t[i] = std::pow(static_cast<double>(i) / static_cast<double>(points - 1), power);
  }
  return t;
}

KlBasis make_kl_basis(const ProcessParams& params, const Spectrum& uustar, const QuadGrid& grid,
                      const std::vector<double>& times, std::size_t terms) {
  if (terms == 0) terms = uustar.trusted_count;
  KlBasis b;
  b.weights = kl_weights(params, uustar);
  if (terms > b.weights.size()) throw DomainError("KL basis: more terms than trusted eigenvalues");
  b.weights.resize(terms);
  b.times = times;
  b.phi = eigenfunction_table(uustar, grid, terms, times);
  return b;
}

LogProbEstimate mc_sup(const ProcessParams& params, const KlBasis& basis, double epsilon,
                       std::size_t n_samples, std::uint64_t seed) {
  check_mc_args(n_samples, epsilon);
  if (!regime_info(params).sup_valid) throw DomainError("mc_sup needs alpha > beta+1/2");
  const std::size_t nt = basis.times.size();
  const std::size_t terms = basis.weights.size();
  if (nt < 256) throw DomainError("mc_sup needs a time grid of at least 256 points");
  if (basis.times.front() != 0.0) throw DomainError("mc_sup time grid must start at 0");
  if (basis.phi.size() != nt * terms) throw DomainError("KL basis table has the wrong shape");

  std::vector<double> root(terms);
  for (std::size_t n = 0; n < terms; ++n) root[n] = std::sqrt(basis.weights[n]);

  const std::size_t chunks = (n_samples + kSampleChunk - 1) / kSampleChunk;
  std::vector<std::size_t> hits_full(chunks, 0), hits_half(chunks, 0);
  parallel_for(n_samples, kSampleChunk, [&](std::size_t lo, std::size_t hi) {
    std::vector<double> c(terms);
    std::size_t hf = 0, hh = 0;
    for (std::size_t i = lo; i < hi; ++i) {
      const NormalStream xi(seed, i);
      for (std::size_t n = 0; n < terms; ++n) c[n] = root[n] * xi.normal(n);
      double max_full = 0.0, max_half = 0.0;
      for (std::size_t j = 0; j < nt; ++j) {
        const double* row = &basis.phi[j * terms];
        double x = 0.0;
        for (std::size_t n = 0; n < terms; ++n) x += c[n] * row[n];
        x = std::fabs(x);
        max_full = std::max(max_full, x);
        if (j % 2 == 0) max_half = std::max(max_half, x);
      }
      if (max_full <= epsilon) ++hf;
      if (max_half <= epsilon) ++hh;
    }
    hits_full[lo / kSampleChunk] = hf;
    hits_half[lo / kSampleChunk] = hh;
  });
  std::size_t full = 0, half = 0;
  for (std::size_t c = 0; c < chunks; ++c) {
    full += hits_full[c];
    half += hits_half[c];
  }
  LogProbEstimate est = binomial_estimate(epsilon, full, n_samples, seed);
  const LogProbEstimate coarse = binomial_estimate(epsilon, half, n_samples, seed);
  const double se = std::max(est.p_std_error.value_or(0.0), coarse.p_std_error.value_or(0.0));
  est.refinement_ok = std::fabs(coarse.p - est.p) <= se;
  return est;
}

double s_horizon(const ProcessParams& params, double epsilon) {
  if (!(epsilon > 0.0)) throw DomainError("epsilon must be > 0");
  const double target = 0.01 * epsilon * epsilon;
  auto var = [&](double t) { return s_covariance(params, t, t); };
  if (var(1.0) <= target) return 1.0;
  double lo = 1.0, hi = 2.0;
  while (var(hi) > target) {
    lo = hi;
    hi *= 2.0;
    if (hi > 1e12) throw NumericalError("s_horizon", "variance does not decay to (eps/10)^2");
  }
  while (hi / lo > 1.01) {
    const double mid = std::sqrt(lo * hi);
    (var(mid) > target ? lo : hi) = mid;
  }
  return hi;
}

std::vector<double> s_time_grid(double horizon, std::size_t points) {
  if (!(horizon > 1.0) || points < 2) throw DomainError("s_time_grid needs horizon > 1, points >= 2");
  std::vector<double> t(points);
  const double lh = std::log(horizon);
  for (std::size_t i = 0; i < points; ++i) {
    t[i] = std::exp(lh * static_cast<double>(i) / static_cast<double>(points - 1));
  }
  t.front() = 1.0;
  t.back() = horizon;
  return t;
}

LogProbEstimate mc_s(const ProcessParams& params, double epsilon, const std::vector<double>& times,
                     std::size_t n_samples, std::uint64_t seed) {
  check_mc_args(n_samples, epsilon);
  if (!regime_info(params).sup_valid) throw DomainError("mc_s needs alpha > beta+1/2");
  const std::size_t nt = times.size();
  if (nt < 2) throw DomainError("mc_s needs at least 2 time points");
  const Precision prec{128};
  std::vector<BigReal> tb;
  tb.reserve(nt);
  for (double t : times) tb.emplace_back(t, prec);
  SymMatrix gram(nt, prec);
  parallel_for(nt, 4, [&](std::size_t lo, std::size_t hi) {
    for (std::size_t i = lo; i < hi; ++i) {
      for (std::size_t j = i; j < nt; ++j) gram(i, j) = s_covariance(params, tb[i], tb[j]);
    }
  });
  PsdEigenOptions opts;
  opts.count = 1;
  opts.rank_tol_bits = 70;
  opts.jacobi.want_vectors = true;
  const PsdEigenDecomposition psd = psd_eigh(gram, opts);
  const EigenDecomposition& eig = psd.eig;
  const double top = eig.values.front().to_double();
  if (psd.fallback && eig.values.back().to_double() < -1e-25 * top) {
    throw NumericalError("mc_s", "Gram matrix indefinite: smallest eigenvalue " +
                                     eig.values.back().to_string(6));
  }
  // Factor F = V diag(sqrt(mu)), keeping components above 1e-30 of the top.
  std::size_t rank = 0;
  while (rank < eig.values.size() && eig.values[rank].to_double() > 1e-30 * top) ++rank;
  std::vector<double> factor(nt * rank);
  for (std::size_t i = 0; i < nt; ++i) {
    for (std::size_t k = 0; k < rank; ++k) {
      factor[i * rank + k] = eig.vector(i, k).to_double() * std::sqrt(eig.values[k].to_double());
    }
  }

  const std::size_t chunks = (n_samples + kSampleChunk - 1) / kSampleChunk;
  std::vector<std::size_t> hits(chunks, 0);
  parallel_for(n_samples, kSampleChunk, [&](std::size_t lo, std::size_t hi) {
    std::vector<double> z(rank);
    std::size_t h = 0;
    for (std::size_t s = lo; s < hi; ++s) {
      const NormalStream xi(seed, s);
      for (std::size_t k = 0; k < rank; ++k) z[k] = xi.normal(k);
      bool inside = true;
      for (std::size_t i = 0; i < nt && inside; ++i) {
        const double* row = &factor[i * rank];
        double x = 0.0;
        for (std::size_t k = 0; k < rank; ++k) x += row[k] * z[k];
        inside = std::fabs(x) <= epsilon;
      }
      if (inside) ++h;
    }
    hits[lo / kSampleChunk] = h;
  });
  std::size_t total = 0;
  for (std::size_t h : hits) total += h;
  return binomial_estimate(epsilon, total, n_samples, seed);
}

RateFit rate_fit(const std::vector<std::pair<double, double>>& points, RateModel model) {
  if (points.size() < 5) throw NumericalError("rate_fit", "need at least 5 points");
  double emin = points.front().first, emax = points.front().first;
  for (const auto& [e, v] : points) {
    if (!(e > 0.0 && e < 1.0)) throw DomainError("rate_fit needs eps in (0, 1)");
    emin = std::min(emin, e);
    emax = std::max(emax, e);
  }
  if (emax < 1e3 * emin) throw NumericalError("rate_fit", "eps range spans less than 10^3");

  RateFit fit;
  double mean_y = 0.0;
  for (const auto& pt : points) mean_y += pt.second;
  mean_y /= static_cast<double>(points.size());
  if (model == RateModel::CubicLog) {
    double sxy = 0.0, sxx = 0.0;
    for (const auto& [e, v] : points) {
      const double x3 = std::pow(-std::log(e), 3);
      sxy += x3 * v;
      sxx += x3 * x3;
    }
    fit.kappa = sxy / sxx;
  } else {
    // Normal equations for v ~ a x^3 + b x^2.
    double s66 = 0, s55 = 0, s44 = 0, s3y = 0, s2y = 0;
    for (const auto& [e, v] : points) {
      const double x = -std::log(e);
      const double x2 = x * x, x3 = x2 * x;
      s66 += x3 * x3;
      s55 += x3 * x2;
      s44 += x2 * x2;
      s3y += x3 * v;
      s2y += x2 * v;
    }
    const double det = s66 * s44 - s55 * s55;
    fit.kappa = (s3y * s44 - s2y * s55) / det;
    fit.quadratic = (s66 * s2y - s55 * s3y) / det;
  }
  double ss_res = 0.0, ss_tot = 0.0;
  for (const auto& [e, v] : points) {
    const double x = -std::log(e);
    const double pred = fit.kappa * x * x * x + fit.quadratic * x * x;
    ss_res += (v - pred) * (v - pred);
    ss_tot += (v - mean_y) * (v - mean_y);
  }
  fit.r_squared = ss_tot > 0 ? std::clamp(1.0 - ss_res / ss_tot, 0.0, 1.0) : 1.0;
  return fit;
}

std::string estimates_to_csv(const std::vector<LogProbEstimate>& rows) {
  std::ostringstream out;
  out << kCsvSchemaLine << '\n' << "epsilon,minus_log_p,method,std_error,seed,n_samples\n";
  for (const auto& r : rows) {
    out << format_double(r.epsilon) << ',' << format_double(r.minus_log_p) << ','
        << to_string(r.method) << ',' << (r.std_error ? format_double(*r.std_error) : "") << ','
        << (r.seed ? std::to_string(*r.seed) : "") << ','
        << (r.n_samples ? std::to_string(*r.n_samples) : "") << '\n';
  }
  return out.str();
}

}  // namespace sdgp
