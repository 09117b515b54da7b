#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "sdgp/params.hpp"
#include "sdgp/smallball.hpp"

namespace sdgp {

struct PathEnsemble {
  std::vector<double> times;
  std::vector<double> samples;  ///< n_samples x times.size(), row-major
  std::size_t n_samples = 0;
  std::string generator;        ///< e.g. "kl(terms=87)" or "integral(cutoff=...,nodes=...)"
  std::uint64_t seed = 0;

  double at(std::size_t sample, std::size_t time_index) const {
    return samples[sample * times.size() + time_index];
  }
};

/// X(t_i) = sum_{n<=N} sqrt(lambda_n) xi_n phi_n(t_i), N = basis size.
PathEnsemble kl_paths(const KlBasis& basis, std::size_t n_samples, std::uint64_t seed);

/// Quadrature in the frequency variable x for the integral representation.
struct XRule {
  std::vector<double> nodes;
  std::vector<double> weights;
  double cutoff = 0.0;
};

/// Smallest X with Q(2b+1, 2 t_min X) <= tol, i.e. the variance dropped
/// beyond X is at most tol K(t,t) for every t >= t_min.
double integral_cutoff(const ProcessParams& params, double t_min, double tol = 1e-4);

/// Gauss-Legendre panels [x0 2^k, x0 2^{k+1}] up to the cutoff plus [0, x0],
/// with x0 = 2^-6 / t_max.
XRule integral_x_rule(const ProcessParams& params, const std::vector<double>& times,
                      int order = 10, double tol = 1e-4);

/// X(t) = sqrt(2^{2b+1}/Gamma(2b+1)) t^a sum_j x_j^b e^{-x_j t} sqrt(w_j) Z_j,
/// one set of Z_j per path. Requires every time > 0.
PathEnsemble integral_paths(const ProcessParams& params, const XRule& rule,
                            const std::vector<double>& times, std::size_t n_samples,
                            std::uint64_t seed);

/// Y(u_i) = e^{-H u_i} X(e^{u_i}). The times must form a geometric
/// sequence; the result is indexed by u_i = log t_i.
PathEnsemble lamperti(const PathEnsemble& ensemble, const ProcessParams& params);

struct CovEstimate {
  double value = 0.0;
  double std_error = 0.0;  ///< jackknife
};

/// Unbiased sample covariance of columns i and j.
CovEstimate empirical_cov(const PathEnsemble& ensemble, std::size_t i, std::size_t j);

/// CSV: schema line, then a header row of grid times, then one row per path.
std::string ensemble_to_csv(const PathEnsemble& ensemble);

/// "SDGP", u16 version, u32 grid length, u32 sample count, then the grid
/// times and the samples row-major, all little-endian f64.
std::string ensemble_to_binary(const PathEnsemble& ensemble);
PathEnsemble ensemble_from_binary(const std::string& bytes);

}  // namespace sdgp
