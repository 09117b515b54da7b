#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "sdgp/nystrom.hpp"
#include "sdgp/params.hpp"

namespace sdgp {

/// Y = sum_n lambda_n xi_n^2 with i.i.d. standard normal xi_n.
struct WeightedChiSquare {
  std::vector<double> weights;  ///< positive, non-increasing
  double tail_mass = 0.0;       ///< estimate of the dropped sum_{n>N} lambda_n

  std::size_t size() const noexcept { return weights.size(); }
  double total() const;
};

/// Validates positivity and ordering.
WeightedChiSquare make_chi_square(std::vector<double> weights, double tail_mass = 0.0);

/// Truncates a (KL-scaled) hybrid spectrum at the smallest N with
/// closed-form tail sum_{n>N} lambda_n <= 1e-2 * y_min. Throws
/// DomainError when the hybrid list is too short for that.
WeightedChiSquare truncate_for(const HybridSpectrum& kl, double y_min);

enum class Method { Saddlepoint, MonteCarlo };
std::string_view to_string(Method m);

/// Lists this short are integrated directly; their inversion integrand
/// decays too slowly for the contour sum.
inline constexpr std::size_t kDirectMaxWeights = 4;

/// How a saddlepoint value was obtained.
enum class SaddlepointForm {
  Contour,         ///< trapezoidal inversion along Re s = -theta
  Direct,          ///< nested quadrature over at most kDirectMaxWeights weights
  LugannaniRice,   ///< asymptotic formula (slowly decaying integrand)
  MeanLimit,       ///< y at the mean, skewness-corrected 1/2
};
std::string_view to_string(SaddlepointForm f);

struct LogProbEstimate {
  double epsilon = 0.0;
  double minus_log_p = 0.0;
  Method method = Method::Saddlepoint;
  std::optional<double> std_error;  ///< of minus_log_p (delta method for MC)
  std::optional<std::size_t> n_samples;
  std::optional<std::uint64_t> seed;

  double p = 0.0;                    ///< probability estimate
  std::optional<double> p_std_error; ///< binomial standard error of p
  double p_low = 0.0;                ///< 95% interval (Wilson, MC only)
  double p_high = 0.0;
  /// Zero successes: p is the one-sided 95% Clopper-Pearson upper bound and
  /// minus_log_p the corresponding lower bound.
  bool bound_only = false;
  /// Sup-norm MC: estimate on every other grid point agrees within 1 SE.
  std::optional<bool> refinement_ok;
  std::optional<SaddlepointForm> form;
};

/// Lambda(theta) = -1/2 sum log(1 + 2 theta lambda_n), theta >= 0.
double log_mgf(const WeightedChiSquare& w, double theta);

/// Root of m(theta) = sum lambda_n / (1 + 2 theta lambda_n) = y.
double saddlepoint_theta(const WeightedChiSquare& w, double y);

/// P(Y <= y) for tail_mass < y <= sum lambda_n, evaluated through the
/// saddle point theta of m(theta) = y.
///
/// The inversion integral
///   P = e^{Lambda(theta) + theta y} / pi * int_0^inf Re[e^{Phi(u)} / (theta - iu)] du
/// is summed by the trapezoidal rule with step h < 2 pi / y. Lists of at most
/// kDirectMaxWeights weights skip the inversion and condition on one
/// coordinate at a time: P_N(y) = E[P_{N-1}(y - lambda_1 xi^2)]. Since Y >= 0
/// the aliasing error is at most e^{-2 pi theta / h}, and h is chosen so
/// that this sits ~e^-40 below P. When the integrand decays too slowly to
/// truncate (one or two dominant weights), the Lugannani-Rice formula
///   Phi(w) + phi(w) (1/w - 1/u)
/// is used instead, in log space. All forms work with log P, so deep-tail
/// values do not underflow.
LogProbEstimate saddlepoint(const WeightedChiSquare& w, double y);

/// The Lugannani-Rice value alone (for comparison and tests).
LogProbEstimate saddlepoint_lr(const WeightedChiSquare& w, double y);

/// Fraction of samples with sum_{n<=N} lambda_n xi_n^2 <= eps^2. Sample i
/// uses normals (seed, i, n).
LogProbEstimate mc_l2(const WeightedChiSquare& w, double epsilon, std::size_t n_samples,
                      std::uint64_t seed);

/// Eigen-basis of the covariance operator on a time grid.
struct KlBasis {
  std::vector<double> weights;   ///< lambda_n (covariance eigenvalues)
  std::vector<double> times;     ///< grid, t_0 = 0
  std::vector<double> phi;       ///< times.size() x weights.size(), row-major
};

/// Builds a basis from a retained-vector UUSTAR spectrum, truncated at
/// `terms` (default: trusted count).
KlBasis make_kl_basis(const ProcessParams& params, const Spectrum& uustar, const QuadGrid& grid,
                      const std::vector<double>& times, std::size_t terms = 0);

/// t_i = (i / (points-1))^power, i = 0..points-1.
std::vector<double> graded_time_grid(std::size_t points, double power = 2.0);

/// Fraction of KL paths with max_i |X(t_i)| <= eps. Uses the same normals as
/// mc_l2 with the same seed, so the two estimates are coupled.
LogProbEstimate mc_sup(const ProcessParams& params, const KlBasis& basis, double epsilon,
                       std::size_t n_samples, std::uint64_t seed);

/// Smallest T (to 1%) with sqrt(var S(T)) <= eps / 10.
double s_horizon(const ProcessParams& params, double epsilon);

/// `points` log-spaced times on [1, horizon].
std::vector<double> s_time_grid(double horizon, std::size_t points);

/// Fraction of samples of S on the grid with max |S(t_i)| <= eps. S is
/// drawn through the eigendecomposition of its Gram matrix at 128 bits.
LogProbEstimate mc_s(const ProcessParams& params, double epsilon, const std::vector<double>& times,
                     std::size_t n_samples, std::uint64_t seed);

enum class RateModel { CubicLog, CubicPlusQuadratic };

struct RateFit {
  double kappa = 0.0;      ///< coefficient of |log eps|^3
  double quadratic = 0.0;  ///< coefficient of |log eps|^2 (second model only)
  double r_squared = 0.0;
};

/// Least squares without intercept; needs >= 5 points spanning a factor
/// 10^3 in eps.
RateFit rate_fit(const std::vector<std::pair<double, double>>& points, RateModel model);

/// CSV with the schema line and columns
/// epsilon,minus_log_p,method,std_error,seed,n_samples.
std::string estimates_to_csv(const std::vector<LogProbEstimate>& rows);

}  // namespace sdgp
