#pragma once

#include <optional>
#include <string_view>
#include <utility>

namespace sdgp {

enum class Regime { L2, SUP, ANY };

std::string_view to_string(Regime r);

/// The exponent pair (alpha, beta) of the covariance
/// K(t,s) = 2^{2b+1} (ts)^a / (t+s)^{2b+1}.
///
/// Plain aggregate: validate() is the gate for user input. Internal code
/// constructs derived pairs directly (e.g. the time-inverted exponent
/// 2b+1-a, which may be zero).
struct ProcessParams {
  double alpha = 1.0;
  double beta = 0.0;

  friend bool operator==(const ProcessParams&, const ProcessParams&) = default;
};

/// Checks the inequalities for the regime and returns the pair.
///   ANY: beta > -1/2, alpha > 0
///   L2 : alpha > beta > -1/2
///   SUP: alpha > beta + 1/2 > 0
/// Throws DomainError naming the violated inequality.
ProcessParams validate(double alpha, double beta, Regime regime);

struct RegimeInfo {
  double H = 0.0;       ///< self-similarity index alpha - beta - 1/2
  double gamma = 0.0;   ///< same value, as used in the Hoelder estimate
  double lambda = 0.0;  ///< Hoelder exponent min(H, 1); meaningful when sup_valid
  bool l2_valid = false;
  bool sup_valid = false;
};

RegimeInfo regime_info(const ProcessParams& p);

/// Closed-form constants of the small-deviation and entropy laws.
struct TheoryConstants {
  double kappa_l2 = 0.0;  ///< -log P(L2 ball) ~ kappa_l2 |log eps|^3
  double d_l2 = 0.0;      ///< -log e_n(u: L2 -> L2) ~ d_l2 n^{1/3}
  double rho = 0.0;       ///< sqrt(Gamma(2b+1) 2^{-(2b+1)})
  // Populated only in the sup regime.
  std::optional<double> d_sup_lower;   ///< lambda/(1/2+lambda) * d_l2
  std::optional<double> d_sup_upper;   ///< d at (alpha - 1/2, beta)
  std::optional<std::pair<double, double>> kappa_sup_interval;
};

/// Requires the L2 regime (throws DomainError otherwise). Evaluated at
/// 256 bits and rounded to double.
TheoryConstants theory_constants(const ProcessParams& p);

/// (3 (alpha-beta) pi^2 log 2)^{1/3}; defined for alpha > beta.
double entropy_constant(double alpha, double beta);

/// 1 / (3 (alpha-beta) pi^2); defined for alpha > beta.
double small_ball_constant(double alpha, double beta);

}  // namespace sdgp
