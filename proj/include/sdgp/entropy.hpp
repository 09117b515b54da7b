#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "sdgp/nystrom.hpp"
#include "sdgp/params.hpp"

namespace sdgp {

/// Two-sided bound on e_{k+1} of a diagonal operator with singular values
/// sigma_n. All values are natural logarithms.
struct GksBound {
  double log_lower = 0.0;
  double log_upper = 0.0;
  std::size_t optimizing_n = 0;  ///< smallest maximizing n (1-based)
};

/// lower = sup_n 2^{-k/n} (sigma_1 ... sigma_n)^{1/n}, upper = 6 lower,
/// taken over the whole list. log_sigma must be non-increasing.
GksBound gks_log(const std::vector<double>& log_sigma, std::size_t k);
/// Same, from the singular values themselves (positive, non-increasing).
GksBound gks(const std::vector<double>& sigma, std::size_t k);

struct EntropyPoint {
  std::size_t k = 0;
  double log_lower = 0.0;
  double log_upper = 0.0;
  std::size_t optimizing_n = 0;
};

struct EntropySequence {
  std::vector<EntropyPoint> points;
  std::string source;
};

/// GKS bounds for sigma_n = sqrt(lambda_n(u u*)) taken from a hybrid
/// spectrum. Throws NumericalError("entropy_curve", "tail too short ...")
/// when some optimizing n reaches the end of the list.
EntropySequence entropy_curve(const HybridSpectrum& uustar, const std::vector<std::size_t>& k_list);

struct HolderNormEstimate {
  double lambda = 0.0;
  double norm_value = 0.0;   ///< safety_factor * (holder_part + sup_part)
  double holder_part = 0.0;  ///< max sqrt(A(s,t)) / (t-s)^lambda on the grid
  double sup_part = 0.0;     ///< max_t rho t^gamma
  std::size_t resolution = 0;
  double safety_factor = 2.0;
};

/// Grid estimate of the norm of u: L2[0,inf) -> C_lambda[0,1] over the
/// points t_i = (i/R)^3, i = 0..R. The grid maximum underestimates the
/// true supremum; the safety factor compensates.
HolderNormEstimate holder_norm(const ProcessParams& params, std::size_t resolution,
                               double safety_factor = 2.0);

/// log of 2 M^{1/(2l+1)} e^{2l/(2l+1)} with e given as its logarithm.
double interpolate_sup(double e_l2_log, const HolderNormEstimate& m);

/// Applies interpolate_sup to both columns of an L2 sequence.
EntropySequence interpolate_sup(const EntropySequence& l2, const HolderNormEstimate& m);

enum class BoundSide { Lower, Upper };

struct SlopeFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r_squared = 0.0;
};

/// Least-squares fit of -log(value) = intercept + slope * k^exponent. Needs
/// at least 6 points spanning a factor >= 8 in k.
SlopeFit asymptotic_slope(const EntropySequence& seq, double exponent = 1.0 / 3.0,
                          BoundSide side = BoundSide::Lower);

/// CSV with the schema line and columns k,log_lower,log_upper,optimizing_n.
std::string entropy_to_csv(const EntropySequence& seq);

/// Several curves in one table, with a leading source column.
std::string entropy_to_csv(const std::vector<EntropySequence>& curves);

}  // namespace sdgp
