#include "sdgp/kernels.hpp"

#include <cmath>
#include <string>

namespace sdgp {

std::string_view to_string(KernelId id) {
  switch (id) {
    case KernelId::CovarianceX: return "COVARIANCE_X";
    case KernelId::UUStar: return "UUSTAR";
    case KernelId::CovarianceS: return "COVARIANCE_S";
  }
  return "?";
}

KernelId kernel_from_string(std::string_view name) {
  if (name == "COVARIANCE_X") return KernelId::CovarianceX;
  if (name == "UUSTAR") return KernelId::UUStar;
  if (name == "COVARIANCE_S") return KernelId::CovarianceS;
  throw DomainError("unknown kernel '" + std::string(name) + "'");
}

double stationary_corr(double beta, double lag) {
  if (!(beta > -0.5)) throw DomainError("stationary_corr needs beta > -1/2");
  if (lag < 0.0) throw DomainError("stationary_corr needs lag >= 0");
  // log cosh(x) = x + log1p(e^{-2x}) - log 2, stable for large x
  const double x = 0.5 * lag;
  const double log_cosh = x + std::log1p(std::exp(-2.0 * x)) - std::log(2.0);
  return std::exp(-(2.0 * beta + 1.0) * log_cosh);
}

BigReal kernel_value(KernelId id, const ProcessParams& p, const BigReal& t, const BigReal& s) {
  switch (id) {
    case KernelId::CovarianceX: return covariance_k(p, t, s);
    case KernelId::UUStar: return uustar_kernel(p, t, s);
    case KernelId::CovarianceS: return s_covariance(p, t, s);
  }
  throw DomainError("unknown kernel id");
}

double kernel_value(KernelId id, const ProcessParams& p, double t, double s) {
  switch (id) {
    case KernelId::CovarianceX: return covariance_k(p, t, s);
    case KernelId::UUStar: return uustar_kernel(p, t, s);
    case KernelId::CovarianceS: return s_covariance(p, t, s);
  }
  throw DomainError("unknown kernel id");
}

double uustar_to_covariance_ratio(double beta) {
  return std::tgamma(2.0 * beta + 1.0) / std::pow(2.0, 2.0 * beta + 1.0);
}

}  // namespace sdgp
