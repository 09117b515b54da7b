#pragma once

// Closed-form kernels of the process family X_{a,b} and of the auxiliary
// process S. Every bivariate function is a template over double and
// BigReal; the multiprecision instantiation feeds the eigensolver, the
// double one everything else.

#include <algorithm>
#include <cmath>
#include <string_view>

#include "sdgp/bigreal.hpp"
#include "sdgp/errors.hpp"
#include "sdgp/params.hpp"
#include "sdgp/special.hpp"

namespace sdgp {

enum class KernelId { CovarianceX, UUStar, CovarianceS };

std::string_view to_string(KernelId id);
KernelId kernel_from_string(std::string_view name);

namespace detail {

template <typename Real>
void check_times(const ProcessParams& p, const Real& t, const Real& s) {
  if (t < 0.0 || s < 0.0) throw DomainError("kernel arguments must be >= 0");
  if (t == 0.0 && s == 0.0 && !(p.alpha > p.beta + 0.5)) {
    throw DomainError("kernel undefined at (0,0) unless alpha > beta+1/2");
  }
}

// (ts)^a / (t+s)^{2b+1}, zero when either argument is zero.
template <typename Real>
Real homogeneous_part(const ProcessParams& p, const Real& t, const Real& s) {
  using std::pow;
  if (t == 0.0 || s == 0.0) return num::lift(0.0, t);
  return pow(t * s, p.alpha) / pow(t + s, 2.0 * p.beta + 1.0);
}

}  // namespace detail

/// K(t,s) = 2^{2b+1} (ts)^a / (t+s)^{2b+1}.
template <typename Real>
Real covariance_k(const ProcessParams& p, const Real& t, const Real& s) {
  using std::pow;
  detail::check_times(p, t, s);
  return pow(num::lift(2.0, t), 2.0 * p.beta + 1.0) * detail::homogeneous_part(p, t, s);
}

/// Kernel of u u*: Gamma(2b+1) (ts)^a / (t+s)^{2b+1}.
template <typename Real>
Real uustar_kernel(const ProcessParams& p, const Real& t, const Real& s) {
  using std::tgamma;
  detail::check_times(p, t, s);
  return tgamma(num::lift(2.0 * p.beta + 1.0, t)) * detail::homogeneous_part(p, t, s);
}

namespace detail {

// t^{2g} - 2 (ts)^a ((t+s)/2)^{-(2b+1)} + s^{2g}, g = a - b - 1/2, clamped at 0.
template <typename Real>
Real increment_closed_form(const ProcessParams& p, Real t, Real s) {
  using std::pow;
  using std::swap;
  if (t < 0.0 || s < 0.0) throw DomainError("increment arguments must be >= 0");
  if (t < s) swap(t, s);
  if (t == s) return num::lift(0.0, t);
  const double two_gamma = 2.0 * (p.alpha - p.beta - 0.5);
  if (s == 0.0) {
    if (!(two_gamma > 0.0)) throw DomainError("increment at s=0 needs alpha > beta+1/2");
    return pow(t, two_gamma);
  }
  Real mid = (t + s) / 2.0;
  Real v = pow(t, two_gamma) - 2.0 * pow(t * s, p.alpha) / pow(mid, 2.0 * p.beta + 1.0) +
           pow(s, two_gamma);
  if (v < 0.0) return num::lift(0.0, t);
  return v;
}

}  // namespace detail

/// E|X(t) - X(s)|^2 = K(t,t) - 2K(t,s) + K(s,s), symmetric in (t,s).
template <typename Real>
Real increment_variance(const ProcessParams& p, const Real& t, const Real& s) {
  return detail::increment_closed_form(p, t, s);
}

/// A(s,t) = int_0^inf |t^a x^b e^{-xt} - s^a x^b e^{-xs}|^2 dx
///        = Gamma(2b+1) 2^{-(2b+1)} * increment_variance(t, s).
template <typename Real>
Real holder_A(const ProcessParams& p, const Real& s, const Real& t) {
  using std::pow;
  using std::tgamma;
  Real b1 = num::lift(2.0 * p.beta + 1.0, t);
  return tgamma(b1) / pow(num::lift(2.0, t), 2.0 * p.beta + 1.0) *
         detail::increment_closed_form(p, t, s);
}

/// Correlation of the stationary Lamperti transform:
/// k(lag) = cosh(lag/2)^{-(2b+1)}.
double stationary_corr(double beta, double lag);

/// Covariance of S(t) = t^{a'} int_0^1 x^b e^{-xt} dB(x), a' = 2b+1-a, on
/// t, s >= 1, by the Ito isometry:
///   (ts)^{a'} gamma_lower(2b+1, t+s) / (t+s)^{2b+1}.
/// Requires the sup regime.
template <typename Real>
Real s_covariance(const ProcessParams& p, const Real& t, const Real& s) {
  using std::pow;
  if (!(p.alpha > p.beta + 0.5) || !(p.beta > -0.5)) {
    throw DomainError("s_covariance needs alpha > beta+1/2 > 0");
  }
  if (t < 1.0 || s < 1.0) throw DomainError("s_covariance is defined for t, s >= 1");
  const double a_prime = 2.0 * p.beta + 1.0 - p.alpha;
  const double b1 = 2.0 * p.beta + 1.0;
  Real sum = t + s;
  return pow(t * s, a_prime) * gamma_lower(num::lift(b1, t), sum) / pow(sum, b1);
}

/// Dispatch on the kernel id (BigReal path used by the Nystrom assembly).
BigReal kernel_value(KernelId id, const ProcessParams& p, const BigReal& t, const BigReal& s);
double kernel_value(KernelId id, const ProcessParams& p, double t, double s);

/// Gamma(2b+1) / 2^{2b+1}: ratio of the u u* kernel to K.
double uustar_to_covariance_ratio(double beta);

}  // namespace sdgp
