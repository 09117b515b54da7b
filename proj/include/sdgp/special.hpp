#pragma once

// Special functions shared by the kernels, small-ball and path modules.
// The incomplete gamma routines are templates over double and BigReal.

#include <cmath>
#include <limits>

#include "sdgp/bigreal.hpp"
#include "sdgp/errors.hpp"

namespace sdgp {

namespace num {

inline double lift(double v, double) { return v; }
inline BigReal lift(double v, const BigReal& like) { return BigReal(v, like.precision()); }

/// Relative convergence tolerance: ~1 ulp in double, 2^-(p/2) in BigReal.
inline double series_tolerance(double) { return 0.5 * std::numeric_limits<double>::epsilon(); }
inline BigReal series_tolerance(const BigReal& like) {
  return ldexp(BigReal(1L, like.precision()), -(like.precision().bits / 2));
}

}  // namespace num

/// Lower and upper incomplete gamma functions gamma(a, x), Gamma(a, x) for
/// a > 0, x >= 0. Series for x < a + 1, Lentz continued fraction otherwise.
template <typename Real>
struct IncompleteGamma {
  Real lower;
  Real upper;
};

template <typename Real>
IncompleteGamma<Real> incomplete_gamma(const Real& a, const Real& x) {
  using std::abs;
  using std::exp;
  using std::log;
  using std::tgamma;
  constexpr int kMaxIter = 100000;

  if (!(a > 0.0) || x < 0.0) throw DomainError("incomplete_gamma: need a > 0, x >= 0");
  const Real tol = num::series_tolerance(a);
  const Real full = tgamma(a);
  if (x == 0.0) return {num::lift(0.0, a), full};

  // x^a e^-x, computed in log space to survive large x
  const Real prefactor = exp(a * log(x) - x);

  if (x < a + 1.0) {
    // gamma(a,x) = x^a e^-x sum_n x^n / (a (a+1) ... (a+n))
    Real ap = a;
    Real term = 1.0 / a;
    Real sum = term;
    for (int n = 0; n < kMaxIter; ++n) {
      ap += 1.0;
      term *= x / ap;
      sum += term;
      if (abs(term) <= abs(sum) * tol) {
        Real lower = sum * prefactor;
        return {lower, full - lower};
      }
    }
    throw NumericalError("incomplete_gamma", "series did not converge");
  }

  // Gamma(a,x) = x^a e^-x / (x+1-a - 1(1-a)/(x+3-a - 2(2-a)/(x+5-a - ...)))
  const Real tiny = num::lift(1e-300, a);
  Real b = x + 1.0 - a;
  Real c = 1.0 / tiny;
  Real d = 1.0 / b;
  Real h = d;
  for (int i = 1; i < kMaxIter; ++i) {
    Real an = -static_cast<double>(i) * (num::lift(static_cast<double>(i), a) - a);
    b += 2.0;
    d = an * d + b;
    if (abs(d) < tiny) d = tiny;
    c = b + an / c;
    if (abs(c) < tiny) c = tiny;
    d = 1.0 / d;
    Real del = d * c;
    h *= del;
    if (abs(del - 1.0) <= tol) {
      Real upper = prefactor * h;
      return {full - upper, upper};
    }
  }
  throw NumericalError("incomplete_gamma", "continued fraction did not converge");
}

template <typename Real>
Real gamma_lower(const Real& a, const Real& x) {
  return incomplete_gamma(a, x).lower;
}

template <typename Real>
Real gamma_upper(const Real& a, const Real& x) {
  return incomplete_gamma(a, x).upper;
}

/// Regularized upper incomplete gamma Q(a, x) = Gamma(a, x) / Gamma(a).
double gamma_q(double a, double x);

/// Standard normal density, distribution function and quantile.
double normal_pdf(double x);
double normal_cdf(double x);
/// log Phi(x), accurate far into the lower tail.
double log_normal_cdf(double x);
/// Mills ratio R(x) = (1 - Phi(x)) / phi(x) for x >= 0.
double mills_ratio(double x);
/// Wichura's AS241 (PPND16), relative accuracy ~1e-16 on (0, 1).
double normal_quantile(double p);

}  // namespace sdgp
