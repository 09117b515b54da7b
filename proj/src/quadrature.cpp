#include "sdgp/quadrature.hpp"

#include <cmath>
#include <map>
#include <mutex>
#include <numbers>
#include <string>
#include <utility>

#include "sdgp/errors.hpp"

namespace sdgp {

namespace {

constexpr int kMaxNewton = 200;

// P_n(x) and P_n'(x) by the three-term recurrence.
void legendre(std::size_t n, const BigReal& x, BigReal& pn, BigReal& dpn) {
  const Precision prec = x.precision();
  BigReal p0(1L, prec), p1 = x, p2(prec);
  if (n == 0) {
    pn = p0;
    dpn = BigReal(prec);
    return;
  }
  for (std::size_t k = 2; k <= n; ++k) {
    // k P_k = (2k-1) x P_{k-1} - (k-1) P_{k-2}
    p2 = (x * p1 * static_cast<double>(2 * k - 1) - p0 * static_cast<double>(k - 1)) /
         static_cast<double>(k);
    p0 = std::move(p1);
    p1 = std::move(p2);
    p2 = BigReal(prec);
  }
  pn = p1;
  // (1 - x^2) P_n' = n (P_{n-1} - x P_n)
  BigReal one_minus_x2 = 1.0 - x * x;
  dpn = (p0 - x * p1) * static_cast<double>(n) / one_minus_x2;
}

}  // namespace

GaussLegendreRule gauss_legendre(std::size_t n, Precision precision) {
  if (n == 0) throw DomainError("gauss_legendre: n must be >= 1");

  static std::mutex cache_mutex;
  static std::map<std::pair<std::size_t, int>, GaussLegendreRule> cache;
  {
    std::lock_guard lock(cache_mutex);
    auto it = cache.find({n, precision.bits});
    if (it != cache.end()) return it->second;
  }

  GaussLegendreRule rule;
  rule.nodes.assign(n, BigReal(precision));
  rule.weights.assign(n, BigReal(precision));

  const BigReal pi = BigReal::pi(precision);
  const BigReal stop = ldexp(BigReal(1L, precision), -(precision.bits - 4));
  BigReal pn(precision), dpn(precision);

  // Roots in (0, 1) descending, i = 0 .. ceil(n/2)-1; the middle root of odd n is 0.
  for (std::size_t i = 0; i < (n + 1) / 2; ++i) {
    if (n % 2 == 1 && i == n / 2) {
      legendre(n, BigReal(precision), pn, dpn);
      rule.nodes[i] = BigReal(precision);
      rule.weights[i] = 2.0 / (dpn * dpn);
      continue;
    }
    BigReal x = cos(pi * ((static_cast<double>(i) + 0.75) / (static_cast<double>(n) + 0.5)));
    bool converged = false;
    for (int it = 0; it < kMaxNewton; ++it) {
      legendre(n, x, pn, dpn);
      BigReal dx = pn / dpn;
      x -= dx;
      if (abs(dx) <= stop) {
        converged = true;
        break;
      }
    }
    if (!converged) {
      throw NumericalError("gauss_legendre",
                           "Newton iteration did not converge for root " + std::to_string(i) +
                               " of n=" + std::to_string(n));
    }
    legendre(n, x, pn, dpn);
    rule.nodes[i] = x;
    rule.weights[i] = 2.0 / ((1.0 - x * x) * dpn * dpn);
  }

  // Mirror into ascending order: node[n-1-i] = x_i, node[i] = -x_i.
  GaussLegendreRule sorted;
  sorted.nodes.assign(n, BigReal(precision));
  sorted.weights.assign(n, BigReal(precision));
  for (std::size_t i = 0; i < (n + 1) / 2; ++i) {
    sorted.nodes[n - 1 - i] = rule.nodes[i];
    sorted.weights[n - 1 - i] = rule.weights[i];
    sorted.nodes[i] = -rule.nodes[i];
    sorted.weights[i] = rule.weights[i];
  }

  std::lock_guard lock(cache_mutex);
  cache.emplace(std::make_pair(n, precision.bits), sorted);
  return sorted;
}

GaussLegendreRuleD gauss_legendre_d(std::size_t n) {
  GaussLegendreRule r = gauss_legendre(n, Precision{128});
  GaussLegendreRuleD d;
  for (std::size_t i = 0; i < n; ++i) {
    d.nodes.push_back(r.nodes[i].to_double());
    d.weights.push_back(r.weights[i].to_double());
  }
  return d;
}

}  // namespace sdgp
