#include <doctest.h>

#include <cmath>
#include <random>

#include "sdgp/errors.hpp"
#include "sdgp/kernels.hpp"
#include "sdgp/linalg.hpp"

using namespace sdgp;

namespace {
const ProcessParams kCanonical{1.0, 0.0};
}

TEST_SUITE("kernels") {
  TEST_CASE("covariance examples") {
    CHECK(covariance_k(kCanonical, 1.0, 1.0) == doctest::Approx(1.0));
    CHECK(covariance_k(kCanonical, 1.0, 0.5) == doctest::Approx(2.0 * 0.5 / 1.5));
    CHECK(covariance_k(kCanonical, 0.5, 0.5) == doctest::Approx(0.5));
    CHECK(covariance_k(kCanonical, 0.0, 0.7) == 0.0);
    CHECK_THROWS_AS(covariance_k(kCanonical, -1.0, 0.5), DomainError);
    // (0,0) is only defined in the sup regime
    CHECK(covariance_k(kCanonical, 0.0, 0.0) == 0.0);
    CHECK_THROWS_AS(covariance_k(ProcessParams{0.6, 0.2}, 0.0, 0.0), DomainError);
  }

  TEST_CASE("uu* kernel examples") {
    CHECK(uustar_kernel(kCanonical, 1.0, 1.0) == doctest::Approx(0.5));
    CHECK(uustar_kernel(ProcessParams{1.0, 1.0}, 1.0, 1.0) == doctest::Approx(0.25));
    std::mt19937 gen(1);
    std::uniform_real_distribution<double> u(0.01, 1.0);
    for (double beta : {-0.3, 0.0, 0.5, 2.0}) {
      const ProcessParams p{beta + 1.2, beta};
      const double ratio = std::tgamma(2 * beta + 1) / std::pow(2.0, 2 * beta + 1);
      CHECK(uustar_to_covariance_ratio(beta) == doctest::Approx(ratio).epsilon(1e-14));
      for (int i = 0; i < 5; ++i) {
        const double t = u(gen), s = u(gen);
        CHECK(uustar_kernel(p, t, s) / covariance_k(p, t, s) == doctest::Approx(ratio).epsilon(1e-13));
      }
    }
  }

  TEST_CASE("increment variance") {
    CHECK(increment_variance(kCanonical, 1.0, 0.5) == doctest::Approx(1.0 + 0.5 - 4.0 / 3.0));
    CHECK(increment_variance(ProcessParams{2.0, 0.3}, 0.4, 0.4) == 0.0);
    for (double h : {1e-6, 0.01, 0.3}) {
      CHECK(increment_variance(kCanonical, h, 0.0) == doctest::Approx(h).epsilon(1e-14));
    }
    CHECK(increment_variance(kCanonical, 0.5, 1.0) == increment_variance(kCanonical, 1.0, 0.5));
    // closed form agrees with K(t,t) - 2K(t,s) + K(s,s) where no cancellation occurs
    const ProcessParams p{1.7, 0.4};
    const double t = 0.9, s = 0.2;
    CHECK(increment_variance(p, t, s) ==
          doctest::Approx(covariance_k(p, t, t) - 2 * covariance_k(p, t, s) + covariance_k(p, s, s)).epsilon(1e-12));
  }

  TEST_CASE("holder_A") {
    CHECK(holder_A(kCanonical, 0.3, 0.3) == 0.0);
    CHECK(holder_A(kCanonical, 0.0, 0.2) == doctest::Approx(0.1));
    CHECK(holder_A(kCanonical, 0.5, 1.0) == doctest::Approx(1.0 / 12.0));
    std::mt19937 gen(3);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (double beta : {-0.2, 0.0, 1.5}) {
      const ProcessParams p{beta + 0.9, beta};
      const double f = std::pow(2.0, 2 * beta + 1) / std::tgamma(2 * beta + 1);
      for (int i = 0; i < 5; ++i) {
        const double s = u(gen), t = u(gen);
        CHECK(increment_variance(p, s, t) == doctest::Approx(f * holder_A(p, s, t)).epsilon(1e-13));
      }
    }
  }

  TEST_CASE("holder_A as an integral") {
    // int_0^inf |t^a x^b e^{-xt} - s^a x^b e^{-xs}|^2 dx by the substitution
    // x = y/(1-y) and a fine midpoint rule.
    const ProcessParams p{1.3, 0.25};
    const double t = 0.8, s = 0.35;
    const int n = 400000;
    double sum = 0.0;
    for (int i = 0; i < n; ++i) {
      const double y = (i + 0.5) / n;
      const double x = y / (1 - y);
      const double jac = 1.0 / ((1 - y) * (1 - y));
      const double d = std::pow(t, p.alpha) * std::pow(x, p.beta) * std::exp(-x * t) -
                       std::pow(s, p.alpha) * std::pow(x, p.beta) * std::exp(-x * s);
      sum += d * d * jac;
    }
    CHECK(sum / n == doctest::Approx(holder_A(p, s, t)).epsilon(1e-6));
  }

  TEST_CASE("stationary correlation") {
    CHECK(stationary_corr(0.0, 0.0) == 1.0);
    CHECK(stationary_corr(0.0, 2.0) == doctest::Approx(1.0 / std::cosh(1.0)));
    CHECK(stationary_corr(0.0, 2.0) == doctest::Approx(0.648054).epsilon(1e-6));
    CHECK(stationary_corr(0.5, 2.0) == doctest::Approx(0.419974).epsilon(1e-6));
    // e^{-499.3}: no overflow in cosh
    CHECK(stationary_corr(0.0, 1000.0) > 0.0);
    CHECK(std::log(stationary_corr(0.0, 1000.0)) == doctest::Approx(std::log(2.0) - 500.0));
    CHECK_THROWS_AS(stationary_corr(0.0, -1.0), DomainError);
  }

  TEST_CASE("S covariance") {
    // (1,0): a' = 0, var S(t) = (1 - e^{-2t}) / (2t)
    CHECK(s_covariance(kCanonical, 1.0, 1.0) == doctest::Approx(0.432332).epsilon(1e-6));
    for (double t : {1.0, 3.0, 17.0}) {
      CHECK(s_covariance(kCanonical, t, t) == doctest::Approx(-std::expm1(-2 * t) / (2 * t)).epsilon(1e-14));
    }
    // decay rate t^{2a' - 2b - 1}
    const ProcessParams p{1.4, 0.2};
    const double rate = 2 * (2 * p.beta + 1 - p.alpha) - 2 * p.beta - 1;
    const double ratio = s_covariance(p, 100.0, 100.0) / s_covariance(p, 50.0, 50.0);
    CHECK(ratio == doctest::Approx(std::pow(2.0, rate)).epsilon(1e-8));
    // Cauchy-Schwarz
    for (double t : {1.0, 2.0, 9.0}) {
      for (double s : {1.5, 4.0, 30.0}) {
        CHECK(s_covariance(p, t, s) <= std::sqrt(s_covariance(p, t, t) * s_covariance(p, s, s)) * (1 + 1e-14));
      }
    }
    CHECK_THROWS_AS(s_covariance(kCanonical, 0.5, 1.0), DomainError);
    CHECK_THROWS_AS(s_covariance(ProcessParams{0.6, 0.2}, 1.0, 1.0), DomainError);
  }

  TEST_CASE("S covariance against the Ito integral") {
    // int_0^1 (ts)^{a'} x^{2b} e^{-x(t+s)} dx by Gauss-Legendre-free midpoint sums
    const ProcessParams p{1.8, 0.6};
    const double ap = 2 * p.beta + 1 - p.alpha;
    const double t = 1.7, s = 3.2;
    const int n = 200000;
    double sum = 0.0;
    for (int i = 0; i < n; ++i) {
      const double x = (i + 0.5) / n;
      sum += std::pow(x, 2 * p.beta) * std::exp(-x * (t + s));
    }
    CHECK(s_covariance(p, t, s) == doctest::Approx(std::pow(t * s, ap) * sum / n).epsilon(1e-8));
  }

  TEST_CASE("covariance is positive semidefinite") {
    std::mt19937 gen(9);
    std::uniform_real_distribution<double> u(1e-3, 1.0);
    const Precision p{128};
    for (const ProcessParams& params : {ProcessParams{1.0, 0.0}, ProcessParams{0.6, 0.2}, ProcessParams{3.0, 1.0}}) {
      const std::size_t n = 8;
      std::vector<double> pts(n);
      for (auto& x : pts) x = u(gen);
      SymMatrix m(n, p);
      for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i; j < n; ++j) m(i, j) = BigReal(covariance_k(params, pts[i], pts[j]), p);
      }
      const EigenDecomposition e = jacobi_eigh(m);
      CHECK(e.values.back().to_double() >= -1e-12);
    }
  }

  TEST_CASE("self-similarity, time inversion and Lamperti identities") {
    std::mt19937 gen(5);
    std::uniform_real_distribution<double> u(0.05, 2.0);
    const Precision prec{256};
    for (const ProcessParams& p : {ProcessParams{1.0, 0.0}, ProcessParams{2.25, 0.75}, ProcessParams{0.875, -0.25}}) {
      const double H = p.alpha - p.beta - 0.5;
      const ProcessParams inverted{2 * p.beta + 1 - p.alpha, p.beta};
      for (int i = 0; i < 5; ++i) {
        const BigReal t(u(gen), prec), s(u(gen), prec), c(u(gen), prec);
        const BigReal lhs = covariance_k(p, c * t, c * s);
        const BigReal rhs = pow(c, 2 * H) * covariance_k(p, t, s);
        CHECK(abs(lhs - rhs).to_double() <= 1e-70 * rhs.to_double());

        // time inversion: kernel of X_{a',b} written out, since a' may be <= 0
        const BigReal ti = 1.0 / t, si = 1.0 / s;
        const BigReal kinv = covariance_k(p, ti, si);
        const BigReal kprime = pow(BigReal(2L, prec), 2 * p.beta + 1) * pow(t * s, inverted.alpha) /
                               pow(t + s, 2 * p.beta + 1);
        CHECK(abs(kinv - kprime).to_double() <= 1e-70 * kprime.to_double());
      }
      for (int i = 0; i < 5; ++i) {
        const double a = u(gen) - 1.0, b = 2.0 * u(gen);
        const double lhs = std::exp(-H * (a + b)) * covariance_k(p, std::exp(a), std::exp(b));
        CHECK(lhs == doctest::Approx(stationary_corr(p.beta, std::fabs(a - b))).epsilon(1e-12));
      }
    }
  }

  TEST_CASE("kernel dispatch") {
    CHECK(kernel_from_string("UUSTAR") == KernelId::UUStar);
    CHECK(to_string(KernelId::CovarianceS) == "COVARIANCE_S");
    CHECK_THROWS_AS(kernel_from_string("nope"), DomainError);
    CHECK(kernel_value(KernelId::CovarianceX, kCanonical, 1.0, 0.5) == doctest::Approx(2.0 / 3.0));
    CHECK(kernel_value(KernelId::UUStar, kCanonical, 1.0, 0.5) == doctest::Approx(1.0 / 3.0));
    CHECK(kernel_value(KernelId::CovarianceS, kCanonical, 1.0, 1.0) == doctest::Approx(0.432332).epsilon(1e-6));
    const Precision p{256};
    const BigReal v = kernel_value(KernelId::CovarianceX, kCanonical, BigReal(1L, p), BigReal(0.5, p));
    CHECK(abs(v - BigReal(2L, p) / 3.0).to_double() < 1e-75);
  }
}
