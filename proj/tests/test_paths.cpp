#include <doctest.h>

#include <cmath>
#include <numbers>
#include <sstream>

#include "sdgp/errors.hpp"
#include "sdgp/kernels.hpp"
#include "sdgp/nystrom.hpp"
#include "sdgp/paths.hpp"
#include "sdgp/special.hpp"

using namespace sdgp;

namespace {

std::vector<double> geometric_times(double t0, double ratio, std::size_t n) {
  std::vector<double> t(n);
  for (std::size_t i = 0; i < n; ++i) t[i] = t0 * std::pow(ratio, static_cast<double>(i));
  return t;
}

void check_cov(const PathEnsemble& e, std::size_t i, std::size_t j, double expected) {
  const CovEstimate c = empirical_cov(e, i, j);
  INFO("t_i = " << e.times[i] << " t_j = " << e.times[j] << " cov " << c.value << " +- "
                << c.std_error << " expected " << expected);
  CHECK(std::fabs(c.value - expected) <= 4.0 * c.std_error);
}

}  // namespace

TEST_SUITE("path-sim") {
  TEST_CASE("Karhunen-Loeve paths reproduce the covariance") {
    const ProcessParams p{1.0, 0.0};
    const QuadGrid grid = build_grid(GridSpec{30, 8}, Precision{256});
    SpectrumOptions opts;
    opts.retain_vectors = true;
    const Spectrum s = spectrum(KernelId::UUStar, p, grid, 40, opts);
    const std::vector<double> times{0.0, 0.25, 0.5, 1.0};
    const KlBasis basis = make_kl_basis(p, s, grid, times);
    const PathEnsemble e = kl_paths(basis, 20000, 11);
    CHECK(e.generator.rfind("kl(terms=", 0) == 0);
    CHECK(e.samples.size() == 20000 * times.size());
    double at_origin = 0.0;
    for (std::size_t k = 0; k < e.n_samples; ++k) at_origin = std::max(at_origin, std::fabs(e.at(k, 0)));
    CHECK(at_origin == 0.0);
    check_cov(e, 3, 3, 1.0);
    check_cov(e, 3, 2, 2.0 / 3.0);
    check_cov(e, 1, 2, covariance_k(p, 0.25, 0.5));
    // the KL variance converges to K(t,t) from below
    double var = 0.0;
    for (std::size_t k = 0; k < basis.weights.size(); ++k) {
      var += basis.weights[k] * basis.phi[3 * basis.weights.size() + k] * basis.phi[3 * basis.weights.size() + k];
    }
    CHECK(var == doctest::Approx(1.0).epsilon(1e-3));

    const PathEnsemble same = kl_paths(basis, 20000, 11);
    CHECK(same.samples == e.samples);
    const PathEnsemble none = kl_paths(basis, 0, 11);
    CHECK(none.n_samples == 0);
    CHECK(none.samples.empty());
  }

  TEST_CASE("integral representation reproduces the covariance") {
    for (const ProcessParams p : {ProcessParams{1.0, 0.0}, ProcessParams{2.0, 1.0}}) {
      const std::vector<double> times = geometric_times(0.05, 2.0, 5);
      const XRule rule = integral_x_rule(p, times);
      CHECK(rule.nodes.size() == rule.weights.size());
      // the rule integrates x^{2b} e^{-2xt} over [0, cutoff]
      for (double t : times) {
        double q = 0.0;
        for (std::size_t j = 0; j < rule.nodes.size(); ++j) {
          q += rule.weights[j] * std::pow(rule.nodes[j], 2 * p.beta) * std::exp(-2 * rule.nodes[j] * t);
        }
        const double b1 = 2 * p.beta + 1;
        const double full = std::tgamma(b1) / std::pow(2 * t, b1);
        CHECK(q == doctest::Approx(full).epsilon(2e-4));
      }
      const PathEnsemble e = integral_paths(p, rule, times, 20000, 3);
      for (std::size_t i = 0; i < times.size(); ++i) {
        check_cov(e, i, i, covariance_k(p, times[i], times[i]));
        if (i + 1 < times.size()) check_cov(e, i, i + 1, covariance_k(p, times[i], times[i + 1]));
      }
    }
    CHECK_THROWS_AS(integral_paths({1.0, 0.0}, XRule{}, {0.0, 1.0}, 10, 1), DomainError);
  }

  TEST_CASE("integral cutoff") {
    const ProcessParams p{1.0, 0.0};
    const double x = integral_cutoff(p, 0.1, 1e-4);
    // beta = 0: Q(1, z) = e^{-z}
    CHECK(x == doctest::Approx(std::log(1e4) / 0.2).epsilon(1e-9));
    const ProcessParams q{1.5, 0.5};
    const double y = integral_cutoff(q, 0.1, 1e-4);
    CHECK(gamma_q(2.0, 0.2 * y) <= 1e-4 * (1 + 1e-9));
    CHECK(gamma_q(2.0, 0.2 * y * 0.999) > 1e-4);
    CHECK_THROWS_AS(integral_cutoff(p, 0.0), DomainError);
  }

  TEST_CASE("Lamperti transform is stationary") {
    const ProcessParams p{1.0, 0.0};
    const std::vector<double> times = geometric_times(std::exp(-4.0), std::exp(1.0), 5);
    const PathEnsemble e = integral_paths(p, integral_x_rule(p, times), times, 20000, 21);
    const PathEnsemble y = lamperti(e, p);
    CHECK(y.times[0] == doctest::Approx(-4.0));
    CHECK(y.times[4] == doctest::Approx(0.0));
    for (std::size_t i = 0; i < 5; ++i) check_cov(y, i, i, 1.0);
    // lag 2: 1/cosh(1) = 0.6481
    CHECK(stationary_corr(0.0, 2.0) == doctest::Approx(0.6481).epsilon(1e-4));
    for (std::size_t i = 0; i + 2 < 5; ++i) check_cov(y, i, i + 2, stationary_corr(0.0, 2.0));
    for (std::size_t i = 0; i + 1 < 5; ++i) check_cov(y, i, i + 1, stationary_corr(0.0, 1.0));

    PathEnsemble bad = e;
    bad.times[2] *= 1.1;
    CHECK_THROWS_AS(lamperti(bad, p), DomainError);
  }

  TEST_CASE("spectral density of the stationary process at beta = 0") {
    // int sech(u/2) cos(u x) du = 2 pi sech(pi x)
    for (double x : {0.0, 0.3, 1.0}) {
      double s = 0.0;
      const double h = 0.01;
      for (int k = -8000; k <= 8000; ++k) s += stationary_corr(0.0, std::abs(k) * h) * std::cos(k * h * x);
      CHECK(s * h == doctest::Approx(2 * std::numbers::pi / std::cosh(std::numbers::pi * x)).epsilon(1e-6));
    }
  }

  TEST_CASE("self-similar scaling of the variance") {
    const ProcessParams p{1.5, 0.25};
    const double c = 3.0, h = 0.75;
    const std::vector<double> times{0.2, 0.2 * c};
    const PathEnsemble e = integral_paths(p, integral_x_rule(p, times), times, 40000, 8);
    const CovEstimate a = empirical_cov(e, 0, 0), b = empirical_cov(e, 1, 1);
    CHECK(std::fabs(b.value / a.value - std::pow(c, 2 * h)) <=
          4.0 * std::pow(c, 2 * h) * std::hypot(a.std_error / a.value, b.std_error / b.value));
  }

  TEST_CASE("empirical covariance on fixed data") {
    PathEnsemble e;
    e.times = {0.0, 1.0};
    e.n_samples = 4;
    e.samples = {1, 2, 2, 4, 3, 6, 4, 8};
    const CovEstimate c = empirical_cov(e, 0, 1);
    // x = 1..4, y = 2x: cov = 2 var(x) = 2 * 5/3
    CHECK(c.value == doctest::Approx(10.0 / 3.0));
    CHECK(c.std_error > 0.0);
    CHECK(empirical_cov(e, 0, 0).value == doctest::Approx(5.0 / 3.0));
    CHECK_THROWS_AS(empirical_cov(e, 0, 2), DomainError);
    e.n_samples = 1;
    CHECK_THROWS_AS(empirical_cov(e, 0, 1), DomainError);
  }

  TEST_CASE("binary and CSV export") {
    PathEnsemble e;
    e.times = {0.5, 1.0, 2.0};
    e.n_samples = 2;
    e.samples = {0.1, -0.2, 0.3, 1e-300, -4.5, 6.25};
    const std::string bytes = ensemble_to_binary(e);
    CHECK(bytes.substr(0, 4) == "SDGP");
    CHECK(bytes.size() == 4 + 2 + 4 + 4 + 8 * (3 + 6));
    const PathEnsemble back = ensemble_from_binary(bytes);
    CHECK(back.times == e.times);
    CHECK(back.samples == e.samples);
    CHECK(back.n_samples == 2);
    CHECK_THROWS(ensemble_from_binary(bytes.substr(0, 20)));
    CHECK_THROWS(ensemble_from_binary("XXXX" + bytes.substr(4)));

    const std::string csv = ensemble_to_csv(e);
    std::istringstream in(csv);
    std::string line;
    std::getline(in, line);
    CHECK(line == "#schema=sdgp.v1");
    std::getline(in, line);
    CHECK(line == "0.5,1,2");
    std::getline(in, line);
    CHECK(line == "0.1,-0.2,0.3");
  }
}
