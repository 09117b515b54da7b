#include <doctest.h>

#include <cmath>
#include <json.hpp>
#include <numbers>

#include "sdgp/errors.hpp"
#include "sdgp/kernels.hpp"
#include "sdgp/nystrom.hpp"
#include "sdgp/quadrature.hpp"

using namespace sdgp;

namespace {

const Precision kBits{256};

struct Fixture {
  QuadGrid grid;
  Spectrum spec;
};

// (1,0) u u* spectrum with eigenvectors on a mid-sized grid, shared by
// several cases.
const Fixture& canonical() {
  static const Fixture f = [] {
    Fixture x;
    x.grid = build_grid(30, 8, kBits);
    SpectrumOptions o;
    o.retain_vectors = true;
    x.spec = spectrum(KernelId::UUStar, {1.0, 0.0}, x.grid, 60, o);
    return x;
  }();
  return f;
}

}  // namespace

TEST_SUITE("nystrom-spectrum") {
  TEST_CASE("grid layout") {
    const QuadGrid g = build_grid(1, 2, kBits);
    REQUIRE(g.size() == 2);
    const double off = 0.25 / std::sqrt(3.0);
    CHECK(g.nodes_d[0] == doctest::Approx(0.75 - off).epsilon(1e-15));
    CHECK(g.nodes_d[1] == doctest::Approx(0.75 + off).epsilon(1e-15));

    const QuadGrid full = build_grid(40, 12, kBits);
    CHECK(full.size() == 480);
    BigReal wsum(0L, kBits), tsum(0L, kBits);
    for (std::size_t i = 0; i < full.size(); ++i) {
      CHECK(full.nodes[i] > 0.0);
      if (i > 0) CHECK(full.nodes[i - 1] < full.nodes[i]);
      wsum += full.weights[i];
      tsum += full.weights[i] * full.nodes[i];
    }
    const BigReal one(1L, kBits);
    CHECK(abs(wsum - (one - ldexp(one, -40))).to_double() < 1e-70);
    CHECK(abs(tsum - (one - ldexp(one, -80)) / 2.0).to_double() < 1e-70);

    const QuadGrid closed = build_grid(GridSpec{20, 10, true}, kBits);
    CHECK(closed.size() == 210);
    BigReal csum(0L, kBits), ctsum(0L, kBits);
    for (std::size_t i = 0; i < closed.size(); ++i) {
      csum += closed.weights[i];
      ctsum += closed.weights[i] * closed.nodes[i];
    }
    CHECK(closed.nodes.front() > 0.0);
    CHECK(abs(csum - 1.0).to_double() < 1e-70);
    CHECK(abs(ctsum - 0.5).to_double() < 1e-70);

    CHECK_THROWS_AS(build_grid(0, 4, kBits), DomainError);
    CHECK_THROWS_AS(build_grid(4, 1, kBits), DomainError);
  }

  TEST_CASE("rank-one kernel ts") {
    const QuadGrid g = build_grid(GridSpec{20, 10, true}, kBits);
    SpectrumOptions o;
    o.check_refinement = false;
    const Spectrum s = spectrum([](const BigReal& t, const BigReal& u) { return t * u; }, "ts", g, 4, o);
    const BigReal third = BigReal(1L, kBits) / 3.0;
    CHECK(abs(s.eigenvalues[0] - third).to_double() < 1e-70);
    for (std::size_t k = 1; k < s.eigenvalues.size(); ++k) {
      CHECK(abs(s.eigenvalues[k]).to_double() <= std::pow(10.0, -kBits.bits / 4.0));
    }
    CHECK(s.kernel == "ts");

    // dropping [0, 2^-20] loses exactly the mass 2^-60 / 3 of int t^2
    const QuadGrid open = build_grid(20, 10, kBits);
    const Spectrum d = spectrum([](const BigReal& t, const BigReal& u) { return t * u; }, "ts", open, 2, o);
    const double deficit = (third - d.eigenvalues[0]).to_double();
    CHECK(deficit == doctest::Approx(std::ldexp(1.0, -60) / 3.0).epsilon(1e-12));
  }

  TEST_CASE("grid refinement leaves lambda_1 stable") {
    SpectrumOptions o;
    o.check_refinement = false;
    const Spectrum a = spectrum(KernelId::UUStar, {1.0, 0.0}, build_grid(30, 10, kBits), 3, o);
    const Spectrum b = spectrum(KernelId::UUStar, {1.0, 0.0}, build_grid(40, 12, kBits), 3, o);
    CHECK(abs((a.eigenvalues[0] - b.eigenvalues[0]) / b.eigenvalues[0]).to_double() < 1e-6);
  }

  TEST_CASE("trusted range, positivity and trace identity") {
    const Spectrum& s = canonical().spec;
    CHECK(s.refinement_checked);
    CHECK(s.trusted_count >= 30);
    CHECK(s.trusted_count <= s.floor_count);
    const BigReal floor = s.eigenvalues[0] * ldexp(BigReal(1L, kBits), -(kBits.bits - 64));
    for (std::size_t k = 0; k < s.eigenvalues.size(); ++k) {
      CHECK(s.eigenvalues[k] >= -floor);
      if (k > 0) CHECK(s.eigenvalues[k - 1] >= s.eigenvalues[k]);
    }
    for (std::size_t k = 0; k < s.trusted_count; ++k) {
      CHECK(s.eigenvalues[k] > 0.0);
      CHECK(s.refinement_change[k] < 0.01);
    }
    // Eigenvalues plus the neglected Schur complement reproduce sum w_i k(x_i, x_i).
    BigReal sum(0L, kBits);
    for (const auto& v : s.eigenvalues) sum += v;
    BigReal direct(0L, kBits);
    const QuadGrid& g = canonical().grid;
    for (std::size_t i = 0; i < g.size(); ++i) {
      direct += g.weights[i] * uustar_kernel(ProcessParams{1.0, 0.0}, g.nodes[i], g.nodes[i]);
    }
    CHECK(abs(s.grid_trace - direct).to_double() < 1e-60);
    CHECK(abs(sum + s.residual_trace - s.grid_trace).to_double() < 1e-60);
  }

  TEST_CASE("covariance and u u* spectra differ by the constant factor") {
    const ProcessParams p{1.5, 0.5};
    const QuadGrid g = build_grid(24, 8, kBits);
    SpectrumOptions o;
    o.check_refinement = false;
    const Spectrum k = spectrum(KernelId::CovarianceX, p, g, 20, o);
    const Spectrum u = spectrum(KernelId::UUStar, p, g, 20, o);
    const double ratio = 1.0 / uustar_to_covariance_ratio(p.beta);
    for (std::size_t n = 0; n < 20; ++n) {
      CHECK((k.eigenvalues[n] / u.eigenvalues[n]).to_double() == doctest::Approx(ratio).epsilon(1e-12));
    }
    CHECK_THROWS_AS(spectrum(KernelId::CovarianceS, p, g, 5, o), DomainError);
  }

  TEST_CASE("eigenfunctions") {
    const Fixture& f = canonical();
    const Spectrum& s = f.spec;
    const QuadGrid& g = f.grid;
    // At a node the extension interpolates the eigenvector, up to the
    // neglected Schur complement S: the error is (S v)_i / (lambda sqrt w_i).
    for (std::size_t n : {1, 2, 5}) {
      for (std::size_t i : {3, 100, 200}) {
        const BigReal phi = eigenfunction_eval(s, g, n, g.nodes[i]);
        const BigReal expect = s.vector(i, n - 1) / sqrt(g.weights[i]);
        const BigReal bound = s.residual_trace / (s.eigenvalues[n - 1] * sqrt(g.weights[i]));
        CHECK(abs(phi - expect) <= bound + 1e-60);
        CHECK(abs(phi - expect).to_double() <= 1e-20 * std::fabs(expect.to_double()));
      }
    }
    // orthonormality under the grid quadrature
    for (std::size_t m = 1; m <= 10; ++m) {
      for (std::size_t n = m; n <= 10; ++n) {
        BigReal ip(0L, kBits);
        for (std::size_t i = 0; i < g.size(); ++i) {
          ip += g.weights[i] * eigenfunction_eval(s, g, m, g.nodes[i]) * eigenfunction_eval(s, g, n, g.nodes[i]);
        }
        CHECK(std::fabs(ip.to_double() - (m == n ? 1.0 : 0.0)) < 1e-8);
      }
    }
    // eigen-relation with an independent quadrature: composite Gauss-Legendre
    // on a uniform-in-log mesh, evaluated in double
    const GaussLegendreRuleD r = gauss_legendre_d(16);
    const ProcessParams p{1.0, 0.0};
    for (double t : {0.013, 0.1, 0.37, 0.61, 0.97}) {
      double integral = 0.0;
      for (int j = 0; j < 60; ++j) {
        const double a = std::ldexp(1.0, -j - 1), b = std::ldexp(1.0, -j);
        for (std::size_t q = 0; q < r.nodes.size(); ++q) {
          const double x = 0.5 * (a + b) + 0.5 * (b - a) * r.nodes[q];
          integral += 0.5 * (b - a) * r.weights[q] * uustar_kernel(p, t, x) * eigenfunction_eval(s, g, 1, x);
        }
      }
      const double lambda1 = s.eigenvalues[0].to_double();
      CHECK(integral / eigenfunction_eval(s, g, 1, t) == doctest::Approx(lambda1).epsilon(0.01));
    }
    // table form agrees with pointwise evaluation
    const std::vector<double> times = {0.0, 0.25, 1.0};
    const std::vector<double> table = eigenfunction_table(s, g, 4, times);
    REQUIRE(table.size() == 12);
    CHECK(table[0] == 0.0);
    CHECK(table[1 * 4 + 2] == doctest::Approx(eigenfunction_eval(s, g, 3, 0.25)).epsilon(1e-12));
    CHECK_THROWS_AS(eigenfunction_eval(s, g, 0, 0.5), DomainError);
    CHECK_THROWS_AS(eigenfunction_eval(s, g, s.trusted_count + 1, 0.5), DomainError);
  }

  TEST_CASE("KL weights") {
    const Spectrum& s = canonical().spec;
    const std::vector<double> w = kl_weights({1.0, 0.0}, s);
    REQUIRE(w.size() == s.trusted_count);
    CHECK(w[0] == doctest::Approx(2.0 * s.eigenvalues[0].to_double()).epsilon(1e-15));
    for (std::size_t n = 1; n < w.size(); ++n) CHECK(w[n] < w[n - 1]);
    // trace: int_0^1 K(t,t) dt = int_0^1 t dt = 1/2, with the tail from the fit
    const HybridSpectrum h = extend_tail(s, s.trusted_count);
    double sum = 0.0;
    for (double v : w) sum += v;
    sum += 2.0 * h.tail_mass();
    CHECK(sum == doctest::Approx(0.5).epsilon(1e-6));
  }

  TEST_CASE("Laptev fit") {
    std::vector<double> logs;
    for (int n = 1; n <= 200; ++n) logs.push_back(1.5 - 4.25 * std::sqrt(n));
    const LaptevFit f = laptev_fit(logs, 20, 200);
    CHECK(f.slope == doctest::Approx(4.25).epsilon(1e-6));
    CHECK(f.intercept == doctest::Approx(1.5).epsilon(1e-6));
    CHECK(f.r_squared == doctest::Approx(1.0));

    const LaptevFit c = laptev_fit(canonical().spec);
    CHECK(c.slope == doctest::Approx(2 * std::numbers::pi).epsilon(0.10));
    CHECK(c.r_squared >= 0.0);
    CHECK(c.r_squared <= 1.0);
    CHECK(c.n_last == canonical().spec.trusted_count);
  }

  TEST_CASE("tail extension") {
    const Spectrum& s = canonical().spec;
    const std::size_t m = s.trusted_count;
    const HybridSpectrum same = extend_tail(s, m);
    REQUIRE(same.size() == m);
    for (std::size_t k = 0; k < m; ++k) {
      CHECK(same.log_values[k] == doctest::Approx(log(s.eigenvalues[k]).to_double()).epsilon(1e-14));
    }

    const HybridSpectrum h = extend_tail(s, 400);
    REQUIRE(h.size() == 400);
    const double computed = s.eigenvalues[m - 1].to_double();
    const double extrapolated = std::exp(h.fit.intercept - h.fit.slope * std::sqrt(static_cast<double>(m)));
    CHECK(extrapolated / computed >= 0.5);
    CHECK(extrapolated / computed <= 2.0);
    const double l400 = h.log_values[399];
    CHECK(l400 == doctest::Approx(h.fit.intercept - h.fit.slope * 20.0).epsilon(1e-12));
    CHECK(l400 < -100.0);
    for (std::size_t k = 1; k < h.size(); ++k) CHECK(h.log_values[k] <= h.log_values[k - 1]);

    // closed-form tail against a direct sum
    double direct = 0.0;
    for (int n = 401; n < 200000; ++n) direct += std::exp(h.fit.intercept - h.fit.slope * std::sqrt(n));
    CHECK(h.tail_mass() == doctest::Approx(direct).epsilon(0.05));
    CHECK(h.tail_mass() >= direct);

    const HybridSpectrum scaled = h.scaled(std::log(2.0));
    CHECK(scaled.log_values[10] == doctest::Approx(h.log_values[10] + std::log(2.0)));
    CHECK(scaled.tail_mass() == doctest::Approx(2.0 * h.tail_mass()));
    CHECK_THROWS_AS(extend_tail(s, m - 1), DomainError);
  }

  TEST_CASE("spectrum JSON") {
    const Spectrum& s = canonical().spec;
    const auto j = nlohmann::json::parse(spectrum_to_json(s, 30));
    CHECK(j["kernel"] == "UUSTAR");
    CHECK(j["alpha"] == 1.0);
    CHECK(j["precision_bits"] == 256);
    CHECK(j["grid"]["levels"] == 30);
    CHECK(j["trusted_count"] == s.trusted_count);
    CHECK(j["eigenvalues"].size() == s.eigenvalues.size());
    const BigReal first = BigReal::from_string(j["eigenvalues"][0].get<std::string>(), kBits);
    CHECK(abs((first - s.eigenvalues[0]) / s.eigenvalues[0]).to_double() < 1e-28);
  }
}
