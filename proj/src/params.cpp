#include "sdgp/params.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <string>

#include "sdgp/bigreal.hpp"
#include "sdgp/errors.hpp"

namespace sdgp {

namespace {

const Precision kConstPrecision{256};

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(10);
  os << v;
  return os.str();
}

[[noreturn]] void violated(const std::string& inequality, const std::string& detail) {
  throw DomainError(inequality + " (" + detail + ")");
}

BigReal entropy_constant_mp(double alpha, double beta) {
  BigReal c(alpha, kConstPrecision);
  c -= BigReal(beta, kConstPrecision);
  BigReal pi = BigReal::pi(kConstPrecision);
  return cbrt(c * pi * pi * BigReal::log2(kConstPrecision) * 3.0);
}

}  // namespace

std::string_view to_string(Regime r) {
  switch (r) {
    case Regime::L2: return "L2";
    case Regime::SUP: return "SUP";
    case Regime::ANY: return "ANY";
  }
  return "?";
}

ProcessParams validate(double alpha, double beta, Regime regime) {
  if (!std::isfinite(alpha) || !std::isfinite(beta)) {
    throw DomainError("alpha and beta must be finite");
  }
  if (!(beta > -0.5)) violated("beta ≤ -1/2", "beta = " + fmt(beta));
  switch (regime) {
    case Regime::ANY:
      if (!(alpha > 0.0)) violated("alpha ≤ 0", "alpha = " + fmt(alpha));
      break;
    case Regime::L2:
      if (!(alpha > beta)) violated("alpha ≤ beta", fmt(alpha) + " ≤ " + fmt(beta));
      break;
    case Regime::SUP:
      if (!(alpha > beta + 0.5)) {
        violated("alpha ≤ beta+1/2", fmt(alpha) + " ≤ " + fmt(beta + 0.5));
      }
      break;
  }
  return ProcessParams{alpha, beta};
}

RegimeInfo regime_info(const ProcessParams& p) {
  RegimeInfo info;
  info.H = p.alpha - p.beta - 0.5;
  info.gamma = info.H;
  info.lambda = std::min(info.H, 1.0);
  info.l2_valid = p.beta > -0.5 && p.alpha > p.beta;
  info.sup_valid = p.beta > -0.5 && p.alpha > p.beta + 0.5;
  return info;
}

double entropy_constant(double alpha, double beta) {
  if (!(alpha > beta)) throw DomainError("entropy constant needs alpha > beta");
  return entropy_constant_mp(alpha, beta).to_double();
}

double small_ball_constant(double alpha, double beta) {
  if (!(alpha > beta)) throw DomainError("small-ball constant needs alpha > beta");
  BigReal c(alpha, kConstPrecision);
  c -= BigReal(beta, kConstPrecision);
  BigReal pi = BigReal::pi(kConstPrecision);
  return (1.0 / (c * pi * pi * 3.0)).to_double();
}

TheoryConstants theory_constants(const ProcessParams& p) {
  validate(p.alpha, p.beta, Regime::L2);
  const RegimeInfo info = regime_info(p);

  TheoryConstants tc;
  tc.kappa_l2 = small_ball_constant(p.alpha, p.beta);
  BigReal d = entropy_constant_mp(p.alpha, p.beta);
  tc.d_l2 = d.to_double();

  BigReal two_b1(2.0 * p.beta + 1.0, kConstPrecision);
  tc.rho = sqrt(tgamma(two_b1) / pow(BigReal(2L, kConstPrecision), two_b1)).to_double();

  if (info.sup_valid) {
    BigReal lambda(info.lambda, kConstPrecision);
    BigReal d_lower = lambda / (lambda + 0.5) * d;
    BigReal d_upper = entropy_constant_mp(p.alpha - 0.5, p.beta);
    tc.d_sup_lower = d_lower.to_double();
    tc.d_sup_upper = d_upper.to_double();
    BigReal kappa_hi = BigReal::log2(kConstPrecision) / (d_lower * d_lower * d_lower);
    tc.kappa_sup_interval =
        std::make_pair(small_ball_constant(p.alpha - 0.5, p.beta), kappa_hi.to_double());
  }
  return tc;
}

}  // namespace sdgp
