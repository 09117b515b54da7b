#pragma once

#include <cstddef>
#include <vector>

#include "sdgp/bigreal.hpp"

namespace sdgp {

/// n-point Gauss-Legendre rule on [-1, 1]; nodes ascending.
struct GaussLegendreRule {
  std::vector<BigReal> nodes;
  std::vector<BigReal> weights;
};

/// Nodes are the roots of P_n found by Newton iteration from Chebyshev-type
/// initial guesses, carried out entirely at the requested precision. The
/// rule is mirrored so that x_{n-1-i} = -x_i holds exactly.
/// Throws NumericalError naming the root index if Newton fails to converge.
GaussLegendreRule gauss_legendre(std::size_t n, Precision precision);

/// Double-precision rule, for the many places that integrate in double.
struct GaussLegendreRuleD {
  std::vector<double> nodes;
  std::vector<double> weights;
};
GaussLegendreRuleD gauss_legendre_d(std::size_t n);

}  // namespace sdgp
