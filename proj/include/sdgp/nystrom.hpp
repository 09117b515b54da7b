#pragma once

// Graded Nystrom discretization of kernel operators on (0, 1].

#include <cstddef>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "sdgp/bigreal.hpp"
#include "sdgp/kernels.hpp"
#include "sdgp/params.hpp"

namespace sdgp {

struct GridSpec {
  int levels = 40;
  int order = 12;
  /// Also map the rule onto [0, 2^-levels] instead of dropping it.
  bool origin_panel = false;

  friend bool operator==(const GridSpec&, const GridSpec&) = default;
};

/// Composite Gauss-Legendre rule on the panels [2^-(j+1), 2^-j],
/// j = 0..levels-1. The interval [0, 2^-levels] is dropped unless
/// spec.origin_panel is set.
struct QuadGrid {
  GridSpec spec;
  Precision precision;
  std::vector<BigReal> nodes;    ///< strictly increasing
  std::vector<BigReal> weights;
  std::vector<double> nodes_d;
  std::vector<double> weights_d;

  std::size_t size() const noexcept { return nodes.size(); }
};

QuadGrid build_grid(const GridSpec& g, Precision precision);
inline QuadGrid build_grid(int levels, int order, Precision precision) {
  return build_grid(GridSpec{levels, order}, precision);
}

/// Bivariate kernel evaluated in multiprecision.
using KernelFn = std::function<BigReal(const BigReal&, const BigReal&)>;

struct SpectrumOptions {
  bool retain_vectors = false;
  /// Grid used for the refinement-stability test; unset means
  /// (levels + 10, order + 2). Disable with check_refinement = false.
  std::optional<GridSpec> refinement;
  bool check_refinement = true;
  /// Relative change allowed between the two grids for a trusted eigenvalue.
  double refinement_tol = 0.01;
  /// Truncation of the pivoted Cholesky factorization; see psd_eigh.
  int rank_tol_bits = 40;
};

struct Spectrum {
  std::string kernel;
  ProcessParams params;
  GridSpec grid;
  Precision precision;
  std::vector<BigReal> eigenvalues;  ///< descending, length N
  std::size_t trusted_count = 0;
  /// Prefix length passing the precision floor lambda_1 2^-(p-64) alone.
  std::size_t floor_count = 0;
  bool refinement_checked = false;
  std::optional<GridSpec> refinement_grid;
  /// Relative change of each eigenvalue on the refined grid (empty when not
  /// checked).
  std::vector<double> refinement_change;
  /// Sum_i w_i k(x_i, x_i) and the neglected Schur complement trace; the
  /// eigenvalues plus residual_trace reproduce grid_trace.
  BigReal grid_trace;
  BigReal residual_trace;
  std::size_t rank = 0;
  /// n x N row-major unit eigenvectors of the symmetric Nystrom matrix,
  /// empty unless retained.
  std::vector<BigReal> vectors;
  KernelFn kernel_fn;

  bool has_vectors() const noexcept { return !vectors.empty(); }
  const BigReal& vector(std::size_t row, std::size_t k) const {
    return vectors[row * eigenvalues.size() + k];
  }
};

/// Eigenvalues of M_ij = sqrt(w_i w_j) k(x_i, x_j). The CovarianceS kernel
/// lives on [1, inf) and is rejected here.
Spectrum spectrum(KernelId id, const ProcessParams& params, const QuadGrid& grid, std::size_t count,
                  const SpectrumOptions& options = {});

/// Same for an arbitrary kernel; name is recorded in the result.
Spectrum spectrum(const KernelFn& kernel, const std::string& name, const QuadGrid& grid,
                  std::size_t count, const SpectrumOptions& options = {});

/// Nystrom extension phi_n(t) = lambda_n^-1 sum_j sqrt(w_j) k(t, x_j) v_j[n],
/// normalized so that sum_j w_j phi_n(x_j)^2 = 1. n is 1-based.
BigReal eigenfunction_eval(const Spectrum& spec, const QuadGrid& grid, std::size_t n,
                           const BigReal& t);
double eigenfunction_eval(const Spectrum& spec, const QuadGrid& grid, std::size_t n, double t);

/// phi_n(t_i) for n = 1..count and every t_i, as a times.size() x count
/// row-major table. Kernel values are shared across indices.
std::vector<double> eigenfunction_table(const Spectrum& spec, const QuadGrid& grid,
                                        std::size_t count, const std::vector<double>& times);

/// Covariance-operator eigenvalues 2^{2b+1}/Gamma(2b+1) * lambda_n(u u*),
/// over the trusted range.
std::vector<double> kl_weights(const ProcessParams& params, const Spectrum& uustar);

struct LaptevFit {
  double slope = 0.0;
  double intercept = 0.0;  ///< log lambda_n ~ intercept - slope sqrt(n)
  double r_squared = 0.0;
  std::size_t n_first = 0;
  std::size_t n_last = 0;
};

/// Least squares of -log lambda_n against sqrt(n), n in
/// [trusted/4, trusted]. Needs trusted_count >= 20.
LaptevFit laptev_fit(const Spectrum& spec);

/// Same fit on an explicit list of positive values (index n = position + 1).
LaptevFit laptev_fit(const std::vector<double>& log_values, std::size_t n_first,
                     std::size_t n_last);

/// Computed eigenvalues spliced with the fitted exp(intercept - slope sqrt n)
/// tail. Values are kept as logarithms.
struct HybridSpectrum {
  std::vector<double> log_values;
  std::size_t computed_count = 0;
  LaptevFit fit;

  std::size_t size() const noexcept { return log_values.size(); }
  /// Closed-form bound on sum_{n > size} of the extrapolated tail.
  double tail_mass() const;
  /// Tail mass beyond index m (1-based count kept).
  double tail_mass_after(std::size_t m) const;
  /// Multiplies every value by e^{log_factor}.
  HybridSpectrum scaled(double log_factor) const;
};

/// Requires fit.r_squared >= 0.999; N_target >= trusted_count.
HybridSpectrum extend_tail(const Spectrum& spec, std::size_t n_target);
HybridSpectrum extend_tail(const Spectrum& spec, const LaptevFit& fit, std::size_t n_target);

/// JSON document {kernel, alpha, beta, precision_bits, grid:{levels,order},
/// eigenvalues:[decimal strings], trusted_count}.
std::string spectrum_to_json(const Spectrum& spec, int digits = 40);

}  // namespace sdgp
