#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "sdgp/bigreal.hpp"

namespace sdgp {

/// Dense symmetric matrix of multiprecision entries. Only the upper
/// triangle is stored (packed row-major), so symmetry is exact.
class SymMatrix {
 public:
  SymMatrix(std::size_t n, Precision p);

  std::size_t size() const noexcept { return n_; }
  Precision precision() const noexcept { return prec_; }

  BigReal& operator()(std::size_t i, std::size_t j) { return data_[index(i, j)]; }
  const BigReal& operator()(std::size_t i, std::size_t j) const { return data_[index(i, j)]; }

  BigReal trace() const;
  BigReal frobenius_norm_squared() const;

 private:
  std::size_t index(std::size_t i, std::size_t j) const noexcept {
    if (i > j) std::swap(i, j);
    return i * n_ - i * (i + 1) / 2 + j;
  }

  std::size_t n_;
  Precision prec_;
  std::vector<BigReal> data_;
};

struct JacobiOptions {
  /// Stop once max |a_ij| (i != j) <= tol * ||A||_F. Unset means
  /// 2^-(p-16) at the matrix precision.
  std::optional<BigReal> tol;
  int max_sweeps = 64;
  bool want_vectors = false;
  /// Rotations run at p + guard_bits; values and vectors are returned at
  /// that precision so rounding does not accumulate into the low bits.
  int guard_bits = 32;
};

struct EigenDecomposition {
  std::vector<BigReal> values;   ///< descending
  std::vector<BigReal> vectors;  ///< n x columns row-major; column k pairs with values[k]
  std::size_t n = 0;
  std::size_t columns = 0;
  int sweeps = 0;
  long rotations = 0;

  const BigReal& vector(std::size_t row, std::size_t k) const { return vectors[row * columns + k]; }
};

/// Cyclic Jacobi eigensolver. The matrix is taken by value and destroyed
/// in the process. Throws NumericalError("jacobi_eigh", ...) when the sweep
/// cap is exceeded.
EigenDecomposition jacobi_eigh(SymMatrix m, const JacobiOptions& options = {});

struct PsdEigenOptions {
  /// Number of leading eigenpairs that must be resolved; 0 means all.
  std::size_t count = 0;
  /// Factorization stops once the Schur complement trace falls below
  /// 2^-rank_tol_bits times the count-th pivot.
  int rank_tol_bits = 40;
  JacobiOptions jacobi;
};

struct PsdEigenDecomposition {
  /// values has length rank; vectors (when requested) are n x rank,
  /// row-major, and hold eigenvectors of the original matrix.
  EigenDecomposition eig;
  std::size_t rank = 0;
  /// Trace of the neglected Schur complement (zero when not truncated).
  BigReal residual_trace;
  /// True when the matrix was found indefinite and plain Jacobi was used.
  bool fallback = false;
};

/// Eigendecomposition of a positive semidefinite matrix with a strongly
/// graded spectrum. A = P L L^T P^T by complete pivoting, then Jacobi on
/// L^T L, whose off-diagonal mass is already graded and converges in a few
/// sweeps. Eigenvalues k <= count carry relative error below about
/// 2^-rank_tol_bits.
PsdEigenDecomposition psd_eigh(const SymMatrix& m, const PsdEigenOptions& options = {});

}  // namespace sdgp
