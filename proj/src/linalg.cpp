#include "sdgp/linalg.hpp"

#include <algorithm>
#include <numeric>
#include <string>

#include "sdgp/errors.hpp"

namespace sdgp {

SymMatrix::SymMatrix(std::size_t n, Precision p) : n_(n), prec_(p) {
  data_.reserve(n * (n + 1) / 2);
  for (std::size_t k = 0; k < n * (n + 1) / 2; ++k) data_.emplace_back(p);
}

BigReal SymMatrix::trace() const {
  BigReal t(prec_);
  for (std::size_t i = 0; i < n_; ++i) t += (*this)(i, i);
  return t;
}

BigReal SymMatrix::frobenius_norm_squared() const {
  BigReal diag(prec_), off(prec_), sq(prec_);
  for (std::size_t i = 0; i < n_; ++i) {
    for (std::size_t j = i; j < n_; ++j) {
      mpfr_sqr(sq.raw(), (*this)(i, j).raw(), MPFR_RNDN);
      if (i == j) {
        diag += sq;
      } else {
        off += sq;
      }
    }
  }
  return diag + ldexp(off, 1);
}

namespace {

constexpr mpfr_rnd_t kRnd = MPFR_RNDN;

// Scratch registers for one rotation, allocated once per solve.
struct RotationScratch {
  explicit RotationScratch(Precision p)
      : theta(p), t(p), c(p), s(p), tau(p), tmp(p), g(p), h(p), u(p), v(p) {}
  BigReal theta, t, c, s, tau, tmp, g, h, u, v;
};

// (g, h) <- (g - s(h + g tau), h + s(g - h tau)), the Rutishauser form of a
// plane rotation, which keeps the update well conditioned for small angles.
inline void rotate_pair(mpfr_ptr g, mpfr_ptr h, RotationScratch& w) {
  mpfr_fma(w.u.raw(), g, w.tau.raw(), h, kRnd);   // h + g tau
  mpfr_fms(w.v.raw(), h, w.tau.raw(), g, kRnd);   // h tau - g
  mpfr_fms(g, w.s.raw(), w.u.raw(), g, kRnd);     // s u - g
  mpfr_neg(g, g, kRnd);
  mpfr_fms(h, w.s.raw(), w.v.raw(), h, kRnd);     // s v - h  = -(h + s(g - h tau))
  mpfr_neg(h, h, kRnd);
}

}  // namespace

EigenDecomposition jacobi_eigh(SymMatrix input, const JacobiOptions& options) {
  const std::size_t n = input.size();
  const int base_bits = input.precision().bits;
  const Precision prec{base_bits + std::max(0, options.guard_bits)};
  SymMatrix m(n, prec);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i; j < n; ++j) mpfr_set(m(i, j).raw(), input(i, j).raw(), kRnd);
  }
  input = SymMatrix(0, prec);

  EigenDecomposition out;
  out.n = n;
  out.columns = n;
  if (n == 0) return out;

  std::vector<BigReal> vec;
  if (options.want_vectors) {
    vec.reserve(n * n);
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) vec.emplace_back(i == j ? 1L : 0L, prec);
    }
  }

  BigReal tol = options.tol ? *options.tol
                            : ldexp(BigReal(1L, prec), -(base_bits - 16));
  BigReal threshold = sqrt(m.frobenius_norm_squared()) * tol;

  RotationScratch w(prec);
  BigReal abs_apq(prec);

  int sweep = 0;
  for (;; ++sweep) {
    long rotations_this_sweep = 0;
    for (std::size_t p = 0; p + 1 < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        mpfr_ptr apq = m(p, q).raw();
        mpfr_abs(abs_apq.raw(), apq, kRnd);
        if (mpfr_lessequal_p(abs_apq.raw(), threshold.raw())) continue;
        if (sweep >= options.max_sweeps) {
          throw NumericalError("jacobi_eigh", "no convergence within " +
                                                  std::to_string(options.max_sweeps) + " sweeps");
        }
        mpfr_ptr app = m(p, p).raw();
        mpfr_ptr aqq = m(q, q).raw();

        // theta = (a_qq - a_pp) / (2 a_pq); t = sgn(theta) / (|theta| + sqrt(theta^2 + 1))
        mpfr_sub(w.theta.raw(), aqq, app, kRnd);
        mpfr_div(w.theta.raw(), w.theta.raw(), apq, kRnd);
        mpfr_div_2ui(w.theta.raw(), w.theta.raw(), 1, kRnd);
        mpfr_sqr(w.tmp.raw(), w.theta.raw(), kRnd);
        mpfr_add_ui(w.tmp.raw(), w.tmp.raw(), 1, kRnd);
        mpfr_sqrt(w.tmp.raw(), w.tmp.raw(), kRnd);
        mpfr_abs(w.t.raw(), w.theta.raw(), kRnd);
        mpfr_add(w.tmp.raw(), w.tmp.raw(), w.t.raw(), kRnd);
        mpfr_ui_div(w.t.raw(), 1, w.tmp.raw(), kRnd);
        if (mpfr_sgn(w.theta.raw()) < 0) mpfr_neg(w.t.raw(), w.t.raw(), kRnd);

        // c = 1/sqrt(t^2+1), s = t c, tau = s / (1 + c)
        mpfr_sqr(w.tmp.raw(), w.t.raw(), kRnd);
        mpfr_add_ui(w.tmp.raw(), w.tmp.raw(), 1, kRnd);
        mpfr_rec_sqrt(w.c.raw(), w.tmp.raw(), kRnd);
        mpfr_mul(w.s.raw(), w.t.raw(), w.c.raw(), kRnd);
        mpfr_add_ui(w.tmp.raw(), w.c.raw(), 1, kRnd);
        mpfr_div(w.tau.raw(), w.s.raw(), w.tmp.raw(), kRnd);

        // a_pp -= t a_pq; a_qq += t a_pq; a_pq = 0
        mpfr_mul(w.tmp.raw(), w.t.raw(), apq, kRnd);
        mpfr_sub(app, app, w.tmp.raw(), kRnd);
        mpfr_add(aqq, aqq, w.tmp.raw(), kRnd);
        mpfr_set_zero(apq, 1);

        for (std::size_t k = 0; k < p; ++k) rotate_pair(m(k, p).raw(), m(k, q).raw(), w);
        for (std::size_t k = p + 1; k < q; ++k) rotate_pair(m(p, k).raw(), m(k, q).raw(), w);
        for (std::size_t k = q + 1; k < n; ++k) rotate_pair(m(p, k).raw(), m(q, k).raw(), w);
        if (options.want_vectors) {
          for (std::size_t k = 0; k < n; ++k) {
            rotate_pair(vec[k * n + p].raw(), vec[k * n + q].raw(), w);
          }
        }
        ++rotations_this_sweep;
      }
    }
    out.rotations += rotations_this_sweep;
    if (rotations_this_sweep == 0) break;
  }
  out.sweeps = sweep;

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return mpfr_greater_p(m(a, a).raw(), m(b, b).raw()) != 0;
  });

  out.values.reserve(n);
  for (std::size_t k : order) out.values.push_back(std::move(m(k, k)));
  if (options.want_vectors) {
    out.vectors.reserve(n * n);
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t k : order) out.vectors.push_back(std::move(vec[i * n + k]));
    }
  }
  return out;
}

}  // namespace sdgp

namespace sdgp {

PsdEigenDecomposition psd_eigh(const SymMatrix& a, const PsdEigenOptions& options) {
  const std::size_t n = a.size();
  const Precision prec = a.precision();
  PsdEigenDecomposition out;
  out.residual_trace = BigReal(prec);
  if (n == 0) {
    out.eig.n = 0;
    return out;
  }
  const std::size_t count = options.count == 0 ? n : std::min(options.count, n);

  BigReal floor = ldexp(abs(a.trace()), -(prec.bits - 16));
  BigReal rank_tol = ldexp(BigReal(1L, prec), -options.rank_tol_bits);

  std::vector<BigReal> diag;
  diag.reserve(n);
  for (std::size_t i = 0; i < n; ++i) diag.push_back(a(i, i));
  std::vector<std::size_t> perm(n);
  std::iota(perm.begin(), perm.end(), std::size_t{0});

  // cols[k][row] is L(row, k) indexed by original row.
  std::vector<std::vector<BigReal>> cols;
  BigReal acc(prec), tmp(prec), remaining(prec), count_pivot(prec);
  bool indefinite = false;
  for (std::size_t k = 0; k < n; ++k) {
    std::size_t best = k;
    for (std::size_t i = k + 1; i < n; ++i) {
      if (mpfr_greater_p(diag[perm[i]].raw(), diag[perm[best]].raw())) best = i;
    }
    if (k >= count) {
      mpfr_set_zero(remaining.raw(), 1);
      for (std::size_t i = k; i < n; ++i) remaining += abs(diag[perm[i]]);
      if (remaining <= rank_tol * count_pivot) {
        out.residual_trace = remaining;
        break;
      }
    }
    if (diag[perm[best]] <= floor) {
      for (std::size_t i = k; i < n; ++i) {
        if (diag[perm[i]] < -floor) indefinite = true;
        out.residual_trace += diag[perm[i]];
      }
      // A PSD Schur complement with diagonal <= floor has |S_ij| <= floor.
      const BigReal witness = 2.0 * floor;
      for (std::size_t i = k; i < n && !indefinite; ++i) {
        for (std::size_t j = i + 1; j < n && !indefinite; ++j) {
          const std::size_t ri = perm[i], rj = perm[j];
          mpfr_set(acc.raw(), a(ri, rj).raw(), kRnd);
          for (std::size_t l = 0; l < k; ++l) {
            mpfr_mul(tmp.raw(), cols[l][ri].raw(), cols[l][rj].raw(), kRnd);
            mpfr_sub(acc.raw(), acc.raw(), tmp.raw(), kRnd);
          }
          if (abs(acc) > witness) indefinite = true;
        }
      }
      break;
    }
    std::swap(perm[k], perm[best]);
    const std::size_t piv = perm[k];
    if (k + 1 == count) count_pivot = diag[piv];

    std::vector<BigReal> col;
    col.reserve(n);
    for (std::size_t i = 0; i < n; ++i) col.emplace_back(prec);
    BigReal lkk = sqrt(diag[piv]);
    col[piv] = lkk;
    for (std::size_t i = k + 1; i < n; ++i) {
      const std::size_t row = perm[i];
      mpfr_set(acc.raw(), a(row, piv).raw(), kRnd);
      for (std::size_t j = 0; j < k; ++j) {
        mpfr_mul(tmp.raw(), cols[j][row].raw(), cols[j][piv].raw(), kRnd);
        mpfr_sub(acc.raw(), acc.raw(), tmp.raw(), kRnd);
      }
      mpfr_div(col[row].raw(), acc.raw(), lkk.raw(), kRnd);
      mpfr_sqr(tmp.raw(), col[row].raw(), kRnd);
      mpfr_sub(diag[row].raw(), diag[row].raw(), tmp.raw(), kRnd);
    }
    cols.push_back(std::move(col));
  }

  if (indefinite) {
    SymMatrix copy = a;
    out.eig = jacobi_eigh(std::move(copy), options.jacobi);
    out.rank = n;
    out.fallback = true;
    mpfr_set_zero(out.residual_trace.raw(), 1);
    return out;
  }

  const std::size_t r = cols.size();
  out.rank = r;
  // B = L^T L; column k of L is nonzero only on perm[k..n).
  SymMatrix b(r, prec);
  for (std::size_t j = 0; j < r; ++j) {
    for (std::size_t k = j; k < r; ++k) {
      mpfr_ptr dst = b(j, k).raw();
      for (std::size_t i = k; i < n; ++i) {
        const std::size_t row = perm[i];
        mpfr_mul(tmp.raw(), cols[j][row].raw(), cols[k][row].raw(), kRnd);
        mpfr_add(dst, dst, tmp.raw(), kRnd);
      }
    }
  }

  EigenDecomposition inner = jacobi_eigh(std::move(b), options.jacobi);
  out.eig.n = n;
  out.eig.columns = r;
  out.eig.sweeps = inner.sweeps;
  out.eig.rotations = inner.rotations;
  out.eig.values = std::move(inner.values);
  if (options.jacobi.want_vectors) {
    // v_k = L w_k / sqrt(mu_k)
    out.eig.vectors.reserve(n * r);
    std::vector<BigReal> inv_root;
    inv_root.reserve(r);
    for (std::size_t k = 0; k < r; ++k) {
      const BigReal& mu = out.eig.values[k];
      inv_root.push_back(mu.sign() > 0 ? 1.0 / sqrt(mu) : BigReal(prec));
    }
    for (std::size_t row = 0; row < n; ++row) {
      for (std::size_t k = 0; k < r; ++k) {
        mpfr_set_zero(acc.raw(), 1);
        for (std::size_t j = 0; j < r; ++j) {
          mpfr_mul(tmp.raw(), cols[j][row].raw(), inner.vector(j, k).raw(), kRnd);
          mpfr_add(acc.raw(), acc.raw(), tmp.raw(), kRnd);
        }
        out.eig.vectors.push_back(acc * inv_root[k]);
      }
    }
  }
  return out;
}

}  // namespace sdgp
