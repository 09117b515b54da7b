#include "sdgp/bigreal.hpp"

#include <atomic>
#include <cmath>
#include <cstdio>
#include <string>
#include <vector>

#include "sdgp/errors.hpp"

namespace sdgp {

namespace {

std::atomic<int> g_default_bits{Precision::kDefault};

constexpr mpfr_rnd_t kRnd = MPFR_RNDN;

mpfr_prec_t max_prec(const BigReal& a, const BigReal& b) {
  return std::max(mpfr_get_prec(a.raw()), mpfr_get_prec(b.raw()));
}

template <typename Fn>
BigReal unary(const BigReal& x, Fn fn) {
  BigReal r(x.precision());
  fn(r.raw(), x.raw(), kRnd);
  return r;
}

}  // namespace

Precision Precision::checked(int bits) {
  if (bits < kMin || bits > kMax) {
    throw DomainError("precision " + std::to_string(bits) + " bits outside [" +
                      std::to_string(kMin) + ", " + std::to_string(kMax) + "]");
  }
  return Precision{bits};
}

Precision default_precision() { return Precision{g_default_bits.load()}; }

void set_default_precision(Precision p) { g_default_bits.store(Precision::checked(p.bits).bits); }

BigReal::BigReal(Precision p) {
  mpfr_init2(value_, p.bits);
  mpfr_set_zero(value_, 1);
}

BigReal::BigReal(double v, Precision p) {
  mpfr_init2(value_, p.bits);
  mpfr_set_d(value_, v, kRnd);
}

BigReal::BigReal(long v, Precision p) {
  mpfr_init2(value_, p.bits);
  mpfr_set_si(value_, v, kRnd);
}

BigReal::BigReal(const BigReal& other) {
  mpfr_init2(value_, mpfr_get_prec(other.value_));
  mpfr_set(value_, other.value_, kRnd);
}

// A moved-from value has a null limb pointer; only destruction and
// assignment are valid afterwards.
BigReal::BigReal(BigReal&& other) noexcept {
  value_[0] = other.value_[0];
  other.value_[0]._mpfr_d = nullptr;
}

BigReal& BigReal::operator=(const BigReal& other) {
  if (this == &other) return *this;
  if (value_[0]._mpfr_d == nullptr) {
    mpfr_init2(value_, mpfr_get_prec(other.value_));
  } else if (mpfr_get_prec(value_) != mpfr_get_prec(other.value_)) {
    mpfr_set_prec(value_, mpfr_get_prec(other.value_));
  }
  mpfr_set(value_, other.value_, kRnd);
  return *this;
}

BigReal& BigReal::operator=(BigReal&& other) noexcept {
  if (this == &other) return *this;
  if (value_[0]._mpfr_d != nullptr) mpfr_clear(value_);
  value_[0] = other.value_[0];
  other.value_[0]._mpfr_d = nullptr;
  return *this;
}

BigReal& BigReal::operator=(double v) {
  if (value_[0]._mpfr_d == nullptr) mpfr_init2(value_, default_precision().bits);
  mpfr_set_d(value_, v, kRnd);
  return *this;
}

BigReal::~BigReal() {
  if (value_[0]._mpfr_d != nullptr) mpfr_clear(value_);
}

BigReal BigReal::from_string(std::string_view text, Precision p) {
  BigReal r(p);
  std::string s(text);
  if (mpfr_set_str(r.value_, s.c_str(), 10, kRnd) != 0) {
    throw DomainError("cannot parse multiprecision number '" + s + "'");
  }
  return r;
}

BigReal BigReal::pi(Precision p) {
  BigReal r(p);
  mpfr_const_pi(r.value_, kRnd);
  return r;
}

BigReal BigReal::log2(Precision p) {
  BigReal r(p);
  mpfr_const_log2(r.value_, kRnd);
  return r;
}

std::string BigReal::to_string(int digits) const {
  if (mpfr_nan_p(value_)) return "nan";
  if (mpfr_inf_p(value_)) return mpfr_sgn(value_) > 0 ? "inf" : "-inf";
  if (digits <= 0) {
    digits = static_cast<int>(mpfr_get_str_ndigits(10, mpfr_get_prec(value_)));
  }
  std::vector<char> buf(static_cast<std::size_t>(digits) + 32);
  int n = mpfr_snprintf(buf.data(), buf.size(), "%.*Re", digits - 1, value_);
  return std::string(buf.data(), static_cast<std::size_t>(n));
}

BigReal& BigReal::operator+=(const BigReal& rhs) {
  if (mpfr_get_prec(rhs.value_) > mpfr_get_prec(value_)) {
    mpfr_prec_round(value_, mpfr_get_prec(rhs.value_), kRnd);
  }
  mpfr_add(value_, value_, rhs.value_, kRnd);
  return *this;
}

BigReal& BigReal::operator-=(const BigReal& rhs) {
  if (mpfr_get_prec(rhs.value_) > mpfr_get_prec(value_)) {
    mpfr_prec_round(value_, mpfr_get_prec(rhs.value_), kRnd);
  }
  mpfr_sub(value_, value_, rhs.value_, kRnd);
  return *this;
}

BigReal& BigReal::operator*=(const BigReal& rhs) {
  if (mpfr_get_prec(rhs.value_) > mpfr_get_prec(value_)) {
    mpfr_prec_round(value_, mpfr_get_prec(rhs.value_), kRnd);
  }
  mpfr_mul(value_, value_, rhs.value_, kRnd);
  return *this;
}

BigReal& BigReal::operator/=(const BigReal& rhs) {
  if (mpfr_get_prec(rhs.value_) > mpfr_get_prec(value_)) {
    mpfr_prec_round(value_, mpfr_get_prec(rhs.value_), kRnd);
  }
  mpfr_div(value_, value_, rhs.value_, kRnd);
  return *this;
}

BigReal& BigReal::operator+=(double rhs) {
  mpfr_add_d(value_, value_, rhs, kRnd);
  return *this;
}

BigReal& BigReal::operator-=(double rhs) {
  mpfr_sub_d(value_, value_, rhs, kRnd);
  return *this;
}

BigReal& BigReal::operator*=(double rhs) {
  mpfr_mul_d(value_, value_, rhs, kRnd);
  return *this;
}

BigReal& BigReal::operator/=(double rhs) {
  mpfr_div_d(value_, value_, rhs, kRnd);
  return *this;
}

BigReal BigReal::operator-() const {
  BigReal r(precision());
  mpfr_neg(r.value_, value_, kRnd);
  return r;
}

BigReal operator+(const BigReal& a, const BigReal& b) {
  BigReal r(Precision{static_cast<int>(max_prec(a, b))});
  mpfr_add(r.value_, a.value_, b.value_, kRnd);
  return r;
}

BigReal operator-(const BigReal& a, const BigReal& b) {
  BigReal r(Precision{static_cast<int>(max_prec(a, b))});
  mpfr_sub(r.value_, a.value_, b.value_, kRnd);
  return r;
}

BigReal operator*(const BigReal& a, const BigReal& b) {
  BigReal r(Precision{static_cast<int>(max_prec(a, b))});
  mpfr_mul(r.value_, a.value_, b.value_, kRnd);
  return r;
}

BigReal operator/(const BigReal& a, const BigReal& b) {
  BigReal r(Precision{static_cast<int>(max_prec(a, b))});
  mpfr_div(r.value_, a.value_, b.value_, kRnd);
  return r;
}

BigReal operator+(const BigReal& a, double b) {
  BigReal r(a.precision());
  mpfr_add_d(r.value_, a.value_, b, kRnd);
  return r;
}

BigReal operator-(const BigReal& a, double b) {
  BigReal r(a.precision());
  mpfr_sub_d(r.value_, a.value_, b, kRnd);
  return r;
}

BigReal operator*(const BigReal& a, double b) {
  BigReal r(a.precision());
  mpfr_mul_d(r.value_, a.value_, b, kRnd);
  return r;
}

BigReal operator/(const BigReal& a, double b) {
  BigReal r(a.precision());
  mpfr_div_d(r.value_, a.value_, b, kRnd);
  return r;
}

BigReal operator/(double a, const BigReal& b) {
  BigReal r(b.precision());
  mpfr_d_div(r.value_, a, b.value_, kRnd);
  return r;
}

std::partial_ordering operator<=>(const BigReal& a, const BigReal& b) {
  if (mpfr_unordered_p(a.value_, b.value_)) return std::partial_ordering::unordered;
  int c = mpfr_cmp(a.value_, b.value_);
  return c < 0 ? std::partial_ordering::less
               : (c > 0 ? std::partial_ordering::greater : std::partial_ordering::equivalent);
}

std::partial_ordering operator<=>(const BigReal& a, double b) {
  if (mpfr_nan_p(a.value_) || std::isnan(b)) return std::partial_ordering::unordered;
  int c = mpfr_cmp_d(a.value_, b);
  return c < 0 ? std::partial_ordering::less
               : (c > 0 ? std::partial_ordering::greater : std::partial_ordering::equivalent);
}

BigReal abs(const BigReal& x) { return unary(x, mpfr_abs); }
BigReal sqrt(const BigReal& x) { return unary(x, mpfr_sqrt); }
BigReal exp(const BigReal& x) { return unary(x, mpfr_exp); }
BigReal log(const BigReal& x) { return unary(x, mpfr_log); }
BigReal log1p(const BigReal& x) { return unary(x, mpfr_log1p); }
BigReal cosh(const BigReal& x) { return unary(x, mpfr_cosh); }
BigReal cos(const BigReal& x) { return unary(x, mpfr_cos); }
BigReal tgamma(const BigReal& x) { return unary(x, mpfr_gamma); }
BigReal cbrt(const BigReal& x) { return unary(x, mpfr_cbrt); }

BigReal lgamma(const BigReal& x) {
  BigReal r(x.precision());
  int sign = 0;
  mpfr_lgamma(r.raw(), &sign, x.raw(), kRnd);
  return r;
}

BigReal pow(const BigReal& x, const BigReal& y) {
  BigReal r(Precision{static_cast<int>(max_prec(x, y))});
  mpfr_pow(r.raw(), x.raw(), y.raw(), kRnd);
  return r;
}

BigReal pow(const BigReal& x, double y) {
  BigReal r(x.precision());
  double ip = 0.0;
  if (std::modf(y, &ip) == 0.0 && std::fabs(y) < 1e15) {
    mpfr_pow_si(r.raw(), x.raw(), static_cast<long>(y), kRnd);
  } else {
    BigReal yy(y, x.precision());
    mpfr_pow(r.raw(), x.raw(), yy.raw(), kRnd);
  }
  return r;
}

BigReal fma(const BigReal& a, const BigReal& b, const BigReal& c) {
  BigReal r(Precision{static_cast<int>(std::max(max_prec(a, b), mpfr_get_prec(c.raw())))});
  mpfr_fma(r.raw(), a.raw(), b.raw(), c.raw(), kRnd);
  return r;
}

BigReal ldexp(const BigReal& x, long e) {
  BigReal r(x.precision());
  mpfr_mul_2si(r.raw(), x.raw(), e, kRnd);
  return r;
}

}  // namespace sdgp
