#pragma once

#include <mpfr.h>

#include <compare>
#include <string>
#include <string_view>

namespace sdgp {

/// Binary precision of a multiprecision value, in bits.
struct Precision {
  static constexpr int kMin = 128;
  static constexpr int kMax = 8192;
  static constexpr int kDefault = 640;

  int bits = kDefault;

  /// Throws DomainError outside [kMin, kMax].
  static Precision checked(int bits);

  friend bool operator==(Precision, Precision) = default;
};

/// Process-wide default used when no precision is given explicitly.
Precision default_precision();
void set_default_precision(Precision p);

/// Owning wrapper around an MPFR number. All arithmetic rounds to nearest;
/// the result of a binary operator carries the larger operand precision.
/// Conversion to double is explicit (to_double()).
class BigReal {
 public:
  BigReal() : BigReal(default_precision()) {}
  explicit BigReal(Precision p);
  BigReal(double v, Precision p);
  BigReal(long v, Precision p);
  BigReal(int v, Precision p) : BigReal(static_cast<long>(v), p) {}

  BigReal(const BigReal& other);
  BigReal(BigReal&& other) noexcept;
  BigReal& operator=(const BigReal& other);
  BigReal& operator=(BigReal&& other) noexcept;
  BigReal& operator=(double v);
  ~BigReal();

  /// Parses a decimal (or "inf"/"nan") string at precision p.
  static BigReal from_string(std::string_view text, Precision p);
  static BigReal pi(Precision p);
  static BigReal log2(Precision p);

  mpfr_ptr raw() noexcept { return value_; }
  mpfr_srcptr raw() const noexcept { return value_; }

  Precision precision() const noexcept {
    return Precision{static_cast<int>(mpfr_get_prec(value_))};
  }

  double to_double() const noexcept { return mpfr_get_d(value_, MPFR_RNDN); }
  long double to_long_double() const noexcept { return mpfr_get_ld(value_, MPFR_RNDN); }

  /// Scientific notation with `digits` significant decimal digits; 0 picks
  /// enough digits to round-trip at this precision.
  std::string to_string(int digits = 0) const;

  bool is_zero() const noexcept { return mpfr_zero_p(value_) != 0; }
  bool is_finite() const noexcept { return mpfr_number_p(value_) != 0; }
  int sign() const noexcept { return mpfr_sgn(value_); }

  BigReal& operator+=(const BigReal& rhs);
  BigReal& operator-=(const BigReal& rhs);
  BigReal& operator*=(const BigReal& rhs);
  BigReal& operator/=(const BigReal& rhs);
  BigReal& operator+=(double rhs);
  BigReal& operator-=(double rhs);
  BigReal& operator*=(double rhs);
  BigReal& operator/=(double rhs);
  BigReal operator-() const;

  friend BigReal operator+(const BigReal& a, const BigReal& b);
  friend BigReal operator-(const BigReal& a, const BigReal& b);
  friend BigReal operator*(const BigReal& a, const BigReal& b);
  friend BigReal operator/(const BigReal& a, const BigReal& b);
  friend BigReal operator+(const BigReal& a, double b);
  friend BigReal operator-(const BigReal& a, double b);
  friend BigReal operator*(const BigReal& a, double b);
  friend BigReal operator/(const BigReal& a, double b);
  friend BigReal operator*(double a, const BigReal& b) { return b * a; }
  friend BigReal operator+(double a, const BigReal& b) { return b + a; }
  friend BigReal operator-(double a, const BigReal& b) { return -(b - a); }
  friend BigReal operator/(double a, const BigReal& b);

  friend bool operator==(const BigReal& a, const BigReal& b) {
    return mpfr_equal_p(a.value_, b.value_) != 0;
  }
  friend std::partial_ordering operator<=>(const BigReal& a, const BigReal& b);
  friend std::partial_ordering operator<=>(const BigReal& a, double b);
  friend bool operator==(const BigReal& a, double b) { return mpfr_cmp_d(a.value_, b) == 0; }

 private:
  mpfr_t value_;
};

BigReal abs(const BigReal& x);
BigReal sqrt(const BigReal& x);
BigReal exp(const BigReal& x);
BigReal log(const BigReal& x);
BigReal log1p(const BigReal& x);
BigReal pow(const BigReal& x, const BigReal& y);
BigReal pow(const BigReal& x, double y);
BigReal cosh(const BigReal& x);
BigReal cos(const BigReal& x);
BigReal tgamma(const BigReal& x);
BigReal lgamma(const BigReal& x);
BigReal cbrt(const BigReal& x);
BigReal fma(const BigReal& a, const BigReal& b, const BigReal& c);
BigReal ldexp(const BigReal& x, long e);

}  // namespace sdgp
