#pragma once

#include <cmath>
#include <cstdint>
#include <limits>

namespace poslp {

// Real number stored as mantissa * 2^exponent with an int64 exponent, so
// quantities like (1+eps)^(ln(m)/eps^2) stay representable far beyond the
// double range.  The mantissa is an IEEE double with |mantissa| in [1,2),
// or exactly 0.  Exponent arithmetic is exact; mantissa arithmetic is at
// native double precision.
class ExtendedScalar {
 public:
  constexpr ExtendedScalar() = default;

  static ExtendedScalar from_double(double v) {
    ExtendedScalar r;
    if (v == 0.0) return r;
    int e = 0;
    double m = std::frexp(v, &e);  // |m| in [0.5, 1)
    r.mant_ = m * 2.0;
    r.exp_ = static_cast<std::int64_t>(e) - 1;
    return r;
  }

  // The value 2^log2_value.
  static ExtendedScalar exp2_of(double log2_value) {
    ExtendedScalar r;
    double fl = std::floor(log2_value);
    double frac = log2_value - fl;
    r.mant_ = std::exp2(frac);  // in [1, 2)
    if (r.mant_ >= 2.0) {       // guard against rounding at frac ~ 1
      r.mant_ *= 0.5;
      fl += 1.0;
    }
    r.exp_ = static_cast<std::int64_t>(fl);
    return r;
  }

  // base^y for base > 0.
  static ExtendedScalar pow_of(double base, double y) {
    return exp2_of(y * std::log2(base));
  }

  double mantissa() const { return mant_; }
  std::int64_t exponent() const { return exp_; }
  bool is_zero() const { return mant_ == 0.0; }
  int sign() const { return mant_ == 0.0 ? 0 : (mant_ > 0.0 ? 1 : -1); }

  // log2 of |value|; -inf for zero.
  double log2_abs() const {
    if (mant_ == 0.0) return -std::numeric_limits<double>::infinity();
    return std::log2(std::fabs(mant_)) + static_cast<double>(exp_);
  }
  // Natural log of |value|.
  double ln_abs() const { return log2_abs() * kLn2; }

  // Conversion to double, saturating to +-inf / 0 when the exponent is out
  // of double range.  `saturated`, if given, reports that case.
  double to_double(bool* saturated = nullptr) const {
    if (saturated) *saturated = false;
    if (mant_ == 0.0) return 0.0;
    if (exp_ > 1023) {
      if (saturated) *saturated = true;
      return mant_ > 0 ? std::numeric_limits<double>::infinity()
                       : -std::numeric_limits<double>::infinity();
    }
    if (exp_ < -1074) {
      if (saturated) *saturated = true;
      return mant_ > 0 ? 0.0 : -0.0;
    }
    return std::ldexp(mant_, static_cast<int>(exp_));
  }

  static double ratio_as_double(const ExtendedScalar& a, const ExtendedScalar& b,
                                bool* saturated = nullptr) {
    return (a / b).to_double(saturated);
  }

  ExtendedScalar& operator+=(const ExtendedScalar& o) {
    if (o.mant_ == 0.0) return *this;
    if (mant_ == 0.0) { *this = o; return *this; }
    std::int64_t d = exp_ - o.exp_;
    if (d >= kAlignLimit) return *this;          // o is below one ulp
    if (d <= -kAlignLimit) { *this = o; return *this; }
    if (d >= 0) {
      mant_ += std::ldexp(o.mant_, static_cast<int>(-d));
    } else {
      mant_ = std::ldexp(mant_, static_cast<int>(d)) + o.mant_;
      exp_ = o.exp_;
    }
    normalize();
    return *this;
  }
  ExtendedScalar& operator-=(const ExtendedScalar& o) { return *this += (-o); }
  ExtendedScalar& operator*=(const ExtendedScalar& o) {
    if (mant_ == 0.0 || o.mant_ == 0.0) { mant_ = 0.0; exp_ = 0; return *this; }
    mant_ *= o.mant_;
    exp_ += o.exp_;
    normalize();
    return *this;
  }
  ExtendedScalar& operator/=(const ExtendedScalar& o) {
    mant_ /= o.mant_;  // division by zero yields inf mantissa, caught below
    exp_ -= o.exp_;
    normalize();
    return *this;
  }

  friend ExtendedScalar operator+(ExtendedScalar a, const ExtendedScalar& b) { return a += b; }
  friend ExtendedScalar operator-(ExtendedScalar a, const ExtendedScalar& b) { return a -= b; }
  friend ExtendedScalar operator*(ExtendedScalar a, const ExtendedScalar& b) { return a *= b; }
  friend ExtendedScalar operator/(ExtendedScalar a, const ExtendedScalar& b) { return a /= b; }
  ExtendedScalar operator-() const {
    ExtendedScalar r = *this;
    r.mant_ = -r.mant_;
    return r;
  }

  ExtendedScalar& operator*=(double d) { return *this *= from_double(d); }
  friend ExtendedScalar operator*(ExtendedScalar a, double d) { return a *= d; }
  friend ExtendedScalar operator*(double d, ExtendedScalar a) { return a *= d; }

  // Total order.  Returns -1, 0, +1.
  static int compare(const ExtendedScalar& a, const ExtendedScalar& b) {
    int sa = a.sign(), sb = b.sign();
    if (sa != sb) return sa < sb ? -1 : 1;
    if (sa == 0) return 0;
    if (a.exp_ != b.exp_) {
      bool less = a.exp_ < b.exp_;
      if (sa < 0) less = !less;
      return less ? -1 : 1;
    }
    if (a.mant_ == b.mant_) return 0;
    return a.mant_ < b.mant_ ? -1 : 1;
  }
  friend bool operator<(const ExtendedScalar& a, const ExtendedScalar& b) { return compare(a, b) < 0; }
  friend bool operator>(const ExtendedScalar& a, const ExtendedScalar& b) { return compare(a, b) > 0; }
  friend bool operator<=(const ExtendedScalar& a, const ExtendedScalar& b) { return compare(a, b) <= 0; }
  friend bool operator>=(const ExtendedScalar& a, const ExtendedScalar& b) { return compare(a, b) >= 0; }
  friend bool operator==(const ExtendedScalar& a, const ExtendedScalar& b) { return compare(a, b) == 0; }
  friend bool operator!=(const ExtendedScalar& a, const ExtendedScalar& b) { return compare(a, b) != 0; }

 private:
  static constexpr std::int64_t kAlignLimit = 64;
  static constexpr double kLn2 = 0.6931471805599453094;

  void normalize() {
    if (mant_ == 0.0) { exp_ = 0; return; }
    if (!std::isfinite(mant_)) return;  // poisoned by 0-division; comparisons still order it last
    double a = std::fabs(mant_);
    if (a >= 1.0 && a < 2.0) return;
    int e = 0;
    mant_ = std::frexp(mant_, &e) * 2.0;
    exp_ += static_cast<std::int64_t>(e) - 1;
  }

  double mant_ = 0.0;
  std::int64_t exp_ = 0;
};

// Repeated-squaring integer power, used by tests and the occasional cold path.
inline ExtendedScalar pow_uint(ExtendedScalar base, std::uint64_t n) {
  ExtendedScalar r = ExtendedScalar::from_double(1.0);
  while (n != 0) {
    if (n & 1) r *= base;
    base *= base;
    n >>= 1;
  }
  return r;
}

}  // namespace poslp
