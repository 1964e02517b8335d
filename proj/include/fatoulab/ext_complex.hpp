#pragma once

#include <cmath>
#include <cstdint>
#include <string>

#include "fatoulab/core.hpp"

namespace fatoulab {

/// Complex number with a double mantissa and a 64-bit binary exponent:
/// value = mantissa * 2^exponent. Used where iterates shrink far below the
/// double range (compositions of Blaschke factors with tiny parameters).
///
/// Normalised so that max(|re|, |im|) lies in [0.5, 1), or mantissa == 0 with
/// exponent 0.
class ExtComplex {
 public:
  ExtComplex() = default;
  ExtComplex(double x) : ExtComplex(Complex(x, 0.0)) {}  // NOLINT(implicit)
  ExtComplex(Complex z) : mantissa_(z), exponent_(0) { normalize(); }  // NOLINT(implicit)
  ExtComplex(Complex mantissa, std::int64_t exponent) : mantissa_(mantissa), exponent_(exponent) {
    normalize();
  }

  Complex mantissa() const { return mantissa_; }
  std::int64_t exponent() const { return exponent_; }
  bool is_zero() const { return mantissa_ == Complex(0.0, 0.0); }

  /// Nearest double-precision value (underflows to 0, overflows to inf).
  Complex to_complex() const {
    if (is_zero()) return {};
    if (exponent_ > 2000) return {std::ldexp(mantissa_.real(), 2000), std::ldexp(mantissa_.imag(), 2000)};
    if (exponent_ < -2000) return {};
    const int e = static_cast<int>(exponent_);
    return {std::ldexp(mantissa_.real(), e), std::ldexp(mantissa_.imag(), e)};
  }

  /// log2 |z|; -inf for zero.
  double log2_abs() const {
    if (is_zero()) return -INFINITY;
    return std::log2(std::abs(mantissa_)) + static_cast<double>(exponent_);
  }
  double log10_abs() const { return log2_abs() * std::log10(2.0); }

  /// |z|^2 as a double; underflows to 0 for tiny values.
  double norm_double() const { return std::norm(to_complex()); }

  ExtComplex conj() const { return ExtComplex(std::conj(mantissa_), exponent_); }
  ExtComplex operator-() const { return ExtComplex(-mantissa_, exponent_); }

  friend ExtComplex operator*(const ExtComplex& a, const ExtComplex& b) {
    return ExtComplex(a.mantissa_ * b.mantissa_, a.exponent_ + b.exponent_);
  }
  friend ExtComplex operator/(const ExtComplex& a, const ExtComplex& b) {
    if (b.is_zero()) throw PoleError("extended division by zero");
    return ExtComplex(a.mantissa_ / b.mantissa_, a.exponent_ - b.exponent_);
  }
  friend ExtComplex operator+(const ExtComplex& a, const ExtComplex& b) {
    if (a.is_zero()) return b;
    if (b.is_zero()) return a;
    const ExtComplex& hi = a.exponent_ >= b.exponent_ ? a : b;
    const ExtComplex& lo = a.exponent_ >= b.exponent_ ? b : a;
    const std::int64_t shift = hi.exponent_ - lo.exponent_;
    if (shift > 1100) return hi;
    const int s = -static_cast<int>(shift);
    const Complex lo_scaled(std::ldexp(lo.mantissa_.real(), s), std::ldexp(lo.mantissa_.imag(), s));
    return ExtComplex(hi.mantissa_ + lo_scaled, hi.exponent_);
  }
  friend ExtComplex operator-(const ExtComplex& a, const ExtComplex& b) { return a + (-b); }

  ExtComplex& operator+=(const ExtComplex& o) { return *this = *this + o; }
  ExtComplex& operator*=(const ExtComplex& o) { return *this = *this * o; }

  std::string to_string() const;

 private:
  void normalize() {
    const double m = std::max(std::abs(mantissa_.real()), std::abs(mantissa_.imag()));
    if (m == 0.0 || !std::isfinite(m)) {
      if (m == 0.0) {
        mantissa_ = {};
        exponent_ = 0;
      }
      return;
    }
    int e = 0;
    std::frexp(m, &e);
    mantissa_ = {std::ldexp(mantissa_.real(), -e), std::ldexp(mantissa_.imag(), -e)};
    exponent_ += e;
  }

  Complex mantissa_{};
  std::int64_t exponent_ = 0;
};

inline ExtComplex conj(const ExtComplex& z) { return z.conj(); }
inline double norm_double(const ExtComplex& z) { return z.norm_double(); }
inline double norm_double(const Complex& z) { return std::norm(z); }

inline std::string ExtComplex::to_string() const {
  if (is_zero()) return "0";
  // Decimal scientific form: m * 10^k with |m| in [1, 10).
  const double l10 = log10_abs();
  const double k = std::floor(l10);
  const Complex unit = mantissa_ / std::abs(mantissa_);
  const double mag = std::pow(10.0, l10 - k);
  const Complex m = unit * mag;
  char buf[128];
  std::snprintf(buf, sizeof buf, "(%.15g%+.15gi)e%.0f", m.real(), m.imag(), k);
  return buf;
}

}  // namespace fatoulab
