#pragma once

#include <boost/multiprecision/gmp.hpp>
#include <boost/multiprecision/mpfr.hpp>

#include <string>

namespace mls {

using BigFloat = boost::multiprecision::mpfr_float;
using Rational = boost::multiprecision::mpq_rational;
using BigInt = boost::multiprecision::mpz_int;

inline constexpr unsigned kDefaultPrecision = 80;

/// Sets the working precision (decimal digits) for every BigFloat created
/// while the scope is alive and restores the previous value on exit.
///
/// The setting is process wide. Worker threads must be spawned after the
/// scope is entered and joined before it is left.
class PrecisionScope {
 public:
  explicit PrecisionScope(unsigned digits) : previous_(BigFloat::default_precision()) {
    BigFloat::default_precision(digits);
  }
  ~PrecisionScope() { BigFloat::default_precision(previous_); }
  PrecisionScope(const PrecisionScope&) = delete;
  PrecisionScope& operator=(const PrecisionScope&) = delete;

 private:
  unsigned previous_;
};

inline unsigned working_precision() { return BigFloat::default_precision(); }

/// 10^-digits at the working precision.
inline BigFloat pow10_neg(int digits) { return boost::multiprecision::pow(BigFloat(10), -digits); }

inline BigFloat pi() { return boost::math::constants::pi<BigFloat>(); }

/// Parses a decimal string exactly at the working precision.
inline BigFloat parse_decimal(const std::string& text) { return BigFloat(text); }

/// Full-precision decimal rendering (scientific, all working digits).
inline std::string to_decimal(const BigFloat& x, unsigned digits = 0) {
  // scientific format counts digits after the point
  return x.str((digits == 0 ? working_precision() : digits) - 1, std::ios_base::scientific);
}

inline std::string to_decimal(const Rational& x) { return x.str(); }

/// Number of decimal digits in which a and b agree, relative to max(|a|,|b|,1).
inline double agreement_digits(const BigFloat& a, const BigFloat& b) {
  BigFloat scale = boost::multiprecision::max(BigFloat(1), boost::multiprecision::max(abs(a), abs(b)));
  BigFloat diff = abs(a - b) / scale;
  if (diff == 0) return static_cast<double>(working_precision());
  return -static_cast<double>(log10(diff));
}

}  // namespace mls
