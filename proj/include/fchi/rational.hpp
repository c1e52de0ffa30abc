#pragma once

#include <boost/rational.hpp>

#include <cmath>
#include <cstdint>
#include <string>

#include "fchi/error.hpp"

namespace fchi {

using Rational = boost::rational<std::int64_t>;

inline std::int64_t ceil_div(std::int64_t a, std::int64_t b) {
  // b > 0
  std::int64_t q = a / b;
  if ((a % b != 0) && (a > 0)) ++q;
  return q;
}

inline std::int64_t floor_div(std::int64_t a, std::int64_t b) {
  std::int64_t q = a / b;
  if ((a % b != 0) && (a < 0)) --q;
  return q;
}

/// ceil(x * k) for a non-negative rational x.
inline std::int64_t ceil_mul(const Rational& x, std::int64_t k) {
  return ceil_div(x.numerator() * k, x.denominator());
}

/// floor(x * k) for a non-negative rational x.
inline std::int64_t floor_mul(const Rational& x, std::int64_t k) {
  return floor_div(x.numerator() * k, x.denominator());
}

inline double to_double(const Rational& x) {
  return static_cast<double>(x.numerator()) / static_cast<double>(x.denominator());
}

inline std::string to_string(const Rational& x) {
  if (x.denominator() == 1) return std::to_string(x.numerator());
  return std::to_string(x.numerator()) + "/" + std::to_string(x.denominator());
}

/// Accepts "p/q", an integer, or a finite decimal such as "0.25".
inline Rational parse_rational(const std::string& text) {
  try {
    auto slash = text.find('/');
    if (slash != std::string::npos) {
      std::int64_t num = std::stoll(text.substr(0, slash));
      std::int64_t den = std::stoll(text.substr(slash + 1));
      if (den == 0) throw Error(ErrorCode::Parse, "zero denominator in '" + text + "'");
      return Rational(num, den);
    }
    auto dot = text.find('.');
    if (dot == std::string::npos) return Rational(std::stoll(text));
    std::string digits = text.substr(0, dot) + text.substr(dot + 1);
    std::size_t frac_len = text.size() - dot - 1;
    if (frac_len > 15) throw Error(ErrorCode::Parse, "too many decimals in '" + text + "'");
    std::int64_t den = 1;
    for (std::size_t i = 0; i < frac_len; ++i) den *= 10;
    return Rational(std::stoll(digits), den);
  } catch (const std::logic_error&) {
    throw Error(ErrorCode::Parse, "not a rational: '" + text + "'");
  }
}

/// ceil(x * k) for a real x >= 0 coming from log-space evaluation.  Values within
/// a relative 1e-12 of an integer snap to it so 0.25 * 16 stays 4.
inline std::int64_t ceil_real(double x, std::int64_t k) {
  if (x <= 0.0) return 0;
  double v = x * static_cast<double>(k);
  if (v > 9.0e15) return static_cast<std::int64_t>(9.0e15);
  double r = std::round(v);
  if (std::abs(v - r) <= 1e-12 * std::max(1.0, std::abs(v))) return static_cast<std::int64_t>(r);
  return static_cast<std::int64_t>(std::ceil(v));
}

}  // namespace fchi
