#pragma once

// Arithmetic modes. Exact mode uses GMP rationals; float mode uses double
// with an absolute comparison tolerance of 1e-12.

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <type_traits>

#include <gmpxx.h>

namespace permwalk {

using Rational = mpq_class;

enum class ArithmeticMode { exact_rational, float64 };

template <class S>
struct ScalarTraits;

template <>
struct ScalarTraits<Rational> {
  static constexpr bool exact = true;
  static constexpr ArithmeticMode mode = ArithmeticMode::exact_rational;

  static Rational ratio(std::int64_t num, std::int64_t den) {
    Rational r(mpz_class(std::to_string(num)), mpz_class(std::to_string(den)));
    r.canonicalize();
    return r;
  }
  static double to_double(const Rational& x) { return x.get_d(); }
  static bool leq(const Rational& a, const Rational& b) { return a <= b; }
  static bool eq(const Rational& a, const Rational& b) { return a == b; }
};

template <>
struct ScalarTraits<double> {
  static constexpr bool exact = false;
  static constexpr ArithmeticMode mode = ArithmeticMode::float64;
  static constexpr double tolerance = 1e-12;

  static double ratio(std::int64_t num, std::int64_t den) {
    return static_cast<double>(num) / static_cast<double>(den);
  }
  static double to_double(double x) { return x; }
  static bool leq(double a, double b) { return a <= b + tolerance; }
  static bool eq(double a, double b) { return std::abs(a - b) <= tolerance; }
};

/// Parses "p/q", an integer, or a decimal such as "0.6667" into an exact rational.
inline Rational parse_rational(const std::string& text) {
  if (text.empty()) throw std::invalid_argument("empty rational literal");
  Rational r;
  const auto slash = text.find('/');
  const auto dot = text.find('.');
  try {
    if (slash != std::string::npos) {
      r = Rational(mpz_class(text.substr(0, slash), 10), mpz_class(text.substr(slash + 1), 10));
      if (r.get_den() == 0) throw std::invalid_argument("zero denominator");
      r.canonicalize();
    } else if (dot != std::string::npos) {
      std::string digits = text.substr(0, dot) + text.substr(dot + 1);
      if (digits.empty() || digits == "-") digits += "0";
      mpz_class den = 1;
      for (std::size_t i = dot + 1; i < text.size(); ++i) den *= 10;
      r = Rational(mpz_class(digits, 10), den);
      r.canonicalize();
    } else {
      r = Rational(mpz_class(text, 10));
    }
  } catch (const std::invalid_argument&) {
    throw std::invalid_argument("not a rational literal: '" + text + "'");
  }
  return r;
}

template <class S>
S convert_rational(const Rational& r) {
  if constexpr (std::is_same_v<S, Rational>) {
    return r;
  } else {
    return r.get_d();
  }
}

} // namespace permwalk
