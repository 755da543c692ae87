#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <string>
#include <string_view>
#include <type_traits>

#include <boost/multiprecision/gmp.hpp>

namespace g2mu {

using Integer = boost::multiprecision::number<boost::multiprecision::gmp_int,
                                              boost::multiprecision::et_off>;
using Rational = boost::multiprecision::number<boost::multiprecision::gmp_rational,
                                               boost::multiprecision::et_off>;
using Complex = std::complex<double>;

/// Parses "p/q", "p" or "-p/q". Throws std::invalid_argument on anything else
/// (including a zero denominator).
Rational parse_rational(std::string_view text);

/// Canonical "p/q" form; integers are printed without a denominator.
std::string format_rational(const Rational& value);

/// Representative of value modulo 1 in [0, 1).
Rational mod1(const Rational& value);

Integer floor_rational(const Rational& value);

inline double to_double(const Rational& value) { return value.convert_to<double>(); }

/// Scalar behaviour shared by the exact and floating backends.
template <class S>
struct ScalarTraits;

template <>
struct ScalarTraits<Rational> {
  static constexpr bool exact = true;
  static bool is_zero(const Rational& x, double /*scale*/ = 1.0) { return x == 0; }
  static double magnitude(const Rational& x) { return std::abs(to_double(x)); }
  static Rational conj(const Rational& x) { return x; }
  static Rational from_rational(const Rational& x) { return x; }
};

template <>
struct ScalarTraits<double> {
  static constexpr bool exact = false;
  static constexpr double kTolerance = 1e-10;
  static bool is_zero(double x, double scale = 1.0) {
    return std::abs(x) <= kTolerance * std::max(1.0, scale);
  }
  static double magnitude(double x) { return std::abs(x); }
  static double conj(double x) { return x; }
  static double from_rational(const Rational& x) { return to_double(x); }
};

template <>
struct ScalarTraits<Complex> {
  static constexpr bool exact = false;
  static constexpr double kTolerance = 1e-10;
  static bool is_zero(const Complex& x, double scale = 1.0) {
    return std::abs(x) <= kTolerance * std::max(1.0, scale);
  }
  static double magnitude(const Complex& x) { return std::abs(x); }
  static Complex conj(const Complex& x) { return std::conj(x); }
  static Complex from_rational(const Rational& x) { return Complex(to_double(x), 0.0); }
};

/// Converts between scalar backends. Rational -> floating is lossy; floating ->
/// Rational is not provided.
template <class To, class From>
To scalar_cast(const From& x) {
  if constexpr (std::is_same_v<To, From>) {
    return x;
  } else if constexpr (std::is_same_v<From, Rational>) {
    return ScalarTraits<To>::from_rational(x);
  } else {
    static_assert(!std::is_same_v<To, Rational>, "no conversion from floating to exact");
    return To(x);
  }
}

}  // namespace g2mu
