#pragma once

// Exact rational arithmetic and the extended-precision float used by the
// large-n evaluation paths.

#include <boost/multiprecision/cpp_bin_float.hpp>
#include <boost/multiprecision/cpp_dec_float.hpp>
#include <boost/multiprecision/gmp.hpp>

#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>

namespace inhomo {

using Rational = boost::multiprecision::mpq_rational;
using BigInt = boost::multiprecision::mpz_int;

// 50 decimal digits; comfortably beyond an x87 80-bit significand.
using HighFloat = boost::multiprecision::cpp_bin_float_50;

namespace detail {

// Decimal only: the GMP string constructor would read "025" as octal.
inline BigInt parse_decimal_integer(const std::string& s) {
  std::size_t i = (!s.empty() && (s[0] == '-' || s[0] == '+')) ? 1 : 0;
  if (i == s.size()) throw std::invalid_argument("missing digits in '" + s + "'");
  for (std::size_t k = i; k < s.size(); ++k)
    if (s[k] < '0' || s[k] > '9') throw std::invalid_argument("malformed integer '" + s + "'");
  auto nz = s.find_first_not_of('0', i);
  BigInt v = nz == std::string::npos ? BigInt(0) : BigInt(s.substr(nz));
  return s[0] == '-' ? BigInt(-v) : v;
}

}  // namespace detail

/// Parses "p/q", "p" or a plain decimal such as "0.25" into an exact rational.
inline Rational parse_rational(std::string_view text) {
  std::string s(text);
  auto first = s.find_first_not_of(" \t");
  auto last = s.find_last_not_of(" \t");
  if (first == std::string::npos) throw std::invalid_argument("empty rational literal");
  s = s.substr(first, last - first + 1);
  try {
    auto slash = s.find('/');
    if (slash != std::string::npos) {
      BigInt num = detail::parse_decimal_integer(s.substr(0, slash));
      BigInt den = detail::parse_decimal_integer(s.substr(slash + 1));
      if (den == 0) throw std::invalid_argument("zero denominator in '" + s + "'");
      return Rational(num, den);
    }
    auto dot = s.find('.');
    if (dot == std::string::npos) return Rational(detail::parse_decimal_integer(s));
    // exact decimal: 1.25 -> 125/100
    std::string digits = s.substr(0, dot) + s.substr(dot + 1);
    BigInt scale = 1;
    for (std::size_t i = dot + 1; i < s.size(); ++i) scale *= 10;
    return Rational(detail::parse_decimal_integer(digits), scale);
  } catch (const std::invalid_argument&) {
    throw;
  } catch (const std::exception&) {
    throw std::invalid_argument("malformed rational literal '" + s + "'");
  }
}

/// "p/q" with q omitted when it is 1.
inline std::string to_string(const Rational& x) {
  auto num = boost::multiprecision::numerator(x);
  auto den = boost::multiprecision::denominator(x);
  if (den == 1) return num.str();
  return num.str() + "/" + den.str();
}

/// Decimal rendering with the requested number of significant digits.
inline std::string to_decimal(const Rational& x, int digits = 20) {
  using Dec = boost::multiprecision::number<boost::multiprecision::cpp_dec_float<60>>;
  Dec num(boost::multiprecision::numerator(x).str());
  Dec den(boost::multiprecision::denominator(x).str());
  Dec value = num / den;
  return value.str(digits, std::ios_base::scientific);
}

inline double to_double(const Rational& x) { return x.convert_to<double>(); }

/// Natural log of a positive rational without going through double, so huge
/// counts stay representable.
inline double log_of(const Rational& x) {
  if (x <= 0) throw std::domain_error("log_of: non-positive argument");
  HighFloat num(boost::multiprecision::numerator(x));
  HighFloat den(boost::multiprecision::denominator(x));
  return static_cast<double>(log(num) - log(den));
}

template <class T>
T ipow(T base, std::uint64_t exp) {
  T result(1);
  while (exp != 0) {
    if (exp & 1u) result *= base;
    exp >>= 1u;
    if (exp != 0) base *= base;
  }
  return result;
}

inline BigInt factorial(unsigned n) {
  BigInt f = 1;
  for (unsigned k = 2; k <= n; ++k) f *= k;
  return f;
}

inline BigInt binomial(std::uint64_t n, std::uint64_t k) {
  if (k > n) return 0;
  if (k > n - k) k = n - k;
  BigInt b = 1;
  for (std::uint64_t i = 1; i <= k; ++i) {
    b *= n - k + i;
    b /= i;
  }
  return b;
}

}  // namespace inhomo
