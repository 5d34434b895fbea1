#pragma once

// Scalar arithmetic contract. Two modes share one generic code path:
//   Rational - exact GMP rationals, closed under + - * / with no rounding;
//   Real     - MPFR floats whose working precision (decimal digits) is the
//              process default set through PrecisionGuard.
// Every algorithm is a template on the scalar, so mixing modes is a compile error.

#include <Eigen/Core>
#include <boost/multiprecision/eigen.hpp>
#include <boost/multiprecision/gmp.hpp>
#include <boost/multiprecision/mpfr.hpp>

#include <climits>
#include <cmath>
#include <string>
#include <string_view>

#include "cbop/errors.hpp"

namespace cbop {

namespace bmp = boost::multiprecision;

using Integer = bmp::number<bmp::gmp_int, bmp::et_off>;
using Rational = bmp::number<bmp::gmp_rational, bmp::et_off>;
using Real = bmp::number<bmp::mpfr_float_backend<0>, bmp::et_off>;

template <class S>
using Matrix = Eigen::Matrix<S, Eigen::Dynamic, Eigen::Dynamic>;
template <class S>
using Vector = Eigen::Matrix<S, Eigen::Dynamic, 1>;

template <class S>
struct ScalarTraits;

template <>
struct ScalarTraits<Rational> {
  static constexpr bool exact = true;
  static constexpr std::string_view mode = "exact";
  static int digits() { return INT_MAX; }
};

template <>
struct ScalarTraits<Real> {
  static constexpr bool exact = false;
  static constexpr std::string_view mode = "real";
  static int digits() { return static_cast<int>(Real::default_precision()); }
};

template <>
struct ScalarTraits<double> {
  static constexpr bool exact = false;
  static constexpr std::string_view mode = "real";
  static int digits() { return 15; }
};

template <class S>
inline constexpr bool is_exact_v = ScalarTraits<S>::exact;

/// Sets the working precision of Real for the lifetime of the guard.
/// The precision is process-wide; concurrent real-mode work must agree on it.
class PrecisionGuard {
 public:
  explicit PrecisionGuard(unsigned digits) : saved_(Real::default_precision()) {
    Real::default_precision(digits);
  }
  ~PrecisionGuard() { Real::default_precision(saved_); }
  PrecisionGuard(const PrecisionGuard&) = delete;
  PrecisionGuard& operator=(const PrecisionGuard&) = delete;

 private:
  unsigned saved_;
};

template <class S>
S from_rational(const Rational& q) {
  if constexpr (std::is_same_v<S, Rational>) {
    return q;
  } else if constexpr (std::is_same_v<S, Real>) {
    return Real(bmp::numerator(q)) / Real(bmp::denominator(q));
  } else if constexpr (std::is_same_v<S, double>) {
    return q.template convert_to<double>();
  } else {
    return S(from_rational<typename S::value_type>(q));
  }
}

template <class S>
S from_int(long v) {
  return from_rational<S>(Rational(v));
}

template <class S>
S ratio(long num, long den) {
  return from_rational<S>(Rational(num, den));
}

template <class S>
double to_double(const S& x) {
  if constexpr (std::is_same_v<S, double>) {
    return x;
  } else {
    return x.template convert_to<double>();
  }
}

template <class S>
S abs_value(const S& x) {
  return x < S(0) ? S(-x) : x;
}

template <class S>
bool is_finite(const S& x) {
  if constexpr (std::is_same_v<S, Real>) {
    return static_cast<bool>(bmp::isfinite(x));
  } else if constexpr (std::is_same_v<S, double>) {
    return std::isfinite(x);
  } else {
    return true;
  }
}

/// 10^e in the scalar's own arithmetic (real modes only).
template <class S>
S power_of_ten(double e) {
  if constexpr (std::is_same_v<S, double>) {
    return std::pow(10.0, e);
  } else {
    return bmp::pow(S(10), S(e));
  }
}

bool is_integer(const Rational& q);

/// Parses "p/q", integers, and decimals ("0.25", "-1e-3") into an exact rational.
Rational parse_rational(std::string_view text);

/// Text form that reads back bit-exactly: "p/q" for rationals, scientific
/// notation with guard digits for reals.
std::string to_string(const Rational& q);
std::string to_string(const Real& x);
std::string to_string(double x);

template <class S>
S parse_scalar(std::string_view text);

template <>
Rational parse_scalar<Rational>(std::string_view text);
template <>
Real parse_scalar<Real>(std::string_view text);

}  // namespace cbop
