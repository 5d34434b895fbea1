#pragma once

#include <boost/math/constants/constants.hpp>

#include <cmath>
#include <type_traits>

#include "cbop/scalar.hpp"

namespace cbop {

Integer factorial(unsigned n);

/// Gamma function. Real mode delegates to mpfr_gamma at the working precision;
/// exact mode accepts positive integers only and returns (x-1)!.
template <class S>
S gamma(const S& x) {
  if (!(x > S(0))) throw DomainError("gamma: argument must be positive");
  if constexpr (std::is_same_v<S, Rational>) {
    if (!is_integer(x)) throw ModeError("gamma: non-integer argument has no exact value");
    return Rational(factorial(static_cast<unsigned>(bmp::numerator(x).template convert_to<long>() - 1)));
  } else if constexpr (std::is_same_v<S, double>) {
    return std::tgamma(x);
  } else {
    return bmp::tgamma(x);
  }
}

/// Rising factorial (a)_m = a (a+1) ... (a+m-1); (a)_0 = 1.
template <class S>
S pochhammer(const S& a, unsigned m) {
  S out(1);
  for (unsigned k = 0; k < m; ++k) out *= a + S(static_cast<long>(k));
  return out;
}

/// base^e for a rational exponent. Integer exponents stay exact; fractional
/// exponents require real mode.
template <class S>
S rational_power(const S& base, const Rational& e) {
  if (is_integer(e)) {
    const long k = bmp::numerator(e).template convert_to<long>();
    S out(1);
    S b = k < 0 ? S(S(1) / base) : base;
    for (long i = 0; i < std::labs(k); ++i) out *= b;
    return out;
  }
  if constexpr (is_exact_v<S>) {
    throw ModeError("rational_power: fractional exponent in exact mode");
  } else if constexpr (std::is_same_v<S, double>) {
    return std::pow(base, e.template convert_to<double>());
  } else {
    if (!(base > S(0))) throw DomainError("rational_power: fractional power of a non-positive base");
    return bmp::pow(base, from_rational<S>(e));
  }
}

/// x^(1/k) for x > 0. Exact mode succeeds only on perfect k-th powers.
template <class S>
S theta_root(const S& x, int k) {
  if (k == 1) return x;
  if (!(x > S(0))) throw DomainError("theta_root: argument must be positive");
  if constexpr (std::is_same_v<S, Rational>) {
    auto exact_root = [k](const Integer& v) -> Integer {
      // integer k-th root by bisection on [0, v]
      Integer lo = 0;
      Integer hi = v + 1;
      while (hi - lo > 1) {
        Integer mid = (lo + hi) / 2;
        if (bmp::pow(mid, static_cast<unsigned>(k)) <= v) lo = mid;
        else hi = mid;
      }
      if (bmp::pow(lo, static_cast<unsigned>(k)) != v) {
        throw ModeError("theta_root: argument is not a perfect power");
      }
      return lo;
    };
    return Rational(exact_root(bmp::numerator(x)), exact_root(bmp::denominator(x)));
  } else if constexpr (std::is_same_v<S, double>) {
    return std::pow(x, 1.0 / k);
  } else {
    return bmp::pow(x, S(1) / S(k));
  }
}

template <class S>
S pi_constant() {
  if constexpr (std::is_same_v<S, double>) {
    return 3.14159265358979323846;
  } else {
    return boost::math::constants::pi<S>();
  }
}

}  // namespace cbop
