#pragma once

// Half-line quadrature by the double-exponential (exp-sinh) substitution
//   x = exp(pi/2 sinh u),  dx = pi/2 cosh u * x du,
// followed by the trapezoid rule in u with step h = 2^-level. The window in u is
// sized from a decay model of the integrand so that the discarded tails fall
// below the working precision. Levels are refined by step halving (reusing the
// previous nodes) until two successive levels agree to half the target digits.

#include <cmath>
#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include "cbop/scalar.hpp"
#include "cbop/special.hpp"

namespace cbop {

/// Asymptotic shape of an integrand on (0, inf).
struct DecayModel {
  double power_at_zero = 0.0;  ///< integrand ~ x^p as x -> 0 (p > -1)
  double exp_rate = 1.0;       ///< integrand ~ e^{-rate x} at infinity; 0 selects algebraic decay
  double alg_power = 2.0;      ///< integrand ~ x^{-q} at infinity when exp_rate == 0 (q > 1)
  double growth_degree = 0.0;  ///< polynomial growth preceding the exponential tail
};

/// u-window [lo, hi] whose complement contributes below 10^-digits.
inline std::pair<double, double> exp_sinh_window(const DecayModel& model, double digits) {
  const double target = digits * std::log(10.0) + 5.0;
  const double p1 = std::max(model.power_at_zero + 1.0, 1e-3);
  const double lo = -std::asinh(2.0 / M_PI * target / p1);
  double log_x_hi;
  if (model.exp_rate > 0.0) {
    // smallest x with rate*x - m*log(x) >= target; fixed point converges fast
    const double m = std::max(model.growth_degree + model.power_at_zero + 1.0, 0.0);
    double x = target / model.exp_rate + 1.0;
    for (int it = 0; it < 50; ++it) x = (target + m * std::log(std::max(x, 1.0))) / model.exp_rate;
    log_x_hi = std::log(std::max(x, 1.0));
  } else {
    log_x_hi = target / std::max(model.alg_power - 1.0, 1e-3);
  }
  const double hi = std::asinh(2.0 / M_PI * log_x_hi);
  return {lo, hi};
}

/// Explicit node/weight list: integral of g over (0, inf) ~ sum w_k g(x_k).
template <class S>
struct DeRule {
  std::vector<S> x;
  std::vector<S> w;
  int level = 0;
};

template <class S>
DeRule<S> exp_sinh_rule(int level, std::pair<double, double> window) {
  using std::cosh;
  using std::exp;
  using std::sinh;
  DeRule<S> rule;
  rule.level = level;
  const S h = S(1) / from_int<S>(1L << level);
  const S half_pi = pi_constant<S>() / S(2);
  const long k_lo = static_cast<long>(std::floor(window.first * (1L << level)));
  const long k_hi = static_cast<long>(std::ceil(window.second * (1L << level)));
  for (long k = k_lo; k <= k_hi; ++k) {
    const S u = from_int<S>(k) * h;
    const S x = exp(half_pi * sinh(u));
    rule.x.push_back(x);
    rule.w.push_back(h * half_pi * cosh(u) * x);
  }
  return rule;
}

template <class S>
struct QuadratureResult {
  S value;
  int level = 0;
  std::size_t nodes = 0;
};

template <class S>
struct VectorQuadratureResult {
  std::vector<S> values;
  int level = 0;
  std::size_t nodes = 0;
};

/// Adaptive exp-sinh integration of a vector-valued f over (0, inf) on one shared
/// node set. f(x, w, acc) adds w * f(x) into acc componentwise. Stops when every
/// component agrees with the previous level to digits/2 decimal digits.
template <class S, class F>
VectorQuadratureResult<S> integrate_adaptive_vector(F&& f, std::size_t count, const DecayModel& model,
                                                    double digits, int max_level = 12) {
  using std::cosh;
  using std::exp;
  using std::sinh;
  const auto window = exp_sinh_window(model, digits);
  const S half_pi = pi_constant<S>() / S(2);
  std::vector<S> sum(count, S(0));
  std::size_t nodes = 0;
  auto add_node = [&](long k, int level) {
    const S u = from_int<S>(k) / from_int<S>(1L << level);
    const S x = exp(half_pi * sinh(u));
    ++nodes;
    if (x == S(0) || !is_finite(x)) return;
    f(x, S(half_pi * cosh(u) * x), sum);
  };
  // Level 0 sums every integer node; level L adds the odd multiples of 2^-L.
  for (long k = static_cast<long>(std::floor(window.first)); k <= static_cast<long>(std::ceil(window.second)); ++k) {
    add_node(k, 0);
  }
  std::vector<S> previous = sum;
  const S tol = power_of_ten<S>(-digits / 2.0);
  for (int level = 1; level <= max_level; ++level) {
    const long scale = 1L << level;
    const long k_lo = static_cast<long>(std::floor(window.first * scale));
    const long k_hi = static_cast<long>(std::ceil(window.second * scale));
    for (long k = k_lo; k <= k_hi; ++k) {
      if (k % 2 != 0) add_node(k, level);
    }
    std::vector<S> value(count);
    bool converged = level >= 2;
    for (std::size_t c = 0; c < count; ++c) {
      value[c] = sum[c] / from_int<S>(scale);
      if (abs_value(S(value[c] - previous[c])) > tol * abs_value(value[c])) converged = false;
    }
    if (converged) return {value, level, nodes};
    previous = std::move(value);
  }
  throw QuadratureError("exp-sinh quadrature did not converge by level " + std::to_string(max_level));
}

/// Scalar form of integrate_adaptive_vector.
template <class S, class F>
QuadratureResult<S> integrate_adaptive(F&& f, const DecayModel& model, double digits, int max_level = 12) {
  auto g = [&](const S& x, const S& w, std::vector<S>& acc) { acc[0] += w * f(x); };
  auto r = integrate_adaptive_vector<S>(g, 1, model, digits, max_level);
  return {r.values[0], r.level, r.nodes};
}

/// x^power * poly(x) * e^{-rate x}; an empty poly means 1.
struct HalfLineIntegrand {
  Rational power{0};
  std::vector<Rational> poly;
  Rational rate{1};
};

template <class S>
S evaluate_poly(const std::vector<S>& coeffs, const S& x) {
  S acc(0);
  for (auto it = coeffs.rbegin(); it != coeffs.rend(); ++it) acc = acc * x + *it;
  return acc;
}

/// Integral of the descriptor over (0, inf) at the current working precision.
template <class S>
S integrate_halfline(const HalfLineIntegrand& f) {
  if constexpr (is_exact_v<S>) {
    throw ModeError("integrate_halfline: quadrature requires real mode");
  } else {
    if (!(f.rate > 0)) throw DomainError("integrate_halfline: decay rate must be positive");
    if (!(f.power > -1)) throw DomainError("integrate_halfline: x^c with c <= -1 is not integrable");
    std::vector<S> poly;
    for (const auto& c : f.poly) poly.push_back(from_rational<S>(c));
    if (poly.empty()) poly.push_back(S(1));
    const S power = from_rational<S>(f.power);
    const S rate = from_rational<S>(f.rate);
    DecayModel model;
    model.power_at_zero = to_double(f.power);
    model.exp_rate = to_double(f.rate);
    model.growth_degree = static_cast<double>(poly.size() - 1);
    const double digits = ScalarTraits<S>::digits();
    auto g = [&](const S& x) {
      using std::exp;
      using std::pow;
      return S(pow(x, power) * evaluate_poly(poly, x) * exp(-rate * x));
    };
    return integrate_adaptive<S>(g, model, digits).value;
  }
}

}  // namespace cbop
