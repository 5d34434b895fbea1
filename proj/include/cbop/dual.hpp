#pragma once

// Forward-mode derivative scalar. A moment table lifted to Dual<S> carries
// (m_ij, dm_ij/dt) with the derivative from the shift rule, so any rational
// expression in the moments yields its exact t-derivative in the same pass.

#include <Eigen/Core>

#include "cbop/scalar.hpp"

namespace cbop {

template <class S>
struct Dual {
  using value_type = S;

  S v{0};
  S d{0};

  Dual() = default;
  Dual(const S& value) : v(value), d(0) {}  // NOLINT: constants embed implicitly
  Dual(const S& value, const S& deriv) : v(value), d(deriv) {}
  Dual(int c) : v(c), d(0) {}  // NOLINT

  Dual& operator+=(const Dual& o) {
    v += o.v;
    d += o.d;
    return *this;
  }
  Dual& operator-=(const Dual& o) {
    v -= o.v;
    d -= o.d;
    return *this;
  }
  Dual& operator*=(const Dual& o) {
    d = d * o.v + v * o.d;
    v *= o.v;
    return *this;
  }
  Dual& operator/=(const Dual& o) {
    d = (d * o.v - v * o.d) / (o.v * o.v);
    v /= o.v;
    return *this;
  }

  friend Dual operator+(Dual a, const Dual& b) { return a += b; }
  friend Dual operator-(Dual a, const Dual& b) { return a -= b; }
  friend Dual operator*(Dual a, const Dual& b) { return a *= b; }
  friend Dual operator/(Dual a, const Dual& b) { return a /= b; }
  friend Dual operator-(const Dual& a) { return Dual(-a.v, -a.d); }

  // Ordering and equality look at the value only; a zero test guards divisions.
  friend bool operator==(const Dual& a, const Dual& b) { return a.v == b.v; }
  friend bool operator!=(const Dual& a, const Dual& b) { return a.v != b.v; }
  friend bool operator<(const Dual& a, const Dual& b) { return a.v < b.v; }
  friend bool operator>(const Dual& a, const Dual& b) { return a.v > b.v; }
  friend bool operator<=(const Dual& a, const Dual& b) { return a.v <= b.v; }
  friend bool operator>=(const Dual& a, const Dual& b) { return a.v >= b.v; }
};

template <class S>
struct ScalarTraits<Dual<S>> {
  static constexpr bool exact = ScalarTraits<S>::exact;
  static constexpr std::string_view mode = ScalarTraits<S>::mode;
  static int digits() { return ScalarTraits<S>::digits(); }
};

template <class S>
const S& value_of(const S& x) {
  return x;
}
template <class S>
const S& value_of(const Dual<S>& x) {
  return x.v;
}

template <class S>
Dual<S> abs_value(const Dual<S>& x) {
  return x.v < S(0) ? -x : x;
}

template <class S>
double to_double(const Dual<S>& x) {
  return to_double(x.v);
}

template <class S>
bool is_finite(const Dual<S>& x) {
  return is_finite(x.v) && is_finite(x.d);
}

/// Hirota bilinear derivative D_t f.g = f' g - f g' on (value, derivative) pairs.
template <class S>
S hirota(const Dual<S>& f, const Dual<S>& g) {
  return f.d * g.v - f.v * g.d;
}

}  // namespace cbop

namespace Eigen {
template <class S>
struct NumTraits<cbop::Dual<S>> : NumTraits<S> {
  using Real = cbop::Dual<S>;
  using NonInteger = cbop::Dual<S>;
  using Nested = cbop::Dual<S>;
  using Literal = cbop::Dual<S>;
  enum {
    IsComplex = 0,
    IsInteger = 0,
    IsSigned = 1,
    RequireInitialization = 1,
    ReadCost = 2,
    AddCost = 8,
    MulCost = 24
  };
};
}  // namespace Eigen
