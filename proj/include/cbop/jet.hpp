#pragma once

#include <algorithm>
#include <cstddef>
#include <vector>

namespace cbop {

/// Truncated Taylor series f(t+s) = sum_r c_r s^r. Binary operations keep the
/// shorter of the two orders, so lost orders never masquerade as zeros.
template <class S>
class Jet {
 public:
  Jet() = default;
  explicit Jet(std::vector<S> coeffs) : c_(std::move(coeffs)) {}

  static Jet constant(const S& value, std::size_t order) {
    std::vector<S> c(order + 1, S(0));
    c[0] = value;
    return Jet(std::move(c));
  }

  /// Jet from raw derivatives f, f', f'', ...
  static Jet from_derivatives(const std::vector<S>& derivs) {
    std::vector<S> c(derivs.size());
    S fact(1);
    for (std::size_t r = 0; r < derivs.size(); ++r) {
      if (r > 0) fact *= S(static_cast<long>(r));
      c[r] = derivs[r] / fact;
    }
    return Jet(std::move(c));
  }

  std::size_t order() const { return c_.empty() ? 0 : c_.size() - 1; }
  const S& operator[](std::size_t r) const { return c_[r]; }
  S& operator[](std::size_t r) { return c_[r]; }
  const S& value() const { return c_.front(); }
  /// First derivative at the expansion point.
  const S& slope() const { return c_.at(1); }

  /// Jet of f'; one order shorter.
  Jet derivative() const {
    std::vector<S> c(c_.size() > 1 ? c_.size() - 1 : 0);
    for (std::size_t r = 0; r < c.size(); ++r) c[r] = S(static_cast<long>(r + 1)) * c_[r + 1];
    return Jet(std::move(c));
  }

  Jet truncated(std::size_t order) const {
    std::vector<S> c(c_.begin(), c_.begin() + std::min(c_.size(), order + 1));
    return Jet(std::move(c));
  }

  friend Jet operator+(const Jet& a, const Jet& b) {
    const std::size_t n = std::min(a.c_.size(), b.c_.size());
    std::vector<S> c(n);
    for (std::size_t r = 0; r < n; ++r) c[r] = a.c_[r] + b.c_[r];
    return Jet(std::move(c));
  }
  friend Jet operator-(const Jet& a, const Jet& b) {
    const std::size_t n = std::min(a.c_.size(), b.c_.size());
    std::vector<S> c(n);
    for (std::size_t r = 0; r < n; ++r) c[r] = a.c_[r] - b.c_[r];
    return Jet(std::move(c));
  }
  friend Jet operator-(const Jet& a) {
    std::vector<S> c(a.c_.size());
    for (std::size_t r = 0; r < c.size(); ++r) c[r] = -a.c_[r];
    return Jet(std::move(c));
  }
  friend Jet operator*(const Jet& a, const Jet& b) {
    const std::size_t n = std::min(a.c_.size(), b.c_.size());
    std::vector<S> c(n, S(0));
    for (std::size_t r = 0; r < n; ++r) {
      for (std::size_t q = 0; q <= r; ++q) c[r] += a.c_[q] * b.c_[r - q];
    }
    return Jet(std::move(c));
  }
  friend Jet operator/(const Jet& a, const Jet& b) {
    const std::size_t n = std::min(a.c_.size(), b.c_.size());
    std::vector<S> c(n, S(0));
    for (std::size_t r = 0; r < n; ++r) {
      S acc = a.c_[r];
      for (std::size_t q = 1; q <= r; ++q) acc -= b.c_[q] * c[r - q];
      c[r] = acc / b.c_[0];
    }
    return Jet(std::move(c));
  }

 private:
  std::vector<S> c_;
};

/// Jet of the solution u of u' = p(t) u + q(t) with u(t0) = value, given jets of p and q.
/// The result is one order longer than min(order p, order q).
template <class S>
Jet<S> solve_linear_ode_jet(const S& value, const Jet<S>& p, const Jet<S>& q) {
  const std::size_t n = std::min(p.order(), q.order()) + 1;
  std::vector<S> u(n + 1, S(0));
  u[0] = value;
  for (std::size_t r = 0; r < n; ++r) {
    S acc = q[r];
    for (std::size_t k = 0; k <= r; ++k) acc += p[k] * u[r - k];
    u[r + 1] = acc / S(static_cast<long>(r + 1));
  }
  return Jet<S>(std::move(u));
}

}  // namespace cbop
