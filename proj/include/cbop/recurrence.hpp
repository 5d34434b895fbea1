#pragma once

// (k1+k2+2)-term recurrence
//   x (P_{n+1} + a_n P_n) = sum_{alpha=n-k2}^{n+k1+1} eta_{n,alpha} P_alpha,
//   a_n = -int P_{n+1} dmu_1 / int P_n dmu_1,
//   eta_{n,alpha} = <x (P_{n+1} + a_n P_n), Q_alpha> / h_alpha.
// Multiplication by x shifts the theta1-power index by k1, so the numerator is
// sum_{i,j} c_i q_j m_{i+k1,j}. The dual system for Q is the same computation on
// the transposed table.
//
// Instantiated over Dual<S> (a lifted table) every quantity carries its exact
// t-derivative, which is what the evolution and compatibility checks consume.

#include <algorithm>
#include <map>
#include <string>
#include <vector>

#include "cbop/biorth.hpp"

namespace cbop {

template <class S>
struct RecurrenceCoeffs {
  int n = 0;
  S a;
  std::map<int, S> eta;
  S a_hat;
  std::map<int, S> eta_hat;
};

/// e_n = d/dt(a_n h_n) / h_n and f_n = e_n a_{n-1} / e_{n-1} at one site.
template <class S>
struct EvolutionData {
  S e;
  S f;
};

template <class S>
class Recurrence {
 public:
  /// Builds P_0..P_N, Q_0..Q_N with N = min(rows, cols) - 1.
  explicit Recurrence(MomentTable<S> table)
      : table_(std::move(table)),
        family_(table_, static_cast<int>(std::min(table_.rows(), table_.cols())) - 1) {}

  const MomentTable<S>& table() const { return table_; }
  const CauchyFamily<S>& family() const { return family_; }
  int k1() const { return table_.k1(); }
  int k2() const { return table_.k2(); }
  int n_max() const { return family_.n_max(); }

  /// Highest site n whose full coefficient set fits the table.
  int last_site() const {
    return std::min(n_max() - k1() - 1, static_cast<int>(table_.rows()) - 2 - k1());
  }

  S a(int n) const {
    const S den = single_integral(family_.P(n), table_);
    if (den == S(0)) throw DegeneracyError("int P_n dmu_1 vanishes", n);
    return -single_integral(family_.P(n + 1), table_) / den;
  }

  /// Coefficients of P_{n+1} + a_n P_n.
  Vector<S> combination(int n) const {
    Vector<S> c = family_.P(n + 1).coeffs;
    c.head(n + 1) += a(n) * family_.P(n).coeffs;
    return c;
  }

  /// <x (P_{n+1} + a_n P_n), Q_alpha> / h_alpha for any alpha >= 0.
  S projection(int n, int alpha) const {
    if (alpha < 0) throw RangeError("projection: alpha must be nonnegative");
    const Vector<S> c = combination(n);
    const auto q = family_.Q(alpha);
    S out(0);
    for (Eigen::Index i = 0; i < c.size(); ++i) {
      S row(0);
      for (Eigen::Index j = 0; j < q.coeffs.size(); ++j) row += q.coeffs(j) * table_.m(i + k1(), j);
      out += c(i) * row;
    }
    return out / family_.h(alpha);
  }

  /// eta_{n,alpha} for alpha in [max(0, n-k2), n+k1+1].
  S eta(int n, int alpha) const {
    if (alpha < std::max(0, n - k2()) || alpha > n + k1() + 1) {
      throw RangeError("eta_{" + std::to_string(n) + "," + std::to_string(alpha) + "} outside the band");
    }
    return projection(n, alpha);
  }

  std::map<int, S> eta_band(int n) const {
    std::map<int, S> out;
    for (int alpha = std::max(0, n - k2()); alpha <= n + k1() + 1; ++alpha) out[alpha] = eta(n, alpha);
    return out;
  }

  /// x (P_{n+1} + a_n P_n) - sum_alpha eta_{n,alpha} P_alpha, as coefficients in x^{theta1 l}.
  BiorthPoly<S> residual(int n) const {
    const Vector<S> c = combination(n);
    BiorthPoly<S> out;
    out.coeffs = Vector<S>::Zero(c.size() + k1());
    out.coeffs.tail(c.size()) = c;
    for (const auto& [alpha, eta] : eta_band(n)) {
      const auto p = family_.P(alpha);
      out.coeffs.head(p.coeffs.size()) -= eta * p.coeffs;
    }
    out.side = Side::x;
    out.kind = PolyKind::P;
    out.n = static_cast<int>(out.coeffs.size()) - 1;
    out.k = k1();
    return out;
  }

  /// The same recurrence for Q_n (a-hat, eta-hat).
  Recurrence dual() const { return Recurrence(table_.transposed()); }

 private:
  MomentTable<S> table_;
  CauchyFamily<S> family_;
};

template <class S>
RecurrenceCoeffs<S> recurrence_coeffs(int n, const Recurrence<S>& rec, const Recurrence<S>& dual) {
  return {n, rec.a(n), rec.eta_band(n), dual.a(n), dual.eta_band(n)};
}

/// Table large enough for recurrence data at sites 0..n_hi with deriv_depth t-derivatives.
template <class S>
MomentTable<S> recurrence_table(const ModelParams& p, int n_hi, int deriv_depth) {
  return build_table<S>(p, n_hi + std::max(p.k1, p.k2) + 1, deriv_depth);
}

template <class S>
S a_coeff(int n, const MomentTable<S>& table) {
  return Recurrence<S>(table).a(n);
}

template <class S>
S eta_coeff(int n, int alpha, const MomentTable<S>& table) {
  return Recurrence<S>(table).eta(n, alpha);
}

template <class S>
BiorthPoly<S> recurrence_residual(int n, const MomentTable<S>& table) {
  return Recurrence<S>(table).residual(n);
}

/// Banded truncation of the recurrence for sites 0..N-1: x (M P) = L P with
/// M(n,n) = a_n, M(n,n+1) = 1 and L(n,alpha) = eta_{n,alpha}.
template <class S>
struct SpectralOperator {
  int N = 0;
  int k1 = 1;
  int k2 = 1;
  Matrix<S> L;
  Matrix<S> M;

  int lower_bandwidth() const { return k2; }
  int upper_bandwidth() const { return k1 + 1; }
};

template <class S>
SpectralOperator<S> build_spectral_operator(int N, const Recurrence<S>& rec) {
  if (N < 1 || N - 1 > rec.last_site()) throw RangeError("spectral operator: truncation exceeds table");
  SpectralOperator<S> op;
  op.N = N;
  op.k1 = rec.k1();
  op.k2 = rec.k2();
  const Eigen::Index width = N + rec.k1() + 1;
  op.L = Matrix<S>::Zero(N, width);
  op.M = Matrix<S>::Zero(N, width);
  for (int n = 0; n < N; ++n) {
    op.M(n, n) = rec.a(n);
    op.M(n, n + 1) = S(1);
    for (const auto& [alpha, eta] : rec.eta_band(n)) op.L(n, alpha) = eta;
  }
  return op;
}

/// Site n of x (M P) - L P with P the column of polynomials P_0, P_1, ...
template <class S>
Vector<S> spectral_residual(const SpectralOperator<S>& op, const CauchyFamily<S>& family, int n) {
  const Eigen::Index width = op.L.cols();
  Vector<S> out = Vector<S>::Zero(width + op.k1);
  for (Eigen::Index alpha = 0; alpha < width; ++alpha) {
    const auto p = family.P(static_cast<int>(alpha)).coeffs;
    if (op.M(n, alpha) != S(0)) out.segment(op.k1, p.size()) += op.M(n, alpha) * p;
    if (op.L(n, alpha) != S(0)) out.head(p.size()) -= op.L(n, alpha) * p;
  }
  return out;
}

// Time evolution. These take a recurrence over Dual<S>, i.e. built on a lifted table.

template <class S>
S evolution_e(int n, const Recurrence<Dual<S>>& rec) {
  const Dual<S> ah = rec.a(n) * rec.family().h(n);
  return ah.d / rec.family().h(n).v;
}

template <class S>
EvolutionData<S> evolution_data(int n, const Recurrence<Dual<S>>& rec) {
  if (n < 1) throw RangeError("f_n needs n >= 1");
  const S e = evolution_e(n, rec);
  const S e_prev = evolution_e(n - 1, rec);
  if (e_prev == S(0)) throw DegeneracyError("e_{n-1} vanishes, f_n undefined", n);
  return {e, e * rec.a(n - 1).v / e_prev};
}

/// d/dt (P_{n+1} + a_n P_n) - e_n P_n, coefficientwise.
template <class S>
Vector<S> evolution_residual(int n, const Recurrence<Dual<S>>& rec) {
  const Vector<Dual<S>> c = rec.combination(n);
  const auto p = rec.family().P(n).coeffs;
  const S e = evolution_e(n, rec);
  Vector<S> out(c.size());
  for (Eigen::Index i = 0; i < c.size(); ++i) out(i) = c(i).d - (i < p.size() ? S(e * p(i).v) : S(0));
  return out;
}

/// xi_alpha for alpha = n-k2 .. n+k1+1 from xi_{n+k1+1} = 1 and
/// xi_alpha + xi_{alpha+1} a_alpha = eta_{n,alpha} + f_n eta_{n-1,alpha}.
template <class S>
std::map<int, S> solve_xi_chain(int n, const Recurrence<S>& rec, const S& f) {
  std::map<int, S> xi;
  xi[n + rec.k1() + 1] = S(1);
  for (int alpha = n + rec.k1(); alpha >= n - rec.k2(); --alpha) {
    xi[alpha] = rec.projection(n, alpha) + f * rec.projection(n - 1, alpha) - xi[alpha + 1] * rec.a(alpha);
  }
  return xi;
}

template <class S>
struct GctResult {
  int n = 0;
  bool skipped = false;
  std::string reason;
  /// k1+k2+1 equations for alpha = n-k2..n+k1, then the lower boundary and the closure.
  std::vector<S> residuals;
};

/// Residuals of the compatibility system at site n.
template <class S>
GctResult<S> gct_residual(int n, const Recurrence<Dual<S>>& rec) {
  GctResult<S> out;
  out.n = n;
  const int lo = n - rec.k2() - 1;
  if (lo < 0) {
    out.skipped = true;
    out.reason = "boundary: index n-k2-1 = " + std::to_string(lo) + " is negative";
    return out;
  }
  if (n > rec.last_site()) {
    out.skipped = true;
    out.reason = "table too small for site " + std::to_string(n);
    return out;
  }
  const auto ev = evolution_data(n, rec);
  std::map<int, S> xi;
  for (const auto& [alpha, v] : solve_xi_chain(n, rec, Dual<S>(ev.f))) xi[alpha] = v.v;
  for (int alpha = n - rec.k2(); alpha <= n + rec.k1(); ++alpha) {
    const Dual<S> eta_n = rec.projection(n, alpha);
    const Dual<S> eta_prev = rec.projection(n - 1, alpha);
    const S e_alpha = evolution_e(alpha, rec);
    out.residuals.push_back(ev.e * eta_prev.v -
                            (eta_n.d + ev.f * eta_prev.d + xi[alpha + 1] * (e_alpha - rec.a(alpha).d)));
  }
  const Dual<S> eta_lo = rec.projection(n - 1, lo);
  const Dual<S> a_lo = rec.a(lo);
  out.residuals.push_back(ev.e * eta_lo.v -
                          (ev.f * eta_lo.d + xi[n - rec.k2()] * (evolution_e(lo, rec) - a_lo.d)));
  out.residuals.push_back(ev.f * eta_lo.v - xi[n - rec.k2()] * a_lo.v);
  return out;
}

}  // namespace cbop
