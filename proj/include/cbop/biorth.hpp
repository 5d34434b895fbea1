#pragma once

// Cauchy bi-orthogonal families over the theta-power basis. A BiorthPoly of
// degree n stores c_0..c_n, meaning sum_l c_l z^l with z = x^{1/k}.
//
// The monic families come from one elimination of the moment block
// M = (m_ij)_{i,j<=N} without pivoting, M = L D U with L unit lower and U unit
// upper triangular. Row n of L^{-1} holds the coefficients of P_n and column n
// of U^{-1} those of Q_n, since L^{-1} M = D U and M U^{-1} = L D vanish below
// and above the diagonal. The pivots are D_n = tau_{n+1}/tau_n = h_n.
//
// The Laguerre families (Jacobi xi/psi, hat-P/hat-Q) are built from the
// rational cores c_{n,l}, d_{n,l}. Hat polynomials keep the Gamma arguments of
// their divisors so exact checks can run on the cores alone.

#include "json.hpp"

#include <string>
#include <vector>

#include "cbop/determinant.hpp"
#include "cbop/moments.hpp"
#include "cbop/special.hpp"

namespace cbop {

enum class PolyKind { P, Q, hatP, hatQ, jacobiXi, jacobiPsi };

std::string to_string(PolyKind kind);

template <class S>
struct BiorthPoly {
  Vector<S> coeffs;
  Side side = Side::x;
  PolyKind kind = PolyKind::P;
  int n = 0;
  /// Root index k; the basis is x^{l/k}.
  int k = 1;
  /// Hat families: coeffs[l] = core[l] / Gamma(gamma_args[l]). Empty otherwise.
  std::vector<Rational> core;
  std::vector<Rational> gamma_args;

  Rational theta() const { return Rational(1, k); }
  const S& leading() const { return coeffs(coeffs.size() - 1); }

  /// Value at x > 0 (x = 0 returns c_0). One k-th root, then Horner in z.
  S operator()(const S& x) const {
    if (x == S(0)) return coeffs(0);
    const S z = theta_root(x, k);
    S acc(0);
    for (Eigen::Index l = coeffs.size() - 1; l >= 0; --l) acc = acc * z + coeffs(l);
    return acc;
  }
};

template <class S>
S evaluate(const BiorthPoly<S>& p, const S& x) {
  return p(x);
}

/// sum_{i,j} p_i q_j m_{i,j}.
template <class S>
S inner_product(const BiorthPoly<S>& p, const BiorthPoly<S>& q, const MomentTable<S>& table) {
  if (p.side != Side::x || q.side != Side::y) {
    throw DomainError("inner_product: expects an x-side and a y-side polynomial");
  }
  if (p.coeffs.size() > table.rows() || q.coeffs.size() > table.cols()) {
    throw RangeError("inner_product: table does not cover degrees " + std::to_string(p.n) + "," +
                     std::to_string(q.n));
  }
  S out(0);
  for (Eigen::Index i = 0; i < p.coeffs.size(); ++i) {
    if (p.coeffs(i) == S(0)) continue;
    S row(0);
    for (Eigen::Index j = 0; j < q.coeffs.size(); ++j) row += q.coeffs(j) * table.m(i, j);
    out += p.coeffs(i) * row;
  }
  return out;
}

/// integral of p against the single measure on its side: sum_i p_i phi_hat_i (or phi_i).
template <class S>
S single_integral(const BiorthPoly<S>& p, const MomentTable<S>& table) {
  S out(0);
  for (Eigen::Index i = 0; i < p.coeffs.size(); ++i) out += p.coeffs(i) * table.single(p.side, i);
  return out;
}

/// Monic P_0..P_N and Q_0..Q_N of one moment table, N = n_max.
template <class S>
class CauchyFamily {
 public:
  CauchyFamily(const MomentTable<S>& table, int n_max) : k1_(table.k1()), k2_(table.k2()) {
    if (n_max < 0) throw RangeError("CauchyFamily: n_max must be nonnegative");
    const Eigen::Index size = n_max + 1;
    if (table.rows() < size || table.cols() < size) {
      throw RangeError("CauchyFamily: table does not cover index " + std::to_string(n_max));
    }
    const Matrix<S> block = table.bimoments().topLeftCorner(size, size);
    tau_.resize(size + 1);
    tau_[0] = S(1);
    for (Eigen::Index n = 1; n <= size; ++n) {
      tau_[n] = det(block.topLeftCorner(n, n).eval());
      if (tau_[n] == S(0)) throw DegeneracyError("tau vanishes", static_cast<int>(n));
    }
    p_ = unit_lower_inverse(block);
    q_ = unit_lower_inverse(Matrix<S>(block.transpose()));
  }

  int n_max() const { return static_cast<int>(p_.rows()) - 1; }
  const S& tau(int n) const { return tau_.at(n); }

  /// h_n = tau_{n+1} / tau_n.
  S h(int n) const {
    check(n);
    return tau_[n + 1] / tau_[n];
  }

  BiorthPoly<S> P(int n) const { return make(p_, n, Side::x, PolyKind::P, k1_); }
  BiorthPoly<S> Q(int n) const { return make(q_, n, Side::y, PolyKind::Q, k2_); }

 private:
  void check(int n) const {
    if (n < 0 || n > n_max()) throw RangeError("CauchyFamily: degree " + std::to_string(n) + " not built");
  }

  BiorthPoly<S> make(const Matrix<S>& rows, int n, Side side, PolyKind kind, int k) const {
    check(n);
    BiorthPoly<S> out;
    out.coeffs = rows.row(n).head(n + 1).transpose();
    out.side = side;
    out.kind = kind;
    out.n = n;
    out.k = k;
    return out;
  }

  // L^{-1} for M = L D U, by elimination on [M | I] without row exchanges.
  static Matrix<S> unit_lower_inverse(Matrix<S> a) {
    const Eigen::Index n = a.rows();
    Matrix<S> inv = Matrix<S>::Identity(n, n);
    for (Eigen::Index k = 0; k < n; ++k) {
      const S pivot = a(k, k);
      if (pivot == S(0)) throw DegeneracyError("zero pivot in moment elimination", static_cast<int>(k + 1));
      for (Eigen::Index i = k + 1; i < n; ++i) {
        const S l = a(i, k) / pivot;
        if (l == S(0)) continue;
        a.row(i).tail(n - k) -= l * a.row(k).tail(n - k);
        inv.row(i).head(k + 1) -= l * inv.row(k).head(k + 1);
      }
    }
    return inv;
  }

  int k1_;
  int k2_;
  std::vector<S> tau_;
  Matrix<S> p_;
  Matrix<S> q_;
};

template <class S>
BiorthPoly<S> cauchy_P(int n, const MomentTable<S>& table) {
  return CauchyFamily<S>(table, n).P(n);
}

template <class S>
BiorthPoly<S> cauchy_Q(int n, const MomentTable<S>& table) {
  return CauchyFamily<S>(table, n).Q(n);
}

// Laguerre families.

/// c_{n,i} = (-1)^i ((1+a+b+theta1 i)/theta2)_n / (i! (n-i)!); d_{n,i} with the roles exchanged.
std::vector<Rational> jacobi_core(int n, Side side, const ModelParams& p);

namespace detail {

template <class S>
BiorthPoly<S> from_core(const std::vector<Rational>& core, int n, Side side, PolyKind kind, int k) {
  BiorthPoly<S> out;
  out.coeffs.resize(static_cast<Eigen::Index>(core.size()));
  for (std::size_t l = 0; l < core.size(); ++l) out.coeffs(static_cast<Eigen::Index>(l)) = from_rational<S>(core[l]);
  out.side = side;
  out.kind = kind;
  out.n = n;
  out.k = k;
  return out;
}

}  // namespace detail

template <class S>
BiorthPoly<S> jacobi_xi(int n, const ModelParams& p) {
  return detail::from_core<S>(jacobi_core(n, Side::x, p), n, Side::x, PolyKind::jacobiXi, p.k1);
}

template <class S>
BiorthPoly<S> jacobi_psi(int n, const ModelParams& p) {
  return detail::from_core<S>(jacobi_core(n, Side::y, p), n, Side::y, PolyKind::jacobiPsi, p.k2);
}

/// int_0^1 xi(x^{theta1}) psi(x^{theta2}) x^{a+b} dx, termwise 1/(1+a+b+theta1 i+theta2 j).
template <class S>
S jacobi_inner_product(const BiorthPoly<S>& xi, const BiorthPoly<S>& psi, const ModelParams& p) {
  S out(0);
  for (Eigen::Index i = 0; i < xi.coeffs.size(); ++i) {
    for (Eigen::Index j = 0; j < psi.coeffs.size(); ++j) {
      out += xi.coeffs(i) * psi.coeffs(j) / from_rational<S>(1 + p.a + p.b + p.theta1() * i + p.theta2() * j);
    }
  }
  return out;
}

/// h~_n = 1 / (1+a+b+(theta1+theta2) n).
template <class S>
S jacobi_h(int n, const ModelParams& p) {
  return from_rational<S>(1 / (1 + p.a + p.b + (p.theta1() + p.theta2()) * n));
}

template <class S>
BiorthPoly<S> hat_P(int n, const ModelParams& p) {
  auto out = jacobi_xi<S>(n, p);
  out.kind = PolyKind::hatP;
  out.core = jacobi_core(n, Side::x, p);
  for (int l = 0; l <= n; ++l) {
    out.gamma_args.push_back(1 + p.a + p.theta1() * l);
    out.coeffs(l) /= detail::gamma_at<S>(out.gamma_args.back());
  }
  return out;
}

/// hat-Q_n is hat-P_n with a <-> b, x <-> y, theta1 <-> theta2.
template <class S>
BiorthPoly<S> hat_Q(int n, const ModelParams& p) {
  auto out = hat_P<S>(n, p.swapped());
  out.side = Side::y;
  out.kind = PolyKind::hatQ;
  return out;
}

/// Scalar turning hat-P_n (side x) or hat-Q_n (side y) into the monic P_n, Q_n:
/// Gamma(1+a+theta1 n) / c_{n,n}.
template <class S>
S monic_factor(int n, Side side, const ModelParams& p) {
  const ModelParams q = side == Side::x ? p : p.swapped();
  const Rational lead = jacobi_core(n, Side::x, q).back();
  return detail::gamma_at<S>(1 + q.a + q.theta1() * n) / from_rational<S>(lead);
}

/// Closed-form h_n of the Cauchy-Laguerre family.
template <class S>
S laguerre_h(int n, const ModelParams& p) {
  using detail::gamma_at;
  const Rational th1 = p.theta1();
  const Rational th2 = p.theta2();
  const Rational c = 1 + p.a + p.b;
  const Rational e = c + (th1 + th2) * n;
  S num = gamma_at<S>(Rational(n + 1)) * gamma_at<S>(Rational(n + 1)) * gamma_at<S>(1 + p.a + th1 * n) *
          gamma_at<S>(1 + p.b + th2 * n) * gamma_at<S>((c + th1 * n) / th2) * gamma_at<S>((c + th2 * n) / th1);
  S den = from_rational<S>(e) * gamma_at<S>(e / th2) * gamma_at<S>(e / th1);
  return num / den;
}

/// Residues of the contour integrand of hat-P_n at u = 0, -1, ..., -n, each
/// without its x^{theta1 l} factor. Res_{u=-l} Gamma(u) = (-1)^l / l!.
template <class S>
std::vector<S> residue_coefficients(int n, const ModelParams& p) {
  if constexpr (is_exact_v<S>) {
    throw ModeError("residue evaluation runs in real mode");
  } else {
    using detail::gamma_at;
    std::vector<S> out;
    for (int l = 0; l <= n; ++l) {
      // u = -l: (1+a+b-theta1 u)/theta2 = (1+a+b+theta1 l)/theta2
      const Rational arg = (1 + p.a + p.b + p.theta1() * l) / p.theta2();
      const S res_gamma = from_rational<S>(Rational(l % 2 == 0 ? 1 : -1)) / gamma_at<S>(Rational(l + 1));
      out.push_back(gamma_at<S>(arg + n) * res_gamma /
                    (gamma_at<S>(Rational(n - l + 1)) * gamma_at<S>(1 + p.a + p.theta1() * l) * gamma_at<S>(arg)));
    }
    return out;
  }
}

/// Sum of residues of the contour representation of hat-P_n at x > 0.
template <class S>
S residue_eval_hatP(int n, const S& x, const ModelParams& p) {
  if constexpr (is_exact_v<S>) {
    throw ModeError("residue evaluation runs in real mode");
  } else {
    if (!(x > S(0))) throw DomainError("residue_eval_hatP: x must be positive");
    const auto res = residue_coefficients<S>(n, p);
    const S z = theta_root(x, p.k1);
    S out(0);
    S zl(1);
    for (const auto& r : res) {
      out += r * zl;
      zl *= z;
    }
    return out;
  }
}

template <class S>
S residue_eval_hatQ(int n, const S& y, const ModelParams& p) {
  return residue_eval_hatP<S>(n, y, p.swapped());
}

template <class S>
nlohmann::json poly_to_json(const BiorthPoly<S>& poly) {
  nlohmann::json coeffs = nlohmann::json::array();
  for (Eigen::Index l = 0; l < poly.coeffs.size(); ++l) coeffs.push_back(to_string(poly.coeffs(l)));
  return {{"kind", to_string(poly.kind)},
          {"n", poly.n},
          {"side", poly.side == Side::x ? "x" : "y"},
          {"theta", to_string(poly.theta())},
          {"coeffs", coeffs}};
}

}  // namespace cbop
