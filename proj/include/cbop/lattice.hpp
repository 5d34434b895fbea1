#pragma once

// Asymmetric lattice for theta1 = theta2 = 1.
//
// Every tau quantity is a minor of the bordered matrix
//   G = [ m_ij   phi_hat_i ]
//       [ phi_j  0         ]
// taken over a choice of moment rows/columns plus optionally the phi row (R) and
// the phi_hat column (C). The exact t-derivative of a minor is the row-replacement
// sum against dG, where dm_ij = m_{i+1,j} + m_{i,j+1}, dphi_hat_i = phi_hat_{i+1},
// dphi_j = phi_{j+1}. Values are carried as Dual<S> so the lattice variables get
// their derivatives by the chain rule.

#include <algorithm>
#include <array>
#include <functional>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "cbop/determinant.hpp"
#include "cbop/dual.hpp"
#include "cbop/jet.hpp"
#include "cbop/moments.hpp"

namespace cbop {

enum class TauQuantity {
  tau,
  sigma,
  sigma_hat,
  xi,
  xi_hat,
  alpha,
  beta,
  alpha_hat,
  beta_hat,
  tau_tilde,
  xi_tilde,
  xi_hat_tilde
};

inline std::string to_string(TauQuantity q) {
  switch (q) {
    case TauQuantity::tau: return "tau";
    case TauQuantity::sigma: return "sigma";
    case TauQuantity::sigma_hat: return "sigma_hat";
    case TauQuantity::xi: return "xi";
    case TauQuantity::xi_hat: return "xi_hat";
    case TauQuantity::alpha: return "alpha";
    case TauQuantity::beta: return "beta";
    case TauQuantity::alpha_hat: return "alpha_hat";
    case TauQuantity::beta_hat: return "beta_hat";
    case TauQuantity::tau_tilde: return "tau_tilde";
    case TauQuantity::xi_tilde: return "xi_tilde";
    case TauQuantity::xi_hat_tilde: return "xi_hat_tilde";
  }
  return "unknown";
}

/// All twelve tau quantities at one site, each with its exact t-derivative.
template <class S>
struct TauFamily {
  int n = 0;
  S t;
  Dual<S> tau, sigma, sigma_hat, xi, xi_hat, alpha, beta, alpha_hat, beta_hat, tau_tilde, xi_tilde,
      xi_hat_tilde;
};

/// One named identity residual; skipped entries carry a reason instead of a value.
template <class S>
struct IdentityResidual {
  std::string name;
  int n = 0;
  bool skipped = false;
  std::string reason;
  S value{0};
};

template <class S>
class TauTower {
 public:
  explicit TauTower(const MomentTable<S>& table) : t_(table.time()) {
    if (table.k1() != 1 || table.k2() != 1) throw DomainError("lattice: requires k1 = k2 = 1");
    const Eigen::Index r = table.rows();
    const Eigen::Index c = table.cols();
    if (r < 2 || c < 2) throw RangeError("lattice: table too small");
    R_ = r - 1;
    C_ = c - 1;
    G_ = Matrix<S>::Zero(r, c);
    dG_ = Matrix<S>::Zero(r, c);
    for (Eigen::Index i = 0; i < R_; ++i) {
      for (Eigen::Index j = 0; j < C_; ++j) {
        G_(i, j) = table.m(i, j);
        dG_(i, j) = table.m(i + 1, j) + table.m(i, j + 1);
      }
      G_(i, C_) = table.phi_hat(i);
      dG_(i, C_) = table.phi_hat(i + 1);
    }
    for (Eigen::Index j = 0; j < C_; ++j) {
      G_(R_, j) = table.phi(j);
      dG_(R_, j) = table.phi(j + 1);
    }
  }

  const S& time() const { return t_; }
  const Matrix<S>& bordered() const { return G_; }
  const Matrix<S>& bordered_derivative() const { return dG_; }
  Eigen::Index phi_row() const { return R_; }
  Eigen::Index phi_hat_col() const { return C_; }

  /// Largest n for which the full family (including the n+1 row/column) fits.
  int max_site() const { return static_cast<int>(std::min(R_, C_)) - 2; }

  /// Row and column index sets of quantity q at site n; empty sets with zero=true mean the value is 0.
  struct MinorSpec {
    IndexList rows;
    IndexList cols;
    bool zero = false;
  };

  MinorSpec minor(TauQuantity q, int n) const {
    if (n < 0) throw RangeError("tau quantity at negative site");
    const auto rn = range(n);
    const auto rn1 = range(n + 1);
    const auto sn = shifted_range(n);
    // Moment index lists are bounds-checked before the border row/column is appended.
    auto rows_of = [&](const IndexList& v) {
      for (auto i : v) {
        if (i >= R_) throw RangeError(to_string(q) + "_" + std::to_string(n) + " needs a larger table");
      }
      return v;
    };
    auto cols_of = [&](const IndexList& v) {
      for (auto j : v) {
        if (j >= C_) throw RangeError(to_string(q) + "_" + std::to_string(n) + " needs a larger table");
      }
      return v;
    };
    auto with = [](IndexList v, Eigen::Index extra) {
      v.push_back(extra);
      return v;
    };
    const IndexList rn_plus = with(rn, n + 1);
    MinorSpec s;
    switch (q) {
      case TauQuantity::tau: s = {rows_of(rn), cols_of(rn)}; break;
      case TauQuantity::sigma: s = {with(rows_of(rn), R_), cols_of(rn1)}; break;
      case TauQuantity::sigma_hat: s = {rows_of(rn1), with(cols_of(rn), C_)}; break;
      case TauQuantity::xi: s = {rows_of(sn), cols_of(rn), n == 0}; break;
      case TauQuantity::xi_hat: s = {rows_of(rn), cols_of(sn), n == 0}; break;
      case TauQuantity::alpha: s = {with(rows_of(rn), R_), cols_of(rn_plus)}; break;
      case TauQuantity::alpha_hat: s = {rows_of(rn_plus), with(cols_of(rn), C_)}; break;
      case TauQuantity::beta: s = {with(rows_of(sn), R_), cols_of(rn1), n == 0}; break;
      case TauQuantity::beta_hat: s = {rows_of(rn1), with(cols_of(sn), C_), n == 0}; break;
      case TauQuantity::tau_tilde: s = {with(rows_of(rn), R_), with(cols_of(rn), C_)}; break;
      case TauQuantity::xi_tilde: s = {with(rows_of(sn), R_), with(cols_of(rn), C_), n == 0}; break;
      case TauQuantity::xi_hat_tilde: s = {with(rows_of(rn), R_), with(cols_of(sn), C_), n == 0}; break;
    }
    return s;
  }

  Dual<S> quantity(TauQuantity q, int n) const {
    const auto key = std::make_pair(static_cast<int>(q), n);
    if (auto it = cache_.find(key); it != cache_.end()) return it->second;
    const auto s = minor(q, n);
    Dual<S> out(S(0), S(0));
    if (!s.zero) {
      const Matrix<S> m = select(G_, s.rows, s.cols);
      out = Dual<S>(det(m), det_t_derivative(m, select(dG_, s.rows, s.cols)));
    }
    cache_.emplace(key, out);
    return out;
  }

  Dual<S> tau(int n) const { return quantity(TauQuantity::tau, n); }
  Dual<S> sigma(int n) const { return quantity(TauQuantity::sigma, n); }
  Dual<S> sigma_hat(int n) const { return quantity(TauQuantity::sigma_hat, n); }
  Dual<S> xi(int n) const { return quantity(TauQuantity::xi, n); }
  Dual<S> xi_hat(int n) const { return quantity(TauQuantity::xi_hat, n); }

  TauFamily<S> family(int n) const {
    TauFamily<S> f;
    f.n = n;
    f.t = t_;
    f.tau = quantity(TauQuantity::tau, n);
    f.sigma = quantity(TauQuantity::sigma, n);
    f.sigma_hat = quantity(TauQuantity::sigma_hat, n);
    f.xi = quantity(TauQuantity::xi, n);
    f.xi_hat = quantity(TauQuantity::xi_hat, n);
    f.alpha = quantity(TauQuantity::alpha, n);
    f.beta = quantity(TauQuantity::beta, n);
    f.alpha_hat = quantity(TauQuantity::alpha_hat, n);
    f.beta_hat = quantity(TauQuantity::beta_hat, n);
    f.tau_tilde = quantity(TauQuantity::tau_tilde, n);
    f.xi_tilde = quantity(TauQuantity::xi_tilde, n);
    f.xi_hat_tilde = quantity(TauQuantity::xi_hat_tilde, n);
    return f;
  }

 private:
  S t_;
  Eigen::Index R_ = 0;
  Eigen::Index C_ = 0;
  Matrix<S> G_;
  Matrix<S> dG_;
  mutable std::map<std::pair<int, int>, Dual<S>> cache_;
};

/// Table holding every quantity the lattice needs at sites 0..n_hi, including
/// the n_hi+1 neighbour used by the nonlinear system.
template <class S>
MomentTable<S> lattice_table(const ModelParams& p, const S& t, int n_hi) {
  if (p.k1 != 1 || p.k2 != 1) throw DomainError("lattice: requires k1 = k2 = 1");
  return build_table_at<S>(p, t, n_hi + 3, 0);
}

template <class S>
TauFamily<S> tau_family(int n, const TauTower<S>& tower) {
  return tower.family(n);
}

/// d tau - (xi + xi_hat), d tau + tau~, d xi + xi~, d xi_hat + xi_hat~,
/// d sigma - (alpha + beta), d sigma_hat - (alpha_hat + beta_hat).
template <class S>
std::vector<IdentityResidual<S>> derivative_formula_residuals(int n, const TauTower<S>& tw) {
  const auto f = tw.family(n);
  auto r = [n](std::string name, const S& v) { return IdentityResidual<S>{std::move(name), n, false, "", v}; };
  return {r("dtau=xi+xi_hat", f.tau.d - (f.xi.v + f.xi_hat.v)),
          r("dtau=-tau_tilde", f.tau.d + f.tau_tilde.v),
          r("dxi=-xi_tilde", f.xi.d + f.xi_tilde.v),
          r("dxi_hat=-xi_hat_tilde", f.xi_hat.d + f.xi_hat_tilde.v),
          r("dsigma=alpha+beta", f.sigma.d - (f.alpha.v + f.beta.v)),
          r("dsigma_hat=alpha_hat+beta_hat", f.sigma_hat.d - (f.alpha_hat.v + f.beta_hat.v))};
}

/// Lattice variables at one site. A is undefined at n = 0 and left as zero there.
template <class S>
struct LatticeSite {
  S A{0}, B{0}, Bh{0}, C{0}, Ch{0};
};

template <class S>
LatticeSite<S> value_of(const LatticeSite<Dual<S>>& s) {
  return {s.A.v, s.B.v, s.Bh.v, s.C.v, s.Ch.v};
}

template <class S>
LatticeSite<S> derivative_of(const LatticeSite<Dual<S>>& s) {
  return {s.A.d, s.B.d, s.Bh.d, s.C.d, s.Ch.d};
}

/// A_n = tau_{n+1} tau_{n-1} / tau_n^2, B_n = xi_{n+1}/tau_{n+1} - xi_n/tau_n,
/// C_n = -sigma_{n+1} tau_n / (sigma_n tau_{n+1}); hats mirror with xi_hat, sigma_hat.
template <class S>
LatticeSite<Dual<S>> lattice_vars(int n, const TauTower<S>& tw) {
  const Dual<S> t0 = tw.tau(n), t1 = tw.tau(n + 1);
  if (t0 == Dual<S>(0)) throw DegeneracyError("tau_n vanishes", n);
  if (t1 == Dual<S>(0)) throw DegeneracyError("tau_n vanishes", n + 1);
  const Dual<S> s0 = tw.sigma(n), sh0 = tw.sigma_hat(n);
  if (s0 == Dual<S>(0) || sh0 == Dual<S>(0)) throw DegeneracyError("sigma_n vanishes", n);
  LatticeSite<Dual<S>> out;
  if (n >= 1) out.A = t1 * tw.tau(n - 1) / (t0 * t0);
  out.B = tw.xi(n + 1) / t1 - tw.xi(n) / t0;
  out.Bh = tw.xi_hat(n + 1) / t1 - tw.xi_hat(n) / t0;
  out.C = -(tw.sigma(n + 1) * t0) / (s0 * t1);
  out.Ch = -(tw.sigma_hat(n + 1) * t0) / (sh0 * t1);
  return out;
}

/// Four-term recurrence coefficients expressed through the lattice variables:
/// a = Ch_n, b = Ch_n + B_{n+1}, c = -A_{n+1} - Ch_n Bh_n, d = -A_n Ch_n, hats mirrored.
template <class S>
struct LatticeRecurrence {
  int n = 0;
  S a, b, c, d;
  S a_hat, b_hat, c_hat, d_hat;
};

template <class S>
LatticeRecurrence<S> lattice_recurrence(int n, const TauTower<S>& tw) {
  if (n < 1) throw RangeError("lattice recurrence needs n >= 1");
  const auto s = value_of(lattice_vars(n, tw));
  const auto s1 = value_of(lattice_vars(n + 1, tw));
  LatticeRecurrence<S> r;
  r.n = n;
  r.a = s.Ch;
  r.b = s.Ch + s1.B;
  r.c = -s1.A - s.Ch * s.Bh;
  r.d = -s.A * s.Ch;
  r.a_hat = s.C;
  r.b_hat = s.C + s1.Bh;
  r.c_hat = -s1.A - s.C * s.B;
  r.d_hat = -s.A * s.C;
  return r;
}

namespace detail {

template <class S>
IdentityResidual<S> skipped_residual(std::string name, int n, std::string reason) {
  return IdentityResidual<S>{std::move(name), n, true, std::move(reason), S(0)};
}

}  // namespace detail

/// Residuals of the five bilinear equations at site n. The second and third need
/// sigma_{n-1} and are skipped at n = 0.
template <class S>
std::vector<IdentityResidual<S>> bilinear_residuals(int n, const TauTower<S>& tw) {
  if (n < 0 || n > tw.max_site()) throw RangeError("bilinear residuals: site outside table");
  const Dual<S> tau0 = tw.tau(n), tau1 = tw.tau(n + 1);
  const Dual<S> s = tw.sigma(n), sh = tw.sigma_hat(n);
  std::vector<IdentityResidual<S>> out;
  out.push_back({"lattice1", n, false, "", hirota(tau1, tau0) - s.v * sh.v});
  if (n >= 1) {
    out.push_back({"lattice2", n, false, "", hirota(tw.xi(n), tau0) - sh.v * tw.sigma(n - 1).v});
    out.push_back({"lattice3", n, false, "", hirota(tw.xi_hat(n), tau0) - s.v * tw.sigma_hat(n - 1).v});
  } else {
    out.push_back(detail::skipped_residual<S>("lattice2", n, "boundary: sigma_{n-1} undefined at n = 0"));
    out.push_back(detail::skipped_residual<S>("lattice3", n, "boundary: sigma_{n-1} undefined at n = 0"));
  }
  out.push_back({"lattice4", n, false, "",
                 hirota(tw.xi(n + 1), tau0) + hirota(tau1, tw.xi_hat(n)) - s.v * sh.d});
  out.push_back({"lattice5", n, false, "",
                 hirota(tw.xi_hat(n + 1), tau0) + hirota(tau1, tw.xi(n)) - sh.v * s.d});
  return out;
}

/// Right-hand side of the nonlinear system at site n from sites n-1, n, n+1.
template <class S>
LatticeSite<S> nonlinear_rhs(const LatticeSite<S>& prev, const LatticeSite<S>& cur, const LatticeSite<S>& next,
                             int n) {
  if (prev.C == S(0) || prev.Ch == S(0) || cur.C == S(0) || cur.Ch == S(0)) {
    throw DegeneracyError("C_n vanishes", cur.C == S(0) || cur.Ch == S(0) ? n : n - 1);
  }
  const S sum_prev = prev.B + prev.Bh;
  const S sum_cur = cur.B + cur.Bh;
  LatticeSite<S> d;
  d.A = cur.A * (sum_cur - sum_prev);
  d.B = sum_prev * prev.Ch - sum_cur * cur.Ch;
  d.Bh = sum_prev * prev.C - sum_cur * cur.C;
  d.C = cur.C * (cur.C - cur.A / prev.C - cur.Bh - next.C + next.A / cur.C + next.Bh);
  d.Ch = cur.Ch * (cur.Ch - cur.A / prev.Ch - cur.B - next.Ch + next.A / cur.Ch + next.B);
  return d;
}

/// Residuals of the five nonlinear equations at site n; the derivatives on the left
/// come from the tau tower through the chain rule.
template <class S>
std::vector<IdentityResidual<S>> nonlinear_residuals(int n, const TauTower<S>& tw) {
  static const std::array<const char*, 5> names = {"dA", "dB", "dB_hat", "dC", "dC_hat"};
  std::vector<IdentityResidual<S>> out;
  std::string reason;
  if (n < 1) reason = "boundary: A_{n-1} and site n-1 undefined at n = 0";
  if (n + 1 > tw.max_site()) reason = "boundary: site n+1 outside table";
  if (!reason.empty()) {
    for (const char* name : names) out.push_back(detail::skipped_residual<S>(name, n, reason));
    return out;
  }
  const auto cur = lattice_vars(n, tw);
  const auto rhs = nonlinear_rhs(value_of(lattice_vars(n - 1, tw)), value_of(cur),
                                 value_of(lattice_vars(n + 1, tw)), n);
  const auto lhs = derivative_of(cur);
  const std::array<S, 5> res = {lhs.A - rhs.A, lhs.B - rhs.B, lhs.Bh - rhs.Bh, lhs.C - rhs.C, lhs.Ch - rhs.Ch};
  for (std::size_t k = 0; k < names.size(); ++k) out.push_back({names[k], n, false, "", res[k]});
  return out;
}

/// Symmetric-measure reductions at site n: xi = xi_hat, sigma = sigma_hat, B = Bh,
/// C = Ch, C_n^2 B_n = B_{n+1} A_{n+1}, and lattice4 equal to half the t-derivative of
/// lattice1 (second derivatives of tau come from d tau = xi + xi_hat).
template <class S>
std::vector<IdentityResidual<S>> degeneration_residuals(int n, const TauTower<S>& tw) {
  const auto v = value_of(lattice_vars(n, tw));
  const auto v1 = value_of(lattice_vars(n + 1, tw));
  const Dual<S> tau0 = tw.tau(n), tau1 = tw.tau(n + 1);
  const Dual<S> xi0 = tw.xi(n), xih0 = tw.xi_hat(n), xi1 = tw.xi(n + 1), xih1 = tw.xi_hat(n + 1);
  const S lattice4_lhs = hirota(xi1, tau0) + hirota(tau1, xih0);
  const S half_dlattice1 = ((xi1.d + xih1.d) * tau0.v - tau1.v * (xi0.d + xih0.d)) / S(2);
  auto r = [n](std::string name, const S& value) { return IdentityResidual<S>{std::move(name), n, false, "", value}; };
  return {r("xi-xi_hat", xi0.v - xih0.v),
          r("sigma-sigma_hat", tw.sigma(n).v - tw.sigma_hat(n).v),
          r("B-B_hat", v.B - v.Bh),
          r("C-C_hat", v.C - v.Ch),
          r("C^2B-B'A'", v.C * v.C * v.B - v1.B * v1.A),
          r("lattice4-dlattice1/2", lattice4_lhs - half_dlattice1)};
}

/// D det(D with rows i1,i2 and columns j1,j2 removed)
///   - [D(i1;j1) D(i2;j2) - D(i1;j2) D(i2;j1)], with D(i;j) the minor without row i, column j.
template <class S>
S jacobi_identity_check(const Matrix<S>& D, Eigen::Index i1, Eigen::Index i2, Eigen::Index j1, Eigen::Index j2) {
  if (D.rows() != D.cols()) throw ShapeError("jacobi identity: matrix is not square");
  const Eigen::Index n = D.rows();
  if (n < 2) throw RangeError("jacobi identity: matrix must be at least 2x2");
  if (!(0 <= i1 && i1 < i2 && i2 < n && 0 <= j1 && j1 < j2 && j2 < n)) {
    throw RangeError("jacobi identity: need 0 <= i1 < i2 < n and 0 <= j1 < j2 < n");
  }
  auto minor = [&](IndexList r, IndexList c) { return det(remove(D, r, c)); };
  return det(D) * minor({i1, i2}, {j1, j2}) -
         (minor({i1}, {j1}) * minor({i2}, {j2}) - minor({i1}, {j2}) * minor({i2}, {j1}));
}

/// One instance of the Jacobi identity on a bordered moment matrix, with the
/// tau-tower value each minor is expected to equal.
template <class S>
struct JacobiApplication {
  std::string name;
  int lattice = 0;  // which bilinear equation it produces
  Matrix<S> D;
  Eigen::Index i1 = 0, i2 = 0, j1 = 0, j2 = 0;
  // Expected det D, D(both), D(i1;j1), D(i2;j2), D(i1;j2), D(i2;j1).
  std::array<S, 6> expected;

  std::array<S, 6> minors() const {
    return {det(D),
            det(remove(D, {i1, i2}, {j1, j2})),
            det(remove(D, {i1}, {j1})),
            det(remove(D, {i2}, {j2})),
            det(remove(D, {i1}, {j2})),
            det(remove(D, {i2}, {j1}))};
  }

  /// The identity written with the expected tau quantities.
  S tower_residual() const {
    const auto& e = expected;
    return e[0] * e[1] - (e[2] * e[3] - e[4] * e[5]);
  }
};

/// The seven instances (D1, D2, D3, D4.1, D4.2, D5.1, D5.2) at site n. Instances that
/// need sigma_{n-1} or xi_n are omitted at n = 0.
template <class S>
std::vector<JacobiApplication<S>> jacobi_applications(int n, const TauTower<S>& tw) {
  if (n < 0 || n > tw.max_site()) throw RangeError("jacobi applications: site outside table");
  const Matrix<S>& G = tw.bordered();
  const Eigen::Index R = tw.phi_row(), C = tw.phi_hat_col();
  auto with = [](IndexList v, Eigen::Index extra) {
    v.push_back(extra);
    return v;
  };
  const IndexList rn = range(n), rn1 = range(n + 1);
  const S tau0 = tw.tau(n).v, tau1 = tw.tau(n + 1).v;
  const S dtau0 = tw.tau(n).d, dtau1 = tw.tau(n + 1).d;
  const S s = tw.sigma(n).v, sh = tw.sigma_hat(n).v;
  std::vector<JacobiApplication<S>> out;

  out.push_back({"D1", 1, select(G, with(rn1, R), with(rn1, C)), n, n + 1, n, n + 1,
                 {-dtau1, tau0, -dtau0, tau1, s, sh}});
  if (n >= 1) {
    Matrix<S> d2 = Matrix<S>::Zero(n + 2, n + 2);
    d2.leftCols(n + 1) = select(G, with(rn1, R), with(rn, C));
    d2(n + 1, n + 1) = S(1);
    out.push_back({"D2", 2, d2, n - 1, n, n, n + 1,
                   {sh, tw.sigma(n - 1).v, tw.xi(n).v, -dtau0, -tw.xi(n).d, tau0}});
    Matrix<S> d3 = Matrix<S>::Zero(n + 2, n + 2);
    d3.topRows(n + 1) = select(G, with(rn, R), with(rn1, C));
    d3(n + 1, n + 1) = S(1);
    out.push_back({"D3", 3, d3, n, n + 1, n - 1, n,
                   {s, tw.sigma_hat(n - 1).v, tw.xi_hat(n).v, -dtau0, tau0, -tw.xi_hat(n).d}});
  }
  out.push_back({"D4.1", 4, select(G, with(with(rn, n + 1), R), with(rn1, C)), n, n + 1, n, n + 1,
                 {-tw.xi(n + 1).d, tau0, -dtau0, tw.xi(n + 1).v, s,
                  tw.quantity(TauQuantity::alpha_hat, n).v}});
  if (n >= 1) {
    out.push_back({"D4.2", 4, select(G, with(rn1, R), with(rn1, C)), n, n + 1, n - 1, n + 1,
                   {-dtau1, tw.xi_hat(n).v, -tw.xi_hat(n).d, tau1, s,
                    tw.quantity(TauQuantity::beta_hat, n).v}});
  }
  out.push_back({"D5.1", 5, select(G, with(rn1, R), with(with(rn, n + 1), C)), n, n + 1, n, n + 1,
                 {-tw.xi_hat(n + 1).d, tau0, -dtau0, tw.xi_hat(n + 1).v,
                  tw.quantity(TauQuantity::alpha, n).v, sh}});
  if (n >= 1) {
    out.push_back({"D5.2", 5, select(G, with(rn1, R), with(rn1, C)), n - 1, n + 1, n, n + 1,
                   {-dtau1, tw.xi(n).v, -tw.xi(n).d, tau1, tw.quantity(TauQuantity::beta, n).v, sh}});
  }
  return out;
}

// Time integration.

template <class S>
struct LatticeState {
  S t;
  int n_lo = 1;
  std::vector<LatticeSite<S>> sites;

  int n_hi() const { return n_lo + static_cast<int>(sites.size()) - 1; }
};

/// Supplies the lattice variables at site n and time t outside the integrated window.
template <class S>
using BoundaryProvider = std::function<LatticeSite<S>(int n, const S& t)>;

/// Lattice variables at sites n_lo..n_hi from the tau functions at time t.
template <class S>
LatticeState<S> lattice_state_at(const ModelParams& p, const S& t, int n_lo, int n_hi) {
  if (n_lo < 0 || n_hi < n_lo) throw RangeError("lattice state: invalid window");
  const TauTower<S> tw(lattice_table<S>(p, t, n_hi));
  LatticeState<S> st{t, n_lo, {}};
  for (int n = n_lo; n <= n_hi; ++n) st.sites.push_back(value_of(lattice_vars(n, tw)));
  return st;
}

/// Boundary values evaluated from the tau functions at the requested time.
template <class S>
BoundaryProvider<S> tau_fed_boundary(const ModelParams& p) {
  return [p](int n, const S& t) {
    const TauTower<S> tw(build_table_sized<S>(p, t, n + 3, n + 3));
    return value_of(lattice_vars(n, tw));
  };
}

namespace detail {

template <class S>
std::vector<LatticeSite<S>> lattice_rhs(const std::vector<LatticeSite<S>>& sites, int n_lo, const S& t,
                                        const BoundaryProvider<S>& boundary) {
  const int count = static_cast<int>(sites.size());
  const LatticeSite<S> lower = boundary(n_lo - 1, t);
  const LatticeSite<S> upper = boundary(n_lo + count, t);
  std::vector<LatticeSite<S>> d(count);
  for (int k = 0; k < count; ++k) {
    const auto& prev = k == 0 ? lower : sites[k - 1];
    const auto& next = k + 1 == count ? upper : sites[k + 1];
    d[k] = nonlinear_rhs(prev, sites[k], next, n_lo + k);
  }
  return d;
}

template <class S>
std::vector<LatticeSite<S>> axpy(const std::vector<LatticeSite<S>>& y, const S& h,
                                 const std::vector<LatticeSite<S>>& k) {
  std::vector<LatticeSite<S>> out(y.size());
  for (std::size_t i = 0; i < y.size(); ++i) {
    out[i] = {y[i].A + h * k[i].A, y[i].B + h * k[i].B, y[i].Bh + h * k[i].Bh, y[i].C + h * k[i].C,
              y[i].Ch + h * k[i].Ch};
  }
  return out;
}

template <class S>
bool all_finite(const std::vector<LatticeSite<S>>& y) {
  for (const auto& s : y) {
    if (!is_finite(s.A) || !is_finite(s.B) || !is_finite(s.Bh) || !is_finite(s.C) || !is_finite(s.Ch)) return false;
  }
  return true;
}

}  // namespace detail

/// Classical fourth-order Runge-Kutta on the interior window with tau-fed edges.
/// Returns the trajectory including the initial state.
template <class S>
std::vector<LatticeState<S>> evolve_nonlinear(const LatticeState<S>& init, const S& t1, int steps,
                                              const BoundaryProvider<S>& boundary) {
  if (init.n_lo < 1) throw RangeError("evolve: window must start at n >= 1");
  if (init.sites.empty()) throw RangeError("evolve: empty window");
  std::vector<LatticeState<S>> traj{init};
  if (t1 == init.t) return traj;
  if (steps < 1) throw RangeError("evolve: steps must be positive");
  const S h = (t1 - init.t) / S(steps);
  const S half = h / S(2);
  auto y = init.sites;
  S t = init.t;
  for (int s = 0; s < steps; ++s) {
    try {
      const auto k1 = detail::lattice_rhs(y, init.n_lo, t, boundary);
      const auto k2 = detail::lattice_rhs(detail::axpy(y, half, k1), init.n_lo, S(t + half), boundary);
      const auto k3 = detail::lattice_rhs(detail::axpy(y, half, k2), init.n_lo, S(t + half), boundary);
      const auto k4 = detail::lattice_rhs(detail::axpy(y, h, k3), init.n_lo, S(t + h), boundary);
      for (std::size_t i = 0; i < y.size(); ++i) {
        auto comb = [&](S LatticeSite<S>::*f) {
          return y[i].*f + h / S(6) * (k1[i].*f + S(2) * k2[i].*f + S(2) * k3[i].*f + k4[i].*f);
        };
        y[i] = {comb(&LatticeSite<S>::A), comb(&LatticeSite<S>::B), comb(&LatticeSite<S>::Bh),
                comb(&LatticeSite<S>::C), comb(&LatticeSite<S>::Ch)};
      }
    } catch (const DegeneracyError& e) {
      throw IntegrationError(std::string("evolve: ") + e.what(), to_double(t));
    }
    if (!detail::all_finite(y)) throw IntegrationError("evolve: state left the finite range", to_double(t));
    t = s + 1 == steps ? t1 : S(init.t + h * S(s + 1));
    traj.push_back({t, init.n_lo, y});
  }
  return traj;
}

/// Tau-tower values at one level of the bilinear integration, with the slopes the
/// integrator consumes.
template <class S>
struct TowerLevel {
  S tau, xi, xi_hat, sigma, sigma_hat;
  S dtau, dxi, dxi_hat;
};

template <class S>
struct TowerTrajectory {
  int n_max = 0;
  std::vector<S> t;
  std::vector<std::vector<TowerLevel<S>>> levels;  // levels[step][k], k = 0..n_max
};

namespace detail {

/// Tower levels 0..n_max at time t from the integrated values of tau, xi, xi_hat
/// (index 0 unused). Level 0 is tau = 1, xi = xi_hat = 0, sigma = phi_0, sigma_hat = phi_hat_0
/// with jets from the single moments; each higher level solves the bilinear equations
/// as linear ODEs in jet form, losing one order per level.
template <class S>
std::vector<TowerLevel<S>> tower_levels(const ModelParams& p, const S& t, const std::vector<S>& tau,
                                        const std::vector<S>& xi, const std::vector<S>& xi_hat) {
  const int n_max = static_cast<int>(tau.size()) - 1;
  const std::size_t order = static_cast<std::size_t>(n_max) + 2;
  std::vector<S> phi(order + 1), phi_hat(order + 1);
  S fact(1);
  for (std::size_t r = 0; r <= order; ++r) {
    if (r > 0) fact *= S(static_cast<long>(r));
    phi[r] = single_moment<S>(Side::y, static_cast<int>(r), p, t) / fact;
    phi_hat[r] = single_moment<S>(Side::x, static_cast<int>(r), p, t) / fact;
  }
  Jet<S> jt = Jet<S>::constant(S(1), order);
  Jet<S> jx = Jet<S>::constant(S(0), order);
  Jet<S> jxh = Jet<S>::constant(S(0), order);
  Jet<S> js{phi};
  Jet<S> jsh{phi_hat};
  std::vector<TowerLevel<S>> out;
  auto record = [&out](const Jet<S>& a, const Jet<S>& x, const Jet<S>& xh, const Jet<S>& s, const Jet<S>& sh) {
    out.push_back({a.value(), x.value(), xh.value(), s.value(), sh.value(), a.slope(), x.slope(), xh.slope()});
  };
  record(jt, jx, jxh, js, jsh);
  for (int n = 0; n < n_max; ++n) {
    if (jt.value() == S(0)) throw DegeneracyError("tau_n vanishes on the integration path", n);
    if (js.value() == S(0) || jsh.value() == S(0)) throw DegeneracyError("sigma_n vanishes on the integration path", n);
    const Jet<S> rate = jt.derivative() / jt;
    const Jet<S> jt1 = solve_linear_ode_jet(tau[n + 1], rate, js * jsh / jt);
    const Jet<S> jx1 = solve_linear_ode_jet(
        xi[n + 1], rate, (js * jsh.derivative() - jt1.derivative() * jxh + jt1 * jxh.derivative()) / jt);
    const Jet<S> jxh1 = solve_linear_ode_jet(
        xi_hat[n + 1], rate, (jsh * js.derivative() - jt1.derivative() * jx + jt1 * jx.derivative()) / jt);
    const Jet<S> js1 = (jxh1.derivative() * jt1 - jxh1 * jt1.derivative()) / jsh;
    const Jet<S> jsh1 = (jx1.derivative() * jt1 - jx1 * jt1.derivative()) / js;
    jt = jt1;
    jx = jx1;
    jxh = jxh1;
    js = js1;
    jsh = jsh1;
    if (std::min({jt.order(), jx.order(), jxh.order(), js.order()}) < 1) {
      throw RangeError("tower integration: jet order exhausted");
    }
    record(jt, jx, jxh, js, jsh);
  }
  return out;
}

}  // namespace detail

/// Integrates tau_k, xi_k, xi_hat_k (k = 1..n_max) from t0 to t1 with classical RK4,
/// using the bilinear equations as first-order linear ODEs. Initial values come from
/// determinants at t0; the single moments enter as closed forms along the path.
template <class S>
TowerTrajectory<S> bilinear_tower_integrate(const ModelParams& p, int n_max, const S& t0, const S& t1, int steps) {
  if (n_max < 1) throw RangeError("tower integration: n_max must be at least 1");
  if (steps < 1) throw RangeError("tower integration: steps must be positive");
  const TauTower<S> tw(build_table_sized<S>(p, t0, n_max + 2, n_max + 2));
  std::vector<S> tau(n_max + 1, S(0)), xi(n_max + 1, S(0)), xi_hat(n_max + 1, S(0));
  for (int k = 1; k <= n_max; ++k) {
    tau[k] = tw.tau(k).v;
    xi[k] = tw.xi(k).v;
    xi_hat[k] = tw.xi_hat(k).v;
  }
  TowerTrajectory<S> traj;
  traj.n_max = n_max;
  traj.t.push_back(t0);
  traj.levels.push_back(detail::tower_levels(p, t0, tau, xi, xi_hat));
  if (t1 == t0) return traj;

  using State = std::array<std::vector<S>, 3>;
  auto rhs = [&](const State& y, const S& t) {
    const auto lv = detail::tower_levels(p, t, y[0], y[1], y[2]);
    State d{std::vector<S>(n_max + 1, S(0)), std::vector<S>(n_max + 1, S(0)), std::vector<S>(n_max + 1, S(0))};
    for (int k = 1; k <= n_max; ++k) {
      d[0][k] = lv[k].dtau;
      d[1][k] = lv[k].dxi;
      d[2][k] = lv[k].dxi_hat;
    }
    return d;
  };
  auto step = [n_max](const State& y, const S& h, const State& k) {
    State out = y;
    for (int c = 0; c < 3; ++c) {
      for (int i = 1; i <= n_max; ++i) out[c][i] += h * k[c][i];
    }
    return out;
  };
  const S h = (t1 - t0) / S(steps);
  const S half = h / S(2);
  State y{tau, xi, xi_hat};
  S t = t0;
  for (int s = 0; s < steps; ++s) {
    const State k1 = rhs(y, t);
    const State k2 = rhs(step(y, half, k1), S(t + half));
    const State k3 = rhs(step(y, half, k2), S(t + half));
    const State k4 = rhs(step(y, h, k3), S(t + h));
    for (int c = 0; c < 3; ++c) {
      for (int i = 1; i <= n_max; ++i) {
        y[c][i] += h / S(6) * (k1[c][i] + S(2) * k2[c][i] + S(2) * k3[c][i] + k4[c][i]);
        if (!is_finite(y[c][i])) throw IntegrationError("tower integration left the finite range", to_double(t));
      }
    }
    t = s + 1 == steps ? t1 : S(t0 + h * S(s + 1));
    traj.t.push_back(t);
    traj.levels.push_back(detail::tower_levels(p, t, y[0], y[1], y[2]));
  }
  return traj;
}

}  // namespace cbop
