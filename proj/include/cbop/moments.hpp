#pragma once

// Bi-moments m_{i,j}(t) = <x^{theta1 i}, y^{theta2 j}> under the Cauchy kernel
// 1/(x+y) and the single moments phi_hat_i = int x^{theta1 i} dmu_1,
// phi_j = int y^{theta2 j} dmu_2. Indices are 0-based: m_{i,j} = I_{i+1,j+1}.
//
// Time enters through dmu(.; t) = e^{t .} dmu, so d/dt raises an exponent by one,
// which in the theta-power basis is an index shift by k:
//   d/dt m_{i,j} = m_{i+k1,j} + m_{i,j+k2},  d/dt phi_hat_i = phi_hat_{i+k1}.

#include <string>
#include <utility>
#include <vector>

#include "cbop/determinant.hpp"
#include "cbop/dual.hpp"
#include "cbop/model.hpp"
#include "cbop/quadrature.hpp"
#include "cbop/special.hpp"

namespace cbop {

namespace detail {

template <class S>
S gamma_at(const Rational& x) {
  return gamma(from_rational<S>(x));
}

/// Binomial coefficient as a scalar.
template <class S>
S binomial(int n, int k) {
  S out(1);
  for (int i = 1; i <= k; ++i) out = out * from_int<S>(n - k + i) / from_int<S>(i);
  return out;
}

}  // namespace detail

/// I_{j,k} at t = 0 for Laguerre weights (1-based indices):
/// Gamma(1+a+theta1(j-1)) Gamma(1+b+theta2(k-1)) / (1+a+b+theta1(j-1)+theta2(k-1)).
template <class S>
S laguerre_moment(int j, int k, const ModelParams& p) {
  if (p.family != WeightFamily::laguerre) throw DomainError("laguerre_moment: weights are not laguerre");
  if (j < 1 || k < 1) throw RangeError("laguerre_moment: indices start at 1");
  const Rational ex = p.a + p.theta1() * (j - 1);
  const Rational ey = p.b + p.theta2() * (k - 1);
  return detail::gamma_at<S>(1 + ex) * detail::gamma_at<S>(1 + ey) / from_rational<S>(1 + ex + ey);
}

/// J_{j,k}(s) = s^{-(1+a+b+theta1(j-1)+theta2(k-1))} I_{j,k}.
template <class S>
S time_scaled_moment(int j, int k, const S& s, const ModelParams& p) {
  if (!(s > S(0))) throw DomainError("time_scaled_moment: s must be positive");
  const Rational e = 1 + p.a + p.b + p.theta1() * (j - 1) + p.theta2() * (k - 1);
  return rational_power(s, Rational(-e)) * laguerre_moment<S>(j, k, p);
}

namespace detail {

/// int_0^inf x^power poly(x) e^{-rate x} dx by adaptive quadrature.
template <class S>
S halfline_moment(const Rational& power, const std::vector<Rational>& poly, const S& rate) {
  if constexpr (is_exact_v<S>) {
    throw ModeError("custom-weight moments require real mode");
  } else {
    std::vector<S> q;
    for (const auto& c : poly) q.push_back(from_rational<S>(c));
    const S pw = from_rational<S>(power);
    DecayModel model;
    model.power_at_zero = to_double(power);
    model.exp_rate = to_double(rate);
    model.growth_degree = static_cast<double>(poly.size()) - 1.0;
    auto f = [&](const S& x) {
      using std::exp;
      using std::pow;
      return S(pow(x, pw) * evaluate_poly(q, x) * exp(-rate * x));
    };
    return integrate_adaptive<S>(f, model, ScalarTraits<S>::digits()).value;
  }
}

}  // namespace detail

/// phi_hat_j (side x) or phi_j (side y) at time t; 0-based j.
template <class S>
S single_moment(Side side, int j, const ModelParams& p, const S& t) {
  if (j < 0) throw RangeError("single_moment: negative index");
  const HalfLineWeight w = side == Side::x ? p.x_weight() : p.y_weight();
  const Rational theta = side == Side::x ? p.theta1() : p.theta2();
  const S rate = from_rational<S>(w.rate) - t;
  if (!(rate > S(0))) throw DomainError("single_moment: moments diverge for t >= decay rate");
  const Rational e = w.power + theta * j;
  if (p.family == WeightFamily::laguerre) {
    return detail::gamma_at<S>(1 + e) * rational_power(rate, Rational(-(1 + e)));
  }
  return detail::halfline_moment<S>(e, w.poly, rate);
}

template <class S>
S single_moment(Side side, int j, const ModelParams& p) {
  return single_moment<S>(side, j, p, from_rational<S>(p.t));
}

/// Cauchy-kernel moments by kernel splitting 1/(x+y) = int_0^inf e^{-s(x+y)} ds.
/// Each factor F(s) = int x^alpha q(x) e^{-(kappa+s)x} dx reduces, after
/// x = u/(kappa+s), to sum_c q_c (kappa+s)^{-(alpha+c+1)} G_c with
/// G_c = int u^{alpha+c} e^{-u} du evaluated by quadrature once. The outer
/// s-integral runs on one shared node set for every (x-exponent, y-exponent) pair.
template <class S>
Matrix<S> quad_moment_grid(const std::vector<Rational>& x_exps, const std::vector<Rational>& y_exps,
                           const ModelParams& p, const S& t) {
  if constexpr (is_exact_v<S>) {
    throw ModeError("quad_moment: quadrature requires real mode");
  } else {
    using std::pow;
    struct Factor {
      S kappa;
      std::vector<S> coeff;      // q_c G_c
      std::vector<S> exponent;   // -(alpha + c + 1)
    };
    auto factors = [&](const HalfLineWeight& w, const std::vector<Rational>& exps) {
      std::vector<Factor> out;
      const S kappa = from_rational<S>(w.rate) - t;
      if (!(kappa > S(0))) throw DomainError("quad_moment: moments diverge for t >= decay rate");
      for (const auto& e : exps) {
        Factor f{kappa, {}, {}};
        for (std::size_t c = 0; c < w.poly.size(); ++c) {
          if (w.poly[c] == 0) continue;
          const Rational alpha = w.power + e + Rational(static_cast<long>(c));
          const S g = detail::halfline_moment<S>(alpha, {Rational(1)}, S(1));
          f.coeff.push_back(from_rational<S>(w.poly[c]) * g);
          f.exponent.push_back(-from_rational<S>(alpha + 1));
        }
        out.push_back(std::move(f));
      }
      return out;
    };
    const auto fx = factors(p.x_weight(), x_exps);
    const auto fy = factors(p.y_weight(), y_exps);
    auto eval = [](const Factor& f, const S& s) {
      S acc(0);
      for (std::size_t c = 0; c < f.coeff.size(); ++c) acc += f.coeff[c] * pow(f.kappa + s, f.exponent[c]);
      return acc;
    };
    const std::size_t nx = x_exps.size();
    const std::size_t ny = y_exps.size();
    auto integrand = [&](const S& s, const S& w, std::vector<S>& acc) {
      std::vector<S> vy(ny);
      for (std::size_t j = 0; j < ny; ++j) vy[j] = eval(fy[j], s);
      for (std::size_t i = 0; i < nx; ++i) {
        const S vx = w * eval(fx[i], s);
        for (std::size_t j = 0; j < ny; ++j) acc[i * ny + j] += vx * vy[j];
      }
    };
    // Slowest algebraic decay in s comes from the smallest total exponent.
    double min_alpha_x = 1e300;
    double min_alpha_y = 1e300;
    for (const auto& e : x_exps) min_alpha_x = std::min(min_alpha_x, to_double(Rational(p.x_weight().power + e)));
    for (const auto& e : y_exps) min_alpha_y = std::min(min_alpha_y, to_double(Rational(p.y_weight().power + e)));
    DecayModel model;
    model.power_at_zero = 0.0;
    model.exp_rate = 0.0;
    model.alg_power = min_alpha_x + min_alpha_y + 2.0;
    auto r = integrate_adaptive_vector<S>(integrand, nx * ny, model, ScalarTraits<S>::digits());
    Matrix<S> out(nx, ny);
    for (std::size_t i = 0; i < nx; ++i) {
      for (std::size_t j = 0; j < ny; ++j) out(i, j) = r.values[i * ny + j];
    }
    return out;
  }
}

/// int int x^{i_exp} y^{j_exp} / (x+y) dmu_1 dmu_2 at the parameter time.
template <class S>
S quad_moment(const Rational& i_exp, const Rational& j_exp, const ModelParams& p) {
  return quad_moment_grid<S>({i_exp}, {j_exp}, p, from_rational<S>(p.t))(0, 0);
}

/// Immutable bi-moment and single-moment cache with shift-rule derivatives.
template <class S>
class MomentTable {
 public:
  MomentTable(ModelParams params, S t, Matrix<S> m, Vector<S> phi_hat, Vector<S> phi)
      : params_(std::move(params)), t_(std::move(t)), m_(std::move(m)), phi_hat_(std::move(phi_hat)),
        phi_(std::move(phi)) {
    if (phi_hat_.size() != m_.rows() || phi_.size() != m_.cols()) {
      throw ShapeError("MomentTable: single-moment lengths must match the bi-moment grid");
    }
  }

  const ModelParams& params() const { return params_; }
  const S& time() const { return t_; }
  Eigen::Index rows() const { return m_.rows(); }
  Eigen::Index cols() const { return m_.cols(); }
  int k1() const { return params_.k1; }
  int k2() const { return params_.k2; }

  const S& m(Eigen::Index i, Eigen::Index j) const {
    if (i < 0 || j < 0 || i >= rows() || j >= cols()) {
      throw RangeError("moment index (" + std::to_string(i) + "," + std::to_string(j) +
                       ") outside table " + std::to_string(rows()) + "x" + std::to_string(cols()));
    }
    return m_(i, j);
  }
  const S& phi_hat(Eigen::Index i) const {
    if (i < 0 || i >= rows()) throw RangeError("phi_hat index " + std::to_string(i) + " outside table");
    return phi_hat_(i);
  }
  const S& phi(Eigen::Index j) const {
    if (j < 0 || j >= cols()) throw RangeError("phi index " + std::to_string(j) + " outside table");
    return phi_(j);
  }
  const S& single(Side side, Eigen::Index j) const { return side == Side::x ? phi_hat(j) : phi(j); }

  const Matrix<S>& bimoments() const { return m_; }
  const Vector<S>& single_x() const { return phi_hat_; }
  const Vector<S>& single_y() const { return phi_; }

  /// order-th t-derivative of m_{i,j}: sum_q C(order,q) m_{i+q k1, j+(order-q) k2}.
  S derivative(Eigen::Index i, Eigen::Index j, int order) const {
    if (order < 0) throw RangeError("derivative order must be nonnegative");
    if (i + static_cast<Eigen::Index>(order) * k1() >= rows() ||
        j + static_cast<Eigen::Index>(order) * k2() >= cols()) {
      throw RangeError("table too small for derivative order " + std::to_string(order));
    }
    S out(0);
    for (int q = 0; q <= order; ++q) {
      out += detail::binomial<S>(order, q) * m(i + q * k1(), j + (order - q) * k2());
    }
    return out;
  }
  S single_derivative(Side side, Eigen::Index j, int order) const {
    const int k = side == Side::x ? k1() : k2();
    return single(side, j + static_cast<Eigen::Index>(order) * k);
  }

  /// Table over Dual<S> holding (m, dm/dt); capacity shrinks by k1 rows and k2 columns.
  MomentTable<Dual<S>> lifted() const {
    const Eigen::Index r = rows() - k1();
    const Eigen::Index c = cols() - k2();
    if (r <= 0 || c <= 0) throw RangeError("table too small to lift to first derivatives");
    Matrix<Dual<S>> dm(r, c);
    Vector<Dual<S>> dx(r), dy(c);
    for (Eigen::Index i = 0; i < r; ++i) {
      for (Eigen::Index j = 0; j < c; ++j) dm(i, j) = Dual<S>(m_(i, j), m_(i + k1(), j) + m_(i, j + k2()));
      dx(i) = Dual<S>(phi_hat_(i), phi_hat_(i + k1()));
    }
    for (Eigen::Index j = 0; j < c; ++j) dy(j) = Dual<S>(phi_(j), phi_(j + k2()));
    return MomentTable<Dual<S>>(params_, Dual<S>(t_, S(1)), std::move(dm), std::move(dx), std::move(dy));
  }

  /// Roles of the two measures exchanged: m -> m^T, phi_hat <-> phi, k1 <-> k2.
  MomentTable transposed() const {
    return MomentTable(params_.swapped(), t_, m_.transpose(), phi_, phi_hat_);
  }

  /// Copy with m_{i,j} shifted by delta (fault injection for detector tests).
  MomentTable with_fault(Eigen::Index i, Eigen::Index j, const S& delta) const {
    MomentTable out = *this;
    out.m_(i, j) = m(i, j) + delta;
    return out;
  }

  /// Leading principal minor tau_n = det(m_{i,j})_{i,j<n}; tau_0 = 1.
  S tau(Eigen::Index n) const {
    if (n > rows() || n > cols()) throw RangeError("tau_" + std::to_string(n) + " needs a larger table");
    return det(m_.topLeftCorner(n, n).eval());
  }

 private:
  ModelParams params_;
  S t_;
  Matrix<S> m_;
  Vector<S> phi_hat_;
  Vector<S> phi_;
};

/// Table dimensions for families up to n_max with deriv_depth exact t-derivatives.
struct TableShape {
  Eigen::Index rows;
  Eigen::Index cols;
};

inline TableShape table_shape(const ModelParams& p, int n_max, int deriv_depth) {
  if (n_max < 0 || deriv_depth < 0) throw RangeError("n_max and deriv_depth must be nonnegative");
  return {n_max + 1 + static_cast<Eigen::Index>(deriv_depth) * p.k1,
          n_max + 1 + static_cast<Eigen::Index>(deriv_depth) * p.k2};
}

/// Explicit-size table at time t. Laguerre uses the closed form
/// m_ij = R_i C_j / ((1+a+b+theta1 i+theta2 j)(1-t)) with
/// R_i = Gamma(1+a+theta1 i)(1-t)^{-(a+theta1 i)}; custom weights use quad_moment_grid.
template <class S>
MomentTable<S> build_table_sized(const ModelParams& p, const S& t, Eigen::Index rows, Eigen::Index cols) {
  p.validate_ranges();
  if (is_exact_v<S> && !p.rational_moments()) {
    throw ModeError("exact moment tables need laguerre weights, integer a and b, k1 = k2 = 1");
  }
  Matrix<S> m(rows, cols);
  Vector<S> phi_hat(rows), phi(cols);
  if (p.family == WeightFamily::laguerre) {
    const S s = S(1) - t;
    if (!(s > S(0))) throw DomainError("laguerre moments diverge for t >= 1");
    std::vector<S> r(rows), c(cols);
    for (Eigen::Index i = 0; i < rows; ++i) {
      const Rational e = p.a + p.theta1() * i;
      r[i] = detail::gamma_at<S>(1 + e) * rational_power(s, Rational(-e));
      phi_hat(i) = r[i] / s;
    }
    for (Eigen::Index j = 0; j < cols; ++j) {
      const Rational e = p.b + p.theta2() * j;
      c[j] = detail::gamma_at<S>(1 + e) * rational_power(s, Rational(-e));
      phi(j) = c[j] / s;
    }
    for (Eigen::Index i = 0; i < rows; ++i) {
      for (Eigen::Index j = 0; j < cols; ++j) {
        m(i, j) = r[i] * c[j] / (from_rational<S>(1 + p.a + p.b + p.theta1() * i + p.theta2() * j) * s);
      }
    }
  } else {
    std::vector<Rational> xe, ye;
    for (Eigen::Index i = 0; i < rows; ++i) xe.push_back(p.theta1() * i);
    for (Eigen::Index j = 0; j < cols; ++j) ye.push_back(p.theta2() * j);
    m = quad_moment_grid<S>(xe, ye, p, t);
    for (Eigen::Index i = 0; i < rows; ++i) phi_hat(i) = single_moment<S>(Side::x, static_cast<int>(i), p, t);
    for (Eigen::Index j = 0; j < cols; ++j) phi(j) = single_moment<S>(Side::y, static_cast<int>(j), p, t);
  }
  return MomentTable<S>(p, t, std::move(m), std::move(phi_hat), std::move(phi));
}

/// Checks tau_n > 0 for 1 <= n <= upto; throws DegeneracyError naming the first bad n.
template <class S>
void check_nondegenerate(const MomentTable<S>& table, Eigen::Index upto) {
  upto = std::min({upto, table.rows(), table.cols()});
  for (Eigen::Index n = 1; n <= upto; ++n) {
    if (!(table.tau(n) > S(0))) throw DegeneracyError("tau_n is not positive", static_cast<int>(n));
  }
}

/// Table at time t covering families up to n_max and deriv_depth t-derivatives;
/// verifies tau_n > 0 for n <= n_max + 1.
template <class S>
MomentTable<S> build_table_at(const ModelParams& p, const S& t, int n_max, int deriv_depth) {
  const auto shape = table_shape(p, n_max, deriv_depth);
  auto table = build_table_sized<S>(p, t, shape.rows, shape.cols);
  check_nondegenerate(table, n_max + 1);
  return table;
}

template <class S>
MomentTable<S> build_table(const ModelParams& p, int n_max, int deriv_depth) {
  return build_table_at<S>(p, from_rational<S>(p.t), n_max, deriv_depth);
}

/// order-th t-derivative of m_{i,j} (0-based) by the iterated shift rule.
template <class S>
S moment_t_derivative(const MomentTable<S>& table, Eigen::Index i, Eigen::Index j, int order) {
  return table.derivative(i, j, order);
}

}  // namespace cbop
