#pragma once

#include <Eigen/Core>

#include <algorithm>
#include <cmath>
#include <limits>
#include <type_traits>
#include <utility>
#include <vector>

#include "cbop/scalar.hpp"

namespace cbop {

using IndexList = std::vector<Eigen::Index>;

/// Determinant plus the elimination diagnostics. In real mode digits_lost is a
/// running-error estimate of decimal digits consumed by rounding and
/// cancellation; growth is max |intermediate| / max |input|.
template <class S>
struct DetResult {
  S value;
  double digits_lost = 0.0;
  double growth = 1.0;
};

namespace detail {

inline Integer lcm_of(const Integer& a, const Integer& b) { return bmp::lcm(a, b); }

// Row-scale to integers, then Bareiss fraction-free elimination; every division
// in the inner update is exact.
inline Rational bareiss_det(Matrix<Rational> m) {
  const Eigen::Index n = m.rows();
  std::vector<std::vector<Integer>> a(n, std::vector<Integer>(n));
  Integer scale = 1;
  for (Eigen::Index i = 0; i < n; ++i) {
    Integer l = 1;
    for (Eigen::Index j = 0; j < n; ++j) l = lcm_of(l, bmp::denominator(m(i, j)));
    for (Eigen::Index j = 0; j < n; ++j) {
      a[i][j] = bmp::numerator(m(i, j)) * (l / bmp::denominator(m(i, j)));
    }
    scale *= l;
  }
  int sign = 1;
  Integer prev = 1;
  for (Eigen::Index k = 0; k + 1 < n; ++k) {
    if (a[k][k] == 0) {
      Eigen::Index p = k + 1;
      while (p < n && a[p][k] == 0) ++p;
      if (p == n) return Rational(0);
      std::swap(a[p], a[k]);
      sign = -sign;
    }
    for (Eigen::Index i = k + 1; i < n; ++i) {
      for (Eigen::Index j = k + 1; j < n; ++j) {
        a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) / prev;
      }
      a[i][k] = 0;
    }
    prev = a[k][k];
  }
  Integer d = n == 0 ? Integer(1) : a[n - 1][n - 1];
  return Rational(Integer(sign) * d, scale);
}

// Partial pivoting with a running bound (in units of the unit roundoff) on the
// absolute error of every entry.
template <class S>
DetResult<S> pivoted_det(Matrix<S> a) {
  const Eigen::Index n = a.rows();
  Matrix<S> err(n, n);
  S input_max(0);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      err(i, j) = abs_value(a(i, j));
      if (err(i, j) > input_max) input_max = err(i, j);
    }
  }
  S running_max = input_max;
  S value(1);
  S rel_err_units(static_cast<long>(n));
  for (Eigen::Index k = 0; k < n; ++k) {
    Eigen::Index p = k;
    for (Eigen::Index i = k + 1; i < n; ++i) {
      if (abs_value(a(i, k)) > abs_value(a(p, k))) p = i;
    }
    if (a(p, k) == S(0)) {
      // An exactly zero column comes from rows that stayed identical through
      // elimination (structural singularity), so the zero is exact.
      DetResult<S> zero{S(0), std::log10(to_double(rel_err_units)), 1.0};
      if (input_max > S(0)) zero.growth = to_double(S(running_max / input_max));
      return zero;
    }
    if (p != k) {
      a.row(p).swap(a.row(k));
      err.row(p).swap(err.row(k));
      value = -value;
    }
    const S pivot = a(k, k);
    const S abs_pivot = abs_value(pivot);
    for (Eigen::Index i = k + 1; i < n; ++i) {
      const S l = a(i, k) / pivot;
      const S abs_l = abs_value(l);
      const S err_l = (err(i, k) + abs_l * err(k, k)) / abs_pivot + abs_l;
      for (Eigen::Index j = k + 1; j < n; ++j) {
        const S prod = l * a(k, j);
        a(i, j) -= prod;
        err(i, j) += abs_l * err(k, j) + abs_value(a(k, j)) * err_l + abs_value(prod) +
                     abs_value(a(i, j));
        if (abs_value(a(i, j)) > running_max) running_max = abs_value(a(i, j));
      }
    }
    value *= pivot;
    rel_err_units += err(k, k) / abs_pivot;
  }
  DetResult<S> out{value, 0.0, 1.0};
  out.digits_lost = std::log10(to_double(rel_err_units));
  if (input_max > S(0)) out.growth = to_double(S(running_max / input_max));
  return out;
}

// Elimination for other field types (dual numbers). Exact types take the first
// nonzero pivot; inexact types pivot on the largest value part.
template <class S>
S field_det(Matrix<S> a) {
  const Eigen::Index n = a.rows();
  S value(1);
  for (Eigen::Index k = 0; k < n; ++k) {
    Eigen::Index p = k;
    if constexpr (is_exact_v<S>) {
      while (p < n && a(p, k) == S(0)) ++p;
      if (p == n) return S(0);
    } else {
      for (Eigen::Index i = k + 1; i < n; ++i) {
        if (abs_value(value_of(a(i, k))) > abs_value(value_of(a(p, k)))) p = i;
      }
      if (a(p, k) == S(0)) return S(0);
    }
    if (p != k) {
      a.row(p).swap(a.row(k));
      value = -value;
    }
    for (Eigen::Index i = k + 1; i < n; ++i) {
      const S l = a(i, k) / a(k, k);
      for (Eigen::Index j = k + 1; j < n; ++j) a(i, j) -= l * a(k, j);
    }
    value *= a(k, k);
  }
  return value;
}

}  // namespace detail

template <class Derived>
DetResult<typename Derived::Scalar> det_with_diagnostics(const Eigen::MatrixBase<Derived>& m) {
  using S = typename Derived::Scalar;
  if (m.rows() != m.cols()) throw ShapeError("det: matrix is not square");
  if (m.rows() == 0) return {S(1), 0.0, 1.0};
  Matrix<S> copy = m;
  if constexpr (std::is_same_v<S, Rational>) {
    return {detail::bareiss_det(std::move(copy)), 0.0, 1.0};
  } else if constexpr (std::is_same_v<S, Real> || std::is_same_v<S, double>) {
    return detail::pivoted_det(std::move(copy));
  } else {
    return {detail::field_det(std::move(copy)), 0.0, 1.0};
  }
}

/// Minimum number of trusted decimal digits a real-mode determinant must keep.
inline constexpr double kMinTrustedDigits = 10.0;

/// Determinant. Real mode raises PrecisionError when fewer than
/// kMinTrustedDigits digits survive, prompting a retry at higher precision.
template <class Derived>
typename Derived::Scalar det(const Eigen::MatrixBase<Derived>& m) {
  using S = typename Derived::Scalar;
  auto r = det_with_diagnostics(m);
  if constexpr (!is_exact_v<S>) {
    if (ScalarTraits<S>::digits() - r.digits_lost < kMinTrustedDigits) {
      throw PrecisionError("det: precision exhausted (" + std::to_string(r.digits_lost) +
                               " digits lost)",
                           r.digits_lost);
    }
  }
  return r.value;
}

/// d/dt det M = sum_r det(M with row r replaced by the derivative row r).
template <class D1, class D2>
typename D1::Scalar det_t_derivative(const Eigen::MatrixBase<D1>& m, const Eigen::MatrixBase<D2>& dm) {
  using S = typename D1::Scalar;
  if (m.rows() != m.cols()) throw ShapeError("det_t_derivative: matrix is not square");
  if (dm.rows() != m.rows() || dm.cols() != m.cols()) {
    throw ShapeError("det_t_derivative: derivative shape mismatch");
  }
  S total(0);
  Matrix<S> work = m;
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    bool zero_row = true;
    for (Eigen::Index c = 0; c < m.cols(); ++c) zero_row = zero_row && dm(r, c) == S(0);
    if (zero_row) continue;
    work.row(r) = dm.row(r);
    total += det_with_diagnostics(work).value;
    work.row(r) = m.row(r);
  }
  return total;
}

template <class S>
Matrix<S> select(const Matrix<S>& m, const IndexList& rows, const IndexList& cols) {
  for (auto r : rows) {
    if (r < 0 || r >= m.rows()) throw RangeError("select: row index out of range");
  }
  for (auto c : cols) {
    if (c < 0 || c >= m.cols()) throw RangeError("select: column index out of range");
  }
  return m(rows, cols);
}

/// Matrix with the listed rows and columns deleted.
template <class S>
Matrix<S> remove(const Matrix<S>& m, const IndexList& drop_rows, const IndexList& drop_cols) {
  IndexList rows;
  IndexList cols;
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    if (std::find(drop_rows.begin(), drop_rows.end(), i) == drop_rows.end()) rows.push_back(i);
  }
  for (Eigen::Index j = 0; j < m.cols(); ++j) {
    if (std::find(drop_cols.begin(), drop_cols.end(), j) == drop_cols.end()) cols.push_back(j);
  }
  return m(rows, cols);
}

/// 0..n-1 with the last index replaced by n, i.e. {0,...,n-2, n}.
inline IndexList shifted_range(Eigen::Index n) {
  IndexList out;
  for (Eigen::Index i = 0; i + 1 < n; ++i) out.push_back(i);
  if (n > 0) out.push_back(n);
  return out;
}

inline IndexList range(Eigen::Index n) {
  IndexList out;
  for (Eigen::Index i = 0; i < n; ++i) out.push_back(i);
  return out;
}

}  // namespace cbop
