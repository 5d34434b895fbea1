#pragma once

// Brute-force checks that share no code path with the moment tables:
// tensor exp-sinh quadrature of the multiple-integral forms of tau, sigma, sigma_hat,
// xi, xi_hat (n <= 2) with the Cauchy kernel left in the integrand, the Andreief
// identity for monomial families, and the shifted Vandermonde identity.
//
// The quadrature sums run in double. Delta^2 vanishes on repeated nodes and the
// integrands are symmetric, so only strictly increasing node tuples are visited;
// their n! multiplicities cancel the 1/n! prefactors.

#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include "cbop/determinant.hpp"
#include "cbop/model.hpp"

namespace cbop {

enum class OracleTarget { tau, sigma, sigma_hat, xi, xi_hat };

std::string to_string(OracleTarget target);
OracleTarget parse_oracle_target(const std::string& text);

struct OracleConfig {
  int n = 1;
  OracleTarget target = OracleTarget::tau;
  ModelParams params;
  double tol = 1e-8;
  int level = 4;  // step 2^-level in the exp-sinh variable
};

/// u-window of the tensor rule. Level L has 6.5 * 2^L + 1 nodes per axis (27, 53, 105 for L = 2, 3, 4).
inline constexpr std::pair<double, double> kOracleWindow{-4.5, 2.0};

std::size_t oracle_nodes_per_axis(int level);

struct OracleLevel {
  int level = 0;
  std::size_t nodes = 0;
  double value = 0;
  double gap = 0;  // |value - determinant|
};

struct OracleResult {
  OracleTarget target = OracleTarget::tau;
  int n = 1;
  double quadrature = 0;
  double determinant = 0;
  double gap = 0;  // relative to |determinant|
  std::size_t nodes = 0;
  std::vector<OracleLevel> refinement;
  bool passed = false;
};

/// The multiple integral for cfg.target at cfg.n by tensor quadrature at cfg.level.
double andreief_partition(const OracleConfig& cfg);

/// The same quantity from the bordered determinant (real mode, 40 digits).
double oracle_determinant(const OracleConfig& cfg);

/// Quadrature at levels min_level..cfg.level against the determinant value.
OracleResult andreief_compare(const OracleConfig& cfg, int min_level = 2);

/// (1/n!) int det[f_i(x_j)] det[g_i(x_j)] prod dmu(x_j) - det[int f_i g_j dmu] with
/// f_i = x^{f_pows[i]}, g_i = x^{g_pows[i]} and dmu a half-line weight; n <= 3.
double andreief_identity_check(const std::vector<int>& f_pows, const std::vector<int>& g_pows,
                               const HalfLineWeight& weight, int level = 4);

/// Both sides of the identity above: (quadrature, determinant of Gamma moments).
std::pair<double, double> andreief_identity_sides(const std::vector<int>& f_pows, const std::vector<int>& g_pows,
                                                  const HalfLineWeight& weight, int level = 4);

/// Exact form on [0, 1] with density sum_k density[k] x^k: the n-fold integral is
/// expanded over permutation pairs and integrated monomial by monomial.
Rational andreief_identity_check_exact(const std::vector<int>& f_pows, const std::vector<int>& g_pows,
                                       const std::vector<Rational>& density);

/// det(x_j^i)_{i in {0..n-2, n}} - (sum_j x_j) prod_{i<j} (x_j - x_i).
template <class S>
S vandermonde_sum_identity(const std::vector<S>& points) {
  const auto n = static_cast<Eigen::Index>(points.size());
  if (n == 0) throw RangeError("vandermonde identity: need at least one point");
  const IndexList powers = shifted_range(n);
  Matrix<S> v(n, n);
  for (Eigen::Index r = 0; r < n; ++r) {
    for (Eigen::Index j = 0; j < n; ++j) {
      S p(1);
      for (Eigen::Index e = 0; e < powers[r]; ++e) p *= points[j];
      v(r, j) = p;
    }
  }
  S sum(0), delta(1);
  for (Eigen::Index j = 0; j < n; ++j) {
    sum += points[j];
    for (Eigen::Index i = 0; i < j; ++i) delta *= points[j] - points[i];
  }
  return det_with_diagnostics(v).value - sum * delta;
}

}  // namespace cbop
