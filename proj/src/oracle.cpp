#include "cbop/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "cbop/lattice.hpp"

namespace cbop {

std::string to_string(OracleTarget target) {
  switch (target) {
    case OracleTarget::tau: return "tau";
    case OracleTarget::sigma: return "sigma";
    case OracleTarget::sigma_hat: return "sigma_hat";
    case OracleTarget::xi: return "xi";
    case OracleTarget::xi_hat: return "xi_hat";
  }
  return "unknown";
}

OracleTarget parse_oracle_target(const std::string& text) {
  for (auto t : {OracleTarget::tau, OracleTarget::sigma, OracleTarget::sigma_hat, OracleTarget::xi,
                 OracleTarget::xi_hat}) {
    if (to_string(t) == text) return t;
  }
  throw ConfigError("unknown oracle target '" + text + "'");
}

std::size_t oracle_nodes_per_axis(int level) {
  const long scale = 1L << level;
  return static_cast<std::size_t>(std::ceil(kOracleWindow.second * scale) -
                                  std::floor(kOracleWindow.first * scale) + 1);
}

namespace {

struct Nodes {
  std::vector<double> x;
  std::vector<double> w;  // rule weight times the measure density
};

double density(const HalfLineWeight& wt, double t, double x) {
  double poly = 0;
  for (auto it = wt.poly.rbegin(); it != wt.poly.rend(); ++it) poly = poly * x + to_double(*it);
  return std::pow(x, to_double(wt.power)) * poly * std::exp(-(to_double(wt.rate) - t) * x);
}

Nodes measure_nodes(const HalfLineWeight& wt, double t, int level) {
  const double h = std::ldexp(1.0, -level);
  const long lo = static_cast<long>(std::floor(kOracleWindow.first / h));
  const long hi = static_cast<long>(std::ceil(kOracleWindow.second / h));
  Nodes out;
  for (long k = lo; k <= hi; ++k) {
    const double u = k * h;
    const double x = std::exp(M_PI / 2 * std::sinh(u));
    const double w = h * M_PI / 2 * std::cosh(u) * x * density(wt, t, x);
    if (x > 0 && std::isfinite(w) && w != 0) {
      out.x.push_back(x);
      out.w.push_back(w);
    }
  }
  return out;
}

/// Strictly increasing m-tuples of node indices with weight prod w * Delta^2, optionally
/// times the coordinate sum.
struct Tuples {
  std::vector<std::vector<std::size_t>> idx;
  std::vector<double> weight;
};

Tuples increasing_tuples(const Nodes& nodes, int m, bool coordinate_sum) {
  Tuples out;
  std::vector<std::size_t> cur;
  const std::size_t count = nodes.x.size();
  auto rec = [&](auto&& self, std::size_t start) -> void {
    if (static_cast<int>(cur.size()) == m) {
      double w = 1, sum = 0;
      for (std::size_t a = 0; a < cur.size(); ++a) {
        w *= nodes.w[cur[a]];
        sum += nodes.x[cur[a]];
        for (std::size_t b = 0; b < a; ++b) {
          const double d = nodes.x[cur[a]] - nodes.x[cur[b]];
          w *= d * d;
        }
      }
      out.idx.push_back(cur);
      out.weight.push_back(coordinate_sum ? w * sum : w);
      return;
    }
    for (std::size_t k = start; k < count; ++k) {
      cur.push_back(k);
      self(self, k + 1);
      cur.pop_back();
    }
  };
  rec(rec, 0);
  return out;
}

void check_config(const OracleConfig& cfg) {
  if (cfg.n < 1 || cfg.n > 2) throw RangeError("oracle: n must be 1 or 2");
  if (cfg.params.k1 != 1 || cfg.params.k2 != 1) throw DomainError("oracle: requires k1 = k2 = 1");
  if (cfg.level < 0 || cfg.level > 6) throw RangeError("oracle: level must be in 0..6");
  cfg.params.validate_ranges();
}

}  // namespace

double andreief_partition(const OracleConfig& cfg) {
  check_config(cfg);
  const double t = to_double(cfg.params.t);
  const Nodes xs = measure_nodes(cfg.params.x_weight(), t, cfg.level);
  const Nodes ys = measure_nodes(cfg.params.y_weight(), t, cfg.level);
  int nx = cfg.n, ny = cfg.n;
  if (cfg.target == OracleTarget::sigma) ny = cfg.n + 1;
  if (cfg.target == OracleTarget::sigma_hat) nx = cfg.n + 1;
  const Tuples tx = increasing_tuples(xs, nx, cfg.target == OracleTarget::xi);
  const Tuples ty = increasing_tuples(ys, ny, cfg.target == OracleTarget::xi_hat);

  // For each x tuple, v_b = prod_j 1/(x_j + y_b); the kernel product over a y tuple is prod_k v_{b_k}.
  std::vector<double> v(ys.x.size());
  double total = 0;
  for (std::size_t a = 0; a < tx.idx.size(); ++a) {
    for (std::size_t b = 0; b < ys.x.size(); ++b) {
      double p = 1;
      for (std::size_t j : tx.idx[a]) p /= xs.x[j] + ys.x[b];
      v[b] = p;
    }
    double inner = 0;
    for (std::size_t c = 0; c < ty.idx.size(); ++c) {
      double p = ty.weight[c];
      for (std::size_t k : ty.idx[c]) p *= v[k];
      inner += p;
    }
    total += tx.weight[a] * inner;
  }
  return total;
}

double oracle_determinant(const OracleConfig& cfg) {
  check_config(cfg);
  PrecisionGuard guard(40);
  const Eigen::Index size = cfg.n + 3;
  const TauTower<Real> tw(build_table_sized<Real>(cfg.params, from_rational<Real>(cfg.params.t), size, size));
  switch (cfg.target) {
    case OracleTarget::tau: return to_double(tw.tau(cfg.n).v);
    case OracleTarget::sigma: return to_double(tw.sigma(cfg.n).v);
    case OracleTarget::sigma_hat: return to_double(tw.sigma_hat(cfg.n).v);
    case OracleTarget::xi: return to_double(tw.xi(cfg.n).v);
    case OracleTarget::xi_hat: return to_double(tw.xi_hat(cfg.n).v);
  }
  return 0;
}

OracleResult andreief_compare(const OracleConfig& cfg, int min_level) {
  check_config(cfg);
  OracleResult r;
  r.target = cfg.target;
  r.n = cfg.n;
  r.determinant = oracle_determinant(cfg);
  for (int level = std::min(min_level, cfg.level); level <= cfg.level; ++level) {
    OracleConfig c = cfg;
    c.level = level;
    const double q = andreief_partition(c);
    r.refinement.push_back({level, oracle_nodes_per_axis(level), q, std::abs(q - r.determinant)});
  }
  r.quadrature = r.refinement.back().value;
  r.nodes = r.refinement.back().nodes;
  r.gap = std::abs(r.quadrature - r.determinant) / std::max(std::abs(r.determinant), 1e-300);
  r.passed = r.gap < cfg.tol;
  return r;
}

namespace {

double small_det(std::vector<std::vector<double>> m) {
  const std::size_t n = m.size();
  double d = 1;
  for (std::size_t k = 0; k < n; ++k) {
    std::size_t p = k;
    for (std::size_t i = k + 1; i < n; ++i) {
      if (std::abs(m[i][k]) > std::abs(m[p][k])) p = i;
    }
    if (m[p][k] == 0) return 0;
    if (p != k) {
      std::swap(m[p], m[k]);
      d = -d;
    }
    d *= m[k][k];
    for (std::size_t i = k + 1; i < n; ++i) {
      const double f = m[i][k] / m[k][k];
      for (std::size_t j = k; j < n; ++j) m[i][j] -= f * m[k][j];
    }
  }
  return d;
}

void check_families(const std::vector<int>& f, const std::vector<int>& g) {
  if (f.size() != g.size() || f.empty() || f.size() > 3) {
    throw RangeError("andreief identity: families must have equal size 1..3");
  }
  for (int p : f) {
    if (p < 0) throw DomainError("andreief identity: monomial powers must be nonnegative");
  }
  for (int p : g) {
    if (p < 0) throw DomainError("andreief identity: monomial powers must be nonnegative");
  }
}

}  // namespace

double andreief_identity_check(const std::vector<int>& f_pows, const std::vector<int>& g_pows,
                               const HalfLineWeight& weight, int level) {
  const auto [lhs, rhs] = andreief_identity_sides(f_pows, g_pows, weight, level);
  return lhs - rhs;
}

std::pair<double, double> andreief_identity_sides(const std::vector<int>& f_pows, const std::vector<int>& g_pows,
                                                  const HalfLineWeight& weight, int level) {
  check_families(f_pows, g_pows);
  if (!(weight.rate > 0) || !(weight.power > -1)) throw DomainError("andreief identity: weight not integrable");
  const int n = static_cast<int>(f_pows.size());
  const Nodes nodes = measure_nodes(weight, 0.0, level);
  const std::size_t count = nodes.x.size();

  // Left side over all ordered tuples.
  std::vector<std::size_t> idx(n, 0);
  double lhs = 0;
  std::vector<std::vector<double>> F(n, std::vector<double>(n)), G(n, std::vector<double>(n));
  while (true) {
    double w = 1;
    for (int j = 0; j < n; ++j) {
      const double x = nodes.x[idx[j]];
      w *= nodes.w[idx[j]];
      for (int i = 0; i < n; ++i) {
        F[i][j] = std::pow(x, f_pows[i]);
        G[i][j] = std::pow(x, g_pows[i]);
      }
    }
    lhs += small_det(F) * small_det(G) * w;
    int pos = n - 1;
    while (pos >= 0 && ++idx[pos] == count) idx[pos--] = 0;
    if (pos < 0) break;
  }
  double nfact = 1;
  for (int k = 2; k <= n; ++k) nfact *= k;
  lhs /= nfact;

  // Right side from Gamma-function moments.
  const double a = to_double(weight.power), rate = to_double(weight.rate);
  auto moment = [&](int s) {
    double acc = 0;
    for (std::size_t c = 0; c < weight.poly.size(); ++c) {
      const double e = a + s + static_cast<double>(c) + 1;
      acc += to_double(weight.poly[c]) * std::tgamma(e) / std::pow(rate, e);
    }
    return acc;
  };
  std::vector<std::vector<double>> M(n, std::vector<double>(n));
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) M[i][j] = moment(f_pows[i] + g_pows[j]);
  }
  return {lhs, small_det(M)};
}

Rational andreief_identity_check_exact(const std::vector<int>& f_pows, const std::vector<int>& g_pows,
                                       const std::vector<Rational>& density) {
  check_families(f_pows, g_pows);
  const int n = static_cast<int>(f_pows.size());
  auto moment = [&](int s) {
    Rational acc = 0;
    for (std::size_t k = 0; k < density.size(); ++k) acc += density[k] / Rational(s + static_cast<long>(k) + 1);
    return acc;
  };
  auto sign = [](const std::vector<int>& perm) {
    int inversions = 0;
    for (std::size_t i = 0; i < perm.size(); ++i) {
      for (std::size_t j = i + 1; j < perm.size(); ++j) inversions += perm[i] > perm[j];
    }
    return inversions % 2 == 0 ? 1 : -1;
  };
  // det f(x) det g(x) = sum over (sigma, pi) of sgn sigma sgn pi prod_j x_j^{f_sigma(j) + g_pi(j)};
  // the integral factorises over j.
  std::vector<int> sigma(n), pi(n);
  std::iota(sigma.begin(), sigma.end(), 0);
  Rational lhs = 0;
  do {
    std::iota(pi.begin(), pi.end(), 0);
    do {
      Rational term = sign(sigma) * sign(pi);
      for (int j = 0; j < n; ++j) term *= moment(f_pows[sigma[j]] + g_pows[pi[j]]);
      lhs += term;
    } while (std::next_permutation(pi.begin(), pi.end()));
  } while (std::next_permutation(sigma.begin(), sigma.end()));
  Rational nfact = 1;
  for (int k = 2; k <= n; ++k) nfact *= k;
  lhs /= nfact;

  Matrix<Rational> M(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) M(i, j) = moment(f_pows[i] + g_pows[j]);
  }
  return lhs - det(M);
}

}  // namespace cbop
