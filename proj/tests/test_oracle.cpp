#include <doctest.h>

#include <chrono>
#include <cmath>

#include "cbop/oracle.hpp"
#include "oracles.hpp"

using namespace cbop;

namespace {

OracleConfig config(int n, OracleTarget target, long a, long b, const Rational& t = 0) {
  OracleConfig cfg;
  cfg.n = n;
  cfg.target = target;
  cfg.params = laguerre_params(Rational(a), Rational(b), 1, 1, t, Mode::real);
  return cfg;
}

}  // namespace

TEST_CASE("oracle: node counts per level") {
  CHECK(oracle_nodes_per_axis(2) == 27);
  CHECK(oracle_nodes_per_axis(3) == 53);
  CHECK(oracle_nodes_per_axis(4) == 105);
}

TEST_CASE("oracle: n = 1 integrals against closed-form moments") {
  CHECK(andreief_partition(config(1, OracleTarget::tau, 0, 1)) == doctest::Approx(0.5).epsilon(1e-10));
  CHECK(andreief_partition(config(1, OracleTarget::xi, 0, 1)) == doctest::Approx(1.0 / 3).epsilon(1e-10));
  CHECK(andreief_partition(config(1, OracleTarget::xi_hat, 0, 1)) == doctest::Approx(2.0 / 3).epsilon(1e-10));
  CHECK(oracle_determinant(config(1, OracleTarget::tau, 0, 1)) == doctest::Approx(0.5).epsilon(1e-14));
}

TEST_CASE("oracle: n in {1, 2} quadrature matches determinants to 1e-8") {
  const auto start = std::chrono::steady_clock::now();
  for (const Rational& t : {Rational(0), Rational(1, 5)}) {
    for (int n : {1, 2}) {
      for (auto target : {OracleTarget::tau, OracleTarget::sigma, OracleTarget::sigma_hat, OracleTarget::xi,
                          OracleTarget::xi_hat}) {
        const auto r = andreief_compare(config(n, target, 0, 1, t));
        INFO(to_string(target) << "_" << n << " t=" << cbop::to_string(t) << " quad=" << r.quadrature
                               << " det=" << r.determinant);
        CHECK(r.passed);
        CHECK(r.gap < 1e-8);
        CHECK(r.nodes == 105);
        REQUIRE(r.refinement.size() == 3);
        // Refinement tightens the gap until it reaches rounding level.
        CHECK(r.refinement[1].gap <= std::max(r.refinement[0].gap, 1e-13 * std::abs(r.determinant)));
        CHECK(r.refinement[2].gap <= std::max(r.refinement[1].gap, 1e-13 * std::abs(r.determinant)));
      }
    }
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  MESSAGE("oracle sweep took " << secs << " s");
  CHECK(secs < 300);
}

TEST_CASE("oracle: non-integer exponents") {
  OracleConfig cfg;
  cfg.n = 2;
  cfg.target = OracleTarget::tau;
  cfg.params = laguerre_params(Rational(1, 2), Rational(1, 3), 1, 1, 0, Mode::real);
  const auto r = andreief_compare(cfg);
  CHECK(r.gap < 1e-8);
}

TEST_CASE("oracle: configuration errors") {
  CHECK_THROWS_AS(andreief_partition(config(3, OracleTarget::tau, 0, 1)), RangeError);
  auto cfg = config(1, OracleTarget::tau, 0, 1);
  cfg.params.k1 = 2;
  CHECK_THROWS_AS(andreief_partition(cfg), DomainError);
  CHECK(parse_oracle_target("sigma_hat") == OracleTarget::sigma_hat);
  CHECK_THROWS_AS(parse_oracle_target("nu"), ConfigError);
}

TEST_CASE("andreief identity: quadrature path") {
  HalfLineWeight w;  // e^{-x}
  CHECK(std::abs(andreief_identity_check({0}, {0}, w)) < 1e-12);
  // {1, x} against {1, x}: det[[1, 1], [1, 2]] = 1.
  CHECK(std::abs(andreief_identity_check({0, 1}, {0, 1}, w)) < 1e-10);
  HalfLineWeight w2{Rational(1, 2), {Rational(1), Rational(2)}, Rational(3, 2)};
  // Entries reach Gamma(7.5)-sized moments, so compare relative to the right-hand side.
  const auto [lhs, rhs] = andreief_identity_sides({0, 1, 3}, {0, 2, 3}, w2);
  CHECK(std::abs(lhs - rhs) < 1e-10 * std::abs(rhs));
  CHECK(andreief_identity_check({0, 1, 3}, {0, 2, 3}, w2) == lhs - rhs);
  CHECK_THROWS_AS(andreief_identity_check({0, 1}, {0}, w), RangeError);
}

TEST_CASE("andreief identity: exact polynomial measure on [0, 1]") {
  oracle::Gen gen(77);
  for (int trial = 0; trial < 20; ++trial) {
    const int n = static_cast<int>(gen.integer(1, 3));
    std::vector<int> f, g;
    for (int i = 0; i < n; ++i) {
      f.push_back(static_cast<int>(gen.integer(0, 5)));
      g.push_back(static_cast<int>(gen.integer(0, 5)));
    }
    const std::vector<Rational> density = {gen.positive_rational(), gen.rational(), gen.positive_rational()};
    CHECK(andreief_identity_check_exact(f, g, density) == 0);
  }
}

TEST_CASE("vandermonde sum identity") {
  const Rational p(2, 3), q(-5, 7);
  CHECK(vandermonde_sum_identity<Rational>({p, q}) == 0);
  Matrix<Rational> m(2, 2);
  m << 1, 1, p * p, q * q;
  CHECK(det(m) == (p + q) * (q - p));
  oracle::Gen gen(5);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<Rational> pts;
    const long n = gen.integer(1, 5);
    for (long k = 0; k < n; ++k) pts.push_back(gen.rational());
    CHECK(vandermonde_sum_identity(pts) == 0);
  }
  // Repeated points: both sides vanish.
  CHECK(vandermonde_sum_identity<Rational>({p, p, q}) == 0);
  CHECK(std::abs(vandermonde_sum_identity<double>({0.5, 1.5, 2.25})) < 1e-12);
  CHECK_THROWS_AS(vandermonde_sum_identity<Rational>({}), RangeError);
}
