#include "doctest.h"

#include "cbop/biorth.hpp"
#include "oracles.hpp"

using namespace cbop;

namespace {

Real rel_err(const Real& a, const Real& b) { return abs(a - b) / abs(b); }

}  // namespace

TEST_CASE("cauchy_P / cauchy_Q examples") {
  const auto table = build_table<Rational>(laguerre_params(0, 0), 3, 0);
  CHECK(cauchy_P(0, table).coeffs(0) == Rational(1));
  CHECK(cauchy_Q(0, table).coeffs(0) == Rational(1));
  const auto p1 = cauchy_P(1, table);
  CHECK(p1.coeffs.size() == 2);
  CHECK(p1.coeffs(0) == Rational(-1, 2));
  CHECK(p1.coeffs(1) == Rational(1));
  CHECK(p1(Rational(0)) == Rational(-1, 2));
  CHECK(CauchyFamily<Rational>(table, 2).h(1) == Rational(1, 12));
  CHECK_THROWS_AS(cauchy_P(5, table), RangeError);
}

TEST_CASE("inner_product examples") {
  const auto table = build_table<Rational>(laguerre_params(0, 0), 3, 0);
  const CauchyFamily<Rational> fam(table, 3);
  CHECK(inner_product(fam.P(0), fam.Q(0), table) == fam.h(0));
  CHECK(inner_product(fam.P(1), fam.Q(0), table) == 0);
  CHECK(inner_product(fam.P(1), fam.Q(1), table) == Rational(1, 12));
  CHECK_THROWS_AS(inner_product(fam.Q(1), fam.P(1), table), DomainError);
  const auto small = build_table<Rational>(laguerre_params(0, 0), 1, 0);
  CHECK_THROWS_AS(inner_product(fam.P(3), fam.Q(0), small), RangeError);
}

TEST_CASE("property: exact orthogonality, monicity and bordered-determinant agreement") {
  for (long a = 0; a <= 2; ++a) {
    for (long b = 0; b <= 2; ++b) {
      for (const Rational& t : {Rational(0), Rational(1, 3)}) {
        const auto table = build_table<Rational>(laguerre_params(a, b, 1, 1, t), 6, 0);
        const CauchyFamily<Rational> fam(table, 6);
        for (int n = 0; n <= 6; ++n) {
          CHECK(fam.P(n).leading() == 1);
          CHECK(fam.Q(n).leading() == 1);
          CHECK(fam.h(n) > 0);
          for (int m = 0; m <= 6; ++m) {
            CHECK(inner_product(fam.P(n), fam.Q(m), table) == (n == m ? fam.h(n) : Rational(0)));
          }
        }
        for (int n = 1; n <= 4; ++n) {
          const auto expect = oracle::bordered_poly(table.bimoments(), n);
          const auto got = fam.P(n);
          for (int i = 0; i <= n; ++i) CHECK(got.coeffs(i) == expect[i]);
          const auto q_expect = oracle::bordered_poly(table.transposed().bimoments(), n);
          for (int i = 0; i <= n; ++i) CHECK(fam.Q(n).coeffs(i) == q_expect[i]);
        }
      }
    }
  }
}

TEST_CASE("real-mode orthogonality at (a,b) = (1/2,1/3), (k1,k2) = (2,3)") {
  PrecisionGuard guard(60);
  const auto p = laguerre_params(Rational(1, 2), Rational(1, 3), 2, 3, 0, Mode::real);
  const auto table = build_table<Real>(p, 8, 0);
  const CauchyFamily<Real> fam(table, 8);
  for (int n = 0; n <= 8; ++n) {
    CHECK(abs(fam.P(n).leading() - 1) == 0);
    for (int m = 0; m <= 8; ++m) {
      const Real ip = inner_product(fam.P(n), fam.Q(m), table);
      const Real target = n == m ? fam.h(n) : Real(0);
      CHECK(abs(ip - target) / fam.h(n) < Real("1e-20"));
    }
  }
}

TEST_CASE("degenerate table raises DegeneracyError") {
  Matrix<Rational> m(3, 3);
  m << 1, 2, 3, 2, 4, 5, 3, 5, 7;
  MomentTable<Rational> bad(laguerre_params(0, 0), Rational(0), m, Vector<Rational>::Ones(3),
                            Vector<Rational>::Ones(3));
  try {
    CauchyFamily<Rational> fam(bad, 2);
    FAIL("expected degeneracy");
  } catch (const DegeneracyError& e) {
    CHECK(e.site() == 2);
  }
}

TEST_CASE("jacobi_xi / jacobi_psi examples") {
  const auto p = laguerre_params(0, 0);
  CHECK(jacobi_xi<Rational>(0, p).coeffs(0) == 1);
  const auto xi1 = jacobi_xi<Rational>(1, p);
  CHECK(xi1.coeffs(0) == 1);
  CHECK(xi1.coeffs(1) == -2);
  CHECK(jacobi_h<Rational>(0, p) == 1);
  CHECK(jacobi_h<Rational>(0, laguerre_params(2, 3)) == Rational(1, 6));
}

TEST_CASE("property: exact Jacobi bi-orthogonality for rational a, b, theta") {
  oracle::Gen gen(11);
  for (int trial = 0; trial < 12; ++trial) {
    const auto p = laguerre_params(gen.positive_rational(5, 4) - 1 + Rational(1, 2),
                                   gen.positive_rational(5, 4), static_cast<int>(gen.integer(1, 3)),
                                   static_cast<int>(gen.integer(1, 3)));
    for (int n = 0; n <= 8; ++n) {
      const auto xi = jacobi_xi<Rational>(n, p);
      for (int m = 0; m <= 8; ++m) {
        const Rational v = jacobi_inner_product(xi, jacobi_psi<Rational>(m, p), p);
        CHECK(v == (n == m ? jacobi_h<Rational>(n, p) : Rational(0)));
      }
    }
  }
}

TEST_CASE("hat_P / hat_Q examples") {
  const auto p = laguerre_params(0, 0);
  const auto hp1 = hat_P<Rational>(1, p);
  CHECK(hp1.coeffs(0) == 1);
  CHECK(hp1.coeffs(1) == -2);
  CHECK(hat_P<Rational>(0, laguerre_params(2, 0)).coeffs(0) == Rational(1, 2));
  const auto table = build_table<Rational>(p, 2, 0);
  CHECK(inner_product(hat_P<Rational>(0, p), hat_Q<Rational>(1, p), table) == 0);
  CHECK_THROWS_AS(hat_P<Rational>(1, laguerre_params(Rational(1, 2), 0)), ModeError);
  CHECK(hat_Q<Rational>(2, laguerre_params(0, 1, 1, 1)).side == Side::y);
}

TEST_CASE("property: hat families are bi-orthogonal under the Cauchy-Laguerre product") {
  PrecisionGuard guard(60);
  for (auto [k1, k2] : {std::pair{1, 1}, std::pair{2, 3}, std::pair{3, 1}}) {
    const auto p = laguerre_params(Rational(1, 2), Rational(1, 3), k1, k2, 0, Mode::real);
    const auto table = build_table<Real>(p, 6, 0);
    for (int m = 0; m <= 6; ++m) {
      const auto hp = hat_P<Real>(m, p);
      for (int n = 0; n <= 6; ++n) {
        const Real v = inner_product(hp, hat_Q<Real>(n, p), table);
        const Real target = m == n ? jacobi_h<Real>(n, p) : Real(0);
        CHECK(abs(v - target) < Real("1e-40"));
      }
    }
  }
}

TEST_CASE("monic_factor") {
  CHECK(monic_factor<Rational>(0, Side::x, laguerre_params(0, 0)) == 1);
  // Gamma(2) / c_{1,1} = 1 / (-2)
  CHECK(monic_factor<Rational>(1, Side::x, laguerre_params(0, 0)) == Rational(-1, 2));
  for (int n = 0; n <= 6; ++n) {
    const auto p = laguerre_params(1, 2);
    CHECK(monic_factor<Rational>(n, Side::x, p) * hat_P<Rational>(n, p).leading() == 1);
    CHECK(monic_factor<Rational>(n, Side::y, p) * hat_Q<Rational>(n, p).leading() == 1);
  }
}

TEST_CASE("property: monic_factor * hat_P = cauchy_P, including the Gamma-ratio magnitude") {
  PrecisionGuard guard(60);
  const auto p = laguerre_params(Rational(1, 2), Rational(1, 3), 2, 3, 0, Mode::real);
  const auto table = build_table<Real>(p, 6, 0);
  const CauchyFamily<Real> fam(table, 6);
  for (int n = 0; n <= 6; ++n) {
    const Real fx = monic_factor<Real>(n, Side::x, p);
    const Real fy = monic_factor<Real>(n, Side::y, p);
    const auto hp = hat_P<Real>(n, p);
    const auto hq = hat_Q<Real>(n, p);
    for (int l = 0; l <= n; ++l) {
      CHECK(abs(fx * hp.coeffs(l) - fam.P(n).coeffs(l)) < Real("1e-35") * (1 + abs(fam.P(n).coeffs(l))));
      CHECK(abs(fy * hq.coeffs(l) - fam.Q(n).coeffs(l)) < Real("1e-35") * (1 + abs(fam.Q(n).coeffs(l))));
    }
    // |factor| equals Gamma(n+1)Gamma(1+a+theta1 n)Gamma((1+a+b+theta1 n)/theta2) / Gamma((1+a+b+(theta1+theta2)n)/theta2)
    const Real th1 = Real(1) / 2, th2 = Real(1) / 3, a = Real(1) / 2, b = Real(1) / 3;
    const Real ratio = oracle::stirling_gamma(Real(n + 1)) * oracle::stirling_gamma(1 + a + th1 * n) *
                       oracle::stirling_gamma((1 + a + b + th1 * n) / th2) /
                       oracle::stirling_gamma((1 + a + b + (th1 + th2) * n) / th2);
    CHECK(rel_err(abs(fx), ratio) < Real("1e-40"));
  }
}

TEST_CASE("laguerre_h examples and determinant agreement") {
  CHECK(laguerre_h<Rational>(0, laguerre_params(0, 0)) == 1);
  CHECK(laguerre_h<Rational>(1, laguerre_params(0, 0)) == Rational(1, 12));
  CHECK_THROWS_AS(laguerre_h<Rational>(1, laguerre_params(Rational(1, 2), 0)), ModeError);
  for (long a = 0; a <= 2; ++a) {
    const auto p = laguerre_params(a, 1);
    const CauchyFamily<Rational> fam(build_table<Rational>(p, 6, 0), 6);
    for (int n = 0; n <= 6; ++n) CHECK(laguerre_h<Rational>(n, p) == fam.h(n));
  }
  PrecisionGuard guard(60);
  for (auto [k1, k2] : {std::pair{1, 1}, std::pair{2, 3}, std::pair{3, 2}}) {
    const auto p = laguerre_params(Rational(1, 2), Rational(1, 3), k1, k2, 0, Mode::real);
    const CauchyFamily<Real> fam(build_table<Real>(p, 8, 0), 8);
    for (int n = 0; n <= 8; ++n) CHECK(rel_err(laguerre_h<Real>(n, p), fam.h(n)) < Real("1e-25"));
  }
}

TEST_CASE("residue evaluation of hat_P") {
  PrecisionGuard guard(50);
  const auto p0 = laguerre_params(Rational(3, 2), 0, 1, 1, 0, Mode::real);
  CHECK(rel_err(residue_eval_hatP<Real>(0, Real(2), p0), 1 / oracle::stirling_gamma(Real(5) / 2)) < Real("1e-40"));
  CHECK_THROWS_AS(residue_eval_hatP<Rational>(1, Rational(1), laguerre_params(0, 0)), ModeError);
  CHECK_THROWS_AS(residue_eval_hatP<Real>(1, Real(-1), p0), DomainError);

  for (auto [k1, k2] : {std::pair{1, 1}, std::pair{2, 3}, std::pair{3, 1}}) {
    const auto p = laguerre_params(Rational(1, 2), Rational(1, 3), k1, k2, 0, Mode::real);
    for (int n = 0; n <= 4; ++n) {
      const auto hp = hat_P<Real>(n, p);
      const auto hq = hat_Q<Real>(n, p);
      const auto res = residue_coefficients<Real>(n, p);
      for (int l = 0; l <= n; ++l) CHECK(abs(res[l] - hp.coeffs(l)) < Real("1e-20"));
      for (const Real& x : {Real(1) / 2, Real(1), Real(2)}) {
        CHECK(abs(residue_eval_hatP<Real>(n, x, p) - hp(x)) < Real("1e-20"));
        CHECK(abs(residue_eval_hatQ<Real>(n, x, p) - hq(x)) < Real("1e-20"));
      }
    }
  }
}

TEST_CASE("evaluation in the theta-power basis") {
  const auto p = laguerre_params(0, 0, 2, 1);
  auto xi = jacobi_xi<Rational>(1, p);
  // c = (1, -(1+1/2)/1) -> 1 - 3/2 sqrt(x)
  CHECK(xi.coeffs(1) == Rational(-3, 2));
  CHECK(xi(Rational(4)) == Rational(-2));
  CHECK(xi(Rational(0)) == 1);
  CHECK_THROWS_AS(xi(Rational(2)), ModeError);
  const auto j = poly_to_json(xi);
  CHECK(j["kind"] == "jacobiXi");
  CHECK(j["theta"] == "1/2");
  CHECK(j["coeffs"][1] == "-3/2");
}
