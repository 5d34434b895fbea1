#include "doctest.h"

#include "cbop/determinant.hpp"
#include "cbop/dual.hpp"
#include "cbop/jet.hpp"
#include "cbop/quadrature.hpp"
#include "cbop/special.hpp"
#include "oracles.hpp"

using namespace cbop;

namespace {

Real rel_gap(const Real& a, const Real& b) { return abs(a - b) / abs(b); }

}  // namespace

TEST_CASE("gamma: trivial values and errors") {
  PrecisionGuard guard(50);
  CHECK(gamma(Real(1)) == Real(1));
  CHECK(rel_gap(gamma(Real(5)), Real(24)) < Real("1e-45"));
  CHECK(gamma(Rational(5)) == Rational(24));
  CHECK(gamma(Rational(1)) == Rational(1));
  CHECK_THROWS_AS(gamma(Real(0)), DomainError);
  CHECK_THROWS_AS(gamma(Real(-2)), DomainError);
  CHECK_THROWS_AS(gamma(Rational(3, 2)), ModeError);
}

TEST_CASE("gamma(3/2) agrees with the duplication formula and the Stirling oracle") {
  PrecisionGuard guard(60);
  const Real g = gamma(from_rational<Real>(Rational(3, 2)));
  const Real root_pi_half = sqrt(boost::math::constants::pi<Real>()) / 2;
  CHECK(rel_gap(g, root_pi_half) < Real("1e-55"));
  CHECK(rel_gap(g, oracle::stirling_gamma(Real(3) / 2)) < Real("1e-55"));
  for (const char* x : {"0.1", "2.75", "7.3333", "19.5"}) {
    CHECK(rel_gap(gamma(Real(x)), oracle::stirling_gamma(Real(x))) < Real("1e-55"));
  }
}

TEST_CASE("pochhammer examples") {
  CHECK(pochhammer(Rational(7), 0) == Rational(1));
  CHECK(pochhammer(Rational(2), 3) == Rational(24));
  CHECK(pochhammer(Rational(1, 2), 2) == Rational(3, 4));
}

TEST_CASE("property: pochhammer(a, m+1) = pochhammer(a, m) (a + m)") {
  oracle::Gen gen(11);
  for (int trial = 0; trial < 200; ++trial) {
    const Rational a = gen.rational();
    const unsigned m = static_cast<unsigned>(gen.integer(0, 12));
    CHECK(pochhammer(a, m + 1) == pochhammer(a, m) * (a + Rational(m)));
  }
}

TEST_CASE("det examples") {
  Matrix<Rational> one(1, 1);
  one(0, 0) = Rational(-7, 3);
  CHECK(det(one) == Rational(-7, 3));
  Matrix<Rational> hilbert(2, 2);
  hilbert << Rational(1), Rational(1, 2), Rational(1, 2), Rational(1, 3);
  CHECK(det(hilbert) == Rational(1, 12));
  CHECK(det(Matrix<Rational>::Identity(3, 3)) == Rational(1));
  CHECK_THROWS_AS(det(Matrix<Rational>(2, 3)), ShapeError);
  Matrix<Rational> singular(3, 3);
  singular << 1, 2, 3, 2, 4, 6, 0, 1, 5;
  CHECK(det(singular) == Rational(0));
}

TEST_CASE("real det: identical rows give an exact zero, not a precision failure") {
  PrecisionGuard guard(40);
  Matrix<Real> m(3, 3);
  m << Real(1) / 3, Real(2) / 7, Real(5), Real(1) / 11, Real(3), Real(-2), Real(1) / 3, Real(2) / 7, Real(5);
  const auto r = det_with_diagnostics(m);
  CHECK(r.value == 0);
  CHECK(std::isfinite(r.digits_lost));
  CHECK(det(m) == 0);
}

TEST_CASE("property: exact det matches cofactor expansion up to 4x4") {
  oracle::Gen gen(2024);
  for (int trial = 0; trial < 300; ++trial) {
    const long n = gen.integer(1, 4);
    Matrix<Rational> m = gen.rational_matrix(n, n);
    if (trial % 7 == 0 && n > 1) m.row(n - 1) = m.row(0) * Rational(3, 2);  // force singular cases
    if (trial % 5 == 0) m(0, 0) = 0;                                         // force a pivot swap
    CHECK(det(m) == oracle::cofactor_det(m));
  }
}

TEST_CASE("property: real det at p and 2p agree to p - loss digits") {
  oracle::Gen gen(77);
  for (int trial = 0; trial < 40; ++trial) {
    const long n = gen.integer(2, 7);
    // Hilbert-like Cauchy matrices lose digits quickly, so the loss estimate matters.
    Matrix<Rational> q(n, n);
    const Rational shift = gen.positive_rational(4, 3);
    for (long i = 0; i < n; ++i) {
      for (long j = 0; j < n; ++j) q(i, j) = Rational(1) / (shift + i + j);
    }
    const unsigned p = 30;
    DetResult<Real> lo;
    Real hi;
    {
      PrecisionGuard guard(p);
      Matrix<Real> m = q.unaryExpr([](const Rational& v) { return from_rational<Real>(v); });
      lo = det_with_diagnostics(m);
    }
    {
      PrecisionGuard guard(2 * p);
      Matrix<Real> m = q.unaryExpr([](const Rational& v) { return from_rational<Real>(v); });
      hi = det(m);
      const Real exact = from_rational<Real>(det(q));
      CHECK(rel_gap(hi, exact) < Real("1e-40"));
      const Real gap = rel_gap(Real(lo.value), hi);
      const double trusted = p - lo.digits_lost - 1.0;
      CHECK(gap < power_of_ten<Real>(-trusted));
    }
    CHECK(lo.digits_lost >= 0.0);
  }
}

TEST_CASE("real det raises a precision error when too few digits survive") {
  PrecisionGuard guard(25);
  const long n = 14;
  Matrix<Real> m(n, n);
  for (long i = 0; i < n; ++i) {
    for (long j = 0; j < n; ++j) m(i, j) = Real(1) / Real(i + j + 1);
  }
  CHECK_THROWS_AS(det(m), PrecisionError);
  PrecisionGuard wide(80);
  Matrix<Real> w(n, n);
  for (long i = 0; i < n; ++i) {
    for (long j = 0; j < n; ++j) w(i, j) = Real(1) / Real(i + j + 1);
  }
  CHECK_NOTHROW(det(w));
}

TEST_CASE("det_t_derivative examples") {
  Matrix<Rational> m(2, 2);
  m << 3, 1, 4, 1;
  CHECK(det_t_derivative(m, Matrix<Rational>::Zero(2, 2)) == Rational(0));
  Matrix<Rational> f(1, 1), df(1, 1);
  f(0, 0) = Rational(5, 7);
  df(0, 0) = Rational(-2, 9);
  CHECK(det_t_derivative(f, df) == Rational(-2, 9));
  // m_ij(t) = (1-t)^{-(1+i+j)} i! j!/(i+j+1): det = (1-t)^{-4}/12, derivative 1/3 at t = 0
  Matrix<Rational> lag(2, 2), dlag(2, 2);
  lag << Rational(1), Rational(1, 2), Rational(1, 2), Rational(1, 3);
  dlag << 1, 1, 1, 1;
  CHECK(det_t_derivative(lag, dlag) == Rational(1, 3));
  CHECK_THROWS_AS(det_t_derivative(lag, Matrix<Rational>(3, 3)), ShapeError);
}

TEST_CASE("property: det_t_derivative matches Richardson-extrapolated central differences") {
  PrecisionGuard guard(40);
  oracle::Gen gen(5);
  for (int trial = 0; trial < 20; ++trial) {
    const long n = gen.integer(2, 5);
    Matrix<Real> c0(n, n), c1(n, n), c2(n, n);
    for (long i = 0; i < n; ++i) {
      for (long j = 0; j < n; ++j) {
        c0(i, j) = from_rational<Real>(gen.rational());
        c1(i, j) = from_rational<Real>(gen.rational());
        c2(i, j) = from_rational<Real>(gen.rational());
      }
    }
    // M(t)_ij = c0 + c1 sin(t) + c2 exp(t/2)
    auto at = [&](const Real& t) {
      Matrix<Real> m(n, n);
      for (long i = 0; i < n; ++i) {
        for (long j = 0; j < n; ++j) m(i, j) = c0(i, j) + c1(i, j) * sin(t) + c2(i, j) * exp(t / 2);
      }
      return m;
    };
    const Real t0("0.3");
    Matrix<Real> dm(n, n);
    for (long i = 0; i < n; ++i) {
      for (long j = 0; j < n; ++j) dm(i, j) = c1(i, j) * cos(t0) + c2(i, j) * exp(t0 / 2) / 2;
    }
    const Real exact = det_t_derivative(at(t0), dm);
    auto central = [&](const Real& h) {
      return (det_with_diagnostics(at(t0 + h)).value - det_with_diagnostics(at(t0 - h)).value) / (2 * h);
    };
    const Real h("1e-3");
    const Real rich = (4 * central(h / 2) - central(h)) / 3;
    const Real scale = abs(exact) > 1 ? Real(abs(exact)) : Real(1);
    CHECK(abs(rich - exact) / scale < Real("1e-9"));
  }
}

TEST_CASE("select/remove helpers") {
  Matrix<Rational> m(3, 3);
  m << 1, 2, 3, 4, 5, 6, 7, 8, 10;
  Matrix<Rational> s = select(m, {0, 2}, {1, 2});
  CHECK(s(1, 0) == Rational(8));
  Matrix<Rational> r = remove(m, {1}, {0});
  CHECK(r(1, 1) == Rational(10));
  CHECK_THROWS_AS(select(m, {3}, {0}), RangeError);
  CHECK(shifted_range(3) == IndexList{0, 1, 3});
}

TEST_CASE("dual numbers carry exact derivatives through determinants") {
  // det of [[1+t, t], [2, 3 - t]] = 3 + 2t - t^2 - 2t, derivative at t = 1/2 is -1
  using D = Dual<Rational>;
  const Rational t(1, 2);
  Matrix<D> m(2, 2);
  m << D(1 + t, 1), D(t, 1), D(2, 0), D(3 - t, -1);
  const D d = det(m);
  CHECK(d.v == 3 - t * t);
  CHECK(d.d == -2 * t);
  CHECK(hirota(D(2, 3), D(5, 7)) == Rational(3 * 5 - 2 * 7));
}

TEST_CASE("jets solve linear ODEs term by term") {
  // u' = u with u(0) = 1 gives the exponential series
  const auto p = Jet<Rational>::constant(1, 6);
  const auto q = Jet<Rational>::constant(0, 6);
  const auto u = solve_linear_ode_jet(Rational(1), p, q);
  CHECK(u.order() == 7);
  CHECK(u[5] == Rational(1, 120));
  CHECK(u.derivative()[4] == Rational(1, 24));
  const auto ratio = u / u;
  CHECK(ratio[0] == 1);
  CHECK(ratio[3] == 0);
}

TEST_CASE("integrate_halfline examples") {
  PrecisionGuard guard(50);
  HalfLineIntegrand f;
  CHECK(rel_gap(integrate_halfline<Real>(f), Real(1)) < Real("1e-45"));
  f.poly = {Rational(0), Rational(1)};
  CHECK(rel_gap(integrate_halfline<Real>(f), Real(1)) < Real("1e-45"));
  HalfLineIntegrand half;
  half.power = Rational(1, 2);
  CHECK(rel_gap(integrate_halfline<Real>(half), gamma(from_rational<Real>(Rational(3, 2)))) < Real("1e-45"));
  HalfLineIntegrand slow;
  slow.power = Rational(-1, 3);
  slow.poly = {Rational(1), Rational(0), Rational(2)};
  slow.rate = Rational(1, 4);
  // Gamma(2/3) 4^{2/3} + 2 Gamma(8/3) 4^{8/3}
  const Real expect = gamma(Real(2) / 3) * pow(Real(4), Real(2) / 3) + 2 * gamma(Real(8) / 3) * pow(Real(4), Real(8) / 3);
  CHECK(rel_gap(integrate_halfline<Real>(slow), expect) < Real("1e-45"));
  CHECK_THROWS_AS(integrate_halfline<Rational>(f), ModeError);
  HalfLineIntegrand bad;
  bad.rate = Rational(0);
  CHECK_THROWS_AS(integrate_halfline<Real>(bad), DomainError);
}

TEST_CASE("adaptive quadrature reports non-convergence") {
  PrecisionGuard guard(50);
  DecayModel model;
  auto wild = [](const Real& x) { return Real(sin(x * 1000) * exp(-x / 1000)); };
  CHECK_THROWS_AS(integrate_adaptive<Real>(wild, model, 50.0, 4), QuadratureError);
}

TEST_CASE("parse and print scalars") {
  CHECK(parse_rational("3/6") == Rational(1, 2));
  CHECK(parse_rational(" -0.125 ") == Rational(-1, 8));
  CHECK(parse_rational("2.5e-2") == Rational(1, 40));
  CHECK(to_string(Rational(-4, 6)) == "-2/3");
  CHECK_THROWS_AS(parse_rational("1/0"), ConfigError);
  CHECK_THROWS_AS(parse_rational("abc"), ConfigError);
  PrecisionGuard guard(40);
  const Real x = parse_scalar<Real>("1/3");
  CHECK(abs(x * 3 - 1) < Real("1e-38"));
  CHECK(parse_scalar<Real>(to_string(x)) == x);
}

TEST_CASE("theta_root and rational_power") {
  CHECK(theta_root(Rational(8, 27), 3) == Rational(2, 3));
  CHECK_THROWS_AS(theta_root(Rational(2), 2), ModeError);
  CHECK(rational_power(Rational(1, 2), Rational(-4)) == Rational(16));
  CHECK_THROWS_AS(rational_power(Rational(2), Rational(1, 2)), ModeError);
  PrecisionGuard guard(40);
  CHECK(abs(rational_power(Real(2), Rational(1, 2)) - sqrt(Real(2))) < Real("1e-38"));
}
