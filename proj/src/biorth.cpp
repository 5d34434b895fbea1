#include "cbop/biorth.hpp"

namespace cbop {

std::string to_string(PolyKind kind) {
  switch (kind) {
    case PolyKind::P: return "P";
    case PolyKind::Q: return "Q";
    case PolyKind::hatP: return "hatP";
    case PolyKind::hatQ: return "hatQ";
    case PolyKind::jacobiXi: return "jacobiXi";
    case PolyKind::jacobiPsi: return "jacobiPsi";
  }
  return "?";
}

std::vector<Rational> jacobi_core(int n, Side side, const ModelParams& p) {
  if (n < 0) throw RangeError("jacobi_core: degree must be nonnegative");
  const Rational own = side == Side::x ? p.theta1() : p.theta2();
  const Rational other = side == Side::x ? p.theta2() : p.theta1();
  std::vector<Rational> out;
  for (int i = 0; i <= n; ++i) {
    const Rational base = (1 + p.a + p.b + own * i) / other;
    Rational c = pochhammer(base, static_cast<unsigned>(n)) /
                 Rational(factorial(static_cast<unsigned>(i)) * factorial(static_cast<unsigned>(n - i)));
    out.push_back(i % 2 == 0 ? c : Rational(-c));
  }
  return out;
}

}  // namespace cbop
