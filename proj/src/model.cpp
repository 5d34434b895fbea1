#include "cbop/model.hpp"

#include <utility>

namespace cbop {

std::string to_string(Mode mode) { return mode == Mode::exact ? "exact" : "real"; }

Mode parse_mode(const std::string& text) {
  if (text == "exact") return Mode::exact;
  if (text == "real") return Mode::real;
  throw ConfigError("mode must be 'exact' or 'real', got '" + text + "'");
}

std::string to_string(WeightFamily family) {
  return family == WeightFamily::laguerre ? "laguerre" : "custom";
}

HalfLineWeight ModelParams::x_weight() const {
  if (family == WeightFamily::custom) return w1;
  return HalfLineWeight{a, {Rational(1)}, Rational(1)};
}

HalfLineWeight ModelParams::y_weight() const {
  if (family == WeightFamily::custom) return w2;
  return HalfLineWeight{b, {Rational(1)}, Rational(1)};
}

bool ModelParams::rational_moments() const {
  return family == WeightFamily::laguerre && is_integer(a) && is_integer(b) && k1 == 1 && k2 == 1;
}

bool ModelParams::symmetric() const { return k1 == k2 && x_weight() == y_weight(); }

void ModelParams::validate_time(const Rational& time) const {
  if (!(x_weight().rate - time > 0) || !(y_weight().rate - time > 0)) {
    throw DomainError("moments diverge: need t < decay rate (t = " + to_string(time) + ")");
  }
}

void ModelParams::validate_ranges() const {
  if (k1 < 1 || k2 < 1) throw DomainError("k1 and k2 must be positive integers");
  if (family == WeightFamily::laguerre) {
    if (a < 0 || b < 0) throw DomainError("laguerre exponents a, b must be nonnegative");
  } else {
    for (const auto* w : {&w1, &w2}) {
      if (!(w->power > -1)) throw DomainError("custom weight power must exceed -1");
      if (w->poly.empty()) throw DomainError("custom weight polynomial is empty");
      if (!(w->rate > 0)) throw DomainError("custom weight decay rate must be positive");
    }
  }
  validate_time(t);
}

void ModelParams::validate() const {
  validate_ranges();
  if (mode == Mode::exact && !rational_moments()) {
    throw ModeError(
        "exact mode needs rational moments: laguerre weights, integer a and b, k1 = k2 = 1");
  }
}

ModelParams ModelParams::swapped() const {
  ModelParams p = *this;
  std::swap(p.a, p.b);
  std::swap(p.w1, p.w2);
  std::swap(p.k1, p.k2);
  return p;
}

ModelParams laguerre_params(const Rational& a, const Rational& b, int k1, int k2, const Rational& t,
                            Mode mode) {
  ModelParams p;
  p.a = a;
  p.b = b;
  p.k1 = k1;
  p.k2 = k2;
  p.t = t;
  p.mode = mode;
  return p;
}

}  // namespace cbop
