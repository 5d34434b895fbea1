#pragma once

#include <string>
#include <vector>

#include "cbop/scalar.hpp"

namespace cbop {

enum class Mode { exact, real };

std::string to_string(Mode mode);
Mode parse_mode(const std::string& text);

enum class WeightFamily { laguerre, custom };

/// x-side objects live on dmu_1 (rows of the moment matrix), y-side on dmu_2 (columns).
enum class Side { x, y };

std::string to_string(WeightFamily family);

/// x^power * poly(x) * e^{-rate x} dx on (0, inf), before the time factor e^{tx}.
struct HalfLineWeight {
  Rational power{0};
  std::vector<Rational> poly{Rational(1)};
  Rational rate{1};

  bool operator==(const HalfLineWeight&) const = default;
};

/// Model of the paper's two measures with the evolution dmu_i(.; t) = e^{t .} dmu_i.
/// Laguerre: dmu_1 = x^a e^{-x} dx, dmu_2 = y^b e^{-y} dy.
struct ModelParams {
  WeightFamily family = WeightFamily::laguerre;
  Rational a{0};
  Rational b{0};
  HalfLineWeight w1;
  HalfLineWeight w2;
  int k1 = 1;
  int k2 = 1;
  Rational t{0};
  Mode mode = Mode::real;
  unsigned precision = 50;

  Rational theta1() const { return Rational(1, k1); }
  Rational theta2() const { return Rational(1, k2); }

  /// Weights in descriptor form; Laguerre maps to (a, 1, 1) and (b, 1, 1).
  HalfLineWeight x_weight() const;
  HalfLineWeight y_weight() const;

  /// True when every moment is rational: Laguerre, integer a and b, k1 = k2 = 1.
  bool rational_moments() const;

  /// Both measures coincide and k1 = k2, so m_ij = m_ji.
  bool symmetric() const;

  /// Ranges and the convergence condition at time t. Throws DomainError.
  void validate_ranges() const;

  /// validate_ranges plus the exact-mode admissibility check (ModeError).
  void validate() const;

  /// Convergence at an arbitrary time (rate - t > 0 on both sides).
  void validate_time(const Rational& time) const;

  /// Roles of the two measures exchanged: a <-> b, w1 <-> w2, k1 <-> k2.
  ModelParams swapped() const;
};

ModelParams laguerre_params(const Rational& a, const Rational& b, int k1 = 1, int k2 = 1,
                            const Rational& t = 0, Mode mode = Mode::exact);

}  // namespace cbop
