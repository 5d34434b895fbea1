#pragma once

#include <stdexcept>
#include <string>

namespace cbop {

/// Base of every error raised by the library. The CLI maps subclasses to exit codes.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Argument outside the mathematical domain of an operation (e.g. Γ at x <= 0).
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Exact arithmetic requested where the value is not rational.
class ModeError : public Error {
 public:
  using Error::Error;
};

class ShapeError : public Error {
 public:
  using Error::Error;
};

/// Index outside a moment table or an admissible coefficient window.
class RangeError : public Error {
 public:
  using Error::Error;
};

class QuadratureError : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

/// A vanishing tau function, normalisation or pivot at a named lattice site.
class DegeneracyError : public Error {
 public:
  DegeneracyError(const std::string& what, int site)
      : Error(what + " (site " + std::to_string(site) + ")"), site_(site) {}
  int site() const noexcept { return site_; }

 private:
  int site_;
};

/// Real-mode elimination left fewer than the required number of trusted digits.
class PrecisionError : public Error {
 public:
  PrecisionError(const std::string& what, double digits_lost)
      : Error(what), digits_lost_(digits_lost) {}
  double digits_lost() const noexcept { return digits_lost_; }

 private:
  double digits_lost_;
};

/// ODE integration blew up; carries the last time at which the state was finite.
class IntegrationError : public Error {
 public:
  IntegrationError(const std::string& what, double last_good_t)
      : Error(what), last_good_t_(last_good_t) {}
  double last_good_t() const noexcept { return last_good_t_; }

 private:
  double last_good_t_;
};

}  // namespace cbop
