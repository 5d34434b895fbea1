#include "cbop/scalar.hpp"

#include <cctype>
#include <ios>
#include <sstream>

namespace cbop {

bool is_integer(const Rational& q) { return bmp::denominator(q) == 1; }

namespace {

std::string trim(std::string_view s) {
  std::size_t b = 0;
  std::size_t e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return std::string(s.substr(b, e - b));
}

Integer parse_integer(const std::string& s) {
  if (s.empty()) throw ConfigError("empty number");
  std::size_t i = (s[0] == '+' || s[0] == '-') ? 1 : 0;
  if (i == s.size()) throw ConfigError("malformed number '" + s + "'");
  for (std::size_t k = i; k < s.size(); ++k) {
    if (!std::isdigit(static_cast<unsigned char>(s[k]))) {
      throw ConfigError("malformed number '" + s + "'");
    }
  }
  return Integer(s[0] == '+' ? s.substr(1) : s);
}

Rational parse_decimal(const std::string& s) {
  std::string mantissa = s;
  long exponent = 0;
  if (auto pos = s.find_first_of("eE"); pos != std::string::npos) {
    mantissa = s.substr(0, pos);
    exponent = std::stol(s.substr(pos + 1));
  }
  std::string digits = mantissa;
  if (auto dot = mantissa.find('.'); dot != std::string::npos) {
    digits = mantissa.substr(0, dot) + mantissa.substr(dot + 1);
    exponent -= static_cast<long>(mantissa.size() - dot - 1);
  }
  if (digits.empty() || digits == "-" || digits == "+") {
    throw ConfigError("malformed number '" + s + "'");
  }
  Rational value(parse_integer(digits));
  Integer scale = bmp::pow(Integer(10), static_cast<unsigned>(std::labs(exponent)));
  return exponent >= 0 ? Rational(value * Rational(scale)) : Rational(value / Rational(scale));
}

}  // namespace

Rational parse_rational(std::string_view text) {
  const std::string s = trim(text);
  if (auto slash = s.find('/'); slash != std::string::npos) {
    Integer num = parse_integer(trim(s.substr(0, slash)));
    Integer den = parse_integer(trim(s.substr(slash + 1)));
    if (den == 0) throw ConfigError("zero denominator in '" + s + "'");
    return Rational(num, den);
  }
  return parse_decimal(s);
}

std::string to_string(const Rational& q) {
  if (is_integer(q)) return bmp::numerator(q).str();
  return bmp::numerator(q).str() + "/" + bmp::denominator(q).str();
}

std::string to_string(const Real& x) {
  return x.str(static_cast<std::streamsize>(Real::default_precision() + 5),
               std::ios_base::scientific);
}

std::string to_string(double x) {
  std::ostringstream os;
  os.precision(17);
  os << std::scientific << x;
  return os.str();
}

template <>
Rational parse_scalar<Rational>(std::string_view text) {
  return parse_rational(text);
}

template <>
Real parse_scalar<Real>(std::string_view text) {
  const std::string s = trim(text);
  if (s.find('/') != std::string::npos) return from_rational<Real>(parse_rational(s));
  return Real(s);
}

}  // namespace cbop
