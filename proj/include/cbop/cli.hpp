#pragma once

// Batch front end. A run is described by one INI file (schema version 1):
//
//   [config]     version = 1
//   [model]      family = laguerre|custom, a, b, k1, k2,
//                x_power, x_poly, x_rate, y_power, y_poly, y_rate (custom weights)
//   [run]        mode = exact|real, precision, n_max, t_grid, suites, out
//   [tolerance]  exact, real
//   [evolve]     t0, t1, steps, n_lo, n_hi, tol, order_min, order_max
//   [oracle]     n, targets, level, tol
//   [fault]      i, j, delta
//
// Unknown sections or keys are rejected. Every report embeds the config text.

#include <optional>
#include <string>
#include <vector>

#include "cbop/model.hpp"

namespace cbop {

enum ExitCode : int {
  kExitOk = 0,
  kExitOther = 1,
  kExitConfig = 2,
  kExitDegeneracy = 3,
  kExitPrecision = 4,
  kExitVerification = 5,
};

inline constexpr const char* kConfigVersion = "1";
inline constexpr const char* kReportSchema = "cbop.report/1";
inline constexpr const char* kCsvHeader = "n,t,quantity,value,mode,precision";

const std::vector<std::string>& known_suites();
const std::vector<std::string>& default_suites();

struct FaultSpec {
  long i = 0;
  long j = 0;
  std::string delta = "1/1000";
};

struct EvolveSettings {
  std::string t0 = "0";
  std::string t1 = "1/5";
  int steps = 64;
  int n_lo = 1;
  int n_hi = 3;
  double tol = 1e-10;
  double order_min = 3.7;
  double order_max = 4.3;
};

struct OracleSettings {
  std::vector<int> n{1, 2};
  std::vector<std::string> targets{"tau", "sigma", "sigma_hat", "xi", "xi_hat"};
  int level = 4;
  double tol = 1e-8;
};

struct RunConfig {
  std::string path;
  std::string text;
  ModelParams model;
  int n_max = 4;
  std::vector<std::string> t_grid{"0"};
  std::vector<std::string> suites = default_suites();
  std::string out = "cbop_out";
  std::optional<std::string> tol_exact;
  std::optional<double> tol_real;
  EvolveSettings evolve;
  OracleSettings oracle;
  std::optional<FaultSpec> fault;

  /// Real-mode tolerance: configured value or 10^-(precision - 30).
  double real_tolerance(unsigned digits) const;
};

/// Parses and validates config text; throws ConfigError.
RunConfig parse_config(const std::string& text, const std::string& path = "<string>");
RunConfig load_config(const std::string& path);

/// Re-checks a config after command-line overrides; throws ConfigError.
void validate_config(const RunConfig& cfg);

FaultSpec parse_fault(const std::string& text);

/// Entry point shared by the executable and the tests. args excludes the program name.
int run_cli(const std::vector<std::string>& args);

}  // namespace cbop
