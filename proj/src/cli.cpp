#include "cbop/cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <set>
#include <sstream>

#include "cbop/lattice.hpp"
#include "cbop/moments_io.hpp"
#include "cbop/oracle.hpp"
#include "cbop/recurrence.hpp"

namespace cbop {

namespace fs = std::filesystem;
using nlohmann::json;

const std::vector<std::string>& known_suites() {
  static const std::vector<std::string> s = {"orth",   "recurrence", "gct",    "bilinear",    "nonlinear",
                                             "evolve", "oracle",     "jacobi", "degeneration"};
  return s;
}

const std::vector<std::string>& default_suites() {
  static const std::vector<std::string> s = {"orth",      "recurrence", "gct",         "bilinear",
                                             "nonlinear", "jacobi",     "degeneration"};
  return s;
}

double RunConfig::real_tolerance(unsigned digits) const {
  if (tol_real) return *tol_real;
  return std::pow(10.0, -(static_cast<double>(digits) - 30.0));
}

namespace {

// ---------------------------------------------------------------------------
// Config parsing

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n\"");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r\n\"");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split_list(const std::string& text) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream in(text);
  while (std::getline(in, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

std::vector<Rational> parse_poly(const std::string& text) {
  std::vector<Rational> out;
  std::istringstream in(text);
  std::string tok;
  while (in >> tok) {
    if (!tok.empty() && tok.back() == ',') tok.pop_back();
    if (!tok.empty()) out.push_back(parse_rational(tok));
  }
  return out;
}

template <class T>
T parse_number(const std::string& key, const std::string& value) {
  try {
    std::size_t used = 0;
    T out;
    if constexpr (std::is_same_v<T, int>) {
      out = std::stoi(value, &used);
    } else {
      out = std::stod(value, &used);
    }
    if (used != value.size()) throw std::invalid_argument("trailing text");
    return out;
  } catch (const std::exception&) {
    throw ConfigError("key '" + key + "': cannot parse '" + value + "' as a number");
  }
}

const std::map<std::string, std::set<std::string>>& schema() {
  static const std::map<std::string, std::set<std::string>> s = {
      {"config", {"version"}},
      {"model", {"family", "a", "b", "k1", "k2", "x_power", "x_poly", "x_rate", "y_power", "y_poly", "y_rate"}},
      {"run", {"mode", "precision", "n_max", "t_grid", "suites", "out"}},
      {"tolerance", {"exact", "real"}},
      {"evolve", {"t0", "t1", "steps", "n_lo", "n_hi", "tol", "order_min", "order_max"}},
      {"oracle", {"n", "targets", "level", "tol"}},
      {"fault", {"i", "j", "delta"}},
  };
  return s;
}

}  // namespace

FaultSpec parse_fault(const std::string& text) {
  const auto parts = split_list(text);
  if (parts.size() < 2 || parts.size() > 3) throw ConfigError("fault must be 'i,j[,delta]', got '" + text + "'");
  FaultSpec f;
  f.i = parse_number<int>("fault.i", parts[0]);
  f.j = parse_number<int>("fault.j", parts[1]);
  if (parts.size() == 3) {
    f.delta = parts[2];
    parse_rational(f.delta);
  }
  if (f.i < 0 || f.j < 0) throw ConfigError("fault indices must be nonnegative");
  return f;
}

void validate_config(const RunConfig& cfg) {
  try {
    cfg.model.validate();
  } catch (const ModeError& e) {
    throw ConfigError(e.what());
  } catch (const DomainError& e) {
    throw ConfigError(e.what());
  }
  if (cfg.n_max < 0 || cfg.n_max > 24) throw ConfigError("run.n_max must be in 0..24");
  if (cfg.t_grid.empty()) throw ConfigError("run.t_grid is empty");
  for (const auto& t : cfg.t_grid) {
    try {
      cfg.model.validate_time(parse_rational(t));
    } catch (const DomainError& e) {
      throw ConfigError(std::string("run.t_grid: ") + e.what());
    }
  }
  for (const auto& s : cfg.suites) {
    if (std::find(known_suites().begin(), known_suites().end(), s) == known_suites().end()) {
      throw ConfigError("unknown suite '" + s + "'");
    }
  }
  if (cfg.model.mode == Mode::real && cfg.model.precision < 20) throw ConfigError("run.precision must be >= 20");
  if (cfg.evolve.steps < 1) throw ConfigError("evolve.steps must be positive");
  if (cfg.evolve.n_lo < 1 || cfg.evolve.n_hi < cfg.evolve.n_lo) throw ConfigError("evolve window needs 1 <= n_lo <= n_hi");
  for (const auto* t : {&cfg.evolve.t0, &cfg.evolve.t1}) {
    try {
      cfg.model.validate_time(parse_rational(*t));
    } catch (const DomainError& e) {
      throw ConfigError(std::string("evolve: ") + e.what());
    }
  }
  for (int n : cfg.oracle.n) {
    if (n < 1 || n > 2) throw ConfigError("oracle.n entries must be 1 or 2");
  }
  for (const auto& t : cfg.oracle.targets) parse_oracle_target(t);
  if (cfg.oracle.level < 0 || cfg.oracle.level > 6) throw ConfigError("oracle.level must be in 0..6");
}

RunConfig parse_config(const std::string& text, const std::string& path) {
  namespace pt = boost::property_tree;
  pt::ptree tree;
  try {
    std::istringstream in(text);
    pt::ini_parser::read_ini(in, tree);
  } catch (const pt::ini_parser_error& e) {
    throw ConfigError(std::string("config syntax: ") + e.what());
  }
  RunConfig cfg;
  cfg.path = path;
  cfg.text = text;
  bool have_version = false;
  for (const auto& [section, body] : tree) {
    const auto it = schema().find(section);
    if (body.empty() || it == schema().end()) throw ConfigError("unknown section or top-level key '" + section + "'");
    for (const auto& [key, node] : body) {
      if (!it->second.count(key)) throw ConfigError("unknown key '" + section + "." + key + "'");
      const std::string v = trim(node.get_value<std::string>());
      const std::string name = section + "." + key;
      try {
        if (section == "config") {
          if (v != kConfigVersion) throw ConfigError("unsupported config version '" + v + "'");
          have_version = true;
        } else if (section == "model") {
          if (key == "family") {
            if (v == "laguerre") cfg.model.family = WeightFamily::laguerre;
            else if (v == "custom") cfg.model.family = WeightFamily::custom;
            else throw ConfigError("model.family must be laguerre or custom");
          } else if (key == "a") cfg.model.a = parse_rational(v);
          else if (key == "b") cfg.model.b = parse_rational(v);
          else if (key == "k1") cfg.model.k1 = parse_number<int>(name, v);
          else if (key == "k2") cfg.model.k2 = parse_number<int>(name, v);
          else if (key == "x_power") cfg.model.w1.power = parse_rational(v);
          else if (key == "x_poly") cfg.model.w1.poly = parse_poly(v);
          else if (key == "x_rate") cfg.model.w1.rate = parse_rational(v);
          else if (key == "y_power") cfg.model.w2.power = parse_rational(v);
          else if (key == "y_poly") cfg.model.w2.poly = parse_poly(v);
          else if (key == "y_rate") cfg.model.w2.rate = parse_rational(v);
        } else if (section == "run") {
          if (key == "mode") cfg.model.mode = parse_mode(v);
          else if (key == "precision") cfg.model.precision = static_cast<unsigned>(parse_number<int>(name, v));
          else if (key == "n_max") cfg.n_max = parse_number<int>(name, v);
          else if (key == "t_grid") cfg.t_grid = split_list(v);
          else if (key == "suites") cfg.suites = split_list(v);
          else if (key == "out") cfg.out = v;
        } else if (section == "tolerance") {
          if (key == "exact") {
            if (parse_rational(v) != 0) throw ConfigError("tolerance.exact must be 0: exact checks are equalities");
            cfg.tol_exact = v;
          } else {
            cfg.tol_real = parse_number<double>(name, v);
          }
        } else if (section == "evolve") {
          if (key == "t0") cfg.evolve.t0 = v;
          else if (key == "t1") cfg.evolve.t1 = v;
          else if (key == "steps") cfg.evolve.steps = parse_number<int>(name, v);
          else if (key == "n_lo") cfg.evolve.n_lo = parse_number<int>(name, v);
          else if (key == "n_hi") cfg.evolve.n_hi = parse_number<int>(name, v);
          else if (key == "tol") cfg.evolve.tol = parse_number<double>(name, v);
          else if (key == "order_min") cfg.evolve.order_min = parse_number<double>(name, v);
          else if (key == "order_max") cfg.evolve.order_max = parse_number<double>(name, v);
        } else if (section == "oracle") {
          if (key == "n") {
            cfg.oracle.n.clear();
            for (const auto& s : split_list(v)) cfg.oracle.n.push_back(parse_number<int>(name, s));
          } else if (key == "targets") cfg.oracle.targets = split_list(v);
          else if (key == "level") cfg.oracle.level = parse_number<int>(name, v);
          else if (key == "tol") cfg.oracle.tol = parse_number<double>(name, v);
        } else if (section == "fault") {
          if (!cfg.fault) cfg.fault = FaultSpec{};
          if (key == "i") cfg.fault->i = parse_number<int>(name, v);
          else if (key == "j") cfg.fault->j = parse_number<int>(name, v);
          else if (key == "delta") {
            parse_rational(v);
            cfg.fault->delta = v;
          }
        }
      } catch (const ConfigError& e) {
        const std::string what = e.what();
        if (what.find(name) != std::string::npos || what.find(section + ".") != std::string::npos) throw;
        throw ConfigError(name + ": " + what);
      }
    }
  }
  if (!have_version) throw ConfigError("missing [config] version = 1");
  if (!cfg.t_grid.empty()) cfg.model.t = parse_rational(cfg.t_grid.front());
  validate_config(cfg);
  return cfg;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str(), path);
}

namespace {

// ---------------------------------------------------------------------------
// Reports

struct Log {
  bool quiet = false;
  void operator()(const std::string& msg) const {
    if (!quiet) std::cerr << "[cbop] " << msg << '\n';
  }
};

struct Row {
  int n;
  std::string t;
  std::string quantity;
  std::string value;
};

struct Skip {
  int n;
  std::string t;
  std::string quantity;
  std::string reason;
};

struct SuiteReport {
  std::string name;
  bool exact = true;
  double tolerance = 0;
  double max_residual = 0;
  std::string max_residual_text = "0";
  bool all_zero = true;
  std::size_t count = 0;
  std::vector<Skip> skipped;
  std::string note;
  bool ran = false;
  bool failed = false;  // a non-residual criterion failed
  json extra = json::object();

  bool passed() const { return !ran || (!failed && (exact ? all_zero : max_residual <= tolerance)); }
};

class Report {
 public:
  Report(std::string mode, unsigned precision) : mode_(std::move(mode)), precision_(precision) {}

  SuiteReport& suite(const std::string& name, bool exact, double tol) {
    auto& s = suites_[name];
    if (s.name.empty()) {
      s.name = name;
      s.exact = exact;
      s.tolerance = tol;
      order_.push_back(name);
    }
    s.ran = true;
    return s;
  }

  template <class S>
  void add(SuiteReport& s, int n, const std::string& t, const std::string& quantity, const S& value) {
    const double mag = std::abs(to_double(value));
    const bool zero = value == S(0);
    ++s.count;
    if (!zero) s.all_zero = false;
    if (!zero && (mag >= s.max_residual || s.max_residual_text == "0")) {
      s.max_residual = std::max(s.max_residual, mag);
      s.max_residual_text = to_string(S(abs_value(value)));
    }
    rows_.push_back({n, t, s.name + ":" + quantity, to_string(value)});
  }

  void skip(SuiteReport& s, int n, const std::string& t, const std::string& quantity, const std::string& reason) {
    s.skipped.push_back({n, t, quantity, reason});
  }

  void raw_row(int n, const std::string& t, const std::string& quantity, const std::string& value) {
    rows_.push_back({n, t, quantity, value});
  }

  bool passed() const {
    for (const auto& [name, s] : suites_) {
      if (!s.passed()) return false;
    }
    return true;
  }

  json to_json() const {
    json out;
    out["mode"] = mode_;
    out["precision"] = precision_;
    json suites = json::object();
    for (const auto& name : order_) {
      const auto& s = suites_.at(name);
      json j;
      j["ran"] = s.ran;
      j["arithmetic"] = s.exact ? "exact" : "real";
      j["tolerance"] = s.tolerance;
      j["max_residual"] = s.max_residual_text;
      j["max_residual_double"] = s.max_residual;
      j["checks"] = s.count;
      j["passed"] = s.passed();
      if (!s.note.empty()) j["note"] = s.note;
      json sk = json::array();
      for (const auto& k : s.skipped) sk.push_back({{"n", k.n}, {"t", k.t}, {"quantity", k.quantity}, {"reason", k.reason}});
      j["skipped"] = sk;
      if (!s.extra.empty()) j["details"] = s.extra;
      suites[name] = j;
    }
    out["suites"] = suites;
    out["passed"] = passed();
    return out;
  }

  void write_csv(const fs::path& path) const {
    std::ofstream out(path);
    out << kCsvHeader << '\n';
    for (const auto& r : rows_) {
      out << r.n << ',' << r.t << ',' << r.quantity << ',' << r.value << ',' << mode_ << ',' << precision_ << '\n';
    }
  }

  const std::string& mode() const { return mode_; }
  unsigned precision() const { return precision_; }

 private:
  std::string mode_;
  unsigned precision_;
  std::map<std::string, SuiteReport> suites_;
  std::vector<std::string> order_;
  std::vector<Row> rows_;
};

json config_json(const RunConfig& cfg) {
  json j;
  j["path"] = cfg.path;
  j["text"] = cfg.text;
  json eff = params_to_json(cfg.model);
  eff["n_max"] = cfg.n_max;
  eff["t_grid"] = cfg.t_grid;
  eff["suites"] = cfg.suites;
  if (cfg.fault) eff["fault"] = {{"i", cfg.fault->i}, {"j", cfg.fault->j}, {"delta", cfg.fault->delta}};
  j["effective"] = eff;
  return j;
}

void write_json(const fs::path& path, const json& j) {
  std::ofstream out(path);
  out << j.dump(2) << '\n';
}

fs::path prepare_out(const RunConfig& cfg) {
  fs::path dir(cfg.out);
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw ConfigError("cannot create output directory '" + cfg.out + "': " + ec.message());
  return dir;
}

// ---------------------------------------------------------------------------
// Suites

template <class S>
S parse_time(const std::string& t) {
  return from_rational<S>(parse_rational(t));
}

template <class S>
MomentTable<S> faulted(MomentTable<S> table, const RunConfig& cfg) {
  if (!cfg.fault) return table;
  if (cfg.fault->i < table.rows() && cfg.fault->j < table.cols()) {
    return table.with_fault(cfg.fault->i, cfg.fault->j, from_rational<S>(parse_rational(cfg.fault->delta)));
  }
  return table;
}

template <class S>
S max_abs(const Vector<S>& v) {
  S m(0);
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if (abs_value(v(i)) > m) m = abs_value(v(i));
  }
  return m;
}

template <class S>
void run_orth(const RunConfig& cfg, const std::string& t, Report& rep, double tol) {
  auto& s = rep.suite("orth", is_exact_v<S>, tol);
  const auto table = faulted(build_table_at<S>(cfg.model, parse_time<S>(t), cfg.n_max, 0), cfg);
  const CauchyFamily<S> fam(table, cfg.n_max);
  for (int n = 0; n <= cfg.n_max; ++n) {
    for (int m = 0; m <= cfg.n_max; ++m) {
      const S ip = inner_product(fam.P(n), fam.Q(m), table);
      const S r = (ip - (n == m ? fam.h(n) : S(0))) / fam.h(n);
      rep.add(s, n, t, "<P" + std::to_string(n) + "|Q" + std::to_string(m) + ">", r);
    }
  }
}

template <class S>
void run_recurrence(const RunConfig& cfg, const std::string& t, Report& rep, double tol) {
  auto& s = rep.suite("recurrence", is_exact_v<S>, tol);
  const int extra = std::max(cfg.model.k1, cfg.model.k2) + 1;
  const auto table = faulted(build_table_at<S>(cfg.model, parse_time<S>(t), cfg.n_max + extra, 0), cfg);
  const Recurrence<S> rec(table);
  const auto dual = rec.dual();
  for (int n = 0; n <= cfg.n_max; ++n) {
    if (n > rec.last_site() || n > dual.last_site()) {
      rep.skip(s, n, t, "residual", "table too small");
      continue;
    }
    rep.add(s, n, t, "P", max_abs(rec.residual(n).coeffs));
    rep.add(s, n, t, "Q", max_abs(dual.residual(n).coeffs));
  }
}

template <class S>
void run_gct(const RunConfig& cfg, const std::string& t, Report& rep, double tol) {
  auto& s = rep.suite("gct", is_exact_v<S>, tol);
  const int extra = std::max(cfg.model.k1, cfg.model.k2) + 1;
  const auto table = faulted(build_table_at<S>(cfg.model, parse_time<S>(t), cfg.n_max + extra, 1), cfg);
  const Recurrence<Dual<S>> rec(table.lifted());
  for (int n = 1; n <= cfg.n_max; ++n) {
    const auto g = gct_residual(n, rec);
    if (g.skipped) {
      rep.skip(s, n, t, "gct", g.reason);
      continue;
    }
    for (std::size_t k = 0; k < g.residuals.size(); ++k) rep.add(s, n, t, "eq" + std::to_string(k), g.residuals[k]);
  }
}

template <class S>
void add_residuals(Report& rep, SuiteReport& s, const std::string& t, const std::vector<IdentityResidual<S>>& rs) {
  for (const auto& r : rs) {
    if (r.skipped) rep.skip(s, r.n, t, r.name, r.reason);
    else rep.add(s, r.n, t, r.name, r.value);
  }
}

template <class S>
void run_lattice_suite(const std::string& name, const RunConfig& cfg, const std::string& t, Report& rep, double tol) {
  auto& s = rep.suite(name, is_exact_v<S>, tol);
  if (cfg.model.k1 != 1 || cfg.model.k2 != 1) {
    s.note = "lattice suites need k1 = k2 = 1; not run";
    s.ran = false;
    return;
  }
  if (name == "degeneration" && !cfg.model.symmetric()) {
    s.note = "degeneration needs identical measures; not run";
    s.ran = false;
    return;
  }
  const TauTower<S> tw(faulted(lattice_table<S>(cfg.model, parse_time<S>(t), cfg.n_max), cfg));
  const int top = std::min(cfg.n_max, tw.max_site());
  if (name == "bilinear") {
    for (int n = 0; n <= top; ++n) add_residuals(rep, s, t, bilinear_residuals(n, tw));
    for (int n = 0; n <= top; ++n) add_residuals(rep, s, t, derivative_formula_residuals(n, tw));
  } else if (name == "nonlinear") {
    for (int n = 0; n <= cfg.n_max; ++n) add_residuals(rep, s, t, nonlinear_residuals(n, tw));
  } else if (name == "jacobi") {
    for (int n = 0; n <= top; ++n) {
      for (const auto& app : jacobi_applications(n, tw)) {
        rep.add(s, n, t, app.name + ":identity", jacobi_identity_check(app.D, app.i1, app.i2, app.j1, app.j2));
        const auto minors = app.minors();
        for (std::size_t k = 0; k < minors.size(); ++k) {
          rep.add(s, n, t, app.name + ":minor" + std::to_string(k), S(minors[k] - app.expected[k]));
        }
      }
    }
  } else if (name == "degeneration") {
    for (int n = 0; n < top; ++n) add_residuals(rep, s, t, degeneration_residuals(n, tw));
  }
}

struct EvolveOutcome {
  double error = 0;
  double error_half = 0;
  double order = 0;
  bool zero_interval = false;
  std::vector<LatticeState<Real>> trajectory;
  std::vector<LatticeState<Real>> reference;
};

EvolveOutcome run_evolution(const RunConfig& cfg, bool with_reference) {
  auto p = cfg.model;
  if (p.k1 != 1 || p.k2 != 1) throw ConfigError("evolve needs k1 = k2 = 1");
  const Real t0 = parse_time<Real>(cfg.evolve.t0), t1 = parse_time<Real>(cfg.evolve.t1);
  const auto boundary = tau_fed_boundary<Real>(p);
  const auto init = lattice_state_at<Real>(p, t0, cfg.evolve.n_lo, cfg.evolve.n_hi);
  EvolveOutcome out;
  out.trajectory = evolve_nonlinear(init, t1, cfg.evolve.steps, boundary);
  if (t0 == t1) {
    out.zero_interval = true;
    if (with_reference) out.reference = {init};
    return out;
  }
  auto error_of = [&](const LatticeState<Real>& end, const LatticeState<Real>& target) {
    Real err = 0;
    for (std::size_t k = 0; k < end.sites.size(); ++k) {
      const auto& a = end.sites[k];
      const auto& b = target.sites[k];
      for (const Real& d : {a.A - b.A, a.B - b.B, a.Bh - b.Bh, a.C - b.C, a.Ch - b.Ch}) {
        if (abs(d) > err) err = abs(d);
      }
    }
    return to_double(err);
  };
  const auto target = lattice_state_at<Real>(p, t1, cfg.evolve.n_lo, cfg.evolve.n_hi);
  out.error = error_of(out.trajectory.back(), target);
  const auto fine = evolve_nonlinear(init, t1, 2 * cfg.evolve.steps, boundary);
  out.error_half = error_of(fine.back(), target);
  out.order = out.error_half > 0 ? std::log2(out.error / out.error_half) : 0.0;
  if (with_reference) {
    for (const auto& st : out.trajectory) {
      out.reference.push_back(lattice_state_at<Real>(p, st.t, cfg.evolve.n_lo, cfg.evolve.n_hi));
    }
  }
  return out;
}

bool evolve_passed(const RunConfig& cfg, const EvolveOutcome& ev) {
  if (ev.zero_interval) return true;
  return ev.error <= cfg.evolve.tol && ev.order >= cfg.evolve.order_min && ev.order <= cfg.evolve.order_max;
}

void run_evolve_suite(const RunConfig& cfg, Report& rep) {
  auto& s = rep.suite("evolve", false, cfg.evolve.tol);
  s.note = "real arithmetic at the run precision; tau-fed boundaries";
  const auto ev = run_evolution(cfg, false);
  rep.add(s, cfg.evolve.n_lo, cfg.evolve.t1, "max_state_error", ev.error);
  s.extra = {{"steps", cfg.evolve.steps}, {"error", ev.error}, {"error_half_step", ev.error_half},
             {"order", ev.order}, {"order_range", {cfg.evolve.order_min, cfg.evolve.order_max}}};
  if (!evolve_passed(cfg, ev)) {
    s.failed = true;
    if (ev.error <= cfg.evolve.tol) s.note += "; convergence order outside range";
  }
}

json oracle_result_json(const OracleResult& r) {
  json lv = json::array();
  for (const auto& l : r.refinement) lv.push_back({{"level", l.level}, {"nodes", l.nodes}, {"value", l.value}, {"gap", l.gap}});
  return {{"target", to_string(r.target)}, {"n", r.n},       {"quadrature", r.quadrature}, {"determinant", r.determinant},
          {"gap", r.gap},                  {"nodes", r.nodes}, {"refinement", lv},           {"passed", r.passed}};
}

std::vector<OracleResult> run_oracles(const RunConfig& cfg) {
  std::vector<OracleResult> out;
  for (int n : cfg.oracle.n) {
    for (const auto& target : cfg.oracle.targets) {
      OracleConfig oc;
      oc.n = n;
      oc.target = parse_oracle_target(target);
      oc.params = cfg.model;
      oc.params.mode = Mode::real;
      oc.tol = cfg.oracle.tol;
      oc.level = cfg.oracle.level;
      out.push_back(andreief_compare(oc));
    }
  }
  return out;
}

void run_oracle_suite(const RunConfig& cfg, Report& rep) {
  auto& s = rep.suite("oracle", false, cfg.oracle.tol);
  s.note = "double-precision tensor quadrature; relative gap to the determinant";
  json details = json::array();
  for (const auto& r : run_oracles(cfg)) {
    rep.add(s, r.n, to_string(cfg.model.t), "andreief:" + to_string(r.target), r.gap);
    details.push_back(oracle_result_json(r));
  }
  s.extra = details;
}

template <class S>
void run_verify_suites(const RunConfig& cfg, Report& rep, double tol) {
  for (const auto& name : cfg.suites) {
    if (name == "evolve" || name == "oracle") continue;
    for (const auto& t : cfg.t_grid) {
      if (name == "orth") run_orth<S>(cfg, t, rep, tol);
      else if (name == "recurrence") run_recurrence<S>(cfg, t, rep, tol);
      else if (name == "gct") run_gct<S>(cfg, t, rep, tol);
      else run_lattice_suite<S>(name, cfg, t, rep, tol);
    }
  }
}

// ---------------------------------------------------------------------------
// Precision escalation: start at max(50, requested) digits and double on
// PrecisionError, at most four times.

template <class F>
auto with_escalation(const RunConfig& cfg, const Log& log, F&& body) {
  unsigned digits = std::max(50u, cfg.model.precision);
  for (int attempt = 0;; ++attempt) {
    PrecisionGuard guard(digits);
    try {
      return body(digits);
    } catch (const PrecisionError& e) {
      if (attempt == 4) throw;
      log(std::string("precision exhausted at ") + std::to_string(digits) + " digits (" + e.what() + "); retrying at " +
          std::to_string(digits * 2));
      digits *= 2;
    }
  }
}

// ---------------------------------------------------------------------------
// Commands

int cmd_moments(const RunConfig& cfg, const Log& log) {
  const auto dir = prepare_out(cfg);
  const fs::path file = dir / "moments.json";
  const std::string t = cfg.t_grid.front();
  auto export_table = [&](auto tag, unsigned digits) {
    using S = decltype(tag);
    const auto table = faulted(build_table_at<S>(cfg.model, parse_time<S>(t), cfg.n_max, 1), cfg);
    json j = table_to_json(table);
    j["config"] = config_json(cfg);
    write_json(file, j);
    std::ifstream in(file);
    const auto back = table_from_json<S>(json::parse(in));
    const bool same = back.bimoments() == table.bimoments() && back.single_x() == table.single_x() &&
                      back.single_y() == table.single_y() && back.time() == table.time();
    log("wrote " + file.string() + " (" + std::to_string(table.rows()) + "x" + std::to_string(table.cols()) +
        (is_exact_v<S> ? ", exact" : ", " + std::to_string(digits) + " digits") + "); round trip " +
        (same ? "exact" : "MISMATCH"));
    return same ? kExitOk : kExitOther;
  };
  if (cfg.model.mode == Mode::exact) return export_table(Rational{}, 0u);
  return with_escalation(cfg, log, [&](unsigned digits) { return export_table(Real{}, digits); });
}

int cmd_verify(const RunConfig& cfg, const Log& log) {
  const auto dir = prepare_out(cfg);
  auto run = [&](unsigned digits) {
    Report rep(to_string(cfg.model.mode), cfg.model.mode == Mode::exact ? 0u : digits);
    if (cfg.model.mode == Mode::exact) {
      run_verify_suites<Rational>(cfg, rep, 0.0);
    } else {
      run_verify_suites<Real>(cfg, rep, cfg.real_tolerance(digits));
    }
    for (const auto& name : cfg.suites) {
      if (name == "evolve") run_evolve_suite(cfg, rep);
      if (name == "oracle") run_oracle_suite(cfg, rep);
    }
    return rep;
  };
  const Report rep = with_escalation(cfg, log, run);
  json j = rep.to_json();
  j["schema"] = kReportSchema;
  j["command"] = "verify";
  j["config"] = config_json(cfg);
  write_json(dir / "report.json", j);
  rep.write_csv(dir / "residuals.csv");
  for (const auto& [name, s] : j["suites"].items()) {
    log(name + ": " + (s["ran"].get<bool>() ? (s["passed"].get<bool>() ? "pass" : "FAIL") : "not run") +
        " (max residual " + s["max_residual"].get<std::string>() + ", " + std::to_string(s["skipped"].size()) +
        " skipped)");
  }
  return rep.passed() ? kExitOk : kExitVerification;
}

int cmd_evolve(const RunConfig& cfg, const Log& log) {
  const auto dir = prepare_out(cfg);
  return with_escalation(cfg, log, [&](unsigned digits) {
    const auto ev = run_evolution(cfg, true);
    Report rep("real", digits);
    static const std::array<std::pair<const char*, Real LatticeSite<Real>::*>, 5> fields = {
        {{"A", &LatticeSite<Real>::A},
         {"B", &LatticeSite<Real>::B},
         {"B_hat", &LatticeSite<Real>::Bh},
         {"C", &LatticeSite<Real>::C},
         {"C_hat", &LatticeSite<Real>::Ch}}};
    for (std::size_t k = 0; k < ev.trajectory.size(); ++k) {
      const auto& st = ev.trajectory[k];
      const std::string t = to_string(st.t);
      for (std::size_t i = 0; i < st.sites.size(); ++i) {
        const int n = st.n_lo + static_cast<int>(i);
        for (const auto& [name, f] : fields) {
          rep.raw_row(n, t, name, to_string(st.sites[i].*f));
          if (k < ev.reference.size()) rep.raw_row(n, t, std::string(name) + "_tau", to_string(ev.reference[k].sites[i].*f));
        }
      }
    }
    rep.write_csv(dir / "trajectory.csv");
    const bool ok = evolve_passed(cfg, ev);
    json j;
    j["schema"] = kReportSchema;
    j["command"] = "evolve";
    j["config"] = config_json(cfg);
    j["precision"] = digits;
    j["window"] = {cfg.evolve.n_lo, cfg.evolve.n_hi};
    j["interval"] = {cfg.evolve.t0, cfg.evolve.t1};
    j["steps"] = cfg.evolve.steps;
    j["zero_interval"] = ev.zero_interval;
    j["error"] = ev.error;
    j["error_half_step"] = ev.error_half;
    j["order"] = ev.order;
    j["tolerance"] = cfg.evolve.tol;
    j["order_range"] = {cfg.evolve.order_min, cfg.evolve.order_max};
    j["passed"] = ok;
    write_json(dir / "evolve.json", j);
    log("evolve: error " + to_string(ev.error) + ", order " + std::to_string(ev.order) + (ok ? " (pass)" : " (FAIL)"));
    return ok ? kExitOk : kExitVerification;
  });
}

int cmd_oracle(const RunConfig& cfg, const Log& log) {
  const auto dir = prepare_out(cfg);
  json results = json::array();
  bool ok = true;
  for (const auto& r : run_oracles(cfg)) {
    results.push_back(oracle_result_json(r));
    ok = ok && r.passed;
    log("oracle " + to_string(r.target) + "_" + std::to_string(r.n) + ": gap " + to_string(r.gap) +
        (r.passed ? " (pass)" : " (FAIL)"));
  }
  json j;
  j["schema"] = kReportSchema;
  j["command"] = "oracle";
  j["config"] = config_json(cfg);
  j["tolerance"] = cfg.oracle.tol;
  j["results"] = results;
  j["passed"] = ok;
  write_json(dir / "oracle.json", j);
  return ok ? kExitOk : kExitVerification;
}

}  // namespace

int run_cli(const std::vector<std::string>& args) {
  CLI::App app{"Cauchy bi-orthogonal polynomial and lattice verification", "cbop"};
  app.require_subcommand(1);
  std::string config_path;
  std::optional<unsigned> precision;
  std::optional<std::string> mode, out, fault;
  bool quiet = false;
  app.add_flag("-q,--quiet", quiet, "suppress log output");
  std::vector<CLI::App*> subs;
  for (const char* name : {"moments", "verify", "evolve", "oracle"}) {
    auto* sub = app.add_subcommand(name, std::string("run the ") + name + " command");
    sub->add_option("--config", config_path, "INI config file")->required();
    sub->add_option("--precision", precision, "working precision in decimal digits (real mode)");
    sub->add_option("--mode", mode, "exact or real");
    sub->add_option("--out", out, "output directory");
    sub->add_option("--inject-fault", fault, "perturb moment m_ij by delta: i,j[,delta]");
    subs.push_back(sub);
  }
  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    std::cout << app.help();
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    std::cerr << "[cbop] argument error: " << e.what() << '\n';
    return kExitConfig;
  }
  const Log log{quiet};
  try {
    RunConfig cfg = load_config(config_path);
    if (precision) cfg.model.precision = *precision;
    if (mode) cfg.model.mode = parse_mode(*mode);
    if (out) cfg.out = *out;
    if (fault) cfg.fault = parse_fault(*fault);
    validate_config(cfg);
    const std::string cmd = app.get_subcommands().front()->get_name();
    log(cmd + ": config " + config_path + ", mode " + to_string(cfg.model.mode));
    if (cmd == "moments") return cmd_moments(cfg, log);
    if (cmd == "verify") return cmd_verify(cfg, log);
    if (cmd == "evolve") return cmd_evolve(cfg, log);
    return cmd_oracle(cfg, log);
  } catch (const ConfigError& e) {
    std::cerr << "[cbop] config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const DegeneracyError& e) {
    std::cerr << "[cbop] degeneracy: " << e.what() << '\n';
    return kExitDegeneracy;
  } catch (const PrecisionError& e) {
    std::cerr << "[cbop] precision exhausted after escalation: " << e.what() << '\n';
    return kExitPrecision;
  } catch (const IntegrationError& e) {
    std::cerr << "[cbop] integration error at t = " << e.last_good_t() << ": " << e.what() << '\n';
    return kExitOther;
  } catch (const std::exception& e) {
    std::cerr << "[cbop] error: " << e.what() << '\n';
    return kExitOther;
  }
}

}  // namespace cbop
