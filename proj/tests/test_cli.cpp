#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <json.hpp>
#include <sstream>

#include "cbop/cli.hpp"
#include "cbop/moments.hpp"
#include "cbop/moments_io.hpp"

using namespace cbop;
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

const char* kBase = R"(; exact configuration with integer exponents
[config]
version = 1

[model]
family = laguerre
a = 0
b = 1
k1 = 1
k2 = 1

[run]
mode = exact
n_max = 4
t_grid = 0, 1/3
)";

struct Scratch {
  fs::path dir;
  explicit Scratch(const std::string& name) : dir(fs::temp_directory_path() / ("cbop_cli_" + name)) {
    fs::remove_all(dir);
    fs::create_directories(dir);
  }
  ~Scratch() { fs::remove_all(dir); }

  std::string config(const std::string& text) const {
    const auto path = dir / "run.ini";
    std::ofstream(path) << text;
    return path.string();
  }
  std::string out() const { return (dir / "out").string(); }
  json read_json(const std::string& file) const {
    std::ifstream in(dir / "out" / file);
    return json::parse(in);
  }
  std::vector<std::string> lines(const std::string& file) const {
    std::ifstream in(dir / "out" / file);
    std::vector<std::string> out;
    for (std::string line; std::getline(in, line);) out.push_back(line);
    return out;
  }
};

std::vector<std::string> args(std::initializer_list<std::string> list) {
  std::vector<std::string> a{"-q"};
  a.insert(a.end(), list);
  return a;
}

std::string replace(std::string text, const std::string& from, const std::string& to) {
  const auto pos = text.find(from);
  REQUIRE(pos != std::string::npos);
  return text.replace(pos, from.size(), to);
}

}  // namespace

TEST_CASE("cli: config parsing and validation") {
  const auto cfg = parse_config(kBase);
  CHECK(cfg.model.a == 0);
  CHECK(cfg.model.b == 1);
  CHECK(cfg.model.mode == Mode::exact);
  CHECK(cfg.t_grid == std::vector<std::string>{"0", "1/3"});
  CHECK(cfg.suites == default_suites());
  CHECK(cfg.text == kBase);
  CHECK(cfg.real_tolerance(50) == doctest::Approx(1e-20));

  CHECK_THROWS_AS(parse_config(replace(kBase, "k1 = 1", "k1 = 0")), ConfigError);
  CHECK_THROWS_AS(parse_config(replace(kBase, "t_grid = 0, 1/3", "t_grid = 1")), ConfigError);
  CHECK_THROWS_AS(parse_config(replace(kBase, "version = 1", "version = 2")), ConfigError);
  CHECK_THROWS_AS(parse_config(replace(kBase, "[config]\nversion = 1\n", "")), ConfigError);
  CHECK_THROWS_AS(parse_config(replace(kBase, "a = 0", "a = 0\ncolour = red")), ConfigError);
  CHECK_THROWS_AS(parse_config(std::string(kBase) + "[extras]\nx = 1\n"), ConfigError);
  CHECK_THROWS_AS(parse_config(replace(kBase, "mode = exact", "mode = fuzzy")), ConfigError);
  CHECK_THROWS_AS(parse_config(replace(kBase, "a = 0", "a = 1/2")), ConfigError);  // exact mode needs integer a
  CHECK_NOTHROW(parse_config(replace(replace(kBase, "a = 0", "a = 1/2"), "mode = exact", "mode = real")));
  CHECK_THROWS_AS(parse_config(std::string(kBase) + "suites = orth, teleport\n"), ConfigError);
  CHECK_THROWS_AS(parse_config(std::string(kBase) + "n_max = many\n"), ConfigError);
  CHECK_THROWS_AS(parse_config(std::string(kBase) + "[tolerance]\nexact = 1/10\n"), ConfigError);

  const auto f = parse_fault("2,1");
  CHECK(f.i == 2);
  CHECK(f.j == 1);
  CHECK(f.delta == "1/1000");
  CHECK(parse_fault("0, 3, -1/7").delta == "-1/7");
  CHECK_THROWS_AS(parse_fault("2"), ConfigError);
  CHECK_THROWS_AS(parse_fault("-1,2"), ConfigError);
}

TEST_CASE("cli: default exact verify passes with zero residuals") {
  Scratch s("verify");
  const int code = run_cli(args({"verify", "--config", s.config(kBase), "--out", s.out()}));
  CHECK(code == kExitOk);
  const auto report = s.read_json("report.json");
  CHECK(report["schema"] == kReportSchema);
  CHECK(report["passed"] == true);
  CHECK(report["config"]["text"] == kBase);
  for (const auto& name : default_suites()) {
    INFO(name);
    const auto& suite = report["suites"][name];
    if (name == "degeneration") {
      CHECK(suite["ran"] == false);  // measures differ
      continue;
    }
    CHECK(suite["ran"] == true);
    CHECK(suite["max_residual"] == "0");
    CHECK(suite["checks"].get<int>() > 0);
  }
  // Boundary sites are listed rather than silently dropped.
  const auto& skipped = report["suites"]["bilinear"]["skipped"];
  REQUIRE(skipped.size() > 0);
  CHECK(skipped[0]["n"] == 0);
  CHECK(skipped[0]["reason"].get<std::string>().find("boundary") == 0);

  const auto csv = s.lines("residuals.csv");
  REQUIRE(csv.size() > 1);
  CHECK(csv[0] == kCsvHeader);
  for (std::size_t k = 1; k < csv.size(); ++k) {
    CHECK(std::count(csv[k].begin(), csv[k].end(), ',') == 5);
    CHECK(csv[k].find(",0,exact,0") != std::string::npos);
  }
}

TEST_CASE("cli: injected fault is detected") {
  Scratch s("fault");
  const auto cfg = s.config(kBase);
  CHECK(run_cli(args({"verify", "--config", cfg, "--out", s.out(), "--inject-fault", "2,1"})) == kExitVerification);
  const auto report = s.read_json("report.json");
  CHECK(report["passed"] == false);
  CHECK(report["suites"]["bilinear"]["passed"] == false);
  CHECK(report["config"]["effective"]["fault"]["i"] == 2);
  // The same fault from the config file.
  Scratch s2("fault_cfg");
  const auto cfg2 = s2.config(std::string(kBase) + "[fault]\ni = 1\nj = 3\ndelta = 1/7\n");
  CHECK(run_cli(args({"verify", "--config", cfg2, "--out", s2.out()})) == kExitVerification);
}

TEST_CASE("cli: config errors exit 2") {
  Scratch s("config");
  CHECK(run_cli(args({"verify", "--config", s.config(replace(kBase, "k1 = 1", "k1 = 0")), "--out", s.out()})) ==
        kExitConfig);
  CHECK(run_cli(args({"moments", "--config", s.config(replace(kBase, "t_grid = 0, 1/3", "t_grid = 1")), "--out",
                      s.out()})) == kExitConfig);
  CHECK(run_cli(args({"verify", "--config", (s.dir / "missing.ini").string()})) == kExitConfig);
  CHECK(run_cli(args({"verify", "--config", s.config(kBase), "--mode", "fuzzy"})) == kExitConfig);
  CHECK(run_cli(args({"verify"})) == kExitConfig);  // --config is required
  CHECK(run_cli(args({"teleport", "--config", s.config(kBase)})) == kExitConfig);
  CHECK(run_cli(args({"verify", "--config", s.config(kBase), "--inject-fault", "x"})) == kExitConfig);
}

TEST_CASE("cli: real mode verify within tolerance") {
  Scratch s("real");
  const auto cfg = s.config(replace(replace(kBase, "a = 0", "a = 1/2"), "mode = exact", "mode = real"));
  CHECK(run_cli(args({"verify", "--config", cfg, "--out", s.out(), "--precision", "60"})) == kExitOk);
  const auto report = s.read_json("report.json");
  CHECK(report["mode"] == "real");
  CHECK(report["precision"] == 60);
  CHECK(report["suites"]["orth"]["tolerance"].get<double>() == doctest::Approx(1e-30));
  CHECK(report["suites"]["orth"]["max_residual_double"].get<double>() < 1e-30);
}

TEST_CASE("cli: moments export round-trips exactly") {
  Scratch s("moments");
  CHECK(run_cli(args({"moments", "--config", s.config(kBase), "--out", s.out()})) == kExitOk);
  const auto j = s.read_json("moments.json");
  const auto table = table_from_json<Rational>(j);
  const auto expect = build_table_at<Rational>(parse_config(kBase).model, Rational(0), 4, 1);
  CHECK(table.bimoments() == expect.bimoments());
  CHECK(table.single_x() == expect.single_x());
  CHECK(table.single_y() == expect.single_y());
  CHECK(j["config"]["text"] == kBase);
}

TEST_CASE("cli: evolve order and zero interval") {
  Scratch s("evolve");
  CHECK(run_cli(args({"evolve", "--config", s.config(kBase), "--out", s.out()})) == kExitOk);
  const auto summary = s.read_json("evolve.json");
  CHECK(summary["order"].get<double>() >= 3.7);
  CHECK(summary["order"].get<double>() <= 4.3);
  CHECK(summary["error"].get<double>() < 1e-10);
  const auto csv = s.lines("trajectory.csv");
  CHECK(csv[0] == kCsvHeader);
  // 65 time points x 3 sites x 5 variables, each with its tau-function reference.
  CHECK(csv.size() == 1 + 65 * 3 * 5 * 2);

  Scratch z("evolve_zero");
  const auto zero_cfg = z.config(std::string(kBase) + "[evolve]\nt0 = 1/4\nt1 = 1/4\n");
  CHECK(run_cli(args({"evolve", "--config", zero_cfg, "--out", z.out()})) == kExitOk);
  const auto zj = z.read_json("evolve.json");
  CHECK(zj["zero_interval"] == true);
  const auto zcsv = z.lines("trajectory.csv");
  REQUIRE(zcsv.size() == 1 + 3 * 5 * 2);
  // Echoed state equals the tau-function state at t0.
  for (std::size_t k = 1; k < zcsv.size(); k += 2) {
    const auto a = zcsv[k], b = zcsv[k + 1];
    const auto value = [](const std::string& row) {
      std::vector<std::string> cells;
      std::stringstream ss(row);
      for (std::string c; std::getline(ss, c, ',');) cells.push_back(c);
      return cells.at(3);
    };
    CHECK(value(a) == value(b));
  }
}

TEST_CASE("cli: oracle command") {
  Scratch s("oracle");
  const auto cfg = s.config(std::string(kBase) + "[oracle]\nn = 1\ntargets = tau, xi\nlevel = 3\n");
  CHECK(run_cli(args({"oracle", "--config", cfg, "--out", s.out()})) == kExitOk);
  const auto j = s.read_json("oracle.json");
  REQUIRE(j["results"].size() == 2);
  CHECK(j["results"][0]["target"] == "tau");
  CHECK(j["results"][0]["determinant"].get<double>() == doctest::Approx(0.5));
  CHECK(j["results"][0]["nodes"] == 53);
  CHECK(j["passed"] == true);
}
