#include <doctest.h>

#include <sys/wait.h>
#include <unistd.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "hypermass/cli/pipeline.hpp"
#include "hypermass/error.hpp"

using namespace hypermass;
using namespace hypermass::cli;
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

fs::path scratch() {
  static const fs::path dir = [] {
    fs::path d = fs::temp_directory_path() / ("hypermass_cli_" + std::to_string(::getpid()));
    fs::remove_all(d);
    fs::create_directories(d);
    return d;
  }();
  return dir;
}

fs::path write(const std::string& name, const std::string& text) {
  const fs::path p = scratch() / name;
  fs::create_directories(p.parent_path());
  std::ofstream(p) << text;
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

int tool(const std::string& args, const fs::path& out_log) {
  const std::string cmd = std::string(HYPERMASS_TOOL) + " " + args + " > " + out_log.string() + " 2>&1";
  const int st = std::system(cmd.c_str());
  return WIFEXITED(st) ? WEXITSTATUS(st) : -1;
}

std::vector<std::vector<std::string>> read_csv(const fs::path& p) {
  std::vector<std::vector<std::string>> rows;
  std::ifstream in(p);
  std::string line;
  while (std::getline(in, line)) {
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string c;
    while (std::getline(ss, c, ',')) cells.push_back(c);
    if (!line.empty() && line.back() == ',') cells.emplace_back();
    rows.push_back(cells);
  }
  return rows;
}

std::size_t column(const std::vector<std::string>& header, const std::string& name) {
  for (std::size_t i = 0; i < header.size(); ++i)
    if (header[i] == name) return i;
  FAIL("missing column " << name);
  return 0;
}

const char* round_benchmark = R"({
  "kappa": 1.0,
  "grid": {"n_theta": 16, "n_psi": 32},
  "surface": {"mode": "round", "R0": 1.0},
  "boundary_H": {"mode": "scale", "c": 2.0},
  "flow": {"rho_max": 8.0, "max_step": 0.0001, "leaf_bounds": true},
  "checks": ["positivity", "monotonicity", "leaf_bounds", "max_principle", "limit", "f_functional"],
  "f_functional": {"dr": 0.1, "n_theta": 8, "n_psi": 16}
})";

}  // namespace

TEST_CASE("config parsing") {
  SUBCASE("defaults") {
    const RunConfig c = parse_config("{}", ".");
    CHECK(c.kappa == 1.0);
    CHECK(c.n_theta == 64);
    CHECK(c.n_psi == 128);
    CHECK(c.flow.cfl == 0.4);
    CHECK(c.flow.rho_max == 8.0);
    CHECK(c.boundary.mode == HMode::scale);
    CHECK(c.boundary.c == 2.0);
    CHECK(c.checks.empty());
    for (const auto& n : known_checks()) CHECK(c.wants(n));
    CHECK(parse_config(R"({"kappa": 0.5})", ".").flow.rho_max == 16.0);
  }
  SUBCASE("errors") {
    CHECK_THROWS_AS(parse_config("{", "."), ConfigError);
    CHECK_THROWS_WITH_AS(parse_config(R"({"kapa": 1})", "."), doctest::Contains("unknown key 'kapa'"), ConfigError);
    CHECK_THROWS_AS(parse_config(R"({"kappa": -1})", "."), ConfigError);
    CHECK_THROWS_AS(parse_config(R"({"grid": {"n_theta": 8, "n_psi": 15}})", "."), ConfigError);
    CHECK_THROWS_AS(parse_config(R"({"checks": ["positivity", "nope"]})", "."), ConfigError);
    CHECK_THROWS_AS(parse_config(R"({"boundary_H": {"mode": "scale", "c": 0}})", "."), ConfigError);
    CHECK_THROWS_AS(parse_config(R"({"flow": {"cfl": 0}})", "."), ConfigError);
    CHECK_THROWS_AS(parse_config(R"({"flow": {"scheme": "rk4"}})", "."), ConfigError);
    CHECK_THROWS_AS(parse_config(R"({"surface": {"mode": "table", "file": "does_not_exist.txt"}})", "."), ConfigError);
    CHECK_THROWS_AS(parse_config(R"({"surface": {"mode": "harmonic", "terms": [{"l": 5, "m": 0, "epsilon": 0.1}]}})", "."),
                    ConfigError);
    CHECK_THROWS_AS(
        parse_config(R"({"surface": {"mode": "harmonic", "terms": [{"l": 2, "m": 0, "epsilon": 0.1}]},
                         "boundary_H": {"mode": "preset_example1"}})", "."),
        ConfigError);
    CHECK_THROWS_AS(parse_config(R"({"boundary_H": {"mode": "preset_example1", "c": 0.5}})", "."), ConfigError);
    CHECK_THROWS_AS(parse_config(R"({"alpha_override": -1})", "."), ConfigError);
  }
  SUBCASE("warnings and clamping") {
    const RunConfig a = parse_config(R"({"flow": {"cfl": 50}})", ".");
    CHECK(a.flow.cfl == 1.0);
    REQUIRE(a.warnings.size() == 1);
    CHECK(a.warnings[0].find("clamped") != std::string::npos);
    const RunConfig b = parse_config(R"({"boundary_H": {"mode": "scale", "c": 0.8}})", ".");
    CHECK(b.boundary.c == 0.8);
    CHECK(b.warnings.size() == 1);
  }
  SUBCASE("table files resolve against the config directory") {
    std::string vals = "# radial table\n";
    for (int i = 0; i < 8 * 16; ++i) vals += (i % 5 == 0 ? "1.0\n" : "1.0, ");
    write("tables/r.txt", vals);
    const fs::path cfg = write("tables/cfg.json", R"({"grid": {"n_theta": 8, "n_psi": 16},
      "surface": {"mode": "table", "file": "r.txt"}})");
    const RunConfig c = load_config(cfg);
    CHECK(c.surface.mode == RadialSpec::Mode::table);
    CHECK(c.surface.table.size() == 128u);
  }
  SUBCASE("sweep parameters") {
    RunConfig c = parse_config("{}", ".");
    apply_parameter(c, "kappa", "0.5");
    CHECK(c.kappa == 0.5);
    apply_parameter(c, "c", "1.5");
    CHECK(c.boundary.c == 1.5);
    apply_parameter(c, "R0", "2");
    CHECK(c.surface.R0 == 2.0);
    apply_parameter(c, "alpha_override", "1.0");
    CHECK(c.alpha_override == 1.0);
    apply_parameter(c, "alpha_override", "default");
    CHECK_FALSE(c.alpha_override.has_value());
    apply_parameter(c, "epsilon(2,0)", "0.05");
    CHECK(c.surface.mode == RadialSpec::Mode::harmonic);
    REQUIRE(c.surface.terms.size() == 1);
    CHECK(c.surface.terms[0].epsilon == 0.05);
    CHECK_THROWS_AS(apply_parameter(c, "epsilon(5,0)", "0.1"), ConfigError);
    CHECK_THROWS_AS(apply_parameter(c, "mass", "1"), ConfigError);
    CHECK_THROWS_AS(apply_parameter(c, "c", "abc"), ConfigError);
    CHECK(split_values(" 1.0, 1.5 ,2") == std::vector<std::string>{"1.0", "1.5", "2"});
    CHECK_THROWS_AS(split_values("1,,2"), ConfigError);
  }
}

TEST_CASE("round benchmark run") {
  const fs::path cfg = write("round/cfg.json", round_benchmark);
  const fs::path out = scratch() / "round/out";
  CHECK(tool("run " + cfg.string() + " --out " + out.string(), scratch() / "round/log.txt") == 0);
  REQUIRE(fs::exists(out / "series.csv"));
  REQUIRE(fs::exists(out / "report.json"));
  const auto rows = read_csv(out / "series.csv");
  REQUIRE(rows.size() > 100);
  CHECK(rows[0] == std::vector<std::string>{"rho", "m_x1", "m_x2", "m_x3", "m_t", "m_norm_sq", "min_u", "max_u",
                                            "worst_pairing"});
  const std::size_t ci = column(rows[0], "m_norm_sq");
  const double scale = std::abs(std::stod(rows[1][ci]));
  for (std::size_t k = 2; k < rows.size(); ++k) CHECK(std::stod(rows[k][ci]) >= std::stod(rows[k - 1][ci]) - 1e-6 * scale);

  const json rep = json::parse(slurp(out / "report.json"));
  CHECK(rep["exit_code"] == 0);
  CHECK(rep["config_hash"].get<std::string>().rfind("fnv1a64:", 0) == 0);
  CHECK(rep["config"]["grid"]["n_theta"] == 16);
  CHECK(rep["tolerances"]["positivity"] == 1e-6);
  CHECK(rep["checks"]["derivative"]["status"] == "skipped");
  CHECK(rep["checks"]["example_pairing"]["status"] == "skipped");
  CHECK(rep["checks"]["positivity"]["status"] == "pass");
  CHECK(rep["checks"]["limit"]["status"] == "pass");
  CHECK(rep["radii"]["alpha"].get<double>() == doctest::Approx(1.0 / std::tanh(1.0)));
}

TEST_CASE("negative H is a hypothesis failure") {
  std::string vals;
  for (int i = 0; i < 8 * 16; ++i) vals += std::string(i ? "," : "") + "-1";
  const fs::path cfg = write("neg/cfg.json", R"({"grid": {"n_theta": 8, "n_psi": 16},
    "boundary_H": {"mode": "table", "values": [)" + vals + R"(]}})");
  const fs::path out = scratch() / "neg/out";
  const fs::path log = scratch() / "neg/log.txt";
  CHECK(tool("run " + cfg.string() + " --out " + out.string(), log) == 2);
  CHECK(slurp(log).find("H > 0") != std::string::npos);
  const json rep = json::parse(slurp(out / "report.json"));
  CHECK(rep["failure"]["condition"] == "H > 0");
  CHECK(rep["exit_code"] == 2);
  CHECK_FALSE(fs::exists(out / "series.csv"));
}

TEST_CASE("cfl above 1 is clamped with a warning") {
  // coarse enough that the 1e-3 step cap, not the cfl bound, sets the step
  const fs::path cfg = write("cfl/cfg.json", R"({"grid": {"n_theta": 8, "n_psi": 16},
    "flow": {"rho_max": 2.0, "cfl": 50},
    "checks": ["positivity", "monotonicity", "max_principle", "leaf_bounds"]})");
  const fs::path log = scratch() / "cfl/log.txt";
  CHECK(tool("run " + cfg.string() + " --out " + (scratch() / "cfl/out").string(), log) == 0);
  CHECK(slurp(log).find("clamped to 1") != std::string::npos);
  const json rep = json::parse(slurp(scratch() / "cfl/out/report.json"));
  CHECK(rep["config"]["flow"]["cfl"] == 1.0);
  CHECK(rep["warnings"].size() == 1);
}

TEST_CASE("config errors exit 1") {
  const fs::path log = scratch() / "bad/log.txt";
  fs::create_directories(log.parent_path());
  CHECK(tool("run " + write("bad/cfg.json", R"({"surface": {"mode": "cube"}})").string(), log) == 1);
  CHECK(tool("run " + (scratch() / "bad/missing.json").string(), log) == 1);
  CHECK(tool("sweep " + write("bad/ok.json", "{}").string() + " --param nope --values 1,2", log) == 1);
  CHECK(tool("frobnicate", log) == 1);
}

TEST_CASE("check persists nothing") {
  const fs::path dir = scratch() / "check";
  const fs::path cfg = write("check/cfg.json", R"({"grid": {"n_theta": 8, "n_psi": 16},
    "flow": {"rho_max": 0.2}, "checks": ["positivity", "max_principle"],
    "output": {"dir": "should_not_exist", "fields": true}})");
  const fs::path log = scratch() / "check_log.txt";
  const fs::path cwd = fs::current_path();
  fs::current_path(dir);
  const int rc = tool("check cfg.json", log);
  fs::current_path(cwd);
  CHECK(rc == 0);
  CHECK(slurp(log).find("positivity: pass") != std::string::npos);
  CHECK_FALSE(fs::exists(dir / "should_not_exist"));
  std::size_t entries = 0;
  for (const auto& e : fs::directory_iterator(dir)) {
    (void)e;
    ++entries;
  }
  CHECK(entries == 1);
}

TEST_CASE("failed checks exit 4 and are named") {
  const fs::path cfg = write("fail/cfg.json", R"({"grid": {"n_theta": 8, "n_psi": 16},
    "flow": {"rho_max": 0.3}, "checks": ["limit"]})");
  const fs::path log = scratch() / "fail/log.txt";
  CHECK(tool("run " + cfg.string() + " --out " + (scratch() / "fail/out").string(), log) == 4);
  CHECK(slurp(log).find("check failed: limit") != std::string::npos);
}

TEST_CASE("sweep over c") {
  const fs::path cfg = write("sweep_c/cfg.json", R"({"grid": {"n_theta": 8, "n_psi": 16},
    "flow": {"rho_max": 0.1}, "checks": ["positivity"]})");
  const fs::path out = scratch() / "sweep_c/out";
  CHECK(tool("sweep " + cfg.string() + " --param c --values 1.0,1.5,2.0 --out " + out.string(),
             scratch() / "sweep_c/log.txt") == 0);
  const auto rows = read_csv(out / "sweep.csv");
  REQUIRE(rows.size() == 4);
  CHECK(rows[0][0] == "c");
  const std::size_t mt = column(rows[0], "m_t_0");
  CHECK(std::stod(rows[1][mt]) == 0.0);
  CHECK(std::stod(rows[2][mt]) > std::stod(rows[1][mt]));
  CHECK(std::stod(rows[3][mt]) > std::stod(rows[2][mt]));
  // closed form: H0 (1 - 1/c) alpha cosh(1) area
  const double ref = 2.0 / std::tanh(1.0) * 0.5 / std::tanh(1.0) * std::cosh(1.0) * 4.0 * M_PI * std::sinh(1.0) * std::sinh(1.0);
  CHECK(std::stod(rows[3][mt]) == doctest::Approx(ref).epsilon(2e-2));
  CHECK(fs::exists(out / "c=1.5/series.csv"));
  CHECK(fs::exists(out / "c=2.0/report.json"));
}

TEST_CASE("sweep over R0 sends alpha toward 1") {
  const fs::path cfg = write("sweep_r/cfg.json", R"({"grid": {"n_theta": 8, "n_psi": 16},
    "flow": {"rho_max": 0.05}, "checks": ["positivity"]})");
  const fs::path out = scratch() / "sweep_r/out";
  CHECK(tool("sweep " + cfg.string() + " --param R0 --values 1,2,3 --out " + out.string(), scratch() / "sweep_r/log.txt") == 0);
  const auto rows = read_csv(out / "sweep.csv");
  REQUIRE(rows.size() == 4);
  const std::size_t a = column(rows[0], "alpha");
  for (int r = 1; r <= 3; ++r) CHECK(std::stod(rows[static_cast<std::size_t>(r)][a]) == doctest::Approx(1.0 / std::tanh(r)).epsilon(1e-9));
  CHECK(std::stod(rows[2][a]) < std::stod(rows[1][a]));
  CHECK(std::stod(rows[3][a]) < std::stod(rows[2][a]));
  CHECK(std::stod(rows[3][a]) > 1.0);
}

TEST_CASE("sweep alpha_override on the constant-H preset") {
  const fs::path cfg = write("sweep_a/cfg.json", R"({"grid": {"n_theta": 16, "n_psi": 32},
    "boundary_H": {"mode": "preset_example1", "value": 1.5},
    "flow": {"rho_max": 0.1}, "checks": ["positivity", "example_pairing"]})");
  const fs::path out = scratch() / "sweep_a/out";
  CHECK(tool("sweep " + cfg.string() + " --param alpha_override --values 1.0,default --out " + out.string(),
             scratch() / "sweep_a/log.txt") == 0);
  const auto rows = read_csv(out / "sweep.csv");
  REQUIRE(rows.size() == 3);
  const std::size_t a = column(rows[0], "alpha"), w = column(rows[0], "worst_pairing_0"), mt = column(rows[0], "m_t_0");
  CHECK(std::stod(rows[1][a]) == 1.0);
  CHECK(std::stod(rows[2][a]) == doctest::Approx(1.0 / std::tanh(1.0)));
  for (std::size_t r = 1; r <= 2; ++r) {
    CHECK(rows[r][column(rows[0], "status")] == "pass");
    CHECK(std::stod(rows[r][w]) <= 1e-6 * std::abs(std::stod(rows[r][mt])));
  }
}

TEST_CASE("sweep exit code is the worst run") {
  const fs::path cfg = write("sweep_x/cfg.json", R"({"grid": {"n_theta": 8, "n_psi": 16},
    "flow": {"rho_max": 0.1}, "checks": ["positivity"]})");
  const fs::path out = scratch() / "sweep_x/out";
  // c = 0.5 gives H > H0: the positivity check fails for that value only
  CHECK(tool("sweep " + cfg.string() + " --param c --values 2.0,0.5 --out " + out.string(), scratch() / "sweep_x/log.txt") == 4);
  const auto rows = read_csv(out / "sweep.csv");
  REQUIRE(rows.size() == 3);
  CHECK(rows[1][1] == "0");
  CHECK(rows[2][1] == "4");
}

TEST_CASE("reports are deterministic across worker counts") {
  RunConfig cfg = parse_config(R"({"grid": {"n_theta": 12, "n_psi": 24},
    "surface": {"mode": "harmonic", "R0": 1.0, "terms": [{"l": 2, "m": 1, "epsilon": 0.04}]},
    "boundary_H": {"mode": "scale", "c": 1.5}, "flow": {"rho_max": 0.5},
    "checks": ["positivity", "monotonicity", "f_functional"], "f_functional": {"dr": 0.1, "n_theta": 8, "n_psi": 16}})", ".");
  WorkerPool one(1), four(4);
  RunOutcome a = execute(cfg, &one), b = execute(cfg, &four);
  CHECK(a.exit_code == 0);
  a.report.erase("threads");
  b.report.erase("threads");
  CHECK(a.report.dump() == b.report.dump());
  REQUIRE(a.series.size() == b.series.size());
  for (std::size_t k = 0; k < a.series.size(); ++k) {
    CHECK(a.series[k].m == b.series[k].m);
    CHECK(a.series[k].worst_pairing == b.series[k].worst_pairing);
  }
}

TEST_CASE("example 2 boundary data has no l = 1 component") {
  RunConfig cfg = parse_config(R"({"grid": {"n_theta": 16, "n_psi": 32},
    "boundary_H": {"mode": "preset_example2", "c": 1.5, "terms": [{"l": 2, "m": 0, "delta": 0.1}, {"l": 3, "m": 1, "delta": 0.05}]}})", ".");
  const SphereGrid g(16, 32);
  const EmbeddedSurface s = build_surface(RadialSpec::round(1.0, 1.0), g);
  const BoundaryData bd = boundary_for(cfg, s);
  const auto w = area_weights(s.g, g);
  for (int a = 0; a < 3; ++a) {
    double acc = 0.0, mag = 0.0;
    for (int j = 0; j < g.n_theta(); ++j)
      for (int k = 0; k < g.n_psi(); ++k) {
        const auto i = g.index(j, k);
        acc += w[i] * bd.H[i] * sphere_direction(g.theta(j), g.psi(k))[static_cast<std::size_t>(a)];
        mag += w[i] * std::abs(bd.H[i]);
      }
    CHECK(std::abs(acc) <= 1e-13 * mag);
  }
  double lo = 1e9, hi = -1e9;
  for (double x : bd.H.values) {
    lo = std::min(lo, x);
    hi = std::max(hi, x);
  }
  CHECK(lo > 0.0);
  CHECK(hi - lo > 0.1);
}

TEST_CASE("field dump header") {
  RunConfig cfg = parse_config(R"({"grid": {"n_theta": 8, "n_psi": 16}, "flow": {"rho_max": 0.1},
    "checks": ["positivity"], "output": {"fields": true}})", ".");
  const RunOutcome out = execute(cfg);
  persist(cfg, out, scratch() / "fields");
  const std::string text = slurp(scratch() / "fields/fields.txt");
  CHECK(text.find("# n_theta 8") != std::string::npos);
  CHECK(text.find("# n_psi 16") != std::string::npos);
  CHECK(text.find("# kappa 1") != std::string::npos);
  CHECK(text.find("row-major") != std::string::npos);
  CHECK(text.find("# columns j k r H0 K H u0 u_final") != std::string::npos);
  std::size_t lines = 0;
  std::istringstream in(text);
  for (std::string l; std::getline(in, l);)
    if (!l.empty() && l[0] != '#') ++lines;
  CHECK(lines == 128u);
}
