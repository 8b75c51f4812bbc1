#include "hypermass/cli/config.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <regex>
#include <sstream>

#include <json.hpp>

#include "hypermass/error.hpp"

namespace hypermass::cli {

using nlohmann::json;

const std::vector<std::string>& known_checks() {
  static const std::vector<std::string> names = {"positivity", "monotonicity", "leaf_bounds", "max_principle",
                                                 "limit",      "derivative",   "f_functional", "example_pairing"};
  return names;
}

bool RunConfig::wants(const std::string& check) const {
  if (checks.empty()) return true;
  return std::find(checks.begin(), checks.end(), check) != checks.end();
}

void validate_boundary(RunConfig& cfg);

namespace {

[[noreturn]] void fail(const std::string& msg) { throw ConfigError(msg); }

void only_keys(const json& obj, const std::string& where, std::initializer_list<const char*> keys) {
  if (!obj.is_object()) fail(where + " must be an object");
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    bool ok = false;
    for (const char* k : keys) ok = ok || it.key() == k;
    if (!ok) fail("unknown key '" + it.key() + "' in " + (where.empty() ? std::string("config") : where));
  }
}

double number(const json& obj, const char* key, double fallback, const std::string& where) {
  if (!obj.contains(key) || obj.at(key).is_null()) return fallback;
  const json& v = obj.at(key);
  if (!v.is_number()) fail(where + "." + key + " must be a number");
  const double x = v.get<double>();
  if (!std::isfinite(x)) fail(where + "." + key + " must be finite");
  return x;
}

int integer(const json& obj, const char* key, int fallback, const std::string& where) {
  if (!obj.contains(key)) return fallback;
  const json& v = obj.at(key);
  if (!v.is_number_integer()) fail(where + "." + key + " must be an integer");
  return v.get<int>();
}

bool boolean(const json& obj, const char* key, bool fallback, const std::string& where) {
  if (!obj.contains(key)) return fallback;
  const json& v = obj.at(key);
  if (!v.is_boolean()) fail(where + "." + key + " must be true or false");
  return v.get<bool>();
}

std::string text(const json& obj, const char* key, const std::string& fallback, const std::string& where) {
  if (!obj.contains(key)) return fallback;
  const json& v = obj.at(key);
  if (!v.is_string()) fail(where + "." + key + " must be a string");
  return v.get<std::string>();
}

std::vector<double> read_numbers(const std::filesystem::path& p) {
  std::ifstream in(p);
  if (!in) fail("cannot open referenced file " + p.string());
  std::vector<double> out;
  std::string line;
  while (std::getline(in, line)) {
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    std::replace(line.begin(), line.end(), ',', ' ');
    std::istringstream ls(line);
    std::string tok;
    while (ls >> tok) {
      std::size_t used = 0;
      double x = 0.0;
      try {
        x = std::stod(tok, &used);
      } catch (const std::exception&) {
        used = 0;
      }
      if (used != tok.size() || !std::isfinite(x)) fail("bad number '" + tok + "' in " + p.string());
      out.push_back(x);
    }
  }
  return out;
}

// Inline "values" or a "file" reference; exactly one must be present.
std::vector<double> node_values(const json& obj, const std::string& where, const std::filesystem::path& base) {
  const bool has_values = obj.contains("values"), has_file = obj.contains("file");
  if (has_values == has_file) fail(where + " table needs exactly one of 'values' or 'file'");
  if (has_file) {
    std::filesystem::path p = text(obj, "file", "", where);
    if (p.is_relative()) p = base / p;
    if (!std::filesystem::exists(p)) fail("referenced file does not exist: " + p.string());
    return read_numbers(p);
  }
  const json& v = obj.at("values");
  if (!v.is_array()) fail(where + ".values must be an array of numbers");
  std::vector<double> out;
  for (const auto& x : v) {
    if (!x.is_number()) fail(where + ".values must be an array of numbers");
    out.push_back(x.get<double>());
  }
  return out;
}

std::vector<HarmonicTerm> harmonic_terms(const json& arr, const std::string& where, const char* amp_key) {
  if (!arr.is_array()) fail(where + ".terms must be an array");
  std::vector<HarmonicTerm> terms;
  for (const auto& t : arr) {
    only_keys(t, where + ".terms[]", {"l", "m", amp_key});
    HarmonicTerm h;
    h.l = integer(t, "l", -1, where + ".terms[]");
    h.m = integer(t, "m", 0, where + ".terms[]");
    h.epsilon = number(t, amp_key, 0.0, where + ".terms[]");
    if (h.l < 0 || h.l > 4) fail(where + ": harmonic degree l must lie in 0..4");
    if (std::abs(h.m) > h.l) fail(where + ": harmonic order must satisfy |m| <= l");
    terms.push_back(h);
  }
  return terms;
}

void parse_surface(const json& js, RunConfig& cfg, const std::filesystem::path& base) {
  const std::string w = "surface";
  only_keys(js, w, {"mode", "R0", "terms", "values", "file"});
  const std::string mode = text(js, "mode", "round", w);
  const double R0 = number(js, "R0", 1.0, w);
  if (mode == "round" || mode == "harmonic") {
    if (!(R0 > 0.0)) fail("surface.R0 must be positive");
  }
  if (mode == "round") {
    cfg.surface = RadialSpec::round(cfg.kappa, R0);
  } else if (mode == "harmonic") {
    cfg.surface = RadialSpec::harmonic(cfg.kappa, R0,
                                       js.contains("terms") ? harmonic_terms(js.at("terms"), w, "epsilon")
                                                            : std::vector<HarmonicTerm>{});
  } else if (mode == "table") {
    std::vector<double> r = node_values(js, w, base);
    if (r.size() != static_cast<std::size_t>(cfg.n_theta) * static_cast<std::size_t>(cfg.n_psi)) {
      fail("surface table has " + std::to_string(r.size()) + " values, grid needs " +
           std::to_string(cfg.n_theta * cfg.n_psi));
    }
    cfg.surface = RadialSpec::from_table(cfg.kappa, std::move(r));
  } else {
    fail("surface.mode must be round, harmonic or table");
  }
}

void parse_boundary(const json& js, RunConfig& cfg, const std::filesystem::path& base) {
  const std::string w = "boundary_H";
  only_keys(js, w, {"mode", "c", "value", "values", "file", "terms"});
  const std::string mode = text(js, "mode", "scale", w);
  BoundarySpec& b = cfg.boundary;
  b = BoundarySpec{};
  b.c = number(js, "c", mode == "preset_example2" ? 1.5 : 2.0, w);
  if (mode == "scale") {
    b.mode = HMode::scale;
  } else if (mode == "table") {
    b.mode = HMode::table;
    b.table = node_values(js, w, base);
    if (b.table.size() != static_cast<std::size_t>(cfg.n_theta) * static_cast<std::size_t>(cfg.n_psi)) {
      fail("boundary_H table has " + std::to_string(b.table.size()) + " values, grid needs " +
           std::to_string(cfg.n_theta * cfg.n_psi));
    }
  } else if (mode == "preset_example1") {
    b.mode = HMode::preset_example1;
    if (js.contains("value")) b.value = number(js, "value", 0.0, w);
  } else if (mode == "preset_example2") {
    b.mode = HMode::preset_example2;
    b.terms = js.contains("terms") ? harmonic_terms(js.at("terms"), w, "delta")
                                   : std::vector<HarmonicTerm>{{2, 0, 0.1}};
    for (const auto& t : b.terms) {
      if (t.l == 1) fail("preset_example2 modulation must not contain l = 1 terms");
    }
  } else {
    fail("boundary_H.mode must be scale, table, preset_example1 or preset_example2");
  }
  validate_boundary(cfg);
}

}  // namespace

RunConfig parse_config(const std::string& source, const std::filesystem::path& base_dir) {
  json js;
  try {
    js = json::parse(source);
  } catch (const json::parse_error& e) {
    fail(std::string("config is not valid JSON: ") + e.what());
  }
  only_keys(js, "", {"kappa", "grid", "surface", "boundary_H", "flow", "checks", "alpha_override", "tolerances",
                     "f_functional", "output"});
  RunConfig cfg;
  cfg.source_text = source;
  cfg.kappa = number(js, "kappa", 1.0, "config");
  if (!(cfg.kappa > 0.0)) fail("kappa must be positive");

  if (js.contains("grid")) {
    const json& g = js.at("grid");
    only_keys(g, "grid", {"n_theta", "n_psi"});
    cfg.n_theta = integer(g, "n_theta", cfg.n_theta, "grid");
    cfg.n_psi = integer(g, "n_psi", cfg.n_psi, "grid");
  }
  if (cfg.n_theta < 8 || cfg.n_psi < 16 || cfg.n_psi % 2 != 0) {
    fail("grid needs n_theta >= 8 and an even n_psi >= 16");
  }

  parse_surface(js.contains("surface") ? js.at("surface") : json::object(), cfg, base_dir);
  parse_boundary(js.contains("boundary_H") ? js.at("boundary_H") : json::object(), cfg, base_dir);

  if (js.contains("flow")) {
    const json& f = js.at("flow");
    const std::string w = "flow";
    only_keys(f, w, {"rho_max", "cfl", "sample_every", "scheme", "max_step", "leaf_bounds"});
    cfg.flow.rho_max = number(f, "rho_max", 8.0 / cfg.kappa, w);
    cfg.flow.cfl = number(f, "cfl", cfg.flow.cfl, w);
    cfg.flow.sample_every = number(f, "sample_every", cfg.flow.sample_every, w);
    cfg.flow.max_step = number(f, "max_step", 0.0, w);
    cfg.flow.leaf_bounds = boolean(f, "leaf_bounds", true, w);
    const std::string scheme = text(f, "scheme", "heun", w);
    if (scheme == "heun") cfg.flow.scheme = TimeScheme::heun;
    else if (scheme == "euler") cfg.flow.scheme = TimeScheme::euler;
    else fail("flow.scheme must be heun or euler");
  } else {
    cfg.flow.rho_max = 8.0 / cfg.kappa;
  }
  if (!(cfg.flow.rho_max > 0.0)) fail("flow.rho_max must be positive");
  if (!(cfg.flow.sample_every > 0.0)) fail("flow.sample_every must be positive");
  if (cfg.flow.max_step < 0.0) fail("flow.max_step must be positive when given");
  if (!(cfg.flow.cfl > 0.0)) fail("flow.cfl must be positive");
  if (cfg.flow.cfl > 1.0) {
    std::ostringstream os;
    os << "flow.cfl = " << cfg.flow.cfl << " exceeds 1; clamped to 1";
    cfg.warnings.push_back(os.str());
    cfg.flow.cfl = 1.0;
  }

  if (js.contains("checks")) {
    const json& c = js.at("checks");
    if (!c.is_array()) fail("checks must be an array of names");
    for (const auto& n : c) {
      if (!n.is_string()) fail("checks must be an array of names");
      const std::string name = n.get<std::string>();
      const auto& k = known_checks();
      if (std::find(k.begin(), k.end(), name) == k.end()) fail("unknown check '" + name + "'");
      if (std::find(cfg.checks.begin(), cfg.checks.end(), name) == cfg.checks.end()) cfg.checks.push_back(name);
    }
    if (cfg.checks.empty()) fail("checks must name at least one suite (omit the key to run all)");
  }

  if (js.contains("alpha_override") && !js.at("alpha_override").is_null()) {
    const double a = number(js, "alpha_override", 0.0, "config");
    if (!(a > 0.0)) fail("alpha_override must be positive");
    cfg.alpha_override = a;
  }
  cfg.flow.alpha_override = cfg.alpha_override;

  if (js.contains("tolerances")) {
    const json& t = js.at("tolerances");
    const std::string w = "tolerances";
    only_keys(t, w, {"positivity", "monotonicity", "pointwise", "leaf_bounds", "limit", "derivative", "f_laplacian",
                     "critical", "max_principle"});
    Tolerances& T = cfg.tol;
    T.positivity = number(t, "positivity", T.positivity, w);
    T.monotonicity = number(t, "monotonicity", T.monotonicity, w);
    T.pointwise = number(t, "pointwise", T.pointwise, w);
    T.leaf_bounds = number(t, "leaf_bounds", T.leaf_bounds, w);
    T.limit = number(t, "limit", T.limit, w);
    T.derivative = number(t, "derivative", T.derivative, w);
    T.f_laplacian = number(t, "f_laplacian", T.f_laplacian, w);
    T.critical = number(t, "critical", T.critical, w);
    T.max_principle = number(t, "max_principle", T.max_principle, w);
    for (double x : {T.positivity, T.monotonicity, T.pointwise, T.leaf_bounds, T.limit, T.derivative, T.f_laplacian,
                     T.critical, T.max_principle}) {
      if (x < 0.0) fail("tolerances must be non-negative");
    }
  }
  cfg.flow.bounds_tol = cfg.tol.leaf_bounds;
  cfg.flow.max_principle_tol = cfg.tol.max_principle;

  if (js.contains("f_functional")) {
    const json& f = js.at("f_functional");
    const std::string w = "f_functional";
    only_keys(f, w, {"dr", "shells", "n_theta", "n_psi"});
    cfg.f.dr = number(f, "dr", cfg.f.dr, w);
    cfg.f.shells = integer(f, "shells", cfg.f.shells, w);
    cfg.f.n_theta = integer(f, "n_theta", cfg.f.n_theta, w);
    cfg.f.n_psi = integer(f, "n_psi", cfg.f.n_psi, w);
    if (!(cfg.f.dr > 0.0)) fail("f_functional.dr must be positive");
    if (cfg.f.shells < 0) fail("f_functional.shells must be non-negative");
    if (cfg.f.n_theta < 8 || cfg.f.n_psi < 16 || cfg.f.n_psi % 2 != 0) {
      fail("f_functional angular grid needs n_theta >= 8 and an even n_psi >= 16");
    }
  }

  if (js.contains("output")) {
    const json& o = js.at("output");
    only_keys(o, "output", {"dir", "series", "report", "fields"});
    cfg.output.dir = text(o, "dir", cfg.output.dir.string(), "output");
    cfg.output.series = boolean(o, "series", true, "output");
    cfg.output.report = boolean(o, "report", true, "output");
    cfg.output.fields = boolean(o, "fields", false, "output");
  }
  if (cfg.output.dir.is_relative()) cfg.output.dir = base_dir / cfg.output.dir;
  return cfg;
}

void validate_boundary(RunConfig& cfg) {
  BoundarySpec& b = cfg.boundary;
  auto& w = cfg.warnings;
  w.erase(std::remove_if(w.begin(), w.end(), [](const std::string& s) { return s.rfind("boundary_H", 0) == 0; }),
          w.end());
  const bool preset = b.mode == HMode::preset_example1 || b.mode == HMode::preset_example2;
  if (b.mode != HMode::table && !(b.c > 0.0)) fail("boundary_H.c must be positive");
  if (preset) {
    if (cfg.surface.mode != RadialSpec::Mode::round) fail("example presets require a round surface");
    if (b.value) {
      if (!(*b.value > 0.0)) fail("boundary_H.value must be positive");
    } else if (b.c < 1.0) {
      fail("example presets require c >= 1");
    }
  } else if (b.mode == HMode::scale && b.c < 1.0) {
    std::ostringstream os;
    os << "boundary_H c = " << b.c << " < 1 gives H > H0; positivity is not expected to hold";
    w.push_back(os.str());
  }
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail("cannot read config " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  RunConfig cfg = parse_config(ss.str(), path.has_parent_path() ? path.parent_path() : std::filesystem::path("."));
  cfg.source_path = path;
  return cfg;
}

std::vector<std::string> split_values(const std::string& list) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream in(list);
  while (std::getline(in, item, ',')) {
    const auto b = item.find_first_not_of(" \t");
    const auto e = item.find_last_not_of(" \t");
    if (b == std::string::npos) fail("empty item in value list '" + list + "'");
    out.push_back(item.substr(b, e - b + 1));
  }
  if (out.empty() || (!list.empty() && list.back() == ',')) fail("empty item in value list '" + list + "'");
  return out;
}

namespace {

double parse_real(const std::string& name, const std::string& s) {
  std::size_t used = 0;
  double x = 0.0;
  try {
    x = std::stod(s, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used != s.size() || !std::isfinite(x)) fail("value '" + s + "' for " + name + " is not a number");
  return x;
}

}  // namespace

void apply_parameter(RunConfig& cfg, const std::string& name, const std::string& value) {
  static const std::regex eps_re(R"(epsilon\(\s*(-?\d+)\s*,\s*(-?\d+)\s*\))");
  std::smatch mt;
  if (name == "kappa") {
    const double k = parse_real(name, value);
    if (!(k > 0.0)) fail("kappa must be positive");
    cfg.kappa = k;
    cfg.surface.kappa = k;
  } else if (name == "c") {
    if (cfg.boundary.mode == HMode::table) fail("parameter c does not apply to a tabulated boundary_H");
    cfg.boundary.c = parse_real(name, value);
    cfg.boundary.value.reset();
    validate_boundary(cfg);
  } else if (name == "R0") {
    if (cfg.surface.mode == RadialSpec::Mode::table) fail("parameter R0 does not apply to a tabulated surface");
    const double r = parse_real(name, value);
    if (!(r > 0.0)) fail("R0 must be positive");
    cfg.surface.R0 = r;
  } else if (name == "alpha_override") {
    if (value == "default") {
      cfg.alpha_override.reset();
    } else {
      const double a = parse_real(name, value);
      if (!(a > 0.0)) fail("alpha_override must be positive");
      cfg.alpha_override = a;
    }
    cfg.flow.alpha_override = cfg.alpha_override;
  } else if (std::regex_match(name, mt, eps_re)) {
    const int l = std::stoi(mt[1].str()), m = std::stoi(mt[2].str());
    if (l < 0 || l > 4 || std::abs(m) > l) fail("epsilon(l,m) needs 0 <= l <= 4 and |m| <= l");
    if (cfg.surface.mode == RadialSpec::Mode::table) fail("epsilon(l,m) does not apply to a tabulated surface");
    const double e = parse_real(name, value);
    cfg.surface.mode = RadialSpec::Mode::harmonic;
    auto it = std::find_if(cfg.surface.terms.begin(), cfg.surface.terms.end(),
                           [&](const HarmonicTerm& t) { return t.l == l && t.m == m; });
    if (it == cfg.surface.terms.end()) cfg.surface.terms.push_back({l, m, e});
    else it->epsilon = e;
    if (cfg.boundary.mode == HMode::preset_example1 || cfg.boundary.mode == HMode::preset_example2) {
      fail("example presets require a round surface");
    }
  } else {
    fail("unknown sweep parameter '" + name + "' (kappa, c, R0, alpha_override, epsilon(l,m))");
  }
}

}  // namespace hypermass::cli
