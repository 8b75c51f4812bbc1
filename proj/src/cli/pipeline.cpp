#include "hypermass/cli/pipeline.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <iostream>
#include <mutex>
#include <thread>

#include "hypermass/error.hpp"
#include "hypermass/kernels.hpp"
#include "hypermass/mass.hpp"

namespace hypermass::cli {

using nlohmann::json;

namespace {

const char* mode_name(HMode m) {
  switch (m) {
    case HMode::scale: return "scale";
    case HMode::table: return "table";
    case HMode::preset_example1: return "preset_example1";
    case HMode::preset_example2: return "preset_example2";
  }
  return "?";
}

const char* surface_mode_name(RadialSpec::Mode m) {
  switch (m) {
    case RadialSpec::Mode::round: return "round";
    case RadialSpec::Mode::harmonic: return "harmonic";
    case RadialSpec::Mode::table: return "table";
  }
  return "?";
}

json vec_json(const LorentzVec& v) { return json::array({v.x1, v.x2, v.x3, v.t}); }

// JSON cannot carry inf/nan; report them as strings.
json real(double x) {
  if (std::isfinite(x)) return x;
  return format_real(x);
}

double euclid(const LorentzVec& v) { return std::sqrt(euclidean_norm_sq(v)); }

json config_summary(const RunConfig& cfg) {
  json s;
  s["kappa"] = cfg.kappa;
  s["grid"] = {{"n_theta", cfg.n_theta}, {"n_psi", cfg.n_psi}};
  json surf = {{"mode", surface_mode_name(cfg.surface.mode)}};
  if (cfg.surface.mode != RadialSpec::Mode::table) surf["R0"] = cfg.surface.R0;
  json terms = json::array();
  for (const auto& t : cfg.surface.terms) terms.push_back({{"l", t.l}, {"m", t.m}, {"epsilon", t.epsilon}});
  if (!terms.empty()) surf["terms"] = terms;
  s["surface"] = surf;
  json bd = {{"mode", mode_name(cfg.boundary.mode)}};
  if (cfg.boundary.mode != HMode::table) bd["c"] = cfg.boundary.c;
  if (cfg.boundary.value) bd["value"] = *cfg.boundary.value;
  json bterms = json::array();
  for (const auto& t : cfg.boundary.terms) bterms.push_back({{"l", t.l}, {"m", t.m}, {"delta", t.epsilon}});
  if (!bterms.empty()) bd["terms"] = bterms;
  s["boundary_H"] = bd;
  s["flow"] = {{"rho_max", cfg.flow.rho_max},
               {"cfl", cfg.flow.cfl},
               {"sample_every", cfg.flow.sample_every},
               {"scheme", cfg.flow.scheme == TimeScheme::heun ? "heun" : "euler"},
               {"max_step", cfg.flow.max_step > 0.0 ? cfg.flow.max_step : 1e-3 / cfg.kappa},
               {"leaf_bounds", cfg.flow.leaf_bounds}};
  s["alpha_override"] = cfg.alpha_override ? json(*cfg.alpha_override) : json(nullptr);
  return s;
}

json tolerances_json(const Tolerances& t) {
  return {{"positivity", t.positivity}, {"monotonicity", t.monotonicity}, {"pointwise", t.pointwise},
          {"leaf_bounds", t.leaf_bounds}, {"limit", t.limit},           {"derivative", t.derivative},
          {"f_laplacian", t.f_laplacian}, {"critical", t.critical},     {"max_principle", t.max_principle}};
}

json hypotheses_json(const HypothesisReport& rep, const SphereGrid& grid) {
  json arr = json::array();
  for (const auto& c : rep.conditions) {
    json e = {{"name", c.name}, {"pass", c.pass}, {"margin", real(c.margin)}};
    if (c.worst_j >= 0) {
      e["worst_node"] = {{"j", c.worst_j}, {"k", c.worst_k}, {"index", grid.index(c.worst_j, c.worst_k)}};
    }
    arr.push_back(e);
  }
  return arr;
}

struct CheckResult {
  std::string status = "skipped";  // pass / fail / skipped
  json detail = json::object();
};

void set_pass(CheckResult& r, bool ok) { r.status = ok ? "pass" : "fail"; }

std::size_t nearest_sample(const FlowResult& flow, double rho) {
  std::size_t best = 0;
  for (std::size_t k = 1; k < flow.samples.size(); ++k) {
    if (std::abs(flow.samples[k].rho - rho) < std::abs(flow.samples[best].rho - rho)) best = k;
  }
  return best;
}

CheckResult check_positivity(const RunConfig& cfg, const FlowResult& flow, const std::vector<LorentzVec>& nulls) {
  CheckResult r;
  const LorentzVec m0 = flow.samples.front().mass;
  const double worst = worst_pairing(m0, nulls);
  const double bound = cfg.tol.positivity * std::abs(m0.t);
  set_pass(r, worst <= bound);
  r.detail = {{"worst_pairing", worst}, {"bound", bound}, {"margin", bound - worst},
              {"directions", nulls.size()}, {"alpha", flow.alpha}};
  return r;
}

CheckResult check_monotonicity(const RunConfig& cfg, const FlowResult& flow, const std::vector<LorentzVec>& zetas) {
  CheckResult r;
  const MonotonicityReport rep = monotonicity_series(flow, flow.alpha, zetas, cfg.tol.monotonicity, cfg.tol.pointwise);
  set_pass(r, rep.pass());
  r.detail = {{"pairings_monotone", rep.pairings_monotone},
              {"worst_pairing_drop", rep.worst_pairing_drop.decrease},
              {"worst_pairing_drop_direction", rep.worst_pairing_drop.direction},
              {"worst_pairing_drop_rho", rep.rho.empty() ? 0.0 : rep.rho[rep.worst_pairing_drop.sample]},
              {"norm_monotone", rep.norm_monotone},
              {"worst_norm_drop", rep.worst_norm_drop},
              {"causal_ok", rep.causal_ok},
              {"pointwise_ok", rep.pointwise_ok},
              {"min_pointwise_integrand", real(rep.min_pointwise_integrand)},
              {"eps_rel", rep.eps_rel},
              {"directions", zetas.size()}};
  return r;
}

CheckResult check_leaf_bounds(const RunConfig& cfg, const FlowResult& flow) {
  CheckResult r;
  if (!cfg.flow.leaf_bounds) {
    r.detail = {{"reason", "flow.leaf_bounds is false"}};
    return r;
  }
  double rad = INFINITY, ang = INFINITY, mu = INFINITY;
  double worst_rho = 0.0, worst = INFINITY;
  for (const auto& s : flow.samples) {
    if (!s.bounds) continue;
    rad = std::min(rad, s.bounds->radial_margin);
    ang = std::min(ang, s.bounds->angular_margin);
    mu = std::min(mu, s.bounds->mu_margin);
    const double w = std::min({s.bounds->radial_margin, s.bounds->angular_margin, s.bounds->mu_margin});
    if (w < worst) {
      worst = w;
      worst_rho = s.rho;
    }
  }
  set_pass(r, rad >= -cfg.tol.leaf_bounds && ang >= -cfg.tol.leaf_bounds && mu >= -cfg.tol.leaf_bounds);
  r.detail = {{"radial_margin", real(rad)}, {"angular_margin", real(ang)}, {"mu_margin", real(mu)},
              {"worst_rho", worst_rho},     {"tol", cfg.tol.leaf_bounds}};
  return r;
}

CheckResult check_max_principle(const RunConfig& cfg, const FlowResult& flow) {
  CheckResult r;
  set_pass(r, flow.max_principle_ok);
  r.detail = {{"u0_min", flow.u0_min}, {"u0_max", flow.u0_max}, {"violation", flow.max_principle_violation},
              {"tol", cfg.tol.max_principle}};
  return r;
}

CheckResult check_limit(const RunConfig& cfg, const FlowResult& flow) {
  CheckResult r;
  const FlowSample& last = flow.samples.back();
  const FlowSample& half = flow.samples[nearest_sample(flow, 0.5 * last.rho)];
  const double diff = euclid(last.mass - half.mass);
  const double bound = cfg.tol.limit * euclid(flow.samples.front().mass);
  set_pass(r, diff <= bound);
  r.detail = {{"rho_final", last.rho}, {"rho_half", half.rho}, {"difference", diff}, {"bound", bound}};
  return r;
}

CheckResult check_derivative(const RunConfig& cfg, const FlowResult& flow, const LorentzVec& zeta) {
  CheckResult r;
  if (flow.samples.size() < 3) {
    r.status = "fail";
    r.detail = {{"reason", "fewer than 3 samples"}};
    return r;
  }
  const DerivativeReport rep = derivative_consistency(flow, flow.alpha, zeta);
  set_pass(r, rep.max_rel_mismatch <= cfg.tol.derivative);
  r.detail = {{"max_rel_mismatch", rep.max_rel_mismatch}, {"max_abs_mismatch", rep.max_abs_mismatch},
              {"zeta", vec_json(zeta)},                   {"tol", cfg.tol.derivative}};
  return r;
}

CheckResult check_f(const RunConfig& cfg, const EmbeddedSurface& s, const BoundaryData& bd, double R1) {
  CheckResult r;
  int shells = cfg.f.shells;
  if (shells == 0) shells = static_cast<int>(std::ceil(R1 / cfg.f.dr)) - 1;
  if (shells < 3) {
    r.status = "fail";
    r.detail = {{"reason", "interior sub-grid too coarse: fewer than 3 shells inside R1"}, {"dr", cfg.f.dr}};
    return r;
  }
  const SphereGrid angular(cfg.f.n_theta, cfg.f.n_psi);
  const InteriorField field = f_functional(s, bd, cfg.f.dr, shells, angular);
  const FIdentityReport rep = f_identity_checks(field, s, bd);
  double crit = 0.0;
  for (double x : rep.critical_integrals) crit = std::max(crit, std::abs(x));
  const bool ok_lap = rep.laplacian_rel_residual <= cfg.tol.f_laplacian;
  const bool ok_crit = !rep.critical_at_o || crit <= cfg.tol.critical;
  set_pass(r, ok_lap && ok_crit && rep.max_on_boundary);
  r.detail = {{"f_center", field.f_center()},
              {"laplacian_rel_residual", rep.laplacian_rel_residual},
              {"gradient_norm_at_o", rep.gradient_norm_at_o},
              {"critical_at_o", rep.critical_at_o},
              {"critical_integrals", {rep.critical_integrals[0], rep.critical_integrals[1], rep.critical_integrals[2]}},
              {"max_f", rep.max_f},
              {"max_shell", rep.max_shell},
              {"max_on_boundary", rep.max_on_boundary},
              {"dr", cfg.f.dr},
              {"shells", shells}};
  return r;
}

CheckResult check_example_pairing(const RunConfig& cfg, const EmbeddedSurface& s, const BoundaryData& bd,
                                  const std::vector<LorentzVec>& nulls) {
  CheckResult r;
  if (cfg.boundary.mode != HMode::preset_example1 && cfg.boundary.mode != HMode::preset_example2) {
    r.detail = {{"reason", "applies to the example presets only"}};
    return r;
  }
  const CriticalPoint cp = locate_critical_point(s, bd);
  const EmbeddedSurface moved = recenter(s, LorentzBoost::recentering(cp.point));
  const ScalarField u0 = initial_u(moved, bd);
  const MassVector m = mass_vector(leaf_at(moved, 0.0), u0, 1.0);
  const double worst = worst_pairing(m.vec, nulls);
  const double bound = cfg.tol.positivity * std::abs(m.vec.t);
  set_pass(r, worst <= bound && cp.converged);
  r.detail = {{"alpha", 1.0},
              {"center", vec_json(cp.point.vec)},
              {"center_converged", cp.converged},
              {"center_gradient_norm", cp.gradient_norm},
              {"mass", vec_json(m.vec)},
              {"worst_pairing", worst},
              {"bound", bound}};
  return r;
}

}  // namespace

BoundaryData boundary_for(const RunConfig& cfg, const EmbeddedSurface& s) {
  const std::size_t n = s.grid.size();
  BoundaryData bd{ScalarField(n)};
  const BoundarySpec& b = cfg.boundary;
  switch (b.mode) {
    case HMode::scale:
      for (std::size_t i = 0; i < n; ++i) bd.H[i] = s.H0[i] / b.c;
      break;
    case HMode::table:
      if (b.table.size() != n) throw ConfigError("boundary_H table does not match the grid");
      bd.H = ScalarField(b.table);
      break;
    case HMode::preset_example1: {
      double mean = 0.0;
      for (std::size_t i = 0; i < n; ++i) mean += s.H0[i];
      mean /= static_cast<double>(n);
      const double H = b.value ? *b.value : mean / b.c;
      for (std::size_t i = 0; i < n; ++i) bd.H[i] = H;
      break;
    }
    case HMode::preset_example2: {
      const SphereGrid& grid = s.grid;
      std::vector<double> mod(n, 0.0), w = area_weights(s.g, grid);
      std::vector<RealHarmonic> ys;
      for (const auto& t : b.terms) ys.emplace_back(t.l, t.m);
      for (int j = 0; j < grid.n_theta(); ++j) {
        for (int k = 0; k < grid.n_psi(); ++k) {
          double acc = 0.0;
          for (std::size_t q = 0; q < ys.size(); ++q) acc += b.terms[q].epsilon * ys[q](grid.theta(j), grid.psi(k));
          mod[grid.index(j, k)] = acc;
        }
      }
      // Project out phi_1..3 with the surface quadrature; they are mutually
      // orthogonal on this grid, so one pass suffices.
      for (int a = 0; a < 3; ++a) {
        std::vector<double> phi(n);
        for (int j = 0; j < grid.n_theta(); ++j) {
          for (int k = 0; k < grid.n_psi(); ++k) phi[grid.index(j, k)] = sphere_direction(grid.theta(j), grid.psi(k))[a];
        }
        double num = 0.0, den = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
          num += w[i] * mod[i] * phi[i];
          den += w[i] * phi[i] * phi[i];
        }
        const double coef = num / den;
        for (std::size_t i = 0; i < n; ++i) mod[i] -= coef * phi[i];
      }
      for (std::size_t i = 0; i < n; ++i) bd.H[i] = s.H0[i] / b.c * (1.0 + mod[i]);
      break;
    }
  }
  return bd;
}

RunOutcome execute(const RunConfig& cfg, WorkerPool* pool) {
  RunOutcome out;
  json& rep = out.report;
  rep["tool"] = "hypermass";
  rep["config_hash"] = "fnv1a64:" + hex64(fnv1a64(cfg.source_text));
  if (!cfg.source_path.empty()) rep["config_path"] = cfg.source_path.string();
  rep["config"] = config_summary(cfg);
  rep["tolerances"] = tolerances_json(cfg.tol);
  rep["backend"] = std::string(kernels::to_string(kernels::active_backend()));
  rep["threads"] = pool ? pool->workers() : configured_workers();
  rep["warnings"] = cfg.warnings;

  const SphereGrid grid(cfg.n_theta, cfg.n_psi);
  std::shared_ptr<EmbeddedSurface> surface;
  try {
    RadialSpec spec = cfg.surface;
    spec.kappa = cfg.kappa;
    surface = std::make_shared<EmbeddedSurface>(build_surface(spec, grid));
  } catch (const Error& e) {
    // GeometryError, or DomainError for a degenerate radial function
    out.exit_code = exit_hypothesis;
    out.message = std::string("surface construction failed: ") + e.what();
    rep["failure"] = {{"kind", "hypothesis"}, {"condition", "surface geometry"}, {"message", e.what()}};
    rep["exit_code"] = out.exit_code;
    return out;
  }
  out.surface = surface;
  BoundaryData bd;
  try {
    bd = boundary_for(cfg, *surface);
  } catch (const ConfigError& e) {
    out.exit_code = exit_config;
    out.message = std::string("config error: ") + e.what();
    rep["failure"] = {{"kind", "config"}, {"message", e.what()}};
    rep["exit_code"] = out.exit_code;
    return out;
  }
  out.boundary = bd;

  const HypothesisReport hyp = validate_hypotheses(*surface, bd);
  rep["hypotheses"] = hypotheses_json(hyp, grid);
  if (const ConditionResult* f = hyp.first_failure()) {
    out.exit_code = exit_hypothesis;
    out.message = "hypothesis failed: " + f->name;
    rep["failure"] = {{"kind", "hypothesis"}, {"condition", f->name}, {"margin", real(f->margin)}};
    if (f->worst_j >= 0) rep["failure"]["node"] = {{"j", f->worst_j}, {"k", f->worst_k}};
    rep["exit_code"] = out.exit_code;
    return out;
  }

  const RadiiAlpha ra = radii_and_alpha(*surface);
  rep["radii"] = {{"R1", ra.R1}, {"R2", ra.R2}, {"mu", ra.mu}, {"alpha", ra.alpha}};
  rep["alpha_used"] = cfg.alpha_override.value_or(ra.alpha);
  rep["alpha_source"] = cfg.alpha_override ? "override" : "radii";

  FlowControls ctl = cfg.flow;
  ctl.alpha_override = cfg.alpha_override;
  try {
    out.flow = run_flow(surface, bd, ctl, pool);
  } catch (const NumericalError& e) {
    out.exit_code = exit_numerical;
    out.message = std::string("numerical failure at rho = ") + format_real(e.rho()) + ": " + e.what();
    rep["failure"] = {{"kind", "numerical"}, {"rho", e.rho()}, {"message", e.what()}};
    rep["exit_code"] = out.exit_code;
    return out;
  }
  const FlowResult& flow = *out.flow;
  rep["flow"] = {{"steps", flow.steps}, {"min_step", flow.min_step}, {"samples", flow.samples.size()},
                 {"u0_min", flow.u0_min}, {"u0_max", flow.u0_max}};

  const std::vector<LorentzVec> nulls = sample_null_directions(100);
  for (const auto& s : flow.samples) {
    SeriesRow row;
    row.rho = s.rho;
    row.m = s.mass;
    row.m_norm_sq = inner(s.mass, s.mass);
    row.min_u = s.min_u;
    row.max_u = s.max_u;
    row.worst_pairing = worst_pairing(s.mass, nulls);
    out.series.push_back(row);
  }
  rep["mass"] = {{"m0", vec_json(flow.samples.front().mass)}, {"m_final", vec_json(flow.samples.back().mass)}};

  std::vector<LorentzVec> zetas = nulls;
  for (const auto& z : sample_timelike_directions(8)) zetas.push_back(z);

  json checks = json::object();
  bool all_pass = true;
  for (const std::string& name : known_checks()) {
    CheckResult r;
    if (!cfg.wants(name)) {
      r.detail = {{"reason", "not requested"}};
    } else {
      try {
        if (name == "positivity") r = check_positivity(cfg, flow, nulls);
        else if (name == "monotonicity") r = check_monotonicity(cfg, flow, zetas);
        else if (name == "leaf_bounds") r = check_leaf_bounds(cfg, flow);
        else if (name == "max_principle") r = check_max_principle(cfg, flow);
        else if (name == "limit") r = check_limit(cfg, flow);
        else if (name == "derivative") r = check_derivative(cfg, flow, nulls.front());
        else if (name == "f_functional") r = check_f(cfg, *surface, bd, ra.R1);
        else if (name == "example_pairing") r = check_example_pairing(cfg, *surface, bd, nulls);
      } catch (const Error& e) {
        r.status = "fail";
        r.detail = {{"reason", e.what()}};
      }
      // A requested check that cannot apply to this configuration is reported
      // as skipped with its reason; it does not fail the run.
    }
    if (r.status == "fail") {
      all_pass = false;
      if (out.message.empty()) out.message = "check failed: " + name;
    }
    json entry = r.detail;
    entry["status"] = r.status;
    checks[name] = entry;
  }
  rep["checks"] = checks;
  out.exit_code = all_pass ? exit_ok : exit_check;
  rep["exit_code"] = out.exit_code;
  return out;
}

void persist(const RunConfig& cfg, const RunOutcome& out, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  if (cfg.output.report) write_json(dir / "report.json", out.report);
  if (cfg.output.series && out.flow) write_series_csv(dir / "series.csv", out.series);
  if (cfg.output.fields && out.surface && out.boundary) {
    const EmbeddedSurface& s = *out.surface;
    std::vector<FieldColumn> cols = {{"r", s.r.values}, {"H0", s.H0.values}, {"K", s.K.values},
                                     {"H", out.boundary->H.values}};
    double rho = 0.0;
    if (out.flow) {
      cols.push_back({"u0", out.flow->samples.front().u_field().values});
      cols.push_back({"u_final", out.flow->samples.back().u_field().values});
      rho = out.flow->samples.back().rho;
    }
    write_field_dump(dir / "fields.txt", s.grid, s.kappa, rho, cols);
  }
}

namespace {

void print_summary(const RunOutcome& out, std::ostream& log) {
  if (out.report.contains("checks")) {
    for (auto it = out.report["checks"].begin(); it != out.report["checks"].end(); ++it) {
      log << "  " << it.key() << ": " << it.value()["status"].get<std::string>() << '\n';
    }
  }
  if (!out.message.empty()) log << out.message << '\n';
}

void print_warnings(const RunConfig& cfg) {
  for (const auto& w : cfg.warnings) std::cerr << "warning: " << w << '\n';
}

}  // namespace

int run_command(const std::filesystem::path& config, const std::optional<std::filesystem::path>& out_dir,
                std::ostream& log) {
  RunConfig cfg;
  try {
    cfg = load_config(config);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return exit_config;
  }
  print_warnings(cfg);
  const std::filesystem::path dir = out_dir.value_or(cfg.output.dir);
  RunOutcome out = execute(cfg);
  try {
    persist(cfg, out, dir);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return exit_config;
  }
  print_summary(out, log);
  log << "exit " << out.exit_code << " (artifacts in " << dir.string() << ")\n";
  return out.exit_code;
}

int check_command(const std::filesystem::path& config, std::ostream& log) {
  RunConfig cfg;
  try {
    cfg = load_config(config);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return exit_config;
  }
  print_warnings(cfg);
  RunOutcome out = execute(cfg);
  print_summary(out, log);
  log << "exit " << out.exit_code << '\n';
  return out.exit_code;
}

int sweep_command(const std::filesystem::path& config, const std::string& param, const std::string& values,
                  const std::optional<std::filesystem::path>& out_dir, std::ostream& log) {
  RunConfig base;
  std::vector<std::string> items;
  std::vector<RunConfig> cfgs;
  try {
    base = load_config(config);
    items = split_values(values);
    for (const auto& v : items) {
      RunConfig c = base;
      apply_parameter(c, param, v);
      cfgs.push_back(std::move(c));
    }
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return exit_config;
  }
  print_warnings(base);
  const std::filesystem::path dir = out_dir.value_or(base.output.dir);

  // Values run concurrently under the worker cap; each run's node loops get
  // an equal share of the remaining workers.
  const int cap = configured_workers();
  const int concurrent = std::max(1, std::min<int>(cap, static_cast<int>(cfgs.size())));
  const int per_run = std::max(1, cap / concurrent);
  std::vector<SweepRow> rows(cfgs.size());
  std::vector<int> codes(cfgs.size(), exit_ok);
  std::atomic<std::size_t> next{0};
  std::mutex log_mu;
  auto worker = [&]() {
    WorkerPool pool(per_run);
    for (std::size_t i = next++; i < cfgs.size(); i = next++) {
      const RunConfig& c = cfgs[i];
      RunOutcome out = execute(c, &pool);
      SweepRow& row = rows[i];
      row.value = items[i];
      row.exit_code = out.exit_code;
      row.status = out.exit_code == exit_ok ? "pass" : out.message;
      std::replace(row.status.begin(), row.status.end(), ',', ';');
      if (out.flow) {
        const FlowResult& f = *out.flow;
        row.has_flow = true;
        row.alpha = f.alpha;
        row.R1 = f.radii.R1;
        row.R2 = f.radii.R2;
        row.m0 = f.samples.front().mass;
        row.m_norm_sq0 = inner(row.m0, row.m0);
        row.worst_pairing0 = out.series.front().worst_pairing;
        row.m_final = f.samples.back().mass;
        row.m_norm_sq_final = inner(row.m_final, row.m_final);
      }
      try {
        persist(c, out, dir / (param + "=" + items[i]));
      } catch (const std::exception& e) {
        std::lock_guard<std::mutex> lk(log_mu);
        std::cerr << "error: " << e.what() << '\n';
      }
      codes[i] = out.exit_code;
      std::lock_guard<std::mutex> lk(log_mu);
      log << param << '=' << items[i] << ": exit " << out.exit_code << '\n';
    }
  };
  std::vector<std::thread> threads;
  for (int t = 1; t < concurrent; ++t) threads.emplace_back(worker);
  worker();
  for (auto& t : threads) t.join();

  try {
    write_sweep_csv(dir / "sweep.csv", param, rows);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return exit_config;
  }
  log << "sweep.csv written to " << dir.string() << '\n';
  return *std::max_element(codes.begin(), codes.end());
}

}  // namespace hypermass::cli
