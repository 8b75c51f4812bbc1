#pragma once

// Run configuration: JSON schema, validation and sweep parameter edits.
//
// {
//   "kappa": 1.0,
//   "grid": {"n_theta": 64, "n_psi": 128},
//   "surface": {"mode": "round" | "harmonic" | "table", "R0": 1.0,
//               "terms": [{"l": 2, "m": 0, "epsilon": 0.05}],
//               "values": [...] | "file": "r.txt"},
//   "boundary_H": {"mode": "scale" | "table" | "preset_example1" | "preset_example2",
//                  "c": 2.0, "value": 1.3, "values": [...] | "file": "H.txt",
//                  "terms": [{"l": 2, "m": 0, "delta": 0.1}]},
//   "flow": {"rho_max": 8.0, "cfl": 0.4, "sample_every": 0.05, "scheme": "heun",
//            "max_step": 0.001, "leaf_bounds": true},
//   "checks": ["positivity", "monotonicity", ...],
//   "alpha_override": null,
//   "tolerances": {"positivity": 1e-6, ...},
//   "f_functional": {"dr": 0.05, "shells": 0, "n_theta": 16, "n_psi": 32},
//   "output": {"dir": "out", "series": true, "report": true, "fields": false}
// }

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "hypermass/qs_flow.hpp"
#include "hypermass/surface.hpp"

namespace hypermass::cli {

enum class HMode { scale, table, preset_example1, preset_example2 };

struct BoundarySpec {
  HMode mode = HMode::scale;
  double c = 2.0;                        // H = H0 / c (scale, presets)
  std::optional<double> value;           // example 1: constant H
  std::vector<double> table;             // per node, row-major (j, k)
  std::vector<HarmonicTerm> terms;       // example 2: relative modulation, l != 1
};

struct Tolerances {
  double positivity = 1e-6;     // relative to |m(0)_t|
  double monotonicity = 1e-6;   // relative to the series scale
  double pointwise = 1e-10;
  double leaf_bounds = 1e-8;
  double limit = 1e-4;          // relative to |m(0)|
  double derivative = 1e-3;
  double f_laplacian = 2e-2;
  double critical = 1e-8;
  double max_principle = 1e-8;
};

struct FSubgrid {
  double dr = 0.05;
  int shells = 0;  // 0: as many as fit strictly inside R1
  int n_theta = 16;
  int n_psi = 32;
};

struct OutputSpec {
  std::filesystem::path dir = "out";
  bool series = true;
  bool report = true;
  bool fields = false;
};

/// Every check suite the pipeline knows, in report order.
const std::vector<std::string>& known_checks();

struct RunConfig {
  std::string source_text;  // raw bytes hashed into the report
  std::filesystem::path source_path;
  double kappa = 1.0;
  int n_theta = 64;
  int n_psi = 128;
  RadialSpec surface = RadialSpec::round(1.0, 1.0);
  BoundarySpec boundary;
  FlowControls flow;
  std::vector<std::string> checks;  // requested suites; empty selects all
  std::optional<double> alpha_override;
  Tolerances tol;
  FSubgrid f;
  OutputSpec output;
  std::vector<std::string> warnings;

  bool wants(const std::string& check) const;
};

/// Throws ConfigError on malformed or inconsistent input.  Relative file
/// references resolve against `base_dir`.
RunConfig parse_config(const std::string& text, const std::filesystem::path& base_dir);
RunConfig load_config(const std::filesystem::path& path);

/// Sweepable names: kappa, c, R0, alpha_override (the token "default" clears
/// it), epsilon(l,m).  Throws ConfigError for unknown names or bad values.
void apply_parameter(RunConfig& cfg, const std::string& name, const std::string& value);

/// Splits "a,b,c" and trims blanks; empty items are a ConfigError.
std::vector<std::string> split_values(const std::string& list);

}  // namespace hypermass::cli
