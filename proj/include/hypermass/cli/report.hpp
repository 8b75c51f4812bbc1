#pragma once

// Machine-readable artifacts: series.csv, sweep.csv, report.json and field dumps.

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "hypermass/lorentz.hpp"
#include "hypermass/sphere_grid.hpp"

namespace hypermass::cli {

struct SeriesRow {
  double rho = 0.0;
  LorentzVec m;
  double m_norm_sq = 0.0;  // <m, m>
  double min_u = 1.0;
  double max_u = 1.0;
  double worst_pairing = 0.0;  // max over the sampled null directions of <m, zeta>
};

struct SweepRow {
  std::string value;
  int exit_code = 0;
  std::string status;
  double alpha = 0.0;
  double R1 = 0.0;
  double R2 = 0.0;
  LorentzVec m0;
  double m_norm_sq0 = 0.0;
  double worst_pairing0 = 0.0;
  LorentzVec m_final;
  double m_norm_sq_final = 0.0;
  bool has_flow = false;
};

std::uint64_t fnv1a64(std::string_view bytes);
std::string hex64(std::uint64_t x);

/// Shortest decimal text that reads back to the same double.
std::string format_real(double x);

void write_series_csv(const std::filesystem::path& path, const std::vector<SeriesRow>& rows);
void write_sweep_csv(const std::filesystem::path& path, const std::string& param, const std::vector<SweepRow>& rows);
void write_json(const std::filesystem::path& path, const nlohmann::json& js);

struct FieldColumn {
  std::string name;
  std::vector<double> values;
};

/// Whitespace table, one row per node in flat (j, k) order, preceded by a
/// '#' header giving the grid, kappa, rho and the column names.
void write_field_dump(const std::filesystem::path& path, const SphereGrid& grid, double kappa, double rho,
                      const std::vector<FieldColumn>& columns);

}  // namespace hypermass::cli
