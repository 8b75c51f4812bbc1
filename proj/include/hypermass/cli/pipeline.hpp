#pragma once

// run / check / sweep front-ends.  Exit codes: 0 all configured checks pass,
// 1 config error, 2 hypothesis failure, 3 numerical failure, 4 a check failed.

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "hypermass/cli/config.hpp"
#include "hypermass/cli/report.hpp"
#include "hypermass/parallel.hpp"

namespace hypermass::cli {

enum ExitCode : int { exit_ok = 0, exit_config = 1, exit_hypothesis = 2, exit_numerical = 3, exit_check = 4 };

/// Prescribed H for the configured mode.  Example 2 removes the discrete l = 1
/// component of the modulation so H is orthogonal to phi_1..3 in quadrature.
BoundaryData boundary_for(const RunConfig& cfg, const EmbeddedSurface& s);

struct RunOutcome {
  int exit_code = exit_ok;
  std::string message;  // failure summary for the console
  nlohmann::json report;
  std::vector<SeriesRow> series;
  std::shared_ptr<const EmbeddedSurface> surface;
  std::optional<BoundaryData> boundary;
  std::optional<FlowResult> flow;
};

/// Runs the full pipeline; never throws for config-independent failures
/// (they become exit codes in the outcome).
RunOutcome execute(const RunConfig& cfg, WorkerPool* pool = nullptr);

/// Writes series.csv / report.json / fields.txt as requested by cfg.output.
void persist(const RunConfig& cfg, const RunOutcome& out, const std::filesystem::path& dir);

int run_command(const std::filesystem::path& config, const std::optional<std::filesystem::path>& out_dir,
                std::ostream& log);
int check_command(const std::filesystem::path& config, std::ostream& log);
int sweep_command(const std::filesystem::path& config, const std::string& param, const std::string& values,
                  const std::optional<std::filesystem::path>& out_dir, std::ostream& log);

}  // namespace hypermass::cli
