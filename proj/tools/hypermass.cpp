#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "hypermass/cli/pipeline.hpp"
#include "hypermass/error.hpp"

int main(int argc, char** argv) {
  using namespace hypermass::cli;

  CLI::App app{"hypermass: quasi-local mass of convex surfaces in hyperbolic space"};
  app.require_subcommand(1);

  std::string run_config, run_out;
  auto* run = app.add_subcommand("run", "run the flow and checks, write series.csv and report.json");
  run->add_option("config", run_config, "JSON configuration")->required();
  run->add_option("--out", run_out, "output directory (overrides output.dir)");

  std::string sweep_config, sweep_out, param, values;
  auto* sweep = app.add_subcommand("sweep", "repeat a run over values of one parameter, write sweep.csv");
  sweep->add_option("config", sweep_config, "JSON configuration")->required();
  sweep->add_option("--param", param, "kappa | c | R0 | alpha_override | epsilon(l,m)")->required();
  sweep->add_option("--values", values, "comma-separated values")->required();
  sweep->add_option("--out", sweep_out, "output directory (overrides output.dir)");

  std::string check_config;
  auto* check = app.add_subcommand("check", "run the checks and print the verdicts; writes nothing");
  check->add_option("config", check_config, "JSON configuration")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : exit_config;
  }

  auto opt_path = [](const std::string& s) -> std::optional<std::filesystem::path> {
    if (s.empty()) return std::nullopt;
    return std::filesystem::path(s);
  };

  try {
    if (*run) return run_command(run_config, opt_path(run_out), std::cout);
    if (*sweep) return sweep_command(sweep_config, param, values, opt_path(sweep_out), std::cout);
    if (*check) return check_command(check_config, std::cout);
  } catch (const ::hypermass::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return exit_config;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return exit_numerical;
  }
  return exit_config;
}
