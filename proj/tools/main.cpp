#include <iostream>

#include <CLI11.hpp>

#include "commands.hpp"

using lindlab::cli::RunConfig;

int main(int argc, char** argv) {
  CLI::App app{"Liouvillian spectra, symmetry sectors and quench dynamics of the dephased XXZ chain"};
  app.set_version_flag("--version", lindlab::cli::kToolVersion);

  std::string command;
  std::string config_file;
  app.add_option("command", command, "spectrum | variance-scan | quench | rate-scan | perturb | verify")->required();
  app.add_option("-c,--config", config_file, "flat JSON config file; flags override it");

  // Each flag overrides the config key of the same name (dashes become underscores).
  nlohmann::json overrides = nlohmann::json::object();
  auto number = [&](const std::string& flag, const std::string& key, const std::string& help) {
    app.add_option_function<double>(flag, [&overrides, key](double v) { overrides[key] = v; }, help);
  };
  auto integer = [&](const std::string& flag, const std::string& key, const std::string& help) {
    app.add_option_function<long long>(flag, [&overrides, key](long long v) { overrides[key] = v; }, help);
  };
  integer("-N,--n-sites", "n_sites", "chain length");
  number("--anisotropy", "anisotropy", "XXZ anisotropy Delta");
  number("--j-coupling", "j_coupling", "exchange coupling J");
  number("-g,--gamma", "gamma", "dephasing strength");
  app.add_option_function<std::vector<double>>(
      "--gamma-grid", [&](const std::vector<double>& v) { overrides["gamma_grid"] = v; }, "explicit gamma values")
      ->delimiter(',');
  number("--gamma-min", "gamma_min", "lower end of the logarithmic grid");
  number("--gamma-max", "gamma_max", "upper end of the logarithmic grid");
  integer("--gamma-points", "gamma_points", "points in the logarithmic grid");
  number("--t-max", "t_max", "end of the time window (1/J)");
  integer("--samples", "samples", "time samples including t = 0");
  number("--rtol", "rtol", "integrator relative tolerance");
  number("--atol", "atol", "integrator absolute tolerance");
  number("--axis-tolerance", "axis_tolerance", "symmetry-axis tolerance relative to ||L||");
  number("--fit-t-min", "fit_t_min", "start of the envelope-fit window");
  number("--fit-t-max", "fit_t_max", "end of the envelope-fit window (<= 0: t_max)");
  number("--fit-floor", "fit_floor", "smallest peak kept by the envelope fit");
  app.add_option_function<std::string>(
      "-o,--output-dir", [&](const std::string& v) { overrides["output_dir"] = v; }, "output directory");
  integer("--seed", "seed", "seed for randomized checks");
  app.add_option_function<std::string>(
      "--fixture", [&](const std::string& v) { overrides["fixture"] = v; },
      "verify fixture: none | dissipator-sign-flip | single-site-noise | sx-dephasing");
  app.add_option_function<std::vector<int>>(
      "--verify-sizes", [&](const std::vector<int>& v) { overrides["verify_sizes"] = v; }, "chain lengths for verify")
      ->delimiter(',');

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : lindlab::cli::kValidationError;
  }

  RunConfig config;
  try {
    if (!config_file.empty()) config = lindlab::cli::load_config_file(config_file);
    overrides["command"] = command;
    config = lindlab::cli::apply_json(config, overrides);
  } catch (const lindlab::cli::ConfigError& e) {
    std::cerr << "configuration error: " << e.what() << "\n";
    return lindlab::cli::kValidationError;
  }

  const auto result = lindlab::cli::run_command(config, std::cerr);
  for (const auto& f : result.files) std::cout << f.string() << "\n";
  return result.exit_code;
}
