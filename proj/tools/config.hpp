#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

namespace lindlab::cli {

inline constexpr const char* kToolVersion = "lindlab 1.0.0";

/// Invalid or inconsistent configuration; maps to exit code 1.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class Command { Spectrum, VarianceScan, Quench, RateScan, Perturb, Verify };

Command parse_command(const std::string& name);
std::string to_string(Command c);

struct RunConfig {
  Command command = Command::Spectrum;
  int n_sites = 6;
  double anisotropy = 0.3;
  double j_coupling = 1.0;
  double gamma = 0.01;
  /// Explicit grid; when empty, scans use the logarithmic grid below.
  std::vector<double> gamma_grid;
  double gamma_min = 1e-5;
  double gamma_max = 1e-1;
  int gamma_points = 25;

  double t_max = 14.0;
  int samples = 561;
  double rtol = 1e-9;
  double atol = 1e-12;
  /// Axis tolerance relative to ||L||.
  double axis_tolerance = 1e-7;
  double fit_t_min = 0.0;
  /// Non-positive means t_max.
  double fit_t_max = 0.0;
  double fit_floor = 1e-4;

  std::string output_dir = "out";
  std::uint64_t seed = 12345;
  std::string fixture = "none";
  std::vector<int> verify_sizes{2, 4, 6};

  /// Grid a scan should use: gamma_grid, or gamma_points log-spaced values.
  std::vector<double> scan_grid() const;
  std::vector<double> time_grid() const;
  double fit_end() const { return fit_t_max > 0.0 ? fit_t_max : t_max; }
};

/// Overlays the keys of a flat JSON object onto `base`; unknown keys are errors.
RunConfig apply_json(RunConfig base, const nlohmann::json& j);
RunConfig load_config_file(const std::filesystem::path& path, RunConfig base = {});

/// Throws ConfigError naming the first offending field.
void validate(const RunConfig& config);

nlohmann::ordered_json to_json(const RunConfig& config);

/// '#'-prefixed lines: tool version and the full config echo.
std::string header_comment(const RunConfig& config);

}  // namespace lindlab::cli
