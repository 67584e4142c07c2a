#include "config.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

namespace lindlab::cli {

Command parse_command(const std::string& name) {
  if (name == "spectrum") return Command::Spectrum;
  if (name == "variance-scan") return Command::VarianceScan;
  if (name == "quench") return Command::Quench;
  if (name == "rate-scan") return Command::RateScan;
  if (name == "perturb") return Command::Perturb;
  if (name == "verify") return Command::Verify;
  throw ConfigError("unknown command '" + name +
                    "' (expected spectrum, variance-scan, quench, rate-scan, perturb or verify)");
}

std::string to_string(Command c) {
  switch (c) {
    case Command::Spectrum: return "spectrum";
    case Command::VarianceScan: return "variance-scan";
    case Command::Quench: return "quench";
    case Command::RateScan: return "rate-scan";
    case Command::Perturb: return "perturb";
    case Command::Verify: return "verify";
  }
  return "spectrum";
}

std::vector<double> RunConfig::scan_grid() const {
  if (!gamma_grid.empty()) return gamma_grid;
  std::vector<double> grid;
  if (gamma_points == 1) return {gamma_min};
  const double lo = std::log(gamma_min), hi = std::log(gamma_max);
  for (int k = 0; k < gamma_points; ++k) grid.push_back(std::exp(lo + (hi - lo) * k / (gamma_points - 1)));
  return grid;
}

std::vector<double> RunConfig::time_grid() const {
  std::vector<double> t(static_cast<std::size_t>(samples));
  for (int k = 0; k < samples; ++k) t[static_cast<std::size_t>(k)] = t_max * k / (samples - 1);
  return t;
}

namespace {

template <typename T>
void read(const nlohmann::json& j, const char* key, T& out) {
  try {
    out = j.at(key).get<T>();
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("config key '") + key + "': " + e.what());
  }
}

}  // namespace

RunConfig apply_json(RunConfig c, const nlohmann::json& j) {
  if (!j.is_object()) throw ConfigError("config must be a flat JSON object");
  for (const auto& [key, value] : j.items()) {
    if (key == "command") {
      std::string s;
      read(j, "command", s);
      c.command = parse_command(s);
    } else if (key == "n_sites") read(j, "n_sites", c.n_sites);
    else if (key == "anisotropy") read(j, "anisotropy", c.anisotropy);
    else if (key == "j_coupling") read(j, "j_coupling", c.j_coupling);
    else if (key == "gamma") read(j, "gamma", c.gamma);
    else if (key == "gamma_grid") read(j, "gamma_grid", c.gamma_grid);
    else if (key == "gamma_min") read(j, "gamma_min", c.gamma_min);
    else if (key == "gamma_max") read(j, "gamma_max", c.gamma_max);
    else if (key == "gamma_points") read(j, "gamma_points", c.gamma_points);
    else if (key == "t_max") read(j, "t_max", c.t_max);
    else if (key == "samples") read(j, "samples", c.samples);
    else if (key == "rtol") read(j, "rtol", c.rtol);
    else if (key == "atol") read(j, "atol", c.atol);
    else if (key == "axis_tolerance") read(j, "axis_tolerance", c.axis_tolerance);
    else if (key == "fit_t_min") read(j, "fit_t_min", c.fit_t_min);
    else if (key == "fit_t_max") read(j, "fit_t_max", c.fit_t_max);
    else if (key == "fit_floor") read(j, "fit_floor", c.fit_floor);
    else if (key == "output_dir") read(j, "output_dir", c.output_dir);
    else if (key == "seed") read(j, "seed", c.seed);
    else if (key == "fixture") read(j, "fixture", c.fixture);
    else if (key == "verify_sizes") read(j, "verify_sizes", c.verify_sizes);
    else throw ConfigError("unknown config key '" + key + "'");
  }
  return c;
}

RunConfig load_config_file(const std::filesystem::path& path, RunConfig base) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path.string());
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("config file " + path.string() + " is not valid JSON: " + e.what());
  }
  return apply_json(std::move(base), j);
}

namespace {

void require(bool ok, const std::string& message) {
  if (!ok) throw ConfigError(message);
}

bool finite_positive(double x) { return std::isfinite(x) && x > 0.0; }

}  // namespace

void validate(const RunConfig& c) {
  require(c.n_sites >= 2, "n_sites must be >= 2");
  require(std::isfinite(c.anisotropy), "anisotropy must be finite");
  require(finite_positive(c.j_coupling), "j_coupling must be positive");
  require(std::isfinite(c.gamma) && c.gamma >= 0.0, "gamma must be non-negative");
  for (double g : c.gamma_grid) require(std::isfinite(g) && g >= 0.0, "gamma_grid entries must be non-negative");
  require(finite_positive(c.gamma_min) && finite_positive(c.gamma_max) && c.gamma_min <= c.gamma_max,
          "need 0 < gamma_min <= gamma_max");
  require(c.gamma_points >= 1, "gamma_points must be >= 1");
  require(finite_positive(c.t_max), "t_max must be positive");
  require(c.samples >= 2, "samples must be >= 2");
  require(finite_positive(c.rtol) && finite_positive(c.atol), "rtol and atol must be positive");
  require(finite_positive(c.axis_tolerance), "axis_tolerance must be positive");
  require(c.fit_t_min >= 0.0 && c.fit_t_min < c.fit_end(), "fit window must satisfy 0 <= fit_t_min < fit_t_max");
  require(c.fit_floor >= 0.0, "fit_floor must be non-negative");
  require(!c.output_dir.empty(), "output_dir must not be empty");

  switch (c.command) {
    case Command::Spectrum:
      require(c.n_sites <= 8, "spectrum needs n_sites <= 8 (dense eigensolver)");
      require(c.n_sites % 2 == 0, "spectrum needs an even n_sites (zero-magnetization sector)");
      break;
    case Command::VarianceScan:
      require(c.n_sites <= 8 && c.n_sites % 2 == 0, "variance-scan needs an even n_sites <= 8");
      for (double g : c.scan_grid()) require(g > 0.0, "variance-scan needs positive gamma values");
      break;
    case Command::Quench:
    case Command::RateScan:
      require(c.n_sites <= 12 && c.n_sites % 2 == 0, "quench needs an even n_sites <= 12");
      if (c.command == Command::RateScan) {
        require(!c.gamma_grid.empty(), "rate-scan needs an explicit gamma_grid");
        bool has_zero = false;
        for (double g : c.gamma_grid) has_zero = has_zero || g == 0.0;
        require(has_zero, "rate-scan needs gamma = 0 in gamma_grid");
      }
      break;
    case Command::Perturb:
      require(c.n_sites <= 8 && c.n_sites % 2 == 0, "perturb needs an even n_sites <= 8");
      require(c.scan_grid().size() >= 2, "perturb needs at least two gamma values");
      for (double g : c.scan_grid()) require(g > 0.0, "perturb needs positive gamma values");
      break;
    case Command::Verify:
      require(!c.verify_sizes.empty(), "verify_sizes must not be empty");
      for (int n : c.verify_sizes) require(n >= 2 && n <= 8 && n % 2 == 0, "verify_sizes must be even and in [2, 8]");
      require(c.gamma > 0.0, "verify needs gamma > 0");
      break;
  }
}

nlohmann::ordered_json to_json(const RunConfig& c) {
  nlohmann::ordered_json j;
  j["command"] = to_string(c.command);
  j["n_sites"] = c.n_sites;
  j["anisotropy"] = c.anisotropy;
  j["j_coupling"] = c.j_coupling;
  j["gamma"] = c.gamma;
  j["gamma_grid"] = c.gamma_grid;
  j["gamma_min"] = c.gamma_min;
  j["gamma_max"] = c.gamma_max;
  j["gamma_points"] = c.gamma_points;
  j["t_max"] = c.t_max;
  j["samples"] = c.samples;
  j["rtol"] = c.rtol;
  j["atol"] = c.atol;
  j["axis_tolerance"] = c.axis_tolerance;
  j["fit_t_min"] = c.fit_t_min;
  j["fit_t_max"] = c.fit_t_max;
  j["fit_floor"] = c.fit_floor;
  j["output_dir"] = c.output_dir;
  j["seed"] = c.seed;
  j["fixture"] = c.fixture;
  j["verify_sizes"] = c.verify_sizes;
  return j;
}

std::string header_comment(const RunConfig& c) {
  std::ostringstream out;
  out << "# " << kToolVersion << "\n";
  const auto j = to_json(c);
  for (const auto& [key, value] : j.items()) out << "# " << key << " = " << value.dump() << "\n";
  return out.str();
}

}  // namespace lindlab::cli
