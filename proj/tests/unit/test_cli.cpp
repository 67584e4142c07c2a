#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "commands.hpp"

using namespace lindlab::cli;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

fs::path scratch_dir(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("lindlab_cli_test_" + name);
  fs::remove_all(p);
  return p;
}

RunConfig from(const nlohmann::json& j) { return apply_json(RunConfig{}, j); }

}  // namespace

TEST_CASE("flat JSON overrides defaults and rejects unknown keys") {
  const auto c = from({{"command", "quench"}, {"n_sites", 8}, {"gamma_grid", {0.0, 0.01}}});
  CHECK(c.command == Command::Quench);
  CHECK(c.n_sites == 8);
  CHECK(c.gamma_grid.size() == 2);
  CHECK(c.anisotropy == 0.3);
  CHECK_THROWS_AS(from({{"n_site", 8}}), ConfigError);
  CHECK_THROWS_AS(from({{"n_sites", "eight"}}), ConfigError);
  CHECK_THROWS_AS(from(nlohmann::json::array()), ConfigError);
  CHECK_THROWS_AS(parse_command("nope"), ConfigError);
}

TEST_CASE("config JSON round-trips") {
  const auto c = from({{"command", "perturb"}, {"gamma_grid", {2e-4, 1e-4}}, {"fit_t_max", 7.0}});
  const auto back = apply_json(RunConfig{}, nlohmann::json::parse(to_json(c).dump()));
  CHECK(to_json(back) == to_json(c));
  CHECK(header_comment(c).rfind("# ", 0) == 0);
  CHECK(header_comment(c).find(kToolVersion) != std::string::npos);
}

TEST_CASE("validation rejects out-of-range parameters") {
  auto bad = [](const nlohmann::json& j) { CHECK_THROWS_AS(validate(from(j)), ConfigError); };
  bad({{"n_sites", 7}});
  bad({{"n_sites", 10}});
  bad({{"gamma", -0.1}});
  bad({{"t_max", 0.0}});
  bad({{"samples", 1}});
  bad({{"command", "rate-scan"}, {"gamma_grid", {0.01, 0.02}}});
  bad({{"command", "quench"}, {"n_sites", 14}});
  bad({{"command", "verify"}, {"verify_sizes", {3}}});
  bad({{"command", "variance-scan"}, {"gamma_grid", {0.0, 0.1}}});
  bad({{"fit_t_min", 20.0}});
  CHECK_NOTHROW(validate(from({{"command", "quench"}, {"n_sites", 12}})));
}

TEST_CASE("log grid spans the configured range") {
  const auto c = from({{"gamma_min", 1e-5}, {"gamma_max", 1e-1}, {"gamma_points", 5}});
  const auto g = c.scan_grid();
  REQUIRE(g.size() == 5);
  CHECK(g.front() == doctest::Approx(1e-5));
  CHECK(g[2] == doctest::Approx(1e-3));
  CHECK(g.back() == doctest::Approx(1e-1));
  CHECK(c.time_grid().size() == 561);
}

TEST_CASE("spectrum output is byte-identical across runs") {
  std::ostringstream err;
  std::vector<std::string> contents;
  for (int run = 0; run < 2; ++run) {
    const auto dir = scratch_dir("spectrum");
    const auto c = from({{"command", "spectrum"}, {"n_sites", 4}, {"gamma", 0.05}, {"output_dir", dir.string()}});
    const auto result = run_command(c, err);
    REQUIRE(result.exit_code == kSuccess);
    REQUIRE(!result.files.empty());
    std::string all;
    for (const auto& f : result.files) all += f.filename().string() + "\n" + slurp(f);
    contents.push_back(all);
    fs::remove_all(dir);
  }
  CHECK(contents[0] == contents[1]);
  CHECK(contents[0].find("# n_sites = 4") != std::string::npos);
}

TEST_CASE("exit codes") {
  std::ostringstream err;
  const auto dir = scratch_dir("codes");
  CHECK(run_command(from({{"command", "spectrum"}, {"n_sites", 5}, {"output_dir", dir.string()}}), err).exit_code ==
        kValidationError);
  const auto fail = run_command(from({{"command", "verify"},
                                      {"verify_sizes", {4}},
                                      {"fixture", "single-site-noise"},
                                      {"output_dir", dir.string()}}),
                                err);
  CHECK(fail.exit_code == kInvariantFailure);
  const auto ok = run_command(from({{"command", "verify"}, {"verify_sizes", {2, 4}}, {"output_dir", dir.string()}}), err);
  CHECK(ok.exit_code == kSuccess);
  CHECK(fs::exists(dir / "verify.json"));
  const auto unknown =
      run_command(from({{"command", "verify"}, {"fixture", "nonsense"}, {"output_dir", dir.string()}}), err);
  CHECK(unknown.exit_code == kValidationError);
  fs::remove_all(dir);
}

TEST_CASE("quench writes trajectories and envelope fits") {
  std::ostringstream err;
  const auto dir = scratch_dir("quench");
  const auto r = run_command(
      from({{"command", "rate-scan"}, {"n_sites", 6}, {"gamma_grid", {0.0, 0.05}}, {"samples", 281},
            {"output_dir", dir.string()}}),
      err);
  INFO(err.str());
  REQUIRE(r.exit_code == kSuccess);
  CHECK(fs::exists(dir / "rates_N6.csv"));
  CHECK(r.summary.contains("regression"));
  fs::remove_all(dir);
}
