#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "lindlab/perturb.hpp"

namespace lindlab {

/// Deliberate defects injected into the model to prove the checks can fail.
enum class Fixture {
  None,
  /// L rho L^dagger enters with a minus sign.
  DissipatorSignFlip,
  /// Dephasing on site 1 only.
  SingleSiteNoise,
  /// S^x dephasing on the unrestricted basis.
  SxDephasing,
};

Fixture parse_fixture(const std::string& name);
std::string to_string(Fixture f);

struct VerifyOptions {
  std::vector<int> sizes{2, 4, 6};
  double anisotropy = 0.3;
  double j_coupling = 1.0;
  double gamma = 0.01;
  Fixture fixture = Fixture::None;
  std::uint64_t seed = 12345;
};

struct CheckResult {
  std::string name;
  int n_sites = 0;
  double residual = 0.0;
  double tolerance = 0.0;
  bool passed = false;
  std::string note;
};

struct VerifyReport {
  VerifyOptions options;
  std::vector<CheckResult> checks;

  bool all_passed() const;
  std::size_t failures() const;
  /// First check with this name and size, or nullptr.
  const CheckResult* find(const std::string& name, int n_sites) const;
};

/// Runs every structural invariant of the model at each requested size.
VerifyReport run_invariant_suite(const VerifyOptions& options);

}  // namespace lindlab
