#include "commands.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <ostream>

#include "lindlab/dynamics.hpp"
#include "lindlab/perturb.hpp"
#include "lindlab/verify.hpp"

namespace lindlab::cli {

namespace fs = std::filesystem;

namespace {

std::string num(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

// Short form used in file names.
std::string tag(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%g", x);
  return buf;
}

class CsvWriter {
 public:
  CsvWriter(const fs::path& path, const RunConfig& config, const std::vector<std::string>& columns)
      : out_(path) {
    if (!out_) throw DomainError("cannot write " + path.string());
    out_ << header_comment(config);
    for (std::size_t k = 0; k < columns.size(); ++k) out_ << (k ? "," : "") << columns[k];
    out_ << "\n";
  }
  template <typename... Ts>
  void row(const Ts&... cells) {
    bool first = true;
    ((out_ << (first ? "" : ",") << cell(cells), first = false), ...);
    out_ << "\n";
  }

 private:
  static std::string cell(double x) { return num(x); }
  static std::string cell(const std::string& s) { return s; }
  static std::string cell(const char* s) { return s; }
  static std::string cell(std::size_t n) { return std::to_string(n); }
  static std::string cell(int n) { return std::to_string(n); }
  static std::string cell(bool b) { return b ? "1" : "0"; }

  std::ofstream out_;
};

void write_json(const fs::path& path, const RunConfig& config, const nlohmann::ordered_json& body) {
  nlohmann::ordered_json doc;
  doc["tool_version"] = kToolVersion;
  doc["config"] = to_json(config);
  for (const auto& [k, v] : body.items()) doc[k] = v;
  std::ofstream out(path);
  if (!out) throw DomainError("cannot write " + path.string());
  out << doc.dump(2) << "\n";
}

fs::path prepare_dir(const RunConfig& config) {
  const fs::path dir(config.output_dir);
  fs::create_directories(dir);
  return dir;
}

// XXZ chain with S^z dephasing in the zero-magnetization sector.
struct Model {
  BasisPtr basis;
  SparseOperator hamiltonian;
  std::vector<SparseOperator> jumps;

  explicit Model(const RunConfig& c)
      : basis(build_basis(c.n_sites, 0.0)),
        hamiltonian(build_xxz_hamiltonian(basis, CouplingSpec{c.j_coupling, c.anisotropy, {}})),
        jumps(build_dephasing_jumps(basis)) {}

  LiouvillianFactory factory(bool assemble) const {
    return [this, assemble](double g) {
      LiouvillianOptions opts;
      opts.assemble_matrix = assemble;
      return build_liouvillian(hamiltonian, jumps, g, opts);
    };
  }
};

nlohmann::ordered_json label_map(const std::map<SectorLabel, double>& m) {
  nlohmann::ordered_json j = nlohmann::ordered_json::object();
  for (const auto& [label, v] : m) j[to_string(label)] = v;
  return j;
}

nlohmann::ordered_json fit_json(const EnvelopeFit& fit) {
  nlohmann::ordered_json j;
  j["rate"] = fit.rate;
  j["rate_error"] = fit.rate_error;
  j["intercept"] = fit.intercept;
  j["r_squared"] = fit.r_squared;
  nlohmann::ordered_json ex = nlohmann::ordered_json::array();
  for (const auto& e : fit.extrema) ex.push_back({e.time, e.magnitude});
  j["extrema"] = ex;
  j["residuals"] = fit.residuals;
  return j;
}

EvolveOptions evolve_options(const RunConfig& c) {
  EvolveOptions o;
  o.rtol = c.rtol;
  o.atol = c.atol;
  return o;
}

EnvelopeOptions envelope_options(const RunConfig& c) {
  EnvelopeOptions o;
  o.floor = c.fit_floor;
  o.t_min = c.fit_t_min;
  o.t_max = c.fit_end();
  return o;
}

fs::path write_trajectory(const fs::path& dir, const RunConfig& c, const Trajectory& traj, double gamma) {
  const fs::path path = dir / ("quench_N" + std::to_string(c.n_sites) + "_g" + tag(gamma) + ".csv");
  CsvWriter csv(path, c, {"t", "staggered_magnetization", "trace_dev"});
  const auto& v = traj.values.front();
  for (std::size_t k = 0; k < traj.times.size(); ++k) csv.row(traj.times[k], v[k], traj.trace_deviation[k]);
  return path;
}

}  // namespace

CommandResult run_spectrum(const RunConfig& c) {
  CommandResult res;
  const fs::path dir = prepare_dir(c);
  const Model model(c);
  const SectorDecomposition sectors(model.basis);
  const Superoperator liou = model.factory(true)(c.gamma);
  const SpectrumResult spec = full_spectrum(liou, sectors);
  const double tol = c.axis_tolerance * spec.norm;
  const AxisClassification axes = classify_axes(spec, tol, tol);

  std::vector<std::string> axis(spec.size(), "off");
  for (auto m : axes.on_real_axis) axis[m] = "real";
  for (auto m : axes.on_vertical_axis) axis[m] = "vertical";

  const std::string stem = "spectrum_N" + std::to_string(c.n_sites) + "_g" + tag(c.gamma);
  {
    CsvWriter csv(dir / (stem + ".csv"), c, {"index", "re", "im", "sector", "axis", "defective"});
    for (std::size_t m = 0; m < spec.size(); ++m)
      csv.row(m, spec.eigenvalues[m].real(), spec.eigenvalues[m].imag(), to_string(spec.labels[m]), axis[m],
              static_cast<bool>(spec.defective[m]));
  }
  res.files.push_back(dir / (stem + ".csv"));

  nlohmann::ordered_json s;
  s["n_modes"] = spec.size();
  s["norm"] = spec.norm;
  s["delta"] = spec.delta;
  s["axis_tolerance"] = tol;
  if (c.gamma > 0.0) {
    const GapResult gap = dissipative_gap(spec);
    s["gap"] = gap.global;
    s["gap_per_sector"] = label_map(gap.per_sector);
    const auto flip = build_spin_flip(model.basis);
    s["pt_residual"] = check_pt_symmetry(traceless_part(liou), left_multiplication(flip));
  }
  std::size_t zeros = 0;
  for (const auto& l : spec.eigenvalues) zeros += std::abs(l) <= tol ? 1 : 0;
  s["zero_modes"] = zeros;
  s["on_real_axis"] = axes.on_real_axis.size();
  s["on_vertical_axis"] = axes.on_vertical_axis.size();
  s["off_axis"] = axes.off_axis.size();
  s["max_axis_distance"] = axes.max_axis_distance;
  s["pt_broken"] = !axes.off_axis.empty();
  s["gamma_pt_estimate"] = gamma_pt_estimate(c.n_sites, c.j_coupling);
  s["defective_modes"] = spec.defective_count();
  s["flagged"] = spec.flagged();
  write_json(dir / (stem + ".json"), c, s);
  res.files.push_back(dir / (stem + ".json"));
  res.summary = s;
  return res;
}

CommandResult run_variance_scan(const RunConfig& c) {
  CommandResult res;
  const fs::path dir = prepare_dir(c);
  const Model model(c);
  const SectorDecomposition sectors(model.basis);
  const auto grid = c.scan_grid();
  const VarianceScan scan = variance_scan(model.factory(true), sectors, grid);

  const std::string stem = "variance_N" + std::to_string(c.n_sites);
  {
    CsvWriter csv(dir / (stem + ".csv"), c,
                  {"gamma", "var_all_scaled", "var_odd_scaled", "off_axis", "max_axis_distance", "pt_broken"});
    for (const auto& r : scan.rows)
      csv.row(r.gamma, r.total_scaled, r.odd_scaled, r.off_axis, r.max_axis_distance, r.pt_broken);
  }
  res.files.push_back(dir / (stem + ".csv"));
  nlohmann::ordered_json s;
  s["points"] = scan.rows.size();
  s["empirical_transition"] =
      scan.empirical_transition ? nlohmann::ordered_json(*scan.empirical_transition) : nlohmann::ordered_json();
  s["gamma_pt_estimate"] = gamma_pt_estimate(c.n_sites, c.j_coupling);
  write_json(dir / (stem + ".json"), c, s);
  res.files.push_back(dir / (stem + ".json"));
  res.summary = s;
  return res;
}

namespace {

CommandResult rate_scan_impl(const RunConfig& c, const std::vector<double>& grid) {
  CommandResult res;
  const fs::path dir = prepare_dir(c);
  const Model model(c);
  QuenchConfig q;
  q.times = c.time_grid();
  q.observable = build_staggered_magnetization(model.basis);
  q.initial = neel_state(model.basis);
  q.evolve = evolve_options(c);
  q.envelope = envelope_options(c);
  const RateScan scan = dissipative_rate_scan(model.factory(false), grid, q);

  for (const auto& row : scan.rows) res.files.push_back(write_trajectory(dir, c, row.trajectory, row.gamma));
  const std::string stem = "rates_N" + std::to_string(c.n_sites);
  {
    CsvWriter csv(dir / (stem + ".csv"), c,
                  {"gamma", "rate", "rate_err", "r2", "rate_diss", "rate_diss_err"});
    for (const auto& r : scan.rows)
      csv.row(r.gamma, r.rate, r.rate_error, r.r_squared, r.dissipative_rate, r.dissipative_error);
  }
  res.files.push_back(dir / (stem + ".csv"));

  nlohmann::ordered_json s;
  nlohmann::ordered_json fits = nlohmann::ordered_json::array();
  for (const auto& r : scan.rows) {
    nlohmann::ordered_json f = fit_json(r.fit);
    f["gamma"] = r.gamma;
    fits.push_back(f);
  }
  s["fits"] = fits;
  s["regression"] = {{"slope", scan.regression.slope},
                     {"slope_error", scan.regression.slope_error},
                     {"intercept", scan.regression.intercept},
                     {"r_squared", scan.regression.r_squared}};
  s["delta"] = dephasing_delta(c.n_sites);
  write_json(dir / (stem + ".json"), c, s);
  res.files.push_back(dir / (stem + ".json"));
  res.summary = s;
  return res;
}

}  // namespace

CommandResult run_quench(const RunConfig& c) {
  std::vector<double> grid = c.gamma_grid.empty() ? std::vector<double>{c.gamma} : c.gamma_grid;
  if (std::find(grid.begin(), grid.end(), 0.0) != grid.end() && grid.size() > 1) return rate_scan_impl(c, grid);

  CommandResult res;
  const fs::path dir = prepare_dir(c);
  const Model model(c);
  const std::vector<NamedObservable> obs{{"staggered_magnetization", build_staggered_magnetization(model.basis)}};
  const VectorizedState rho0 = neel_state(model.basis);
  const auto times = c.time_grid();
  nlohmann::ordered_json fits = nlohmann::ordered_json::array();
  for (double g : grid) {
    const Trajectory traj = evolve(model.factory(false)(g), rho0, times, obs, evolve_options(c));
    res.files.push_back(write_trajectory(dir, c, traj, g));
    nlohmann::ordered_json f;
    try {
      f = fit_json(fit_envelope(traj.values.front(), times, envelope_options(c)));
    } catch (const FitError& e) {
      f["error"] = e.what();
    }
    f["gamma"] = g;
    fits.push_back(f);
  }
  nlohmann::ordered_json s;
  s["fits"] = fits;
  const fs::path path = dir / ("quench_N" + std::to_string(c.n_sites) + ".json");
  write_json(path, c, s);
  res.files.push_back(path);
  res.summary = s;
  return res;
}

CommandResult run_rate_scan(const RunConfig& c) { return rate_scan_impl(c, c.gamma_grid); }

CommandResult run_perturb(const RunConfig& c) {
  CommandResult res;
  const fs::path dir = prepare_dir(c);
  const Model model(c);
  const SectorDecomposition sectors(model.basis);
  const auto par = build_parity_operators(model.basis);
  const EigenbasisData data = build_eigenbasis(model.hamiltonian, par.reflection, par.spin_flip);
  const VectorizedState rho0 = neel_state(model.basis);
  const SparseOperator ms = build_staggered_magnetization(model.basis);
  const auto times = c.time_grid();
  const auto grid = c.scan_grid();
  const double delta = dephasing_delta(c.n_sites);

  const DampingScaling scaling = damping_law_scaling(model.factory(true), sectors, data, rho0, ms, delta, grid, times);
  const CrossTermReport cross = verify_cross_term_cancellation(data, rho0, ms, times);
  const auto collisions = frequency_collisions(data, 1e-8);

  const std::string stem = "perturb_N" + std::to_string(c.n_sites);
  {
    CsvWriter csv(dir / (stem + ".csv"), c, {"gamma", "max_deviation", "deviation_over_gamma2", "fitted_exponent"});
    for (const auto& r : scaling.rows) csv.row(r.gamma, r.deviation, r.c_quadratic, scaling.exponent);
  }
  res.files.push_back(dir / (stem + ".csv"));

  nlohmann::ordered_json s;
  s["delta"] = delta;
  s["fitted_exponent"] = scaling.exponent;
  s["fitted_exponent_error"] = scaling.exponent_error;
  s["first_order_amplitude"] = scaling.first_order_amplitude;
  s["frequency_collisions"] = collisions.size();
  s["cross_term"] = {{"residual", cross.residual},
                     {"absolute", cross.absolute},
                     {"scale", cross.scale},
                     {"max_cross_real", cross.max_cross_real},
                     {"non_real_operands", cross.non_real_operands},
                     {"skipped_denominators", cross.skipped_denominators}};
  write_json(dir / (stem + ".json"), c, s);
  res.files.push_back(dir / (stem + ".json"));
  res.summary = s;
  return res;
}

CommandResult run_verify(const RunConfig& c) {
  CommandResult res;
  const fs::path dir = prepare_dir(c);
  VerifyOptions opts;
  opts.sizes = c.verify_sizes;
  opts.anisotropy = c.anisotropy;
  opts.j_coupling = c.j_coupling;
  opts.gamma = c.gamma;
  opts.fixture = parse_fixture(c.fixture);
  opts.seed = c.seed;
  const VerifyReport report = run_invariant_suite(opts);

  nlohmann::ordered_json checks = nlohmann::ordered_json::array();
  for (const auto& ch : report.checks) {
    nlohmann::ordered_json j;
    j["name"] = ch.name;
    j["n_sites"] = ch.n_sites;
    j["residual"] = std::isfinite(ch.residual) ? nlohmann::ordered_json(ch.residual) : nlohmann::ordered_json("inf");
    j["tolerance"] = ch.tolerance;
    j["passed"] = ch.passed;
    if (!ch.note.empty()) j["note"] = ch.note;
    checks.push_back(j);
  }
  nlohmann::ordered_json s;
  s["fixture"] = to_string(opts.fixture);
  s["passed"] = report.all_passed();
  s["failures"] = report.failures();
  s["checks"] = checks;
  const fs::path path = dir / "verify.json";
  write_json(path, c, s);
  res.files.push_back(path);
  res.summary = s;
  res.exit_code = report.all_passed() ? kSuccess : kInvariantFailure;
  return res;
}

CommandResult run_command(const RunConfig& config, std::ostream& err) {
  try {
    validate(config);
    switch (config.command) {
      case Command::Spectrum: return run_spectrum(config);
      case Command::VarianceScan: return run_variance_scan(config);
      case Command::Quench: return run_quench(config);
      case Command::RateScan: return run_rate_scan(config);
      case Command::Perturb: return run_perturb(config);
      case Command::Verify: return run_verify(config);
    }
  } catch (const ConfigError& e) {
    err << "configuration error: " << e.what() << "\n";
    return {kValidationError, {}, {}};
  } catch (const DomainError& e) {
    err << "invalid input: " << e.what() << "\n";
    return {kValidationError, {}, {}};
  } catch (const IntegrationError& e) {
    err << "integration failed at t = " << e.t_reached() << ": " << e.what() << "\n";
    return {kNumericalFailure, {}, {}};
  } catch (const NumericalError& e) {
    err << "numerical failure: " << e.what() << "\n";
    return {kNumericalFailure, {}, {}};
  } catch (const fs::filesystem_error& e) {
    err << "file system error: " << e.what() << "\n";
    return {kValidationError, {}, {}};
  }
  return {kValidationError, {}, {}};
}

}  // namespace lindlab::cli
