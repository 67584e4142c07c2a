#pragma once

#include <functional>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "lindlab/spectral.hpp"

namespace lindlab {

/// Integration stopped before the last sample.
class IntegrationError : public NumericalError {
 public:
  IntegrationError(const std::string& what, double t_reached) : NumericalError(what), t_reached_(t_reached) {}
  double t_reached() const { return t_reached_; }

 private:
  double t_reached_;
};

/// Fewer usable extrema than the fit needs.
class FitError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

/// |down up down up ...>, site 1 down. Requires N even and total_sz = 0.
VectorizedState neel_state(const BasisPtr& basis);

/// t_k = k * t_max / (samples - 1)
std::vector<double> uniform_grid(double t_max, std::size_t samples);

struct NamedObservable {
  std::string name;
  SparseOperator op;
};

struct EvolveOptions {
  double rtol = 1e-9;
  double atol = 1e-12;
  /// |tr rho(t) - tr rho(0)| above this aborts the run.
  double max_trace_drift = 1e-6;
  /// Imaginary part of <O> tolerated for Hermitian O.
  double imag_tolerance = 1e-10;
  double min_step = 1e-12;
  std::size_t max_steps = 50'000'000;
  bool store_states = false;
  /// Dense eigenvalue check of rho(t) at every sample; costs O(d^3).
  bool track_min_eigenvalue = false;
};

struct IntegratorStats {
  std::size_t accepted = 0;
  std::size_t rejected = 0;
  std::size_t matvecs = 0;
};

struct Trajectory {
  std::vector<double> times;
  std::vector<std::string> names;
  /// values[k][s]: observable k at sample s.
  std::vector<std::vector<double>> values;
  std::vector<double> trace_deviation;
  std::vector<double> hermiticity_deviation;
  std::vector<double> min_eigenvalue;  ///< empty unless tracked
  std::vector<CVec> states;            ///< empty unless stored
  IntegratorStats stats;

  /// Series of a named observable; throws DomainError if absent.
  const std::vector<double>& series(const std::string& name) const;
};

/// Adaptive Dormand-Prince 5(4) integration of d rho/dt = L rho, landing
/// exactly on every sample time.
Trajectory evolve(const Superoperator& liou, const VectorizedState& rho0, std::span<const double> times,
                  std::span<const NamedObservable> observables, const EvolveOptions& options = {});

/// Same sampling as `evolve`, but every state comes from the exact
/// eigen-decomposition (small d only).
Trajectory evolve_spectral(const SpectrumResult& spec, const VectorizedState& rho0, std::span<const double> times,
                           std::span<const NamedObservable> observables);

/// tr(O rho(t)) for each stored state; NumericalError if an imaginary part
/// exceeds `imag_tolerance`.
std::vector<double> observable_series(const Trajectory& traj, const BasisPtr& basis, const SparseOperator& obs,
                                      double imag_tolerance = 1e-10);

struct EnvelopeOptions {
  /// Peaks of |x| below this are discarded.
  double floor = 1e-4;
  std::size_t min_extrema = 4;
  double t_min = 0.0;
  double t_max = std::numeric_limits<double>::infinity();
};

struct Extremum {
  double time;
  double magnitude;
};

struct EnvelopeFit {
  std::vector<Extremum> extrema;
  double rate = 0.0;
  double rate_error = 0.0;  ///< standard error of the slope
  double intercept = 0.0;
  double r_squared = 0.0;
  std::vector<double> residuals;
};

/// Least-squares line through (t_k, log|peak_k|) of the parabola-refined
/// local maxima of |series|; rate = -slope.
EnvelopeFit fit_envelope(std::span<const double> series, std::span<const double> times,
                         const EnvelopeOptions& options = {});

/// Largest relative displacement |t_k(b) - t_k(a)| / t_k(a) over extrema
/// paired by order.
double extremum_shift(const EnvelopeFit& reference, const EnvelopeFit& other);

struct LinearFit {
  double slope = 0.0;
  double intercept = 0.0;
  double slope_error = 0.0;
  double r_squared = 0.0;
};

LinearFit linear_regression(std::span<const double> x, std::span<const double> y);

struct RateRow {
  double gamma = 0.0;
  double rate = 0.0;  ///< 1/tau(gamma)
  double rate_error = 0.0;
  double r_squared = 0.0;
  double dissipative_rate = 0.0;  ///< 1/tau(gamma) - 1/tau(0)
  double dissipative_error = 0.0;
  EnvelopeFit fit;
  Trajectory trajectory;
};

struct RateScan {
  std::vector<RateRow> rows;
  /// 1/tau_diss against gamma, over every row.
  LinearFit regression;
};

struct QuenchConfig {
  std::vector<double> times;
  std::string observable_name = "staggered_magnetization";
  SparseOperator observable;
  VectorizedState initial;
  EvolveOptions evolve;
  EnvelopeOptions envelope;
};

/// Evolves the quench at every gamma (gamma = 0 must be present), fits each
/// envelope with the same window and subtracts the closed-system rate.
RateScan dissipative_rate_scan(const LiouvillianFactory& factory, std::span<const double> gamma_grid,
                               const QuenchConfig& config);

}  // namespace lindlab
