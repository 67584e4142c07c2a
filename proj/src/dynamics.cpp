#include "lindlab/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace lindlab {

VectorizedState neel_state(const BasisPtr& basis) {
  if (basis->n_sites() % 2 != 0) throw DomainError("neel_state needs an even number of sites");
  if (!basis->zero_magnetization()) throw DomainError("neel_state lives in the total_sz = 0 sector");
  const auto idx = basis->index_of(neel_configuration(basis->n_sites()));
  if (!idx) throw DomainError("Neel configuration missing from basis");
  CVec psi = CVec::Zero(static_cast<Eigen::Index>(basis->dim()));
  psi[static_cast<Eigen::Index>(*idx)] = 1.0;
  return VectorizedState::pure(basis, psi);
}

std::vector<double> uniform_grid(double t_max, std::size_t samples) {
  if (samples < 2 || !(t_max > 0.0)) throw DomainError("uniform_grid needs t_max > 0 and at least 2 samples");
  std::vector<double> t(samples);
  for (std::size_t k = 0; k < samples; ++k) t[k] = t_max * static_cast<double>(k) / static_cast<double>(samples - 1);
  return t;
}

const std::vector<double>& Trajectory::series(const std::string& name) const {
  for (std::size_t k = 0; k < names.size(); ++k)
    if (names[k] == name) return values[k];
  throw DomainError("trajectory has no observable named '" + name + "'");
}

namespace {

void check_grid(std::span<const double> times) {
  if (times.empty() || times.front() != 0.0) throw DomainError("time grid must start at 0");
  for (std::size_t k = 1; k < times.size(); ++k)
    if (!(times[k] > times[k - 1])) throw DomainError("time grid must be strictly increasing");
}

double trace_of(const CVec& x, Eigen::Index d) {
  cplx t{0.0, 0.0};
  for (Eigen::Index a = 0; a < d; ++a) t += x[a + a * d];
  return t.real();
}

double hermiticity_of(const CVec& x, Eigen::Index d) {
  double dev = 0.0;
#pragma omp parallel for reduction(max : dev) schedule(static)
  for (Eigen::Index b = 0; b < d; ++b)
    for (Eigen::Index a = 0; a < b; ++a) dev = std::max(dev, std::abs(x[a + b * d] - std::conj(x[b + a * d])));
  for (Eigen::Index a = 0; a < d; ++a) dev = std::max(dev, std::abs(x[a + a * d].imag()));
  return dev;
}

// Records diagnostics and observables at one sample.
class Recorder {
 public:
  Recorder(Trajectory& traj, const BasisPtr& basis, std::span<const NamedObservable> obs, const EvolveOptions& opts,
           double trace0)
      : traj_(traj), basis_(basis), obs_(obs), opts_(opts), trace0_(trace0) {
    for (const auto& o : obs) {
      traj_.names.push_back(o.name);
      traj_.values.emplace_back();
      traj_.values.back().reserve(traj_.times.size());
    }
  }

  void record(const CVec& x, double t) {
    const auto d = static_cast<Eigen::Index>(basis_->dim());
    const double drift = std::abs(trace_of(x, d) - trace0_);
    traj_.trace_deviation.push_back(drift);
    traj_.hermiticity_deviation.push_back(hermiticity_of(x, d));
    if (drift > opts_.max_trace_drift)
      throw IntegrationError("trace drifted by " + std::to_string(drift) + " at t = " + std::to_string(t), t);
    for (std::size_t k = 0; k < obs_.size(); ++k) {
      const cplx v = expectation(obs_[k].op, x);
      if (obs_[k].op.hermitian && std::abs(v.imag()) > opts_.imag_tolerance)
        throw NumericalError("<" + obs_[k].name + "> has imaginary part " + std::to_string(v.imag()) +
                             " at t = " + std::to_string(t));
      traj_.values[k].push_back(v.real());
    }
    if (opts_.track_min_eigenvalue) traj_.min_eigenvalue.push_back(VectorizedState{basis_, x}.min_eigenvalue());
    if (opts_.store_states) traj_.states.push_back(x);
  }

 private:
  Trajectory& traj_;
  const BasisPtr& basis_;
  std::span<const NamedObservable> obs_;
  const EvolveOptions& opts_;
  double trace0_;
};

// Dormand-Prince 5(4) tableau.
constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561, a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                 a65 = -5103.0 / 18656;
constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192, b5 = -2187.0 / 6784, b6 = 11.0 / 84;
constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920, e5 = -17253.0 / 339200,
                 e6 = 22.0 / 525, e7 = -1.0 / 40;

class DormandPrince {
 public:
  DormandPrince(const Superoperator& liou, const EvolveOptions& opts, IntegratorStats& stats)
      : liou_(liou), opts_(opts), stats_(stats), n_(static_cast<Eigen::Index>(liou.dim())) {
    for (auto* v : {&k1_, &k2_, &k3_, &k4_, &k5_, &k6_, &k7_, &tmp_, &y_new_}) v->resize(n_);
  }

  // Advances y from t0 to t1, carrying the step-size guess h across calls.
  void advance(CVec& y, double t0, double t1, double& h) {
    if (!fsal_valid_) {
      rhs(y, k1_);
      fsal_valid_ = true;
    }
    double t = t0;
    while (t < t1) {
      if (stats_.accepted + stats_.rejected >= opts_.max_steps)
        throw IntegrationError("step budget exhausted", t);
      const double remaining = t1 - t;
      bool last = false;
      double step = h;
      if (step >= remaining * (1.0 - 1e-12)) {
        step = remaining;
        last = true;
      }
      if (step < opts_.min_step) throw IntegrationError("step size underflow (h = " + std::to_string(step) + ")", t);

      const double err = attempt(y, step);
      if (err <= 1.0) {
        ++stats_.accepted;
        t = last ? t1 : t + step;
        y.swap(y_new_);
        k1_.swap(k7_);
        const double grow = err == 0.0 ? 5.0 : std::min(5.0, 0.9 * std::pow(err, -0.2));
        // keep h unchanged when a short last step was forced by the sample grid
        if (!last || step == h) h = step * grow;
      } else {
        ++stats_.rejected;
        h = step * std::max(0.2, 0.9 * std::pow(err, -0.2));
      }
    }
  }

 private:
  void rhs(const CVec& x, CVec& out) {
    apply(liou_, std::span<const cplx>(x.data(), static_cast<std::size_t>(n_)),
          std::span<cplx>(out.data(), static_cast<std::size_t>(n_)));
    ++stats_.matvecs;
  }

  template <typename F>
  void combine(const CVec& y, double h, F&& weights) {
#pragma omp parallel for schedule(static)
    for (Eigen::Index i = 0; i < n_; ++i) tmp_[i] = y[i] + h * weights(i);
  }

  double attempt(const CVec& y, double h) {
    combine(y, h, [&](Eigen::Index i) { return a21 * k1_[i]; });
    rhs(tmp_, k2_);
    combine(y, h, [&](Eigen::Index i) { return a31 * k1_[i] + a32 * k2_[i]; });
    rhs(tmp_, k3_);
    combine(y, h, [&](Eigen::Index i) { return a41 * k1_[i] + a42 * k2_[i] + a43 * k3_[i]; });
    rhs(tmp_, k4_);
    combine(y, h, [&](Eigen::Index i) { return a51 * k1_[i] + a52 * k2_[i] + a53 * k3_[i] + a54 * k4_[i]; });
    rhs(tmp_, k5_);
    combine(y, h,
            [&](Eigen::Index i) { return a61 * k1_[i] + a62 * k2_[i] + a63 * k3_[i] + a64 * k4_[i] + a65 * k5_[i]; });
    rhs(tmp_, k6_);
#pragma omp parallel for schedule(static)
    for (Eigen::Index i = 0; i < n_; ++i)
      y_new_[i] = y[i] + h * (b1 * k1_[i] + b3 * k3_[i] + b4 * k4_[i] + b5 * k5_[i] + b6 * k6_[i]);
    rhs(y_new_, k7_);

    double acc = 0.0;
#pragma omp parallel for reduction(+ : acc) schedule(static)
    for (Eigen::Index i = 0; i < n_; ++i) {
      const cplx e =
          h * (e1 * k1_[i] + e3 * k3_[i] + e4 * k4_[i] + e5 * k5_[i] + e6 * k6_[i] + e7 * k7_[i]);
      const double sc = opts_.atol + opts_.rtol * std::max(std::abs(y[i]), std::abs(y_new_[i]));
      acc += std::norm(e) / (sc * sc);
    }
    return std::sqrt(acc / static_cast<double>(n_));
  }

  const Superoperator& liou_;
  const EvolveOptions& opts_;
  IntegratorStats& stats_;
  Eigen::Index n_;
  CVec k1_, k2_, k3_, k4_, k5_, k6_, k7_, tmp_, y_new_;
  bool fsal_valid_ = false;
};

}  // namespace

Trajectory evolve(const Superoperator& liou, const VectorizedState& rho0, std::span<const double> times,
                  std::span<const NamedObservable> observables, const EvolveOptions& options) {
  check_grid(times);
  if (rho0.basis->dim() != liou.hilbert_dim()) throw DomainError("evolve: state and Liouvillian bases differ");
  for (const auto& o : observables)
    if (o.op.dim() != liou.hilbert_dim()) throw DomainError("evolve: observable '" + o.name + "' has wrong dimension");

  Trajectory traj;
  traj.times.assign(times.begin(), times.end());
  Recorder rec(traj, rho0.basis, observables, options, rho0.trace().real());
  CVec y = rho0.data;
  rec.record(y, 0.0);

  DormandPrince stepper(liou, options, traj.stats);
  double h = 0.1 * std::pow(options.rtol, 0.2) / std::max(liou.norm_bound(), 1e-12);
  for (std::size_t s = 1; s < times.size(); ++s) {
    stepper.advance(y, times[s - 1], times[s], h);
    rec.record(y, times[s]);
  }
  return traj;
}

Trajectory evolve_spectral(const SpectrumResult& spec, const VectorizedState& rho0, std::span<const double> times,
                           std::span<const NamedObservable> observables) {
  check_grid(times);
  if (!spec.has_modes) throw DomainError("evolve_spectral needs eigenmodes");
  Trajectory traj;
  traj.times.assign(times.begin(), times.end());
  EvolveOptions opts;
  opts.store_states = true;
  opts.max_trace_drift = std::numeric_limits<double>::infinity();
  opts.imag_tolerance = std::numeric_limits<double>::infinity();
  Recorder rec(traj, rho0.basis, observables, opts, rho0.trace().real());
  for (double t : times) rec.record(spectral_propagate(spec, rho0, t), t);
  return traj;
}

std::vector<double> observable_series(const Trajectory& traj, const BasisPtr& basis, const SparseOperator& obs,
                                      double imag_tolerance) {
  if (!obs.hermitian) throw DomainError("observable_series expects a Hermitian observable");
  if (traj.states.size() != traj.times.size()) throw DomainError("trajectory does not store its states");
  if (obs.dim() != basis->dim()) throw DomainError("observable_series: dimension mismatch");
  std::vector<double> out;
  out.reserve(traj.states.size());
  for (std::size_t s = 0; s < traj.states.size(); ++s) {
    const cplx v = expectation(obs, traj.states[s]);
    if (std::abs(v.imag()) > imag_tolerance)
      throw NumericalError("expectation value has imaginary part " + std::to_string(v.imag()) + " at t = " +
                           std::to_string(traj.times[s]));
    out.push_back(v.real());
  }
  return out;
}

LinearFit linear_regression(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 2) throw DomainError("linear_regression needs two equal series of length >= 2");
  const auto n = static_cast<double>(x.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t k = 0; k < x.size(); ++k) {
    mx += x[k];
    my += y[k];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (std::size_t k = 0; k < x.size(); ++k) {
    sxx += (x[k] - mx) * (x[k] - mx);
    sxy += (x[k] - mx) * (y[k] - my);
    syy += (y[k] - my) * (y[k] - my);
  }
  if (sxx == 0.0) throw DomainError("linear_regression: abscissae are all equal");
  LinearFit fit;
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  double sse = 0.0;
  for (std::size_t k = 0; k < x.size(); ++k) {
    const double r = y[k] - fit.intercept - fit.slope * x[k];
    sse += r * r;
  }
  fit.r_squared = syy > 0.0 ? std::clamp(1.0 - sse / syy, 0.0, 1.0) : 1.0;
  fit.slope_error = x.size() > 2 ? std::sqrt(sse / (n - 2.0) / sxx) : 0.0;
  return fit;
}

EnvelopeFit fit_envelope(std::span<const double> series, std::span<const double> times,
                         const EnvelopeOptions& options) {
  if (series.size() != times.size()) throw DomainError("fit_envelope: series and grid lengths differ");
  EnvelopeFit fit;
  for (std::size_t k = 1; k + 1 < series.size(); ++k) {
    if (times[k] < options.t_min || times[k] > options.t_max) continue;
    const double ym = std::abs(series[k - 1]), y0 = std::abs(series[k]), yp = std::abs(series[k + 1]);
    if (!(y0 >= ym && y0 > yp)) continue;
    // parabola through the three points, uniform spacing assumed locally
    const double h = 0.5 * (times[k + 1] - times[k - 1]);
    const double curv = ym - 2.0 * y0 + yp;
    double dt = 0.0, peak = y0;
    if (curv < 0.0) {
      const double off = 0.5 * (ym - yp) / curv;
      dt = off * h;
      peak = y0 - 0.25 * (ym - yp) * off;
    }
    if (peak < options.floor) continue;
    fit.extrema.push_back({times[k] + dt, peak});
  }
  if (fit.extrema.size() < options.min_extrema)
    throw FitError("envelope fit found " + std::to_string(fit.extrema.size()) + " extrema, needs " +
                   std::to_string(options.min_extrema) + "; extend the time window");

  std::vector<double> tx, ly;
  for (const auto& e : fit.extrema) {
    tx.push_back(e.time);
    ly.push_back(std::log(e.magnitude));
  }
  const LinearFit line = linear_regression(tx, ly);
  fit.rate = -line.slope;
  fit.rate_error = line.slope_error;
  fit.intercept = line.intercept;
  fit.r_squared = line.r_squared;
  for (std::size_t k = 0; k < tx.size(); ++k) fit.residuals.push_back(ly[k] - line.intercept - line.slope * tx[k]);
  if (!std::isfinite(fit.rate)) throw FitError("envelope fit produced a non-finite rate");
  return fit;
}

double extremum_shift(const EnvelopeFit& reference, const EnvelopeFit& other) {
  const std::size_t n = std::min(reference.extrema.size(), other.extrema.size());
  if (n == 0) throw DomainError("extremum_shift: no extrema to compare");
  double worst = 0.0;
  for (std::size_t k = 0; k < n; ++k)
    worst = std::max(worst, std::abs(other.extrema[k].time - reference.extrema[k].time) / reference.extrema[k].time);
  return worst;
}

RateScan dissipative_rate_scan(const LiouvillianFactory& factory, std::span<const double> gamma_grid,
                               const QuenchConfig& config) {
  const auto zero = std::find(gamma_grid.begin(), gamma_grid.end(), 0.0);
  if (zero == gamma_grid.end()) throw DomainError("rate scan needs gamma = 0 in the grid");
  for (double g : gamma_grid)
    if (g < 0.0) throw DomainError("rate scan: gamma must be non-negative");

  RateScan scan;
  scan.rows.resize(gamma_grid.size());
  const std::vector<NamedObservable> obs{{config.observable_name, config.observable}};
  const auto n = static_cast<std::int64_t>(gamma_grid.size());
  std::vector<std::string> errors(gamma_grid.size());
#pragma omp parallel for schedule(dynamic)
  for (std::int64_t k = 0; k < n; ++k) {
    const auto s = static_cast<std::size_t>(k);
    RateRow& row = scan.rows[s];
    row.gamma = gamma_grid[s];
    try {
      const Superoperator liou = factory(row.gamma);
      row.trajectory = evolve(liou, config.initial, config.times, obs, config.evolve);
      row.fit = fit_envelope(row.trajectory.series(config.observable_name), config.times, config.envelope);
      row.rate = row.fit.rate;
      row.rate_error = row.fit.rate_error;
      row.r_squared = row.fit.r_squared;
    } catch (const std::exception& e) {
      errors[s] = "gamma = " + std::to_string(row.gamma) + ": " + e.what();
    }
  }
  for (const auto& e : errors)
    if (!e.empty()) throw NumericalError("rate scan failed at " + e);

  const RateRow& base = scan.rows[static_cast<std::size_t>(zero - gamma_grid.begin())];
  std::vector<double> gx, dy;
  for (auto& row : scan.rows) {
    row.dissipative_rate = row.gamma == 0.0 ? 0.0 : row.rate - base.rate;
    row.dissipative_error = row.gamma == 0.0 ? 0.0 : std::hypot(row.rate_error, base.rate_error);
    gx.push_back(row.gamma);
    dy.push_back(row.dissipative_rate);
  }
  if (gx.size() >= 2) scan.regression = linear_regression(gx, dy);
  return scan;
}

}  // namespace lindlab
