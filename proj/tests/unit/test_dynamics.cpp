#include <doctest.h>

#include <cmath>

#include "../support.hpp"
#include "lindlab/dynamics.hpp"

using namespace lindlab;

namespace {

struct Chain {
  BasisPtr basis;
  SparseOperator h;
  std::vector<SparseOperator> jumps;
};

Chain make_chain(int n, double anisotropy) {
  Chain c;
  c.basis = build_basis(n, 0.0);
  c.h = build_xxz_hamiltonian(c.basis, {1.0, anisotropy, {}});
  c.jumps = build_dephasing_jumps(c.basis);
  return c;
}

CVec neel_vector(const BasisPtr& b) {
  CVec psi = CVec::Zero(static_cast<Eigen::Index>(b->dim()));
  psi[static_cast<Eigen::Index>(*b->index_of(neel_configuration(b->n_sites())))] = 1.0;
  return psi;
}

std::vector<double> damped_cosine(const std::vector<double>& t, double rate, double freq) {
  std::vector<double> x;
  for (double s : t) x.push_back(std::exp(-rate * s) * std::cos(freq * s));
  return x;
}

}  // namespace

TEST_CASE("Neel state is a pure product state") {
  const auto b = build_basis(6, 0.0);
  const auto rho = neel_state(b);
  CHECK(std::abs(rho.trace() - 1.0) < 1e-15);
  CHECK(rho.purity() == doctest::Approx(1.0));
  CHECK(expectation(build_staggered_magnetization(b), rho.data).real() == doctest::Approx(0.5));
  CHECK_THROWS_AS(neel_state(build_basis(6, 1.0)), DomainError);
}

TEST_CASE("uniform grid") {
  const auto g = uniform_grid(14.0, 561);
  CHECK(g.size() == 561);
  CHECK(g.front() == 0.0);
  CHECK(g.back() == 14.0);
  CHECK(g[40] == doctest::Approx(1.0));
  CHECK_THROWS_AS(uniform_grid(1.0, 1), DomainError);
}

TEST_CASE("closed-chain quench matches the state-vector oracle") {
  for (int n : {4, 8}) {
    const auto c = make_chain(n, 0.4);
    const auto liou = build_liouvillian(c.h, c.jumps, 0.0);
    const auto ms = build_staggered_magnetization(c.basis);
    const auto times = uniform_grid(6.0, 61);
    const std::vector<NamedObservable> obs{{"ms", ms}};
    const auto traj = evolve(liou, neel_state(c.basis), times, obs);
    const auto ref = oracle::schrodinger_series(c.h.dense(), neel_vector(c.basis), ms.dense(), times);
    double worst = 0.0;
    for (std::size_t s = 0; s < times.size(); ++s) worst = std::max(worst, std::abs(traj.series("ms")[s] - ref[s]));
    CHECK(worst < 1e-8);
  }
}

TEST_CASE("dephased evolution matches the matrix exponential") {
  const auto c = make_chain(4, 0.3);
  const auto liou = build_liouvillian(c.h, c.jumps, 0.3);
  const auto rho0 = neel_state(c.basis);
  const auto times = uniform_grid(5.0, 11);
  EvolveOptions opts;
  opts.store_states = true;
  opts.track_min_eigenvalue = true;
  const auto traj = evolve(liou, rho0, times, {}, opts);
  const CMat dense = dense_matrix(liou);
  for (std::size_t s = 0; s < times.size(); ++s) {
    const CVec exact = oracle::expm_apply(dense, rho0.data, times[s]);
    CHECK((traj.states[s] - exact).cwiseAbs().maxCoeff() < 1e-8);
    CHECK(traj.trace_deviation[s] < 1e-10);
    CHECK(traj.hermiticity_deviation[s] < 1e-10);
    CHECK(traj.min_eigenvalue[s] > -1e-10);
  }
  CHECK(traj.stats.accepted > 0);
  const auto ms_series = observable_series(traj, c.basis, build_staggered_magnetization(c.basis));
  CHECK(ms_series.front() == doctest::Approx(0.5));
}

TEST_CASE("spectral evolution agrees with the integrator") {
  const auto c = make_chain(4, 0.3);
  const auto liou = build_liouvillian(c.h, c.jumps, 0.1);
  const auto spec = full_spectrum(liou, SectorDecomposition(c.basis));
  const std::vector<NamedObservable> obs{{"ms", build_staggered_magnetization(c.basis)}};
  const auto times = uniform_grid(8.0, 33);
  const auto a = evolve(liou, neel_state(c.basis), times, obs);
  const auto b = evolve_spectral(spec, neel_state(c.basis), times, obs);
  for (std::size_t s = 0; s < times.size(); ++s) CHECK(std::abs(a.values[0][s] - b.values[0][s]) < 1e-8);
}

TEST_CASE("strong dephasing relaxes to the maximally mixed state") {
  const auto c = make_chain(4, 0.3);
  const auto liou = build_liouvillian(c.h, c.jumps, 2.0);
  const std::vector<double> times{0.0, 300.0};
  EvolveOptions opts;
  opts.store_states = true;
  const auto traj = evolve(liou, neel_state(c.basis), times, {}, opts);
  const CVec mixed = VectorizedState::maximally_mixed(c.basis).data;
  CHECK((traj.states.back() - mixed).norm() < 1e-6);
}

TEST_CASE("integrator reports drift and step underflow") {
  const auto c = make_chain(4, 0.3);
  LiouvillianOptions bad;
  bad.jump_term_sign = -1.0;
  const auto broken = build_liouvillian(c.h, c.jumps, 0.5, bad);
  const auto times = uniform_grid(4.0, 5);
  CHECK_THROWS_AS(evolve(broken, neel_state(c.basis), times, {}), IntegrationError);

  const auto liou = build_liouvillian(c.h, c.jumps, 0.1);
  EvolveOptions opts;
  opts.min_step = 10.0;
  try {
    evolve(liou, neel_state(c.basis), times, {}, opts);
    FAIL("expected an integration error");
  } catch (const IntegrationError& e) {
    CHECK(e.t_reached() < 4.0);
  }
  const std::vector<double> bad_grid{0.5, 1.0};
  CHECK_THROWS_AS(evolve(liou, neel_state(c.basis), bad_grid, {}), DomainError);
}

TEST_CASE("envelope fit recovers a known decay rate") {
  const auto t = uniform_grid(14.0, 561);
  const auto x = damped_cosine(t, 0.3, 5.0);
  const auto fit = fit_envelope(x, t);
  CHECK(std::abs(fit.rate - 0.3) < 1e-3);
  CHECK(fit.r_squared > 0.999);
  CHECK(fit.extrema.size() >= 20);
}

TEST_CASE("envelope fit window restricts the extrema") {
  const auto t = uniform_grid(14.0, 561);
  const auto x = damped_cosine(t, 0.1, 3.0);
  EnvelopeOptions opts;
  opts.t_min = 2.0;
  opts.t_max = 8.0;
  const auto fit = fit_envelope(x, t, opts);
  for (const auto& e : fit.extrema) {
    CHECK(e.time >= 2.0);
    CHECK(e.time <= 8.0);
  }
  CHECK(std::abs(fit.rate - 0.1) < 1e-3);
}

TEST_CASE("pure decay has no extrema to fit") {
  const auto t = uniform_grid(10.0, 201);
  std::vector<double> x;
  for (double s : t) x.push_back(std::exp(-0.5 * s));
  CHECK_THROWS_AS(fit_envelope(x, t), FitError);
}

TEST_CASE("extremum shift compares paired extrema") {
  const auto t = uniform_grid(14.0, 1401);
  const auto a = fit_envelope(damped_cosine(t, 0.1, 3.0), t);
  const auto b = fit_envelope(damped_cosine(t, 0.1, 3.0 * 1.01), t);
  CHECK(extremum_shift(a, a) < 1e-12);
  CHECK(extremum_shift(a, b) == doctest::Approx(1.0 - 1.0 / 1.01).epsilon(0.05));
}

TEST_CASE("linear regression") {
  const std::vector<double> x{0.0, 1.0, 2.0, 3.0};
  const std::vector<double> y{1.0, 3.0, 5.0, 7.0};
  const auto fit = linear_regression(x, y);
  CHECK(fit.slope == doctest::Approx(2.0));
  CHECK(fit.intercept == doctest::Approx(1.0));
  CHECK(fit.r_squared == doctest::Approx(1.0));
  CHECK(fit.slope_error < 1e-12);
  const std::vector<double> same{1.0, 1.0};
  CHECK_THROWS_AS(linear_regression(same, same), DomainError);
}

TEST_CASE("rate scan subtracts the closed-system rate") {
  const auto c = make_chain(6, 0.4);
  QuenchConfig cfg;
  cfg.times = uniform_grid(14.0, 281);
  cfg.observable = build_staggered_magnetization(c.basis);
  cfg.initial = neel_state(c.basis);
  const std::vector<double> grid{0.0, 0.05};
  const auto scan = dissipative_rate_scan([&](double g) { return build_liouvillian(c.h, c.jumps, g); }, grid, cfg);
  REQUIRE(scan.rows.size() == 2);
  CHECK(scan.rows[0].dissipative_rate == 0.0);
  CHECK(scan.rows[1].dissipative_rate == doctest::Approx(scan.rows[1].rate - scan.rows[0].rate));
  CHECK(scan.rows[1].dissipative_rate > 0.0);
  const std::vector<double> no_zero{0.01, 0.05};
  CHECK_THROWS_AS(dissipative_rate_scan([&](double g) { return build_liouvillian(c.h, c.jumps, g); }, no_zero, cfg),
                  DomainError);
}
