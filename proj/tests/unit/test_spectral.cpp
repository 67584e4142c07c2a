#include <doctest.h>

#include <algorithm>

#include "../support.hpp"
#include "lindlab/dynamics.hpp"
#include "lindlab/eigensolver.hpp"
#include "lindlab/spectral.hpp"

using namespace lindlab;

namespace {

Superoperator chain(int n, double anisotropy, double gamma) {
  const auto b = build_basis(n, 0.0);
  return build_liouvillian(build_xxz_hamiltonian(b, {1.0, anisotropy, {}}), build_dephasing_jumps(b), gamma);
}

}  // namespace

TEST_CASE("geev wrappers find known eigenvalues") {
  RMat rot(2, 2);
  rot << 0.0, -2.0, 2.0, 0.0;
  const auto r = eig_real(rot, true);
  std::vector<double> im{r.values[0].imag(), r.values[1].imag()};
  std::sort(im.begin(), im.end());
  CHECK(im[0] == doctest::Approx(-2.0));
  CHECK(im[1] == doctest::Approx(2.0));
  for (int k = 0; k < 2; ++k) {
    const CVec u = r.vectors.col(k);
    CHECK((rot.cast<cplx>() * u - r.values[k] * u).norm() < 1e-14);
  }
  CMat c(2, 2);
  c << cplx{1, 1}, 1.0, 0.0, cplx{-1, 0};
  const auto e = eig_complex(c, false);
  CHECK(oracle::multiset_distance({e.values[0], e.values[1]}, {cplx{1, 1}, cplx{-1, 0}}) < 1e-14);
}

TEST_CASE("sector-blocked spectrum equals the unblocked spectrum") {
  for (double gamma : {0.01, 0.5}) {
    const auto liou = chain(4, 0.3, gamma);
    const SectorDecomposition sec(liou.basis);
    const auto spec = full_spectrum(liou, sec);
    CHECK(oracle::multiset_distance(spec.eigenvalues, unblocked_eigenvalues(liou)) < 1e-10);
    CHECK_FALSE(spec.flagged());
  }
}

TEST_CASE("closed chain spectrum is the set of Bohr frequencies") {
  const auto b = build_basis(4, 0.0);
  const auto h = build_xxz_hamiltonian(b, {1.0, 0.3, {}});
  Eigen::SelfAdjointEigenSolver<CMat> es(h.dense());
  std::vector<cplx> bohr;
  for (Eigen::Index m = 0; m < es.eigenvalues().size(); ++m)
    for (Eigen::Index n = 0; n < es.eigenvalues().size(); ++n)
      bohr.push_back(cplx{0.0, -(es.eigenvalues()[m] - es.eigenvalues()[n])});
  const auto liou = build_liouvillian(h, build_dephasing_jumps(b), 0.0);
  const auto spec = full_spectrum(liou, SectorDecomposition(b));
  CHECK(oracle::multiset_distance(spec.eigenvalues, bohr) < 1e-12);
}

TEST_CASE("eigenpairs are biorthonormal with small residuals") {
  const auto liou = chain(4, 0.4, 0.2);
  const auto spec = full_spectrum(liou, SectorDecomposition(liou.basis));
  REQUIRE(spec.has_modes);
  const CMat dense = dense_matrix(liou);
  double worst_bi = 0.0, worst_res = 0.0;
  for (std::size_t m = 0; m < spec.size(); ++m) {
    const CVec u = spec.right_mode(m);
    const CVec v = spec.left_mode(m);
    worst_res = std::max(worst_res, (dense * u - spec.eigenvalues[m] * u).norm());
    // v is a left eigenvector: v^dagger L = lambda v^dagger
    worst_res = std::max(worst_res, (dense.adjoint() * v - std::conj(spec.eigenvalues[m]) * v).norm());
    for (std::size_t n = 0; n < spec.size(); n += 7) {
      const cplx ov = v.dot(spec.right_mode(n));
      worst_bi = std::max(worst_bi, std::abs(ov - (m == n ? 1.0 : 0.0)));
    }
  }
  CHECK(worst_res < 1e-10);
  CHECK(worst_bi < 1e-10);
  CHECK(spec.defective_count() == 0);
}

TEST_CASE("spectrum bounds, unique steady state and traceless decay modes") {
  const auto liou = chain(6, 0.3, 0.05);
  const auto spec = full_spectrum(liou, SectorDecomposition(liou.basis));
  std::size_t zeros = 0;
  for (std::size_t m = 0; m < spec.size(); ++m) {
    const cplx l = spec.eigenvalues[m];
    CHECK(l.real() <= 1e-10);
    CHECK(std::abs(l) <= spec.norm * (1 + 1e-12));
    if (std::abs(l) < 1e-10) {
      ++zeros;
      CHECK(spec.labels[m] == SectorLabel{1, 1});
    } else {
      const CMat u = unvectorize(spec.right_mode(m), liou.hilbert_dim());
      CHECK(std::abs(u.trace()) < 1e-10);
    }
  }
  CHECK(zeros == 1);
  CHECK(spec.delta == doctest::Approx(1.5));
}

TEST_CASE("gap is the slowest decay rate") {
  const auto liou = chain(4, 0.3, 0.1);
  const auto spec = full_spectrum(liou, SectorDecomposition(liou.basis));
  const auto gap = dissipative_gap(spec);
  double expected = 1e300;
  for (const auto& l : spec.eigenvalues)
    if (l.real() < -1e-10) expected = std::min(expected, -l.real());
  CHECK(gap.global == doctest::Approx(expected));
  double min_sector = 1e300;
  for (const auto& [label, g] : gap.per_sector) min_sector = std::min(min_sector, g);
  CHECK(min_sector == doctest::Approx(gap.global));
}

TEST_CASE("weak dephasing keeps every eigenvalue on a symmetry axis") {
  const auto liou = chain(6, 0.3, 0.003);
  const auto spec = full_spectrum(liou, SectorDecomposition(liou.basis));
  const double tol = default_axis_tolerance(spec);
  CHECK(tol == doctest::Approx(1e-7 * spec.norm));
  const auto axes = classify_axes(spec, tol, tol);
  CHECK(axes.off_axis.empty());
  CHECK(axes.on_real_axis.size() + axes.on_vertical_axis.size() == spec.size());
  const auto strong = full_spectrum(chain(6, 0.3, 0.1), SectorDecomposition(liou.basis));
  const auto axes_strong = classify_axes(strong, tol, tol);
  CHECK_FALSE(axes_strong.off_axis.empty());
  CHECK(axes_strong.max_axis_distance > 1e-4);
}

TEST_CASE("transition estimate and variance helper") {
  CHECK(gamma_pt_estimate(6, 1.0) == doctest::Approx(25.0 / 6.0 / 400.0));
  CHECK(gamma_pt_estimate(2, 2.0) == doctest::Approx(2.0 * 0.5 / 4.0));
  CHECK_THROWS_AS(gamma_pt_estimate(5, 1.0), DomainError);
  const std::vector<double> v{1.0, 2.0, 3.0, 4.0};
  CHECK(variance(v) == doctest::Approx(1.25));
  CHECK(variance(std::vector<double>{}) == 0.0);
}

TEST_CASE("variance scan detects the transition on a coarse grid") {
  const auto b = build_basis(6, 0.0);
  const auto h = build_xxz_hamiltonian(b, {1.0, 0.3, {}});
  const auto jumps = build_dephasing_jumps(b);
  const SectorDecomposition sec(b);
  const std::vector<double> grid{1e-4, 1e-3, 3e-2, 1e-1};
  const auto scan = variance_scan([&](double g) { return build_liouvillian(h, jumps, g); }, sec, grid);
  REQUIRE(scan.rows.size() == 4);
  CHECK_FALSE(scan.rows[0].pt_broken);
  CHECK_FALSE(scan.rows[1].pt_broken);
  CHECK(scan.rows[3].pt_broken);
  REQUIRE(scan.empirical_transition.has_value());
  CHECK(*scan.empirical_transition >= 1e-3);
  // below the transition the odd sector barely spreads along the real axis
  CHECK(scan.rows[0].odd_scaled * 10.0 < scan.rows[0].total_scaled);
}

TEST_CASE("spectral propagation matches the matrix exponential") {
  const auto liou = chain(4, 0.3, 0.2);
  const auto spec = full_spectrum(liou, SectorDecomposition(liou.basis));
  const auto rho0 = neel_state(liou.basis);
  const CMat dense = dense_matrix(liou);
  for (double t : {0.0, 0.7, 3.0}) {
    const CVec exact = oracle::expm_apply(dense, rho0.data, t);
    CHECK((spectral_propagate(spec, rho0, t) - exact).norm() < 1e-11);
  }
}

TEST_CASE("mode contributions reconstruct the observable") {
  const auto liou = chain(4, 0.3, 0.1);
  const SectorDecomposition sec(liou.basis);
  const auto spec = full_spectrum(liou, sec);
  const auto rho0 = neel_state(liou.basis);
  const auto ms = build_staggered_magnetization(liou.basis);
  const auto modes = mode_contributions(spec, rho0, ms);
  const CMat dense = dense_matrix(liou);
  for (double t : {0.0, 1.3, 5.0}) {
    const cplx exact = expectation(ms, oracle::expm_apply(dense, rho0.data, t));
    CHECK(std::abs(reconstruct_expectation(modes, t) - exact) < 1e-11);
  }
  // only the odd sector can carry M_s
  for (const auto& m : modes)
    if (!(m.label == SectorLabel{-1, -1})) CHECK(std::abs(m.weight) < 1e-12);
}

TEST_CASE("dense diagonalization refuses oversized problems") {
  const auto liou = chain(6, 0.3, 0.1);
  SpectralOptions opts;
  opts.max_hilbert_dim = 10;
  CHECK_THROWS_AS(full_spectrum(liou, SectorDecomposition(liou.basis), opts), DomainError);
}
