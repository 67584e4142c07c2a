#include "lindlab/verify.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "lindlab/dynamics.hpp"

namespace lindlab {

Fixture parse_fixture(const std::string& name) {
  if (name == "none") return Fixture::None;
  if (name == "dissipator-sign-flip") return Fixture::DissipatorSignFlip;
  if (name == "single-site-noise") return Fixture::SingleSiteNoise;
  if (name == "sx-dephasing") return Fixture::SxDephasing;
  throw DomainError("unknown fixture '" + name +
                    "' (expected none, dissipator-sign-flip, single-site-noise or sx-dephasing)");
}

std::string to_string(Fixture f) {
  switch (f) {
    case Fixture::None: return "none";
    case Fixture::DissipatorSignFlip: return "dissipator-sign-flip";
    case Fixture::SingleSiteNoise: return "single-site-noise";
    case Fixture::SxDephasing: return "sx-dephasing";
  }
  return "none";
}

bool VerifyReport::all_passed() const { return failures() == 0; }

std::size_t VerifyReport::failures() const {
  return static_cast<std::size_t>(std::count_if(checks.begin(), checks.end(), [](const auto& c) { return !c.passed; }));
}

const CheckResult* VerifyReport::find(const std::string& name, int n_sites) const {
  for (const auto& c : checks)
    if (c.name == name && c.n_sites == n_sites) return &c;
  return nullptr;
}

namespace {

class Suite {
 public:
  Suite(VerifyReport& report, int n) : report_(report), n_(n) {}

  void check(const std::string& name, double residual, double tol, std::string note = {}) {
    report_.checks.push_back({name, n_, residual, tol, std::isfinite(residual) && residual <= tol, std::move(note)});
  }
  void fail(const std::string& name, const std::string& why) {
    report_.checks.push_back({name, n_, std::numeric_limits<double>::infinity(), 0.0, false, why});
  }

 private:
  VerifyReport& report_;
  int n_;
};

CMat random_matrix(std::size_t d, std::mt19937_64& rng) {
  std::normal_distribution<double> normal;
  const auto n = static_cast<Eigen::Index>(d);
  CMat m(n, n);
  for (Eigen::Index j = 0; j < n; ++j)
    for (Eigen::Index i = 0; i < n; ++i) m(i, j) = cplx{normal(rng), normal(rng)};
  return m;
}

struct Model {
  BasisPtr basis;
  SparseOperator hamiltonian;
  std::vector<SparseOperator> jumps;
  double jump_sign = 1.0;
  bool standard_dephasing = true;
};

Model make_model(int n, const VerifyOptions& opts) {
  Model m;
  m.basis = opts.fixture == Fixture::SxDephasing ? build_full_basis(n) : build_basis(n, 0.0);
  m.hamiltonian = build_xxz_hamiltonian(m.basis, CouplingSpec{opts.j_coupling, opts.anisotropy, {}});
  switch (opts.fixture) {
    case Fixture::None:
      m.jumps = build_dephasing_jumps(m.basis);
      break;
    case Fixture::DissipatorSignFlip:
      m.jumps = build_dephasing_jumps(m.basis);
      m.jump_sign = -1.0;
      break;
    case Fixture::SingleSiteNoise:
      m.jumps = {build_site_sz(m.basis, 1)};
      m.standard_dephasing = false;
      break;
    case Fixture::SxDephasing:
      for (int i = 1; i <= n; ++i) m.jumps.push_back(build_site_sx(m.basis, i));
      m.standard_dephasing = false;
      break;
  }
  return m;
}

void check_projectors(Suite& s, const SectorDecomposition& sectors) {
  const auto n = static_cast<std::int64_t>(sectors.basis()->dim() * sectors.basis()->dim());
  double idem = 0.0, herm = 0.0, orth = 0.0, ortho_basis = 0.0;
  SpMat sum(n, n);
  const auto labels = sectors.labels();
  for (std::size_t a = 0; a < labels.size(); ++a) {
    const SpMat& p = sectors.projector(labels[a]);
    idem = std::max(idem, max_abs(SpMat(SpMat(p * p) - p)));
    herm = std::max(herm, max_abs(SpMat(SpMat(p.adjoint()) - p)));
    sum += p;
    for (std::size_t b = a + 1; b < labels.size(); ++b)
      orth = std::max(orth, max_abs(SpMat(p * sectors.projector(labels[b]))));
    const SpMat& basis = sectors.sector_basis(labels[a]);
    if (basis.cols() > 0) {
      const SpMat gram = SpMat(basis.adjoint()) * basis;
      ortho_basis = std::max(ortho_basis, max_abs(SpMat(gram - sparse_identity(basis.cols()))));
      // columns lie inside their own projector
      ortho_basis = std::max(ortho_basis, max_abs(SpMat(SpMat(p * basis) - basis)));
    }
  }
  s.check("projector_idempotent", idem, 1e-12);
  s.check("projector_hermitian", herm, 1e-12);
  s.check("projector_orthogonal", orth, 1e-12);
  s.check("projector_complete", max_abs(SpMat(sum - sparse_identity(n))), 1e-12);
  s.check("sector_basis_orthonormal", ortho_basis, 1e-12);
}

void check_spectrum(Suite& s, const Superoperator& liou, const SectorDecomposition& sectors, const BasisPtr& basis,
                    std::mt19937_64& rng) {
  SpectrumResult spec;
  try {
    spec = full_spectrum(liou, sectors);
  } catch (const std::exception& e) {
    s.fail("spectrum", e.what());
    return;
  }
  const double norm = spec.norm;

  double resid = 0.0;
  for (double r : spec.residuals) resid = std::max(resid, r);
  s.check("eigen_residual", resid, 1e-8);
  s.check("defective_modes", static_cast<double>(spec.defective_count()), 0.0);

  double bi = 0.0;
  for (const auto& sec : spec.sectors) {
    if (sec.values.size() == 0) continue;
    const CMat g = sec.left.adjoint() * sec.right;
    bi = std::max(bi, max_abs(CMat(g - CMat::Identity(g.rows(), g.cols()))));
  }
  s.check("biorthonormality", bi, 1e-8);

  double max_re = -std::numeric_limits<double>::infinity();
  std::size_t zeros = 0;
  for (const cplx& l : spec.eigenvalues) {
    max_re = std::max(max_re, l.real());
    if (std::abs(l) < 1e-9 * norm) ++zeros;
  }
  s.check("spectrum_bound", std::max(0.0, max_re) / norm, 1e-10);
  s.check("steady_state_unique", std::abs(static_cast<double>(zeros) - 1.0), 0.0,
          std::to_string(zeros) + " eigenvalues at zero");

  const auto d = static_cast<Eigen::Index>(basis->dim());
  const SparseOperator ms = build_staggered_magnetization(basis);
  const CVec ms_t = vectorize(CMat(ms.dense().transpose()));
  double traceless = 0.0, leak = 0.0;
  std::size_t misplaced = 0;
  for (std::size_t m = 0; m < spec.size(); ++m) {
    const CVec u = spec.right_mode(m);
    if (spec.eigenvalues[m].real() < -1e-10) {
      cplx tr{0.0, 0.0};
      for (Eigen::Index a = 0; a < d; ++a) tr += u[a + a * d];
      traceless = std::max(traceless, std::abs(tr));
    }
    if (!(spec.labels[m] == SectorLabel{-1, -1})) leak = std::max(leak, std::abs(ms_t.dot(u)));
    try {
      if (!(sectors.classify(u) == spec.labels[m])) ++misplaced;
    } catch (const ClassificationError&) {
      ++misplaced;
    }
  }
  s.check("decay_modes_traceless", traceless, 1e-8);
  s.check("mode_sector_labels", static_cast<double>(misplaced), 0.0);
  s.check("ms_sector_confinement", leak, 1e-8);

  // A random full-rank density matrix stays a density matrix.
  const CMat g = random_matrix(basis->dim(), rng);
  CMat rho = g * g.adjoint();
  rho /= rho.trace();
  const VectorizedState rho0 = VectorizedState::from_matrix(basis, rho);
  double trace_dev = 0.0, herm_dev = 0.0, min_eig = std::numeric_limits<double>::infinity();
  for (double t : {0.5, 2.0, 10.0}) {
    const VectorizedState st{basis, spectral_propagate(spec, rho0, t)};
    trace_dev = std::max(trace_dev, std::abs(st.trace() - 1.0));
    herm_dev = std::max(herm_dev, st.hermiticity_deviation());
    min_eig = std::min(min_eig, st.min_eigenvalue());
  }
  s.check("evolution_trace", trace_dev, 1e-10);
  s.check("evolution_hermiticity", herm_dev, 1e-10);
  s.check("evolution_positivity", std::max(0.0, -min_eig), 1e-10);
}

void check_eigenbasis(Suite& s, const Model& model, double delta) {
  try {
    const auto par = build_parity_operators(model.basis);
    const EigenbasisData data = build_eigenbasis(model.hamiltonian, par.reflection, par.spin_flip);
    s.check("eigenbasis_orthogonal", data.orthogonality_residual(), 1e-10);
    s.check("sz_elements_symmetric", data.sz_asymmetry(), 1e-10);
    s.check("sz_diagonal_vanishes", data.sz_max_diagonal(), 1e-10);
    const auto pert = perturbed_eigenvalues(data, 1.0, delta);
    double shift = 0.0;
    for (const auto& m : pert.modes) shift = std::max(shift, std::abs(m.lambda1 + delta));
    s.check("first_order_shift_uniform", shift, 1e-10,
            std::to_string(pert.skipped) + " modes skipped by frequency collisions");
  } catch (const std::exception& e) {
    s.fail("eigenbasis", e.what());
  }
}

}  // namespace

VerifyReport run_invariant_suite(const VerifyOptions& options) {
  if (!(options.gamma > 0.0)) throw DomainError("verify: gamma must be positive");
  VerifyReport report;
  report.options = options;
  std::mt19937_64 rng(options.seed);
  for (int n : options.sizes) {
    Suite s(report, n);
    const Model model = make_model(n, options);
    s.check("hamiltonian_hermitian", model.hamiltonian.hermiticity_deviation(), 1e-14);

    LiouvillianOptions lopts;
    lopts.jump_term_sign = model.jump_sign;
    Superoperator liou;
    try {
      liou = build_liouvillian(model.hamiltonian, model.jumps, options.gamma, lopts);
    } catch (const std::exception& e) {
      s.fail("build_liouvillian", e.what());
      continue;
    }
    const double delta = liou.delta.value_or(0.0);
    s.check("delta_trace_vs_jumps", std::abs(delta - delta_from_jumps(model.jumps, model.jump_sign)), 1e-12);
    if (model.standard_dephasing) s.check("delta_quarter_n", std::abs(delta - dephasing_delta(n)), 1e-12);
    s.check("trace_preservation", trace_preservation_residual(liou), 1e-12);

    {
      const CMat x = random_matrix(model.basis->dim(), rng);
      const VectorizedState a = apply(liou, VectorizedState::from_matrix(model.basis, x));
      const VectorizedState b = apply(liou, VectorizedState::from_matrix(model.basis, x.adjoint()));
      const double dev = max_abs(CMat(b.matrix() - a.matrix().adjoint())) / std::max(1.0, max_abs(x));
      s.check("hermiticity_preservation", dev, 1e-12);
    }

    const SectorDecomposition sectors(model.basis);
    s.check("weak_symmetry_reflection", check_weak_symmetry(liou, sectors.reflection()), 1e-12);
    if (sectors.has_spin_flip()) {
      s.check("weak_symmetry_spin_flip", check_weak_symmetry(liou, sectors.spin_flip()), 1e-12);
      const auto flip = build_spin_flip(model.basis);
      s.check("pt_symmetry", check_pt_symmetry(traceless_part(liou), left_multiplication(flip)), 1e-12);
    }
    check_projectors(s, sectors);
    check_spectrum(s, liou, sectors, model.basis, rng);
    if (model.basis->zero_magnetization()) check_eigenbasis(s, model, delta);
  }
  return report;
}

}  // namespace lindlab
