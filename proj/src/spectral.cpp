#include "lindlab/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "lindlab/eigensolver.hpp"

namespace lindlab {

namespace {

SectorSpectrum diagonalize_block(const Superoperator& liou, const SpMat& basis, SectorLabel label,
                                 bool compute_modes) {
  SectorSpectrum out;
  out.label = label;
  out.basis = basis;
  if (basis.cols() == 0) return out;

  const SpMat lb = liou.matrix * basis;
  const CMat block = CMat(SpMat(basis.adjoint() * lb));
  const double scale = std::max(1.0, block.cwiseAbs().maxCoeff());
  const bool real_block = block.imag().cwiseAbs().maxCoeff() <= 1e-12 * scale;

  EigenDecomposition eig = real_block ? eig_real(block.real(), compute_modes) : eig_complex(block, compute_modes);
  out.values = std::move(eig.values);
  if (compute_modes) {
    out.right = std::move(eig.vectors);
    // Rows of V^{-1} are the left eigenvectors, already biorthonormal to V.
    const CMat inv = out.right.partialPivLu().inverse();
    out.left = inv.adjoint();
  }
  return out;
}

}  // namespace

bool SpectrumResult::flagged(double residual_tolerance) const {
  if (defective_count() > 0) return true;
  return std::any_of(residuals.begin(), residuals.end(), [&](double r) { return r > residual_tolerance; });
}

std::size_t SpectrumResult::defective_count() const {
  return static_cast<std::size_t>(std::count(defective.begin(), defective.end(), true));
}

CVec SpectrumResult::right_mode(std::size_t m) const {
  if (!has_modes) throw DomainError("spectrum was computed without eigenmodes");
  const auto& s = sectors[location[m].first];
  return s.basis * s.right.col(static_cast<Eigen::Index>(location[m].second));
}

CVec SpectrumResult::left_mode(std::size_t m) const {
  if (!has_modes) throw DomainError("spectrum was computed without eigenmodes");
  const auto& s = sectors[location[m].first];
  return s.basis * s.left.col(static_cast<Eigen::Index>(location[m].second));
}

SpectrumResult full_spectrum(const Superoperator& liou, const SectorDecomposition& sectors,
                             const SpectralOptions& options) {
  if (liou.hilbert_dim() > options.max_hilbert_dim)
    throw DomainError("dense spectrum limited to d <= " + std::to_string(options.max_hilbert_dim) + ", got d = " +
                      std::to_string(liou.hilbert_dim()));
  if (!liou.assembled()) throw DomainError("full_spectrum needs the assembled superoperator");
  if (sectors.basis()->dim() != liou.hilbert_dim()) throw DomainError("sector decomposition does not match basis");

  SpectrumResult result;
  result.gamma = liou.gamma;
  result.delta = liou.delta.value_or(0.0);
  result.norm = liou.norm_bound();
  result.has_modes = options.compute_modes;

  const auto labels = sectors.labels();
  result.sectors.resize(labels.size());
  const auto n_sectors = static_cast<std::int64_t>(labels.size());
#pragma omp parallel for schedule(dynamic)
  for (std::int64_t s = 0; s < n_sectors; ++s) {
    const auto label = labels[static_cast<std::size_t>(s)];
    result.sectors[static_cast<std::size_t>(s)] =
        diagonalize_block(liou, sectors.sector_basis(label), label, options.compute_modes);
  }

  for (std::size_t s = 0; s < result.sectors.size(); ++s) {
    const auto& sec = result.sectors[s];
    CMat residual_block;
    if (options.compute_modes && sec.values.size() > 0) {
      const SpMat lb = liou.matrix * sec.basis;
      const CMat block = CMat(SpMat(sec.basis.adjoint() * lb));
      residual_block = block * sec.right - sec.right * sec.values.asDiagonal();
    }
    for (Eigen::Index k = 0; k < sec.values.size(); ++k) {
      result.eigenvalues.push_back(sec.values[k]);
      result.labels.push_back(sec.label);
      result.location.emplace_back(s, static_cast<std::size_t>(k));
      if (options.compute_modes) {
        // right columns have unit norm, so |<v^, u^>| = 1 / ||v||.
        const double left_norm = sec.left.col(k).norm();
        result.defective.push_back(!(left_norm * options.defect_threshold < 1.0));
        result.residuals.push_back(residual_block.col(k).norm() / std::max(result.norm, 1e-300));
      } else {
        result.defective.push_back(false);
      }
    }
  }
  return result;
}

std::vector<cplx> unblocked_eigenvalues(const Superoperator& liou) {
  const auto eig = eig_complex(dense_matrix(liou), false);
  return {eig.values.data(), eig.values.data() + eig.values.size()};
}

GapResult dissipative_gap(const SpectrumResult& spec, double decay_threshold) {
  GapResult gap;
  bool any = false;
  gap.global = std::numeric_limits<double>::infinity();
  for (std::size_t m = 0; m < spec.size(); ++m) {
    const double re = spec.eigenvalues[m].real();
    if (re >= -decay_threshold) continue;
    any = true;
    gap.global = std::min(gap.global, -re);
    auto [it, inserted] = gap.per_sector.try_emplace(spec.labels[m], -re);
    if (!inserted) it->second = std::min(it->second, -re);
  }
  if (!any) throw DomainError("no decay modes: the dissipative gap is undefined (gamma = 0?)");
  return gap;
}

AxisClassification classify_axes(const SpectrumResult& spec, double tol_real, double tol_imag) {
  AxisClassification out;
  const double shift = spec.gamma * spec.delta;
  for (std::size_t m = 0; m < spec.size(); ++m) {
    const cplx l = spec.eigenvalues[m];
    const double dist_real_axis = std::abs(l.imag());
    const double dist_vertical = std::abs(l.real() + shift);
    out.max_axis_distance = std::max(out.max_axis_distance, std::min(dist_real_axis, dist_vertical));
    if (dist_real_axis <= tol_imag)
      out.on_real_axis.push_back(m);
    else if (dist_vertical <= tol_real)
      out.on_vertical_axis.push_back(m);
    else
      out.off_axis.push_back(m);
  }
  return out;
}

double default_axis_tolerance(const SpectrumResult& spec) { return 1e-7 * spec.norm; }

double gamma_pt_estimate(int n_sites, double j_coupling) {
  if (n_sites < 2 || n_sites % 2 != 0) throw DomainError("gamma_pt_estimate needs an even N >= 2");
  const double n = n_sites;
  const double log_binom = std::lgamma(n + 1.0) - 2.0 * std::lgamma(n / 2.0 + 1.0);
  return j_coupling * (n - 1.0) * (n - 1.0) / n * std::exp(-2.0 * log_binom);
}

double variance(std::span<const double> values) {
  if (values.empty()) return 0.0;
  const double mean = std::accumulate(values.begin(), values.end(), 0.0) / static_cast<double>(values.size());
  double acc = 0.0;
  for (double v : values) acc += (v - mean) * (v - mean);
  return acc / static_cast<double>(values.size());
}

VarianceScan variance_scan(const LiouvillianFactory& factory, const SectorDecomposition& sectors,
                           std::span<const double> gamma_grid, const SpectralOptions& options) {
  for (double g : gamma_grid)
    if (!(g > 0.0)) throw DomainError("variance_scan: every gamma must be positive");
  SpectralOptions eig_only = options;
  eig_only.compute_modes = false;

  VarianceScan scan;
  scan.rows.resize(gamma_grid.size());
  const auto n = static_cast<std::int64_t>(gamma_grid.size());
#pragma omp parallel for schedule(dynamic)
  for (std::int64_t k = 0; k < n; ++k) {
    const double g = gamma_grid[static_cast<std::size_t>(k)];
    const SpectrumResult spec = full_spectrum(factory(g), sectors, eig_only);
    std::vector<double> all, odd;
    for (std::size_t m = 0; m < spec.size(); ++m) {
      all.push_back(spec.eigenvalues[m].real());
      if (spec.labels[m] == SectorLabel{-1, -1}) odd.push_back(spec.eigenvalues[m].real());
    }
    const double tol = default_axis_tolerance(spec);
    const auto axes = classify_axes(spec, tol, tol);
    VarianceRow& row = scan.rows[static_cast<std::size_t>(k)];
    row.gamma = g;
    row.total_scaled = variance(all) / (g * g);
    row.odd_scaled = variance(odd) / (g * g);
    row.off_axis = axes.off_axis.size();
    row.max_axis_distance = axes.max_axis_distance;
    row.pt_broken = !axes.off_axis.empty();
  }
  for (const auto& row : scan.rows)
    if (row.pt_broken) {
      scan.empirical_transition = row.gamma;
      break;
    }
  return scan;
}

std::vector<ModeContribution> mode_contributions(const SpectrumResult& spec, const VectorizedState& rho0,
                                                 const SparseOperator& obs) {
  if (!spec.has_modes) throw DomainError("mode_contributions needs eigenmodes");
  const CVec obs_t = vectorize(CMat(obs.dense().transpose()));
  std::vector<std::pair<CVec, CVec>> reduced;
  for (const auto& sec : spec.sectors) reduced.emplace_back(sec.basis.adjoint() * rho0.data, sec.basis.transpose() * obs_t);
  std::vector<ModeContribution> out(spec.size());
  for (std::size_t m = 0; m < spec.size(); ++m) {
    const auto& sec = spec.sectors[spec.location[m].first];
    const auto k = static_cast<Eigen::Index>(spec.location[m].second);
    const auto& [rho_red, obs_red] = reduced[spec.location[m].first];
    out[m].lambda = spec.eigenvalues[m];
    out[m].overlap = sec.left.col(k).dot(rho_red);
    out[m].weight = sec.right.col(k).transpose() * obs_red;
    out[m].label = spec.labels[m];
    out[m].defective = spec.defective[m];
  }
  return out;
}

cplx reconstruct_expectation(std::span<const ModeContribution> modes, double t) {
  cplx acc{0.0, 0.0};
  for (const auto& m : modes) acc += std::exp(t * m.lambda) * m.overlap * m.weight;
  return acc;
}

CVec spectral_propagate(const SpectrumResult& spec, const VectorizedState& rho0, double t) {
  if (!spec.has_modes) throw DomainError("spectral_propagate needs eigenmodes");
  CVec out = CVec::Zero(rho0.data.size());
  for (const auto& sec : spec.sectors) {
    if (sec.values.size() == 0) continue;
    const CVec coeffs = sec.left.adjoint() * (sec.basis.adjoint() * rho0.data);
    const CVec evolved = (t * sec.values).array().exp() * coeffs.array();
    out += sec.basis * (sec.right * evolved);
  }
  return out;
}

}  // namespace lindlab
