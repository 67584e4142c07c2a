#pragma once

#include <functional>
#include <map>
#include <optional>
#include <span>
#include <vector>

#include "lindlab/symmetry.hpp"

namespace lindlab {

struct SpectralOptions {
  /// Largest Hilbert-space dimension accepted for dense diagonalization.
  std::size_t max_hilbert_dim = 100;
  bool compute_modes = true;
  /// A mode with |<v^,u^>| below this (unit vectors) is marked defective.
  double defect_threshold = 1e-10;
  /// Relative residual ||L u - lambda u|| / ||L|| above this flags the result.
  double residual_tolerance = 1e-8;
};

/// Eigen-decomposition of one symmetry block, in the sector's own coordinates.
struct SectorSpectrum {
  SectorLabel label;
  SpMat basis;  ///< d^2 x n, orthonormal columns
  CVec values;
  CMat right;  ///< n x n, unit columns
  CMat left;   ///< n x n, left.col(m)^dagger right.col(n) = delta_mn
};

/// All d^2 eigenpairs of a Liouvillian, labelled by symmetry sector.
struct SpectrumResult {
  double gamma = 0.0;
  double delta = 0.0;
  /// Induced 1-norm bound of the generator.
  double norm = 0.0;

  std::vector<cplx> eigenvalues;
  std::vector<SectorLabel> labels;
  std::vector<bool> defective;
  std::vector<double> residuals;  ///< relative to norm; empty without modes
  std::vector<SectorSpectrum> sectors;
  bool has_modes = false;

  std::size_t size() const { return eigenvalues.size(); }
  /// Some mode is defective or failed the residual check.
  bool flagged(double residual_tolerance = 1e-8) const;
  std::size_t defective_count() const;

  /// Right eigenmode u_m, column-stacked (unit norm).
  CVec right_mode(std::size_t m) const;
  /// Left eigenmode v_m with tr(v_m^dagger u_n) = delta_mn.
  CVec left_mode(std::size_t m) const;

  std::size_t sector_index(std::size_t m) const { return location[m].first; }
  std::size_t column_index(std::size_t m) const { return location[m].second; }

  /// (sector, column) of each mode.
  std::vector<std::pair<std::size_t, std::size_t>> location;
};

/// Dense eigendecomposition of every sector block, biorthonormalized via the
/// inverse of the right eigenvector matrix.
SpectrumResult full_spectrum(const Superoperator& liou, const SectorDecomposition& sectors,
                             const SpectralOptions& options = {});

/// Eigenvalues of the whole d^2 x d^2 matrix without any block structure.
std::vector<cplx> unblocked_eigenvalues(const Superoperator& liou);

struct GapResult {
  double global = 0.0;
  std::map<SectorLabel, double> per_sector;  ///< only sectors that contain decay modes
};

/// min |Re lambda| over modes with Re lambda < -decay_threshold.
GapResult dissipative_gap(const SpectrumResult& spec, double decay_threshold = 1e-10);

struct AxisClassification {
  std::vector<std::size_t> on_real_axis;      ///< |Im lambda| <= tol_imag
  std::vector<std::size_t> on_vertical_axis;  ///< |Re lambda + gamma delta| <= tol_real, not on the real axis
  std::vector<std::size_t> off_axis;
  /// max over modes of min(|Im lambda|, |Re lambda + gamma delta|)
  double max_axis_distance = 0.0;
};

AxisClassification classify_axes(const SpectrumResult& spec, double tol_real, double tol_imag);
/// 1e-7 ||L||
double default_axis_tolerance(const SpectrumResult& spec);

/// J (N-1)^2 / N * binom(N, N/2)^-2
double gamma_pt_estimate(int n_sites, double j_coupling);

using LiouvillianFactory = std::function<Superoperator(double gamma)>;

struct VarianceRow {
  double gamma = 0.0;
  double total_scaled = 0.0;  ///< Var(Re lambda) / gamma^2 over all modes
  double odd_scaled = 0.0;    ///< same over the (-,-) sector
  std::size_t off_axis = 0;
  double max_axis_distance = 0.0;
  bool pt_broken = false;
};

struct VarianceScan {
  std::vector<VarianceRow> rows;
  /// First grid point with eigenvalues off both symmetry axes.
  std::optional<double> empirical_transition;
};

VarianceScan variance_scan(const LiouvillianFactory& factory, const SectorDecomposition& sectors,
                           std::span<const double> gamma_grid, const SpectralOptions& options = {});

/// Population variance.
double variance(std::span<const double> values);

struct ModeContribution {
  cplx lambda;
  cplx overlap;  ///< tr(v_m^dagger rho0)
  cplx weight;   ///< tr(O u_m)
  SectorLabel label;
  bool defective = false;
};

std::vector<ModeContribution> mode_contributions(const SpectrumResult& spec, const VectorizedState& rho0,
                                                 const SparseOperator& obs);

/// sum_m e^{t lambda_m} overlap_m weight_m
cplx reconstruct_expectation(std::span<const ModeContribution> modes, double t);

/// sum_m e^{t lambda_m} tr(v_m^dagger rho0) u_m
CVec spectral_propagate(const SpectrumResult& spec, const VectorizedState& rho0, double t);

}  // namespace lindlab
