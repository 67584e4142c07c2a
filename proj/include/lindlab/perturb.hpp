#pragma once

#include <span>
#include <string>
#include <vector>

#include "lindlab/spectral.hpp"

// Weak-dephasing expansion of the Liouvillian around the closed chain, in
// the energy eigenbasis |mu> of a non-degenerate real Hamiltonian. The
// unperturbed mode |mu><nu| has eigenvalue -i(e_mu - e_nu) under the
// column-stacked generator; the perturbation is D rho = -delta rho + sum_i S_i rho S_i.
namespace lindlab {

struct EigenbasisData {
  BasisPtr basis;
  RVec energies;  ///< ascending
  RMat vectors;   ///< columns |mu>, first significant component positive
  /// site_sz[i](mu, nu) = <mu|S^z_{i+1}|nu>
  std::vector<RMat> site_sz;
  std::vector<int> reflection_parity;
  std::vector<int> flip_parity;
  double h_norm = 0.0;

  std::size_t dim() const { return static_cast<std::size_t>(energies.size()); }
  /// e_mu - e_nu
  double frequency(std::size_t mu, std::size_t nu) const {
    return energies[static_cast<Eigen::Index>(mu)] - energies[static_cast<Eigen::Index>(nu)];
  }
  /// <mu|A|nu> for an operator on the same basis.
  CMat to_eigenbasis(const CMat& op) const;

  // Residuals of the structural invariants.
  double orthogonality_residual() const;
  double sz_asymmetry() const;
  double sz_max_diagonal() const;
};

/// Throws DomainError if H is not real or if two energies lie within
/// 1e-9 ||H|| of each other (the message names the pair).
EigenbasisData build_eigenbasis(const SparseOperator& h, const SparseOperator& reflection,
                                const SparseOperator& spin_flip);

/// Pairs of distinct modes whose Bohr frequencies agree to within tol ||H||.
struct FrequencyCollision {
  std::size_t mu, nu, mu2, nu2;
  double gap;
};

struct PerturbedMode {
  std::size_t mu = 0;
  std::size_t nu = 0;
  cplx lambda0;  ///< -i (e_mu - e_nu)
  cplx lambda1;  ///< tr(u^dagger D u), multiplies gamma
  cplx lambda;   ///< lambda0 + gamma lambda1
  /// First-order coefficients over |mu'><nu'| (d x d), when requested.
  CMat u1;
};

struct PerturbOptions {
  double collision_tolerance = 1e-8;
  bool with_mode_corrections = false;
  /// Exclude (mu', nu') with mu' = mu or nu' = nu instead of only the pair itself.
  bool elementwise_exclusion = false;
};

struct PerturbedSpectrum {
  std::vector<PerturbedMode> modes;  ///< all mu != nu, skipping collided modes
  std::vector<FrequencyCollision> collisions;
  std::size_t skipped = 0;
};

PerturbedSpectrum perturbed_eigenvalues(const EigenbasisData& data, double gamma, double delta,
                                        const PerturbOptions& options = {});

/// Every Bohr-frequency collision between distinct off-diagonal modes.
std::vector<FrequencyCollision> frequency_collisions(const EigenbasisData& data, double tol);

/// sum_{mu != nu} e^{-i t (e_mu - e_nu)} <mu|rho0|nu> <nu|O|mu>
std::vector<double> closed_system_series(const EigenbasisData& data, const VectorizedState& rho0,
                                         const SparseOperator& obs, std::span<const double> times);

/// e^{-gamma delta t} times the closed-system series.
std::vector<double> perturbed_ms_trajectory(const EigenbasisData& data, const VectorizedState& rho0,
                                            const SparseOperator& obs, double gamma, double delta,
                                            std::span<const double> times);

struct CrossTermReport {
  /// max_t |O(gamma) term| / max_t |closed-system series|
  double residual = 0.0;
  double absolute = 0.0;
  double scale = 0.0;
  /// Largest real part of any single cross-term coefficient before the sum.
  double max_cross_real = 0.0;
  /// Operands with non-real eigenbasis elements ("rho0", "observable").
  std::vector<std::string> non_real_operands;
  std::size_t skipped_denominators = 0;
};

/// Sums the two O(gamma) cross terms of the expansion in which the initial
/// state carries +i sum K/W and the observable carries -i sum K/W, with
/// K = sum_i <mu'|S_i|mu><nu|S_i|nu'> and W = e_mu - e_nu - e_mu' + e_nu'.
CrossTermReport verify_cross_term_cancellation(const EigenbasisData& data, const VectorizedState& rho0,
                                               const SparseOperator& obs, std::span<const double> times,
                                               const PerturbOptions& options = {});

/// R(t) with e^{gamma delta t} <O(t)> = <O(t)>_0 + gamma R(t) + O(gamma^2),
/// from first-order corrections to both right and left eigenmodes.
/// Requires <mu|O|mu> = 0.
std::vector<double> first_order_response(const EigenbasisData& data, const VectorizedState& rho0,
                                         const SparseOperator& obs, std::span<const double> times,
                                         const PerturbOptions& options = {});

struct DampingRow {
  double gamma = 0.0;
  /// max_t |e^{gamma delta t} <O(t)>_exact - <O(t)>_0|
  double deviation = 0.0;
  /// deviation / gamma^2
  double c_quadratic = 0.0;
};

struct DampingScaling {
  std::vector<DampingRow> rows;
  double exponent = 0.0;  ///< slope of log deviation against log gamma
  double exponent_error = 0.0;
  /// max_t |R(t)|: the size of the first-order term.
  double first_order_amplitude = 0.0;
};

/// Compares exact spectral dynamics with the stripped damping law at each gamma.
DampingScaling damping_law_scaling(const LiouvillianFactory& factory, const SectorDecomposition& sectors,
                                   const EigenbasisData& data, const VectorizedState& rho0,
                                   const SparseOperator& obs, double delta, std::span<const double> gammas,
                                   std::span<const double> times);

}  // namespace lindlab
