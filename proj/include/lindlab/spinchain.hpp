#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <vector>

#include "lindlab/types.hpp"

namespace lindlab {

/// Computational basis of an N-site spin-1/2 chain, optionally restricted to
/// a fixed total magnetization. Bit k of a configuration is site k+1; a set
/// bit is spin up. Configurations are stored in ascending integer order.
class SectorBasis {
 public:
  /// All configurations with magnetization `total_sz`.
  SectorBasis(int n_sites, double total_sz);
  /// Unrestricted 2^N-dimensional basis.
  explicit SectorBasis(int n_sites);

  int n_sites() const { return n_sites_; }
  /// Magnetization label, empty for the unrestricted basis.
  std::optional<double> total_sz() const { return total_sz_; }
  bool zero_magnetization() const { return total_sz_ && *total_sz_ == 0.0; }
  std::size_t dim() const { return states_.size(); }

  std::span<const std::uint64_t> states() const { return states_; }
  std::uint64_t state(std::size_t index) const { return states_[index]; }
  /// Dense index of a configuration, or empty if it lies outside the basis.
  std::optional<std::size_t> index_of(std::uint64_t config) const;

  /// Sz eigenvalue (+1/2 or -1/2) of 1-based `site` in basis state `index`.
  double sz(std::size_t index, int site) const {
    return ((states_[index] >> (site - 1)) & 1U) ? 0.5 : -0.5;
  }

 private:
  int n_sites_;
  std::optional<double> total_sz_;
  std::vector<std::uint64_t> states_;
};

using BasisPtr = std::shared_ptr<const SectorBasis>;

/// Throws DomainError unless n_sites >= 2, |total_sz| <= N/2 and
/// N/2 + total_sz is an integer.
BasisPtr build_basis(int n_sites, double total_sz);
BasisPtr build_full_basis(int n_sites);

/// Sparse operator on a SectorBasis.
struct SparseOperator {
  BasisPtr basis;
  SpMat matrix;
  bool hermitian = false;

  std::size_t dim() const { return basis->dim(); }
  CMat dense() const { return CMat(matrix); }
  /// max |A - A^dagger|
  double hermiticity_deviation() const;
};

/// One coupling term J * weight * (SxSx + SySy + Delta SzSz) between sites i, j (1-based).
struct Bond {
  int i;
  int j;
  double weight;
};

struct CouplingSpec {
  double j_coupling = 1.0;
  double anisotropy = 0.0;
  /// Explicit bond list. Empty means open nearest-neighbour chain.
  std::vector<Bond> long_range;

  /// All pairs i < j with j - i <= cutoff, weight 1/|i-j|^alpha.
  static CouplingSpec power_law(double j_coupling, double anisotropy, int n_sites, double alpha,
                                int cutoff);
};

SparseOperator build_xxz_hamiltonian(const BasisPtr& basis, const CouplingSpec& spec);

/// L_i = S^z_i for i = 1..N.
std::vector<SparseOperator> build_dephasing_jumps(const BasisPtr& basis);

/// S^z of a single site (1-based).
SparseOperator build_site_sz(const BasisPtr& basis, int site);

/// S^x of a single site. Only defined on the unrestricted basis.
SparseOperator build_site_sx(const BasisPtr& basis, int site);

/// Spatial reflection, site i <-> N+1-i.
SparseOperator build_reflection(const BasisPtr& basis);

/// Global spin inversion. Requires a zero-magnetization or unrestricted basis.
SparseOperator build_spin_flip(const BasisPtr& basis);

struct ParityOperators {
  SparseOperator reflection;
  SparseOperator spin_flip;
};

ParityOperators build_parity_operators(const BasisPtr& basis);

/// (1/N) sum_i (-1)^i S^z_i, sites counted from 1.
SparseOperator build_staggered_magnetization(const BasisPtr& basis);

/// sum_i S^z_i
SparseOperator build_total_magnetization(const BasisPtr& basis);

/// Local spin current i (S^+_k S^-_{k+1} - S^-_k S^+_{k+1}) on bond (k, k+1).
SparseOperator build_spin_current(const BasisPtr& basis, int site);

SparseOperator identity_operator(const BasisPtr& basis);

/// Configuration |down up down up ...> (site 1 down).
std::uint64_t neel_configuration(int n_sites);

/// Eigenvalues of H whose spacing is below rel_tol * ||H||; returns the
/// closest pair and its gap when any exists.
struct DegeneracyInfo {
  bool degenerate = false;
  std::size_t first = 0;
  std::size_t second = 0;
  double gap = 0.0;
};
DegeneracyInfo detect_degeneracy(const RVec& sorted_energies, double scale, double rel_tol = 1e-9);

}  // namespace lindlab
