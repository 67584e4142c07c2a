#pragma once

#include <array>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "lindlab/liouville.hpp"

namespace lindlab {

enum class ParityKind { Reflection, SpinFlip, ReflectionSpinFlip, LeftSpinFlip, Other };

/// Linear map on Liouville space built from an involutive Hilbert-space operator.
struct ParitySuperoperator {
  ParityKind kind = ParityKind::Other;
  SpMat matrix;
};

/// rho -> U rho U^dagger, matrix conj(U) kron U. Throws unless U^2 = 1 and U is unitary.
ParitySuperoperator lift_conjugation(const SparseOperator& u, ParityKind kind = ParityKind::Other);
/// rho -> U rho, matrix 1 kron U.
ParitySuperoperator left_multiplication(const SparseOperator& u, ParityKind kind = ParityKind::LeftSpinFlip);

/// ||L O - O L||_max over the assembled generator.
double check_weak_symmetry(const Superoperator& liou, const ParitySuperoperator& sym);

/// The commutator split into the Hamiltonian part and the (gamma-scaled) dissipator.
struct WeakSymmetryResidual {
  double total = 0.0;
  double hamiltonian = 0.0;
  double dissipative = 0.0;
};
WeakSymmetryResidual check_weak_symmetry_parts(const Superoperator& liou, const ParitySuperoperator& sym);

/// ||P L' P + (L')^dagger||_max; `liou_traceless` must be the traceless part.
double check_pt_symmetry(const Superoperator& liou_traceless, const ParitySuperoperator& p_hat);

/// Eigenvalues (p, q) of the reflection and spin-inversion superoperators.
struct SectorLabel {
  int p = 1;
  int q = 1;
  friend bool operator==(const SectorLabel&, const SectorLabel&) = default;
  friend auto operator<=>(const SectorLabel&, const SectorLabel&) = default;
};

std::string to_string(const SectorLabel& label);
inline constexpr std::array<SectorLabel, 4> kAllSectors{{{1, 1}, {1, -1}, {-1, 1}, {-1, -1}}};

/// Splitting of Liouville space into the common eigenspaces of R^ and F^.
///
/// Orthonormal sector bases are built from orbits of the Hermitian operator
/// basis {|a><a|, (|a><b| + |b><a|)/sqrt2, i(|a><b| - |b><a|)/sqrt2} under
/// the group generated by the two parities. Those elements are Hermitian
/// and the group permutes them up to sign, so any Hermiticity-preserving
/// generator has a real matrix in every sector block.
///
/// When F does not act within the basis (total_sz != 0) only R^ is used and
/// every label carries q = +1.
class SectorDecomposition {
 public:
  explicit SectorDecomposition(const BasisPtr& basis);

  const BasisPtr& basis() const { return basis_; }
  bool has_spin_flip() const { return spin_flip_.has_value(); }
  std::span<const SectorLabel> labels() const { return labels_; }

  const ParitySuperoperator& reflection() const { return reflection_; }
  /// Throws DomainError when spin inversion is not available.
  const ParitySuperoperator& spin_flip() const;

  /// Pi_{p,q} = 1/4 (1 + p R^)(1 + q F^), built on first use.
  const SpMat& projector(SectorLabel label) const;
  /// d^2 x n_{p,q} matrix with orthonormal columns spanning the sector.
  const SpMat& sector_basis(SectorLabel label) const;
  std::size_t sector_dim(SectorLabel label) const { return static_cast<std::size_t>(sector_basis(label).cols()); }

  CVec project(const CVec& v, SectorLabel label) const;
  /// Norm of the component of v in each sector, in labels() order.
  std::vector<double> projection_norms(const CVec& v) const;

  /// Unique sector holding > 0.99 of ||u||, with every other projection at
  /// most 1e-8 ||u||; ClassificationError otherwise.
  SectorLabel classify(const CVec& u, double dominant = 0.99, double leak = 1e-8) const;

 private:
  std::size_t slot(SectorLabel label) const;

  BasisPtr basis_;
  ParitySuperoperator reflection_;
  std::optional<ParitySuperoperator> spin_flip_;
  std::vector<SectorLabel> labels_;
  std::vector<SpMat> bases_;
  mutable std::vector<std::optional<SpMat>> projectors_;
};

}  // namespace lindlab
