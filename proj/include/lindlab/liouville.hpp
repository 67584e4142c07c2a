#pragma once

#include <memory>
#include <optional>
#include <vector>

#include "lindlab/kernels.hpp"
#include "lindlab/spinchain.hpp"

namespace lindlab {

// Vectorization is column stacking: entry rho(a, b) lives at a + b d, and
// vec(A X B) = (B^T kron A) vec(X).

CVec vectorize(const CMat& m);
CMat unvectorize(const CVec& v, std::size_t d);

/// Kronecker product of sparse matrices, (A kron B)[i_a n_b + i_b, j_a m_b + j_b] = A_ij B_kl.
SpMat kron(const SpMat& a, const SpMat& b);
SpMat sparse_identity(std::int64_t n);

/// tr(O rho) for column-stacked rho.
cplx expectation(const SparseOperator& obs, const CVec& rho);

/// Column-stacked density matrix (or any operator) on a SectorBasis.
struct VectorizedState {
  BasisPtr basis;
  CVec data;

  static VectorizedState from_matrix(BasisPtr basis, const CMat& rho);
  /// |psi><psi| for a normalized state vector.
  static VectorizedState pure(BasisPtr basis, const CVec& psi);
  static VectorizedState maximally_mixed(BasisPtr basis);

  CMat matrix() const { return unvectorize(data, basis->dim()); }
  cplx trace() const;
  double hermiticity_deviation() const;
  /// Smallest eigenvalue of the Hermitian part.
  double min_eigenvalue() const;
  double purity() const;
};

struct LiouvillianOptions {
  /// Skip the d^2 x d^2 sparse assembly; only the matrix-free generator is
  /// kept (requires diagonal jump operators). Used for d ~ 10^3.
  bool assemble_matrix = true;
  /// Multiplies the L rho L^dagger term. Anything but +1 breaks trace
  /// preservation and exists only for mutation testing.
  double jump_term_sign = 1.0;
};

/// Lindbladian L rho = -i[H, rho] + gamma sum_i (L_i rho L_i^dag - 1/2 {L_i^dag L_i, rho}).
struct Superoperator {
  BasisPtr basis;
  SparseOperator hamiltonian;
  std::vector<SparseOperator> jumps;
  double gamma = 0.0;
  /// -tr(L) / (gamma d^2); empty when gamma == 0.
  std::optional<double> delta;
  /// Multiple of the identity already added (gamma delta for the traceless part).
  double shift = 0.0;
  double jump_term_sign = 1.0;

  /// Assembled d^2 x d^2 matrix; empty (0 x 0) when assembly was skipped.
  SpMat matrix;
  /// Matrix-free route; present when H is Hermitian and all jumps are diagonal.
  std::shared_ptr<const kernels::DiagonalDissipatorGenerator> generator;

  std::size_t hilbert_dim() const { return basis->dim(); }
  std::size_t dim() const { return basis->dim() * basis->dim(); }
  bool assembled() const { return matrix.rows() > 0; }
  bool traceless() const { return shift != 0.0; }

  /// Induced 1-norm (max column absolute sum); an upper bound on |lambda|.
  double norm_bound() const;
};

Superoperator build_liouvillian(const SparseOperator& h, const std::vector<SparseOperator>& jumps,
                                double gamma, const LiouvillianOptions& options = {});

/// -i(1 kron H - H^T kron 1)
SpMat hamiltonian_superoperator(const SparseOperator& h);
/// sum_i [conj(L_i) kron L_i - 1/2 (1 kron L_i^dag L_i) - 1/2 ((L_i^dag L_i)^T kron 1)], unscaled by gamma.
SpMat dissipator_superoperator(const std::vector<SparseOperator>& jumps, double jump_term_sign = 1.0);

/// delta = -tr(L) / (gamma d^2), cross-checked against the operator-level
/// formula sum_i (d tr(L_i^dag L_i) - |tr L_i|^2) / d^2.
double compute_delta(const Superoperator& liou);

/// Trace shift predicted from the jump operators alone.
double delta_from_jumps(const std::vector<SparseOperator>& jumps, double jump_term_sign = 1.0);

/// N/4, the value for N-site S^z dephasing.
inline double dephasing_delta(int n_sites) { return n_sites / 4.0; }

/// L' = L + gamma delta 1.
Superoperator traceless_part(const Superoperator& liou);

/// L applied to a vectorized operator.
VectorizedState apply(const Superoperator& liou, const VectorizedState& state);
void apply(const Superoperator& liou, std::span<const cplx> x, std::span<cplx> y);

/// Dense copy of the assembled matrix (throws if not assembled).
CMat dense_matrix(const Superoperator& liou);

/// max |(L^dagger vec(1))_k|: zero iff <<1| L = 0.
double trace_preservation_residual(const Superoperator& liou);

}  // namespace lindlab
