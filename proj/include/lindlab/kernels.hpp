#pragma once

#include <span>
#include <vector>

#include "lindlab/types.hpp"

// Data-parallel inner loops. Every OpenMP kernel has a serial twin with the
// same arithmetic, kept as the reference the tests and benchmarks compare to.
namespace lindlab::kernels {

/// y = A x
void spmv(const SpMat& a, std::span<const cplx> x, std::span<cplx> y);
void spmv_serial(const SpMat& a, std::span<const cplx> x, std::span<cplx> y);

/// y += alpha x
void axpy(cplx alpha, std::span<const cplx> x, std::span<cplx> y);

/// Matrix-free Lindblad generator for a Hermitian Hamiltonian and jump
/// operators that are diagonal in the computational basis:
///   (L rho)_ab = -i (H rho - rho H)_ab + D_ab rho_ab
/// acting on column-stacked rho (entry (a, b) at a + b d).
class DiagonalDissipatorGenerator {
 public:
  /// `hamiltonian` must be Hermitian; `dissipator` holds D in column-stacked order.
  DiagonalDissipatorGenerator(SpMat hamiltonian, CVec dissipator);

  std::size_t hilbert_dim() const { return d_; }
  std::size_t dim() const { return d_ * d_; }

  void apply(std::span<const cplx> x, std::span<cplx> y) const;
  void apply_serial(std::span<const cplx> x, std::span<cplx> y) const;

  const CVec& dissipator() const { return dissipator_; }

 private:
  void apply_column(std::span<const cplx> x, std::span<cplx> y, std::size_t b) const;

  SpMat h_;
  /// Copy of the values of H when it is real; selects the real-arithmetic path.
  std::vector<double> real_values_;
  CVec dissipator_;
  std::size_t d_;
};

}  // namespace lindlab::kernels
