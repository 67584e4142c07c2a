#include "lindlab/kernels.hpp"

#include <cmath>

namespace lindlab::kernels {

namespace {

inline cplx row_dot(const SpMat& a, std::int64_t row, const cplx* x) {
  cplx acc{0.0, 0.0};
  const auto* outer = a.outerIndexPtr();
  const auto* inner = a.innerIndexPtr();
  const auto* values = a.valuePtr();
  for (std::int64_t k = outer[row]; k < outer[row + 1]; ++k) acc += values[k] * x[inner[k]];
  return acc;
}

void check_dims(const SpMat& a, std::span<const cplx> x, std::span<cplx> y) {
  if (static_cast<std::size_t>(a.cols()) != x.size() || static_cast<std::size_t>(a.rows()) != y.size())
    throw DomainError("spmv: dimension mismatch");
  if (!a.isCompressed()) throw DomainError("spmv: matrix must be compressed");
}

}  // namespace

void spmv(const SpMat& a, std::span<const cplx> x, std::span<cplx> y) {
  check_dims(a, x, y);
  const std::int64_t rows = a.rows();
#pragma omp parallel for schedule(static)
  for (std::int64_t r = 0; r < rows; ++r) y[static_cast<std::size_t>(r)] = row_dot(a, r, x.data());
}

void spmv_serial(const SpMat& a, std::span<const cplx> x, std::span<cplx> y) {
  check_dims(a, x, y);
  for (std::int64_t r = 0; r < a.rows(); ++r) y[static_cast<std::size_t>(r)] = row_dot(a, r, x.data());
}

void axpy(cplx alpha, std::span<const cplx> x, std::span<cplx> y) {
  const auto n = static_cast<std::int64_t>(x.size());
#pragma omp parallel for schedule(static)
  for (std::int64_t k = 0; k < n; ++k) y[static_cast<std::size_t>(k)] += alpha * x[static_cast<std::size_t>(k)];
}

DiagonalDissipatorGenerator::DiagonalDissipatorGenerator(SpMat hamiltonian, CVec dissipator)
    : h_(std::move(hamiltonian)), dissipator_(std::move(dissipator)), d_(static_cast<std::size_t>(h_.rows())) {
  if (h_.rows() != h_.cols()) throw DomainError("generator: Hamiltonian must be square");
  if (static_cast<std::size_t>(dissipator_.size()) != d_ * d_)
    throw DomainError("generator: dissipator diagonal must have d^2 entries");
  h_.makeCompressed();
  const auto nnz = static_cast<std::size_t>(h_.nonZeros());
  bool real = true;
  for (std::size_t k = 0; k < nnz && real; ++k) real = h_.valuePtr()[k].imag() == 0.0;
  if (real) {
    real_values_.resize(nnz);
    for (std::size_t k = 0; k < nnz; ++k) real_values_[k] = h_.valuePtr()[k].real();
  }
}

void DiagonalDissipatorGenerator::apply_column(std::span<const cplx> x, std::span<cplx> y,
                                               std::size_t b) const {
  const std::size_t d = d_;
  const cplx* xb = x.data() + b * d;
  cplx* yb = y.data() + b * d;
  const cplx* diss = dissipator_.data() + b * d;
  const auto* outer = h_.outerIndexPtr();
  const auto* inner = h_.innerIndexPtr();
  const auto* values = h_.valuePtr();
  if (!real_values_.empty()) {
    const double* rv = real_values_.data();
    for (std::size_t a = 0; a < d; ++a) {
      cplx acc{0.0, 0.0};
      for (std::int64_t k = outer[a]; k < outer[a + 1]; ++k) acc += rv[k] * xb[inner[k]];
      yb[a] = cplx{acc.imag(), -acc.real()} + diss[a] * xb[a];
    }
    for (std::int64_t k = outer[b]; k < outer[b + 1]; ++k) {
      const double hv = rv[k];
      const cplx* xc = x.data() + static_cast<std::size_t>(inner[k]) * d;
      for (std::size_t a = 0; a < d; ++a) yb[a] += cplx{-hv * xc[a].imag(), hv * xc[a].real()};
    }
    return;
  }
  // -i (H rho)(:, b) + D(:, b) rho(:, b)
  for (std::size_t a = 0; a < d; ++a)
    yb[a] = -I * row_dot(h_, static_cast<std::int64_t>(a), xb) + diss[a] * xb[a];
  // +i (rho H)(:, b) = +i sum_c rho(:, c) H(c, b), with H(c, b) = conj(H(b, c)).
  for (std::int64_t k = outer[b]; k < outer[b + 1]; ++k) {
    const cplx coeff = I * std::conj(values[k]);
    const cplx* xc = x.data() + static_cast<std::size_t>(inner[k]) * d;
    for (std::size_t a = 0; a < d; ++a) yb[a] += coeff * xc[a];
  }
}

void DiagonalDissipatorGenerator::apply(std::span<const cplx> x, std::span<cplx> y) const {
  if (x.size() != dim() || y.size() != dim()) throw DomainError("generator: dimension mismatch");
  const auto d = static_cast<std::int64_t>(d_);
#pragma omp parallel for schedule(static)
  for (std::int64_t b = 0; b < d; ++b) apply_column(x, y, static_cast<std::size_t>(b));
}

void DiagonalDissipatorGenerator::apply_serial(std::span<const cplx> x, std::span<cplx> y) const {
  if (x.size() != dim() || y.size() != dim()) throw DomainError("generator: dimension mismatch");
  for (std::size_t b = 0; b < d_; ++b) apply_column(x, y, b);
}

}  // namespace lindlab::kernels
