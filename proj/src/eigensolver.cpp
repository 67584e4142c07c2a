#include "lindlab/eigensolver.hpp"

#define LAPACK_COMPLEX_CPP
#include <lapacke.h>

#include <string>

namespace lindlab {

EigenDecomposition eig_real(RMat a, bool compute_vectors) {
  const auto n = static_cast<lapack_int>(a.rows());
  if (a.rows() != a.cols()) throw DomainError("eig_real: matrix must be square");
  EigenDecomposition out;
  if (n == 0) return out;
  RVec wr(n), wi(n);
  RMat vr;
  if (compute_vectors) vr.resize(n, n);
  const lapack_int info = LAPACKE_dgeev(LAPACK_COL_MAJOR, 'N', compute_vectors ? 'V' : 'N', n, a.data(), n,
                                        wr.data(), wi.data(), nullptr, 1, compute_vectors ? vr.data() : nullptr, n);
  if (info != 0) throw NumericalError("dgeev failed with info = " + std::to_string(info));
  out.values.resize(n);
  for (lapack_int k = 0; k < n; ++k) out.values[k] = cplx(wr[k], wi[k]);
  if (compute_vectors) {
    out.vectors.resize(n, n);
    for (lapack_int k = 0; k < n; ++k) {
      if (wi[k] == 0.0) {
        out.vectors.col(k) = vr.col(k).cast<cplx>();
      } else {
        // Columns k, k+1 hold the real and imaginary parts of the pair.
        out.vectors.col(k) = vr.col(k).cast<cplx>() + I * vr.col(k + 1).cast<cplx>();
        out.vectors.col(k + 1) = out.vectors.col(k).conjugate();
        ++k;
      }
    }
    for (lapack_int k = 0; k < n; ++k) out.vectors.col(k).normalize();
  }
  return out;
}

EigenDecomposition eig_complex(CMat a, bool compute_vectors) {
  const auto n = static_cast<lapack_int>(a.rows());
  if (a.rows() != a.cols()) throw DomainError("eig_complex: matrix must be square");
  EigenDecomposition out;
  if (n == 0) return out;
  out.values.resize(n);
  if (compute_vectors) out.vectors.resize(n, n);
  const lapack_int info = LAPACKE_zgeev(
      LAPACK_COL_MAJOR, 'N', compute_vectors ? 'V' : 'N', n, reinterpret_cast<lapack_complex_double*>(a.data()), n,
      reinterpret_cast<lapack_complex_double*>(out.values.data()), nullptr, 1,
      compute_vectors ? reinterpret_cast<lapack_complex_double*>(out.vectors.data()) : nullptr, n);
  if (info != 0) throw NumericalError("zgeev failed with info = " + std::to_string(info));
  if (compute_vectors)
    for (lapack_int k = 0; k < n; ++k) out.vectors.col(k).normalize();
  return out;
}

}  // namespace lindlab
