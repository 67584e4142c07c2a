#pragma once

#include "lindlab/types.hpp"

// Dense non-Hermitian eigensolvers (LAPACK geev).
namespace lindlab {

struct EigenDecomposition {
  CVec values;
  /// Right eigenvectors as columns, unit 2-norm; empty when not requested.
  CMat vectors;
};

/// Real general matrix; complex-conjugate pairs come out adjacent.
EigenDecomposition eig_real(RMat a, bool compute_vectors);
EigenDecomposition eig_complex(CMat a, bool compute_vectors);

}  // namespace lindlab
