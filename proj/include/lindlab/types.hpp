#pragma once

#include <complex>
#include <cstdint>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>
#include <Eigen/Sparse>

namespace lindlab {

using cplx = std::complex<double>;
inline constexpr cplx I{0.0, 1.0};

// Compressed-sparse-row storage; 64-bit indices because Liouville spaces
// reach d^2 ~ 10^6 rows with tens of millions of nonzeros.
using SpMat = Eigen::SparseMatrix<cplx, Eigen::RowMajor, std::int64_t>;
using Triplet = Eigen::Triplet<cplx, std::int64_t>;

using CVec = Eigen::VectorXcd;
using CMat = Eigen::MatrixXcd;
using RVec = Eigen::VectorXd;
using RMat = Eigen::MatrixXd;

/// Precondition or configuration violated by the caller.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// A computation ran but produced something that fails its own checks.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Mode projections are split between symmetry sectors.
class ClassificationError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

/// Largest absolute entry of a sparse matrix (zero for an empty matrix).
double max_abs(const SpMat& m);

/// Largest absolute entry of a dense matrix.
inline double max_abs(const CMat& m) { return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff(); }

}  // namespace lindlab
