#pragma once

#include <random>
#include <vector>

#include "lindlab/liouville.hpp"

// Reference implementations that share no code with the library beyond the
// operator builders.
namespace oracle {

using lindlab::CMat;
using lindlab::CVec;
using lindlab::cplx;

/// Dense Lindbladian built column by column: column (a, b) is L applied to
/// |a><b| using plain matrix products.
CMat dense_lindbladian(const CMat& h, const std::vector<CMat>& jumps, double gamma);

/// exp(t A) v through Eigen's Pade-based matrix exponential.
CVec expm_apply(const CMat& a, const CVec& v, double t);

/// Closed-system expectation tr(O psi(t) psi(t)^dagger) from the eigen-decomposition of H.
std::vector<double> schrodinger_series(const CMat& h, const CVec& psi0, const CMat& obs,
                                       const std::vector<double>& times);

/// Greedy nearest-neighbour pairing of two eigenvalue multisets; returns the
/// largest distance over the pairing (infinity if sizes differ).
double multiset_distance(std::vector<cplx> a, std::vector<cplx> b);

CMat random_matrix(Eigen::Index n, std::mt19937_64& rng);
/// Random full-rank density matrix.
CMat random_density(Eigen::Index n, std::mt19937_64& rng);

}  // namespace oracle
