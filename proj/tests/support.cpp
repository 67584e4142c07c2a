#include "support.hpp"

#include <algorithm>
#include <limits>

#include <unsupported/Eigen/MatrixFunctions>

namespace oracle {

CMat dense_lindbladian(const CMat& h, const std::vector<CMat>& jumps, double gamma) {
  const Eigen::Index d = h.rows();
  const cplx i{0.0, 1.0};
  CMat out(d * d, d * d);
  for (Eigen::Index b = 0; b < d; ++b)
    for (Eigen::Index a = 0; a < d; ++a) {
      CMat e = CMat::Zero(d, d);
      e(a, b) = 1.0;
      CMat r = -i * (h * e - e * h);
      for (const auto& l : jumps) {
        const CMat ldl = l.adjoint() * l;
        r += gamma * (l * e * l.adjoint() - 0.5 * (ldl * e + e * ldl));
      }
      // column-stack r into column a + b d
      for (Eigen::Index q = 0; q < d; ++q)
        for (Eigen::Index p = 0; p < d; ++p) out(p + q * d, a + b * d) = r(p, q);
    }
  return out;
}

CVec expm_apply(const CMat& a, const CVec& v, double t) {
  const CMat scaled = t * a;
  return scaled.exp() * v;
}

std::vector<double> schrodinger_series(const CMat& h, const CVec& psi0, const CMat& obs,
                                       const std::vector<double>& times) {
  Eigen::SelfAdjointEigenSolver<CMat> es(h);
  const CMat& v = es.eigenvectors();
  const CVec c = v.adjoint() * psi0;
  std::vector<double> out;
  for (double t : times) {
    CVec phase(c.size());
    for (Eigen::Index k = 0; k < c.size(); ++k) phase[k] = std::exp(cplx{0.0, -es.eigenvalues()[k] * t}) * c[k];
    const CVec psi = v * phase;
    out.push_back(psi.dot(obs * psi).real());
  }
  return out;
}

double multiset_distance(std::vector<cplx> a, std::vector<cplx> b) {
  if (a.size() != b.size()) return std::numeric_limits<double>::infinity();
  std::vector<bool> used(b.size(), false);
  double worst = 0.0;
  for (const cplx& x : a) {
    double best = std::numeric_limits<double>::infinity();
    std::size_t at = 0;
    for (std::size_t k = 0; k < b.size(); ++k)
      if (!used[k] && std::abs(x - b[k]) < best) {
        best = std::abs(x - b[k]);
        at = k;
      }
    used[at] = true;
    worst = std::max(worst, best);
  }
  return worst;
}

CMat random_matrix(Eigen::Index n, std::mt19937_64& rng) {
  std::normal_distribution<double> normal;
  CMat m(n, n);
  for (Eigen::Index j = 0; j < n; ++j)
    for (Eigen::Index i = 0; i < n; ++i) m(i, j) = cplx{normal(rng), normal(rng)};
  return m;
}

CMat random_density(Eigen::Index n, std::mt19937_64& rng) {
  const CMat g = random_matrix(n, rng);
  CMat rho = g * g.adjoint();
  return rho / rho.trace();
}

}  // namespace oracle
