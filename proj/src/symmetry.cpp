#include "lindlab/symmetry.hpp"

#include <cmath>
#include <map>
#include <mutex>

namespace lindlab {

namespace {

std::vector<std::size_t> permutation_of(const SparseOperator& op) {
  std::vector<std::size_t> image(op.dim(), op.dim());
  for (Eigen::Index r = 0; r < op.matrix.outerSize(); ++r)
    for (SpMat::InnerIterator it(op.matrix, r); it; ++it) {
      if (std::abs(it.value() - cplx{1.0, 0.0}) > 1e-14) throw DomainError("operator is not a permutation");
      image[static_cast<std::size_t>(it.col())] = static_cast<std::size_t>(it.row());
    }
  for (auto v : image)
    if (v == op.dim()) throw DomainError("operator is not a permutation");
  return image;
}

// Element of the Hermitian operator basis.
enum class HKind { Diag, Sym, Anti };
struct HElement {
  std::size_t a;
  std::size_t b;
  HKind kind;
  auto operator<=>(const HElement&) const = default;
};

// Image of a basis element under the state permutation g, with sign.
std::pair<HElement, int> act(const std::vector<std::size_t>& g, const HElement& e) {
  const std::size_t ga = g[e.a];
  const std::size_t gb = g[e.b];
  if (e.kind == HKind::Diag) return {{ga, ga, HKind::Diag}, 1};
  if (ga < gb) return {{ga, gb, e.kind}, 1};
  return {{gb, ga, e.kind}, e.kind == HKind::Anti ? -1 : 1};
}

}  // namespace

ParitySuperoperator lift_conjugation(const SparseOperator& u, ParityKind kind) {
  const auto d = static_cast<std::int64_t>(u.dim());
  const SpMat id = sparse_identity(d);
  if (max_abs(SpMat(SpMat(u.matrix * u.matrix) - id)) > 1e-12) throw DomainError("lift_conjugation: operator is not involutive");
  if (max_abs(SpMat(SpMat(SpMat(u.matrix.adjoint()) * u.matrix) - id)) > 1e-12)
    throw DomainError("lift_conjugation: operator is not unitary");
  const SpMat u_conj = u.matrix.conjugate();
  return {kind, kron(u_conj, u.matrix)};
}

ParitySuperoperator left_multiplication(const SparseOperator& u, ParityKind kind) {
  const auto d = static_cast<std::int64_t>(u.dim());
  return {kind, kron(sparse_identity(d), u.matrix)};
}

namespace {

double commutator_max(const SpMat& a, const SpMat& b) {
  const SpMat ab = a * b;
  const SpMat ba = b * a;
  return max_abs(SpMat(ab - ba));
}

void require_assembled(const Superoperator& liou) {
  if (!liou.assembled()) throw DomainError("symmetry checks need the assembled superoperator");
}

}  // namespace

double check_weak_symmetry(const Superoperator& liou, const ParitySuperoperator& sym) {
  require_assembled(liou);
  if (liou.matrix.rows() != sym.matrix.rows()) throw DomainError("check_weak_symmetry: dimension mismatch");
  return commutator_max(liou.matrix, sym.matrix);
}

WeakSymmetryResidual check_weak_symmetry_parts(const Superoperator& liou, const ParitySuperoperator& sym) {
  WeakSymmetryResidual r;
  r.total = check_weak_symmetry(liou, sym);
  r.hamiltonian = commutator_max(hamiltonian_superoperator(liou.hamiltonian), sym.matrix);
  if (!liou.jumps.empty() && liou.gamma != 0.0) {
    const SpMat diss = liou.gamma * dissipator_superoperator(liou.jumps, liou.jump_term_sign);
    r.dissipative = commutator_max(diss, sym.matrix);
  }
  return r;
}

double check_pt_symmetry(const Superoperator& liou_traceless, const ParitySuperoperator& p_hat) {
  require_assembled(liou_traceless);
  if (liou_traceless.gamma > 0.0 && !liou_traceless.traceless())
    throw DomainError("check_pt_symmetry expects the traceless part of the Liouvillian");
  const SpMat plp = p_hat.matrix * liou_traceless.matrix * p_hat.matrix;
  const SpMat adj = liou_traceless.matrix.adjoint();
  return max_abs(SpMat(plp + adj));
}

std::string to_string(const SectorLabel& label) {
  return std::string("(") + (label.p > 0 ? "+" : "-") + "," + (label.q > 0 ? "+" : "-") + ")";
}

SectorDecomposition::SectorDecomposition(const BasisPtr& basis)
    : basis_(basis), reflection_(lift_conjugation(build_reflection(basis), ParityKind::Reflection)) {
  const bool flip_ok = !basis->total_sz() || basis->zero_magnetization();
  const SparseOperator r_op = build_reflection(basis);
  std::vector<std::vector<std::size_t>> group{permutation_of(identity_operator(basis)), permutation_of(r_op)};
  if (flip_ok) {
    const SparseOperator f_op = build_spin_flip(basis);
    spin_flip_ = lift_conjugation(f_op, ParityKind::SpinFlip);
    const SpMat rf = r_op.matrix * f_op.matrix;
    group.push_back(permutation_of(f_op));
    group.push_back(permutation_of(SparseOperator{basis, rf, true}));
    labels_.assign(kAllSectors.begin(), kAllSectors.end());
  } else {
    labels_ = {{1, 1}, {-1, 1}};
  }

  const std::size_t d = basis->dim();
  const auto dd = static_cast<std::int64_t>(d);
  std::vector<std::vector<Triplet>> columns_trip(labels_.size());
  std::vector<std::int64_t> ncols(labels_.size(), 0);
  std::vector<char> visited(d * d * 2, 0);  // key: (a, b) with a <= b, plus kind bit for a < b
  auto key = [d](const HElement& e) { return (e.a * d + e.b) * 2 + (e.kind == HKind::Anti ? 1 : 0); };
  const double inv_sqrt2 = 1.0 / std::sqrt(2.0);

  auto emit = [&](std::size_t sector, const std::map<HElement, double>& coeffs) {
    double norm2 = 0.0;
    for (const auto& [e, c] : coeffs) norm2 += c * c;
    if (norm2 < 1e-24) return;
    const double scale = 1.0 / std::sqrt(norm2);
    const std::int64_t col = ncols[sector]++;
    auto& trip = columns_trip[sector];
    for (const auto& [e, c] : coeffs) {
      const double w = c * scale;
      if (w == 0.0) continue;
      const auto a = static_cast<std::int64_t>(e.a);
      const auto b = static_cast<std::int64_t>(e.b);
      switch (e.kind) {
        case HKind::Diag:
          trip.emplace_back(a + a * dd, col, w);
          break;
        case HKind::Sym:
          trip.emplace_back(a + b * dd, col, w * inv_sqrt2);
          trip.emplace_back(b + a * dd, col, w * inv_sqrt2);
          break;
        case HKind::Anti:
          trip.emplace_back(a + b * dd, col, I * w * inv_sqrt2);
          trip.emplace_back(b + a * dd, col, -I * w * inv_sqrt2);
          break;
      }
    }
  };

  auto character = [&](std::size_t g, const SectorLabel& label) {
    switch (g) {
      case 0: return 1;
      case 1: return label.p;
      case 2: return label.q;
      default: return label.p * label.q;
    }
  };

  auto process = [&](const HElement& seed) {
    if (visited[key(seed)]) return;
    std::vector<std::pair<HElement, int>> images;
    images.reserve(group.size());
    for (const auto& g : group) {
      images.push_back(act(g, seed));
      visited[key(images.back().first)] = 1;
    }
    for (std::size_t s = 0; s < labels_.size(); ++s) {
      std::map<HElement, double> coeffs;
      for (std::size_t g = 0; g < group.size(); ++g)
        coeffs[images[g].first] += character(g, labels_[s]) * images[g].second;
      emit(s, coeffs);
    }
  };

  for (std::size_t a = 0; a < d; ++a) {
    process({a, a, HKind::Diag});
    for (std::size_t b = a + 1; b < d; ++b) {
      process({a, b, HKind::Sym});
      process({a, b, HKind::Anti});
    }
  }

  std::int64_t total = 0;
  for (std::size_t s = 0; s < labels_.size(); ++s) {
    SpMat m(dd * dd, ncols[s]);
    m.setFromTriplets(columns_trip[s].begin(), columns_trip[s].end());
    m.makeCompressed();
    bases_.push_back(std::move(m));
    total += ncols[s];
  }
  if (total != dd * dd) throw NumericalError("sector bases do not span Liouville space");
  projectors_.resize(labels_.size());
}

const ParitySuperoperator& SectorDecomposition::spin_flip() const {
  if (!spin_flip_) throw DomainError("spin inversion does not act within this basis");
  return *spin_flip_;
}

std::size_t SectorDecomposition::slot(SectorLabel label) const {
  for (std::size_t s = 0; s < labels_.size(); ++s)
    if (labels_[s] == label) return s;
  throw DomainError("sector " + to_string(label) + " is not available for this basis");
}

const SpMat& SectorDecomposition::projector(SectorLabel label) const {
  static std::mutex mutex;
  const std::size_t s = slot(label);
  std::lock_guard lock(mutex);
  if (!projectors_[s]) {
    const auto n = static_cast<std::int64_t>(basis_->dim() * basis_->dim());
    const SpMat id = sparse_identity(n);
    SpMat pr = id + static_cast<double>(label.p) * reflection_.matrix;
    if (spin_flip_) {
      const SpMat pf = id + static_cast<double>(label.q) * spin_flip_->matrix;
      pr = SpMat(pr * pf) * 0.25;
    } else {
      pr *= 0.5;
    }
    pr.prune(cplx{0.0, 0.0});
    pr.makeCompressed();
    projectors_[s] = std::move(pr);
  }
  return *projectors_[s];
}

const SpMat& SectorDecomposition::sector_basis(SectorLabel label) const { return bases_[slot(label)]; }

CVec SectorDecomposition::project(const CVec& v, SectorLabel label) const {
  if (static_cast<std::size_t>(v.size()) != basis_->dim() * basis_->dim())
    throw DomainError("project: vector length is not d^2");
  return projector(label) * v;
}

std::vector<double> SectorDecomposition::projection_norms(const CVec& v) const {
  std::vector<double> norms;
  norms.reserve(labels_.size());
  for (const auto& b : bases_) norms.push_back(CVec(b.adjoint() * v).norm());
  return norms;
}

SectorLabel SectorDecomposition::classify(const CVec& u, double dominant, double leak) const {
  const double total = u.norm();
  if (total == 0.0) throw ClassificationError("cannot classify the zero vector");
  const auto norms = projection_norms(u);
  std::optional<std::size_t> winner;
  for (std::size_t s = 0; s < norms.size(); ++s)
    if (norms[s] > dominant * total) winner = s;
  if (!winner) throw ClassificationError("no dominant symmetry sector (degenerate mode or broken symmetry)");
  for (std::size_t s = 0; s < norms.size(); ++s)
    if (s != *winner && norms[s] > leak * total)
      throw ClassificationError("mode leaks " + std::to_string(norms[s] / total) + " into sector " +
                                to_string(labels_[s]));
  return labels_[*winner];
}

}  // namespace lindlab
