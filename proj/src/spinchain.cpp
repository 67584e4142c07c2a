#include "lindlab/spinchain.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <string>

namespace lindlab {

double max_abs(const SpMat& m) {
  double best = 0.0;
  for (Eigen::Index k = 0; k < m.outerSize(); ++k)
    for (SpMat::InnerIterator it(m, k); it; ++it) best = std::max(best, std::abs(it.value()));
  return best;
}

namespace {

constexpr int kMaxSites = 30;

void check_sites(int n_sites) {
  if (n_sites < 2) throw DomainError("n_sites must be >= 2, got " + std::to_string(n_sites));
  if (n_sites > kMaxSites) throw DomainError("n_sites above " + std::to_string(kMaxSites) + " is not supported");
}

void check_site(const SectorBasis& basis, int site) {
  if (site < 1 || site > basis.n_sites())
    throw DomainError("site index " + std::to_string(site) + " outside [1, " +
                      std::to_string(basis.n_sites()) + "]");
}

SparseOperator from_triplets(const BasisPtr& basis, const std::vector<Triplet>& triplets,
                             bool hermitian) {
  const auto d = static_cast<Eigen::Index>(basis->dim());
  SparseOperator op{basis, SpMat(d, d), hermitian};
  op.matrix.setFromTriplets(triplets.begin(), triplets.end());
  op.matrix.makeCompressed();
  return op;
}

// Permutation operator |s> -> |map(s)>; every image must stay in the basis.
template <typename Map>
SparseOperator permutation_operator(const BasisPtr& basis, Map map, const char* name) {
  std::vector<Triplet> trip;
  trip.reserve(basis->dim());
  for (std::size_t k = 0; k < basis->dim(); ++k) {
    const auto target = basis->index_of(map(basis->state(k)));
    if (!target) throw DomainError(std::string(name) + " maps a state outside the basis");
    trip.emplace_back(static_cast<std::int64_t>(*target), static_cast<std::int64_t>(k), 1.0);
  }
  return from_triplets(basis, trip, true);
}

std::uint64_t reverse_sites(std::uint64_t s, int n) {
  std::uint64_t r = 0;
  for (int k = 0; k < n; ++k)
    if ((s >> k) & 1U) r |= std::uint64_t{1} << (n - 1 - k);
  return r;
}

}  // namespace

SectorBasis::SectorBasis(int n_sites, double total_sz) : n_sites_(n_sites), total_sz_(total_sz) {
  check_sites(n_sites);
  const double n_up_real = n_sites / 2.0 + total_sz;
  const double n_up_rounded = std::round(n_up_real);
  if (std::abs(n_up_real - n_up_rounded) > 1e-12 || n_up_rounded < 0 || n_up_rounded > n_sites)
    throw DomainError("total_sz " + std::to_string(total_sz) + " incompatible with " +
                      std::to_string(n_sites) + " sites");
  const int n_up = static_cast<int>(n_up_rounded);
  const std::uint64_t limit = std::uint64_t{1} << n_sites;
  for (std::uint64_t s = 0; s < limit; ++s)
    if (std::popcount(s) == n_up) states_.push_back(s);
}

SectorBasis::SectorBasis(int n_sites) : n_sites_(n_sites) {
  check_sites(n_sites);
  states_.resize(std::size_t{1} << n_sites);
  for (std::size_t s = 0; s < states_.size(); ++s) states_[s] = s;
}

std::optional<std::size_t> SectorBasis::index_of(std::uint64_t config) const {
  const auto it = std::lower_bound(states_.begin(), states_.end(), config);
  if (it == states_.end() || *it != config) return std::nullopt;
  return static_cast<std::size_t>(it - states_.begin());
}

BasisPtr build_basis(int n_sites, double total_sz) {
  return std::make_shared<const SectorBasis>(n_sites, total_sz);
}

BasisPtr build_full_basis(int n_sites) { return std::make_shared<const SectorBasis>(n_sites); }

double SparseOperator::hermiticity_deviation() const {
  const SpMat diff = matrix - SpMat(matrix.adjoint());
  return max_abs(diff);
}

CouplingSpec CouplingSpec::power_law(double j_coupling, double anisotropy, int n_sites,
                                     double alpha, int cutoff) {
  CouplingSpec spec{j_coupling, anisotropy, {}};
  for (int i = 1; i <= n_sites; ++i)
    for (int j = i + 1; j <= n_sites && j - i <= cutoff; ++j)
      spec.long_range.push_back({i, j, 1.0 / std::pow(static_cast<double>(j - i), alpha)});
  return spec;
}

SparseOperator build_xxz_hamiltonian(const BasisPtr& basis, const CouplingSpec& spec) {
  const int n = basis->n_sites();
  std::vector<Bond> bonds = spec.long_range;
  if (bonds.empty())
    for (int i = 1; i < n; ++i) bonds.push_back({i, i + 1, 1.0});
  for (const auto& b : bonds) {
    check_site(*basis, b.i);
    check_site(*basis, b.j);
    if (b.i == b.j) throw DomainError("bond connects a site to itself");
  }

  std::vector<Triplet> trip;
  trip.reserve(basis->dim() * (bonds.size() + 1));
  for (std::size_t k = 0; k < basis->dim(); ++k) {
    const std::uint64_t s = basis->state(k);
    double diag = 0.0;
    for (const auto& b : bonds) {
      const double jw = spec.j_coupling * b.weight;
      const bool up_i = (s >> (b.i - 1)) & 1U;
      const bool up_j = (s >> (b.j - 1)) & 1U;
      diag += jw * spec.anisotropy * (up_i == up_j ? 0.25 : -0.25);
      if (up_i != up_j && jw != 0.0) {
        // SxSx + SySy = (S+S- + S-S+)/2 flips an antiparallel pair.
        const std::uint64_t flipped = s ^ (std::uint64_t{1} << (b.i - 1)) ^ (std::uint64_t{1} << (b.j - 1));
        const auto target = basis->index_of(flipped);
        trip.emplace_back(static_cast<std::int64_t>(*target), static_cast<std::int64_t>(k), 0.5 * jw);
      }
    }
    if (diag != 0.0) trip.emplace_back(static_cast<std::int64_t>(k), static_cast<std::int64_t>(k), diag);
  }
  return from_triplets(basis, trip, true);
}

SparseOperator build_site_sz(const BasisPtr& basis, int site) {
  check_site(*basis, site);
  std::vector<Triplet> trip;
  trip.reserve(basis->dim());
  for (std::size_t k = 0; k < basis->dim(); ++k)
    trip.emplace_back(static_cast<std::int64_t>(k), static_cast<std::int64_t>(k), basis->sz(k, site));
  return from_triplets(basis, trip, true);
}

std::vector<SparseOperator> build_dephasing_jumps(const BasisPtr& basis) {
  std::vector<SparseOperator> jumps;
  jumps.reserve(static_cast<std::size_t>(basis->n_sites()));
  for (int i = 1; i <= basis->n_sites(); ++i) jumps.push_back(build_site_sz(basis, i));
  return jumps;
}

SparseOperator build_site_sx(const BasisPtr& basis, int site) {
  check_site(*basis, site);
  if (basis->total_sz()) throw DomainError("S^x leaves a fixed-magnetization sector");
  std::vector<Triplet> trip;
  for (std::size_t k = 0; k < basis->dim(); ++k) {
    const auto target = basis->index_of(basis->state(k) ^ (std::uint64_t{1} << (site - 1)));
    trip.emplace_back(static_cast<std::int64_t>(*target), static_cast<std::int64_t>(k), 0.5);
  }
  return from_triplets(basis, trip, true);
}

SparseOperator build_reflection(const BasisPtr& basis) {
  const int n = basis->n_sites();
  return permutation_operator(basis, [n](std::uint64_t s) { return reverse_sites(s, n); }, "reflection");
}

SparseOperator build_spin_flip(const BasisPtr& basis) {
  if (basis->total_sz() && !basis->zero_magnetization())
    throw DomainError("spin inversion maps total_sz to -total_sz; requires total_sz = 0");
  const std::uint64_t mask = (std::uint64_t{1} << basis->n_sites()) - 1;
  return permutation_operator(basis, [mask](std::uint64_t s) { return s ^ mask; }, "spin inversion");
}

ParityOperators build_parity_operators(const BasisPtr& basis) {
  return {build_reflection(basis), build_spin_flip(basis)};
}

SparseOperator build_staggered_magnetization(const BasisPtr& basis) {
  const int n = basis->n_sites();
  std::vector<Triplet> trip;
  trip.reserve(basis->dim());
  for (std::size_t k = 0; k < basis->dim(); ++k) {
    double value = 0.0;
    for (int i = 1; i <= n; ++i) value += (i % 2 == 0 ? 1.0 : -1.0) * basis->sz(k, i);
    trip.emplace_back(static_cast<std::int64_t>(k), static_cast<std::int64_t>(k), value / n);
  }
  return from_triplets(basis, trip, true);
}

SparseOperator build_total_magnetization(const BasisPtr& basis) {
  std::vector<Triplet> trip;
  trip.reserve(basis->dim());
  for (std::size_t k = 0; k < basis->dim(); ++k) {
    double value = 0.0;
    for (int i = 1; i <= basis->n_sites(); ++i) value += basis->sz(k, i);
    trip.emplace_back(static_cast<std::int64_t>(k), static_cast<std::int64_t>(k), value);
  }
  return from_triplets(basis, trip, true);
}

SparseOperator build_spin_current(const BasisPtr& basis, int site) {
  check_site(*basis, site);
  check_site(*basis, site + 1);
  std::vector<Triplet> trip;
  const std::uint64_t a = std::uint64_t{1} << (site - 1);
  const std::uint64_t b = std::uint64_t{1} << site;
  for (std::size_t k = 0; k < basis->dim(); ++k) {
    const std::uint64_t s = basis->state(k);
    const bool up_a = s & a;
    const bool up_b = s & b;
    if (up_a == up_b) continue;
    const auto target = basis->index_of(s ^ a ^ b);
    // S^+_k S^-_{k+1} raises site k: acts on (down, up) with +i, the reverse with -i.
    const cplx value = up_b ? I : -I;
    trip.emplace_back(static_cast<std::int64_t>(*target), static_cast<std::int64_t>(k), value);
  }
  return from_triplets(basis, trip, true);
}

SparseOperator identity_operator(const BasisPtr& basis) {
  std::vector<Triplet> trip;
  trip.reserve(basis->dim());
  for (std::size_t k = 0; k < basis->dim(); ++k)
    trip.emplace_back(static_cast<std::int64_t>(k), static_cast<std::int64_t>(k), 1.0);
  return from_triplets(basis, trip, true);
}

std::uint64_t neel_configuration(int n_sites) {
  std::uint64_t s = 0;
  for (int site = 2; site <= n_sites; site += 2) s |= std::uint64_t{1} << (site - 1);
  return s;
}

DegeneracyInfo detect_degeneracy(const RVec& sorted_energies, double scale, double rel_tol) {
  DegeneracyInfo info;
  double best = std::numeric_limits<double>::infinity();
  for (Eigen::Index k = 1; k < sorted_energies.size(); ++k) {
    const double gap = sorted_energies[k] - sorted_energies[k - 1];
    if (gap < best) {
      best = gap;
      info.first = static_cast<std::size_t>(k - 1);
      info.second = static_cast<std::size_t>(k);
      info.gap = gap;
    }
  }
  info.degenerate = sorted_energies.size() > 1 && best < rel_tol * scale;
  return info;
}

}  // namespace lindlab
