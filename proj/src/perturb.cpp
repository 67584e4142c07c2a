#include "lindlab/perturb.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "lindlab/dynamics.hpp"

namespace lindlab {

CMat EigenbasisData::to_eigenbasis(const CMat& op) const {
  const CMat v = vectors.cast<cplx>();
  return v.transpose() * op * v;
}

double EigenbasisData::orthogonality_residual() const {
  const auto d = static_cast<Eigen::Index>(dim());
  return (vectors.transpose() * vectors - RMat::Identity(d, d)).cwiseAbs().maxCoeff();
}

double EigenbasisData::sz_asymmetry() const {
  double worst = 0.0;
  for (const auto& s : site_sz) worst = std::max(worst, (s - s.transpose()).cwiseAbs().maxCoeff());
  return worst;
}

double EigenbasisData::sz_max_diagonal() const {
  double worst = 0.0;
  for (const auto& s : site_sz) worst = std::max(worst, s.diagonal().cwiseAbs().maxCoeff());
  return worst;
}

EigenbasisData build_eigenbasis(const SparseOperator& h, const SparseOperator& reflection,
                                const SparseOperator& spin_flip) {
  const CMat hd = h.dense();
  if (hd.imag().cwiseAbs().maxCoeff() > 1e-12) throw DomainError("build_eigenbasis: Hamiltonian is not real");
  if (h.hermiticity_deviation() > 1e-12) throw DomainError("build_eigenbasis: Hamiltonian is not Hermitian");

  EigenbasisData data;
  data.basis = h.basis;
  const RMat hr = hd.real();
  Eigen::SelfAdjointEigenSolver<RMat> es(hr);
  if (es.info() != Eigen::Success) throw NumericalError("build_eigenbasis: symmetric eigensolver failed");
  data.energies = es.eigenvalues();
  data.vectors = es.eigenvectors();
  data.h_norm = hr.cwiseAbs().colwise().sum().maxCoeff();

  const auto deg = detect_degeneracy(data.energies, std::max(data.h_norm, 1e-300), 1e-9);
  if (deg.degenerate)
    throw DomainError("Hamiltonian is degenerate: levels " + std::to_string(deg.first) + " and " +
                      std::to_string(deg.second) + " differ by " + std::to_string(deg.gap) +
                      " (anisotropy at a root of unity?)");

  const auto d = static_cast<Eigen::Index>(data.dim());
  for (Eigen::Index mu = 0; mu < d; ++mu) {
    auto col = data.vectors.col(mu);
    for (Eigen::Index k = 0; k < d; ++k)
      if (std::abs(col[k]) > 1e-8) {
        if (col[k] < 0.0) col *= -1.0;
        break;
      }
  }

  auto parity = [&](const SparseOperator& op, const char* name) {
    const RMat m = data.vectors.transpose() * op.dense().real() * data.vectors;
    std::vector<int> out(static_cast<std::size_t>(d));
    for (Eigen::Index mu = 0; mu < d; ++mu) {
      const double p = m(mu, mu);
      if (std::abs(std::abs(p) - 1.0) > 1e-8)
        throw NumericalError(std::string("eigenstate ") + std::to_string(mu) + " is not a " + name +
                             " eigenstate (expectation " + std::to_string(p) + ")");
      out[static_cast<std::size_t>(mu)] = p > 0.0 ? 1 : -1;
    }
    return out;
  };
  data.reflection_parity = parity(reflection, "reflection");
  data.flip_parity = parity(spin_flip, "spin-flip");

  for (int site = 1; site <= h.basis->n_sites(); ++site) {
    const RMat sz = build_site_sz(h.basis, site).dense().real();
    data.site_sz.push_back(data.vectors.transpose() * sz * data.vectors);
  }
  return data;
}

std::vector<FrequencyCollision> frequency_collisions(const EigenbasisData& data, double tol) {
  const std::size_t d = data.dim();
  struct Entry {
    double w;
    std::size_t mu, nu;
  };
  std::vector<Entry> entries;
  for (std::size_t mu = 0; mu < d; ++mu)
    for (std::size_t nu = 0; nu < d; ++nu)
      if (mu != nu) entries.push_back({data.frequency(mu, nu), mu, nu});
  std::sort(entries.begin(), entries.end(), [](const Entry& a, const Entry& b) { return a.w < b.w; });
  std::vector<FrequencyCollision> out;
  const double limit = tol * data.h_norm;
  for (std::size_t k = 0; k < entries.size(); ++k)
    for (std::size_t j = k + 1; j < entries.size() && entries[j].w - entries[k].w < limit; ++j)
      out.push_back({entries[k].mu, entries[k].nu, entries[j].mu, entries[j].nu, entries[j].w - entries[k].w});
  return out;
}

namespace {

// Coupling matrix K(mu', nu') = sum_i <mu'|S_i|mu> <nu|S_i|nu'> for one mode (mu, nu).
RMat coupling_matrix(const EigenbasisData& data, std::size_t mu, std::size_t nu) {
  const auto d = static_cast<Eigen::Index>(data.dim());
  const auto n = static_cast<Eigen::Index>(data.site_sz.size());
  RMat a(d, n), b(d, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    a.col(i) = data.site_sz[static_cast<std::size_t>(i)].col(static_cast<Eigen::Index>(mu));
    b.col(i) = data.site_sz[static_cast<std::size_t>(i)].row(static_cast<Eigen::Index>(nu)).transpose();
  }
  return a * b.transpose();
}

bool excluded(std::size_t mu, std::size_t nu, std::size_t mu2, std::size_t nu2, bool elementwise) {
  if (elementwise) return mu2 == mu || nu2 == nu;
  return mu2 == mu && nu2 == nu;
}

// sum over (mu', nu') of K Z(mu', nu') / W for every off-diagonal mode, with
// W = e_mu - e_nu - e_mu' + e_nu'. Near-zero W terms are dropped and counted.
struct Contraction {
  std::vector<CMat> values;  ///< one d x d matrix per operand, entry (mu, nu)
  std::size_t skipped = 0;
};

Contraction contract(const EigenbasisData& data, const std::vector<const CMat*>& operands,
                     const PerturbOptions& options) {
  const std::size_t d = data.dim();
  const auto dd = static_cast<Eigen::Index>(d);
  Contraction out;
  for (std::size_t k = 0; k < operands.size(); ++k) out.values.push_back(CMat::Zero(dd, dd));
  const double limit = options.collision_tolerance * data.h_norm;
  std::size_t skipped = 0;
  const auto pairs = static_cast<std::int64_t>(d * d);
#pragma omp parallel for schedule(dynamic) reduction(+ : skipped)
  for (std::int64_t p = 0; p < pairs; ++p) {
    const std::size_t mu = static_cast<std::size_t>(p) / d;
    const std::size_t nu = static_cast<std::size_t>(p) % d;
    if (mu == nu) continue;
    const RMat k = coupling_matrix(data, mu, nu);
    const double w0 = data.frequency(mu, nu);
    std::vector<cplx> acc(operands.size(), cplx{0.0, 0.0});
    for (std::size_t mu2 = 0; mu2 < d; ++mu2)
      for (std::size_t nu2 = 0; nu2 < d; ++nu2) {
        if (excluded(mu, nu, mu2, nu2, options.elementwise_exclusion)) continue;
        const double kv = k(static_cast<Eigen::Index>(mu2), static_cast<Eigen::Index>(nu2));
        if (kv == 0.0) continue;
        const double w = w0 - data.frequency(mu2, nu2);
        if (std::abs(w) < limit) {
          if (std::abs(kv) > 1e-14) ++skipped;
          continue;
        }
        for (std::size_t o = 0; o < operands.size(); ++o)
          acc[o] += kv * (*operands[o])(static_cast<Eigen::Index>(mu2), static_cast<Eigen::Index>(nu2)) / w;
      }
    for (std::size_t o = 0; o < operands.size(); ++o)
      out.values[o](static_cast<Eigen::Index>(mu), static_cast<Eigen::Index>(nu)) = acc[o];
  }
  out.skipped = skipped;
  return out;
}

void check_operands(const EigenbasisData& data, const VectorizedState& rho0, const SparseOperator& obs) {
  if (rho0.basis->dim() != data.dim() || obs.dim() != data.dim())
    throw DomainError("operands do not match the eigenbasis dimension");
}

}  // namespace

PerturbedSpectrum perturbed_eigenvalues(const EigenbasisData& data, double gamma, double delta,
                                        const PerturbOptions& options) {
  if (gamma < 0.0) throw DomainError("perturbed_eigenvalues: gamma must be non-negative");
  PerturbedSpectrum out;
  out.collisions = frequency_collisions(data, options.collision_tolerance);
  const std::size_t d = data.dim();
  std::vector<char> collided(d * d, 0);
  for (const auto& c : out.collisions) {
    collided[c.mu * d + c.nu] = 1;
    collided[c.mu2 * d + c.nu2] = 1;
  }
  const double limit = options.collision_tolerance * data.h_norm;
  for (std::size_t mu = 0; mu < d; ++mu)
    for (std::size_t nu = 0; nu < d; ++nu) {
      if (mu == nu) continue;
      if (collided[mu * d + nu]) {
        ++out.skipped;
        continue;
      }
      PerturbedMode m;
      m.mu = mu;
      m.nu = nu;
      m.lambda0 = cplx{0.0, -data.frequency(mu, nu)};
      double shift = 0.0;
      for (const auto& s : data.site_sz)
        shift += s(static_cast<Eigen::Index>(mu), static_cast<Eigen::Index>(mu)) *
                 s(static_cast<Eigen::Index>(nu), static_cast<Eigen::Index>(nu));
      m.lambda1 = cplx{-delta + shift, 0.0};
      m.lambda = m.lambda0 + gamma * m.lambda1;
      if (options.with_mode_corrections) {
        const RMat k = coupling_matrix(data, mu, nu);
        const auto dd = static_cast<Eigen::Index>(d);
        m.u1 = CMat::Zero(dd, dd);
        for (std::size_t mu2 = 0; mu2 < d; ++mu2)
          for (std::size_t nu2 = 0; nu2 < d; ++nu2) {
            if (excluded(mu, nu, mu2, nu2, options.elementwise_exclusion)) continue;
            const double w = data.frequency(mu, nu) - data.frequency(mu2, nu2);
            if (std::abs(w) < limit) continue;
            // u1 = sum K / (lambda0_m - lambda0_m') with lambda0_m - lambda0_m' = -i W
            m.u1(static_cast<Eigen::Index>(mu2), static_cast<Eigen::Index>(nu2)) =
                cplx{0.0, k(static_cast<Eigen::Index>(mu2), static_cast<Eigen::Index>(nu2)) / w};
          }
      }
      out.modes.push_back(std::move(m));
    }
  return out;
}

std::vector<double> closed_system_series(const EigenbasisData& data, const VectorizedState& rho0,
                                         const SparseOperator& obs, std::span<const double> times) {
  check_operands(data, rho0, obs);
  const CMat rho = data.to_eigenbasis(rho0.matrix());
  const CMat o = data.to_eigenbasis(obs.dense());
  const std::size_t d = data.dim();
  std::vector<double> out;
  out.reserve(times.size());
  for (double t : times) {
    cplx acc{0.0, 0.0};
    for (std::size_t mu = 0; mu < d; ++mu)
      for (std::size_t nu = 0; nu < d; ++nu) {
        if (mu == nu) continue;
        const auto m = static_cast<Eigen::Index>(mu), n = static_cast<Eigen::Index>(nu);
        acc += std::exp(cplx{0.0, -t * data.frequency(mu, nu)}) * rho(m, n) * o(n, m);
      }
    out.push_back(acc.real());
  }
  return out;
}

std::vector<double> perturbed_ms_trajectory(const EigenbasisData& data, const VectorizedState& rho0,
                                            const SparseOperator& obs, double gamma, double delta,
                                            std::span<const double> times) {
  std::vector<double> out = closed_system_series(data, rho0, obs, times);
  for (std::size_t k = 0; k < out.size(); ++k) out[k] *= std::exp(-gamma * delta * times[k]);
  return out;
}

CrossTermReport verify_cross_term_cancellation(const EigenbasisData& data, const VectorizedState& rho0,
                                               const SparseOperator& obs, std::span<const double> times,
                                               const PerturbOptions& options) {
  check_operands(data, rho0, obs);
  CrossTermReport report;
  const CMat rho = data.to_eigenbasis(rho0.matrix());
  const CMat o = data.to_eigenbasis(obs.dense());
  if (rho.imag().cwiseAbs().maxCoeff() > 1e-12) report.non_real_operands.push_back("rho0");
  if (o.imag().cwiseAbs().maxCoeff() > 1e-12) report.non_real_operands.push_back("observable");

  const Contraction c = contract(data, {&rho, &o}, options);
  report.skipped_denominators = c.skipped;
  const CMat& c_rho = c.values[0];
  const CMat& c_obs = c.values[1];

  const std::size_t d = data.dim();
  CMat cross = CMat::Zero(static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(d));
  for (std::size_t mu = 0; mu < d; ++mu)
    for (std::size_t nu = 0; nu < d; ++nu) {
      if (mu == nu) continue;
      const auto m = static_cast<Eigen::Index>(mu), n = static_cast<Eigen::Index>(nu);
      const cplx from_state = I * c_rho(m, n) * o(m, n);
      const cplx from_obs = -I * rho(m, n) * c_obs(m, n);
      report.max_cross_real =
          std::max({report.max_cross_real, std::abs(from_state.real()), std::abs(from_obs.real())});
      cross(m, n) = from_state + from_obs;
    }

  for (double t : times) {
    cplx term{0.0, 0.0}, zeroth{0.0, 0.0};
    for (std::size_t mu = 0; mu < d; ++mu)
      for (std::size_t nu = 0; nu < d; ++nu) {
        if (mu == nu) continue;
        const auto m = static_cast<Eigen::Index>(mu), n = static_cast<Eigen::Index>(nu);
        const cplx phase = std::exp(cplx{0.0, t * data.frequency(mu, nu)});
        term += phase * cross(m, n);
        zeroth += phase * rho(m, n) * o(m, n);
      }
    report.absolute = std::max(report.absolute, std::abs(term));
    report.scale = std::max(report.scale, std::abs(zeroth));
  }
  report.residual = report.scale > 0.0 ? report.absolute / report.scale : report.absolute;
  return report;
}

std::vector<double> first_order_response(const EigenbasisData& data, const VectorizedState& rho0,
                                         const SparseOperator& obs, std::span<const double> times,
                                         const PerturbOptions& options) {
  check_operands(data, rho0, obs);
  const CMat rho = data.to_eigenbasis(rho0.matrix());
  const CMat o = data.to_eigenbasis(obs.dense());
  if (o.diagonal().cwiseAbs().maxCoeff() > 1e-10)
    throw DomainError("first_order_response: observable has diagonal energy-basis elements");
  const CMat o_t = o.transpose();
  const Contraction c = contract(data, {&rho, &o_t}, options);

  const std::size_t d = data.dim();
  std::vector<double> out;
  out.reserve(times.size());
  for (double t : times) {
    cplx acc{0.0, 0.0};
    for (std::size_t mu = 0; mu < d; ++mu)
      for (std::size_t nu = 0; nu < d; ++nu) {
        if (mu == nu) continue;
        const auto m = static_cast<Eigen::Index>(mu), n = static_cast<Eigen::Index>(nu);
        // overlap tr(v^dagger rho0) and weight tr(O u) both pick up +i sum K/W
        const cplx first = I * (c.values[0](m, n) * o(n, m) + rho(m, n) * c.values[1](m, n));
        acc += std::exp(cplx{0.0, -t * data.frequency(mu, nu)}) * first;
      }
    out.push_back(acc.real());
  }
  return out;
}

DampingScaling damping_law_scaling(const LiouvillianFactory& factory, const SectorDecomposition& sectors,
                                   const EigenbasisData& data, const VectorizedState& rho0,
                                   const SparseOperator& obs, double delta, std::span<const double> gammas,
                                   std::span<const double> times) {
  if (gammas.size() < 2) throw DomainError("damping_law_scaling needs at least two gamma values");
  const std::vector<double> closed = closed_system_series(data, rho0, obs, times);
  DampingScaling out;
  std::vector<double> lg, ld;
  for (double g : gammas) {
    if (!(g > 0.0)) throw DomainError("damping_law_scaling: gamma must be positive");
    const SpectrumResult spec = full_spectrum(factory(g), sectors);
    const auto modes = mode_contributions(spec, rho0, obs);
    DampingRow row;
    row.gamma = g;
    for (std::size_t k = 0; k < times.size(); ++k) {
      const double exact = reconstruct_expectation(modes, times[k]).real();
      row.deviation = std::max(row.deviation, std::abs(std::exp(g * delta * times[k]) * exact - closed[k]));
    }
    row.c_quadratic = row.deviation / (g * g);
    lg.push_back(std::log(g));
    ld.push_back(std::log(row.deviation));
    out.rows.push_back(row);
  }
  const LinearFit fit = linear_regression(lg, ld);
  out.exponent = fit.slope;
  out.exponent_error = fit.slope_error;
  const auto response = first_order_response(data, rho0, obs, times);
  for (double r : response) out.first_order_amplitude = std::max(out.first_order_amplitude, std::abs(r));
  return out;
}

}  // namespace lindlab
