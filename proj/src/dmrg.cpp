#include "vnps/dmrg.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "json.hpp"

#include "sweep.hpp"
#include "vnps/error.hpp"
#include "vnps/krylov.hpp"

namespace vnps {

void DmrgConfig::validate() const {
  policy.validate();
  if (!(energy_tol > 0.0)) throw InvalidArgument("energy_tol must be positive");
  if (!(local_solver_tol > 0.0)) throw InvalidArgument("local_solver_tol must be positive");
  if (max_sweeps == 0) throw InvalidArgument("max_sweeps must be at least 1");
  if (local_solver_max_iters == 0) throw InvalidArgument("local_solver_max_iters must be at least 1");
  if (!(noise >= 0.0 && noise < 1.0)) throw InvalidArgument("noise must lie in [0, 1)");
  if (noise_sweeps >= max_sweeps && noise > 0.0)
    throw InvalidArgument("noise_sweeps must be below max_sweeps");
}

namespace {

DmrgResult single_site_exact(const Mpo& h, const Mps& init) {
  // One qubit: the operator is a 2x2 matrix.
  const auto& w = h.tensor(0);
  Mat m(2, 2);
  for (std::size_t o = 0; o < 2; ++o)
    for (std::size_t i = 0; i < 2; ++i)
      m(static_cast<Eigen::Index>(o), static_cast<Eigen::Index>(i)) = w.at(0, o, i, 0);
  RealVec ev;
  Mat vec;
  hermitian_eigh(m, ev, vec);
  Mat t(2, 1);
  t.col(0) = vec.col(0);
  DmrgResult r{Mps({t}), ev(0), {}};
  (void)init;
  r.report.sweep_energies = {ev(0)};
  r.report.sweep_truncation_errors = {0.0};
  r.report.bond_dims = r.state.bond_dims();
  r.report.converged = true;
  return r;
}

}  // namespace

DmrgResult dmrg_ground_state(const Mpo& h, const Mps& init, const DmrgConfig& cfg) {
  cfg.validate();
  if (!h.hermitian()) throw InvalidArgument("dmrg_ground_state: operator is not Hermitian");
  if (h.size() != init.size()) throw InvalidArgument("dmrg_ground_state: lengths differ");
  const double n0 = norm(init);
  if (!(n0 > 0.0)) throw InvalidArgument("dmrg_ground_state: initial state is zero");
  if (h.size() == 1) return single_site_exact(h, init);

  detail::SweepChain chain(h, scaled(init, 1.0 / n0));
  const std::size_t n = chain.size();
  DmrgReport report;
  double previous = std::numeric_limits<double>::infinity();
  std::uint64_t solver_seed = cfg.seed;

  double noise = 0.0;
  auto optimize = [&](std::size_t i, bool move_right, double& energy, double& trunc) {
    const auto cl = chain.left_dim(i);
    const auto cr = chain.right_dim(i + 1);
    Vec theta = chain.two_site(i);
    const auto apply = [&](const Vec& v) { return chain.apply_two(i, v); };
    EigenResult e = lanczos_smallest(apply, cl * 4 * cr, cfg.local_solver_tol,
                                     cfg.local_solver_max_iters, theta, ++solver_seed);
    if (!e.converged) ++report.local_solver_failures;
    report.worst_local_residual = std::max(report.worst_local_residual, e.residual);
    energy = e.value;
    const auto s = chain.split_perturbed(i, e.vector, move_right, cfg.policy, noise);
    trunc = std::max(trunc, s.truncation_error);
  };

  for (std::size_t sweep = 0; sweep < cfg.max_sweeps; ++sweep) {
    noise = sweep < cfg.noise_sweeps ? std::ldexp(cfg.noise, -static_cast<int>(sweep)) : 0.0;
    double energy = 0.0;
    double trunc = 0.0;
    for (std::size_t i = 0; i + 1 < n; ++i) optimize(i, true, energy, trunc);
    for (std::size_t i = n - 1; i-- > 0;) optimize(i, false, energy, trunc);
    report.sweep_energies.push_back(energy);
    report.sweep_truncation_errors.push_back(trunc);
    if (noise == 0.0 && std::abs(previous - energy) < cfg.energy_tol) {
      report.converged = true;
      break;
    }
    previous = energy;
  }

  DmrgResult out;
  out.state = chain.state();
  const double nn = norm(out.state);
  out.state = scaled(out.state, 1.0 / nn);
  out.energy = expectation(out.state, h).real();
  report.bond_dims = out.state.bond_dims();
  out.report = std::move(report);
  return out;
}

std::vector<DmrgResult> dmrg_excited_states(const Mpo& h, std::size_t n_states,
                                            const DmrgConfig& cfg) {
  cfg.validate();
  if (n_states == 0) throw InvalidArgument("dmrg_excited_states: n_states must be >= 1");
  if (!h.hermitian()) throw InvalidArgument("dmrg_excited_states: operator is not Hermitian");
  const std::size_t n = h.size();
  std::vector<DmrgResult> out;
  out.push_back(dmrg_ground_state(h, random_mps(n, 2, cfg.seed), cfg));
  if (n_states == 1) return out;

  // Upper end of the spectrum from a ground-state run on -H.
  DmrgConfig rough = cfg;
  rough.policy.chi_max = std::min<std::size_t>(cfg.policy.chi_max, 32);
  rough.energy_tol = 1e-6;
  const double e_max =
      -dmrg_ground_state(mpo_scaled(h, -1.0), random_mps(n, 2, cfg.seed + 7919), rough).energy;
  const double shift = e_max + 1.0 + 0.1 * std::abs(e_max);

  Mpo projected = mpo_compress(mpo_sum(h, mpo_scaled(identity_mpo(n), -shift)),
                               TruncationPolicy{1u << 20, 1e-12});
  projected = Mpo(projected.tensors(), true);
  for (std::size_t m = 1; m < n_states; ++m) {
    projected = projected_hamiltonian_mpo(projected, out.back().state);
    DmrgResult r = dmrg_ground_state(projected, random_mps(n, 2, cfg.seed + m), cfg);
    r.energy = expectation(r.state, h).real();
    out.push_back(std::move(r));
  }
  std::stable_sort(out.begin(), out.end(),
                   [](const DmrgResult& a, const DmrgResult& b) { return a.energy < b.energy; });
  return out;
}

std::string to_json(const DmrgReport& report) {
  nlohmann::json j;
  j["sweep_energies"] = report.sweep_energies;
  j["sweep_truncation_errors"] = report.sweep_truncation_errors;
  j["bond_dims"] = report.bond_dims;
  j["converged"] = report.converged;
  j["local_solver_failures"] = report.local_solver_failures;
  j["worst_local_residual"] = report.worst_local_residual;
  return j.dump(2);
}

}  // namespace vnps
