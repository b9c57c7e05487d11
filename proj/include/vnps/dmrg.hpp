#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "vnps/mpo.hpp"
#include "vnps/mps.hpp"

namespace vnps {

struct DmrgConfig {
  TruncationPolicy policy{64, 1e-12};
  std::size_t max_sweeps = 50;
  /// Absolute change of the sweep energy below which the run stops.
  double energy_tol = 1e-8;
  double local_solver_tol = 1e-10;
  std::size_t local_solver_max_iters = 400;
  std::uint64_t seed = 1;
  /// Density-matrix perturbation for the first noise_sweeps sweeps, halved
  /// after each one. Lets the bond grow past the rank of the current state,
  /// e.g. away from a product state. Off by default.
  double noise = 0.0;
  std::size_t noise_sweeps = 0;

  void validate() const;
};

struct DmrgReport {
  std::vector<double> sweep_energies;
  std::vector<double> sweep_truncation_errors;
  std::vector<std::size_t> bond_dims;
  bool converged = false;
  /// Local eigenproblems that stopped on max_iters.
  std::size_t local_solver_failures = 0;
  double worst_local_residual = 0.0;
};

struct DmrgResult {
  Mps state;
  double energy = 0.0;
  DmrgReport report;
};

/// Two-site DMRG. The returned energy is <psi|H|psi> of the final state.
DmrgResult dmrg_ground_state(const Mpo& h, const Mps& init, const DmrgConfig& cfg);

/// States 0..n-1 from successive runs on the Hamiltonian projected onto the
/// complement of the states already found. Runs start from seeded random
/// bond-2 states. The projected operator is shifted by an upper estimate of
/// the spectrum so the excluded directions sit above every wanted level.
std::vector<DmrgResult> dmrg_excited_states(const Mpo& h, std::size_t n_states,
                                            const DmrgConfig& cfg);

std::string to_json(const DmrgReport& report);

}  // namespace vnps
