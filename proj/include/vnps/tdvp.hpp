#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "vnps/mpo.hpp"
#include "vnps/mps.hpp"

namespace vnps {

struct TdvpConfig {
  double dt = 0.05;
  std::size_t n_steps = 1;
  TruncationPolicy policy{128, 1e-12};
  double krylov_tol = 1e-12;
  std::size_t krylov_max_dim = 40;
  /// The first step is taken as substeps dt/2^K, dt/2^K, dt/2^{K-1}, ..., dt/2
  /// so bonds can open up before a finite step is taken from a low-rank state.
  /// Once every bond reaches min(chi_max, full rank) the remainder of the
  /// step is taken as one substep.
  std::size_t startup_halvings = 30;
  /// Compute <psi|H|psi> after every step (an extra contraction).
  bool track_energy = true;

  void validate() const;
};

struct TdvpStep {
  std::size_t step = 0;
  double time = 0.0;
  double norm = 1.0;
  double energy = 0.0;
  std::size_t max_bond = 0;
  /// Largest relative truncation in any split of the step.
  double truncation_error = 0.0;
};

struct TdvpDiagnostics {
  std::vector<TdvpStep> steps;
  std::vector<std::size_t> final_bond_dims;
  /// Local exponentials that were split into smaller substeps.
  std::size_t krylov_substeps = 0;
  double worst_krylov_error = 0.0;
};

struct TdvpResult {
  Mps state;
  TdvpDiagnostics diagnostics;
};

/// Symmetric two-site TDVP approximating exp(-i H dt n_steps)|psi>.
TdvpResult tdvp_evolve(const Mpo& h, const Mps& psi, const TdvpConfig& cfg);

std::string to_json(const TdvpDiagnostics& d);

}  // namespace vnps
