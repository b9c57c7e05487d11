#pragma once

#include <cstddef>
#include <ostream>
#include <string>
#include <vector>

#include "vnps/linalg.hpp"
#include "vnps/mps.hpp"
#include "vnps/pauli.hpp"
#include "vnps/tdvp.hpp"

namespace vnps {

/// Pointer register and the affine map E' = scale * (E - shift) applied to
/// the Hamiltonian before coupling.
struct PointerConfig {
  std::size_t r = 5;
  double t = 1.0;
  double scale = 1.0;
  double shift = 0.0;
  double margin = 0.1;
  /// When positive, the mapped Hamiltonian MPO is SVD-compressed with this
  /// relative cutoff before coupling. Off by default.
  double mpo_cutoff = 0.0;

  /// Checks r, scale, t and that the mapped spectrum [lo, up] fits the window.
  void validate(double lo, double up) const;
  /// 2 pi / (scale t), one pointer bin in original energy units.
  double bin_width() const;
};

struct ProtocolResult {
  std::vector<double> distribution;
  std::size_t peak_x = 0;
  /// Probability-weighted mean position over peak-1 .. peak+1 (unwrapped).
  double refined_x = 0.0;
  double E_estimate = 0.0;
  double E_uncertainty = 0.0;
  PointerConfig config;
  TdvpConfig evolution;
  TdvpDiagnostics diagnostics;
};

/// Window from spectral_bounds: shift = E_lo, scale = 1 and the longest t
/// that keeps the mapped spectrum inside 2^r (1 - margin) bins.
PointerConfig choose_window(const PauliSum& h, std::size_t r, double margin = 0.1);

/// Probability of pointer outcome x for an eigenvalue E_mapped after time t.
std::vector<double> theoretical_distribution(double E_mapped, double t, std::size_t r);

/// Outcome probabilities diag(F rho F^+) with F_{xz} = 2^{-r/2} exp(2 pi i x z / 2^r).
std::vector<double> pointer_readout(const Mat& rho);

/// Peak, refined position and unmapped estimate of a distribution.
void estimate_energy(const std::vector<double>& p, const PointerConfig& cfg, ProtocolResult& out);

ProtocolResult run_protocol(const PauliSum& h, const Mps& init_system, const PointerConfig& cfg,
                            const TdvpConfig& evo);

/// One run per t with the shift and scale of choose_window(h, r, margin).
/// Runs execute on up to `jobs` threads; results keep the order of t_values.
std::vector<ProtocolResult> time_sweep(const PauliSum& h, const Mps& init,
                                       const std::vector<double>& t_values, std::size_t r,
                                       const TdvpConfig& evo, double margin = 0.1,
                                       std::size_t jobs = 1, double mpo_cutoff = 0.0);

std::string to_json(const ProtocolResult& r, bool with_diagnostics = true);
/// Columns x, probability, E_bin_center.
void write_distribution_csv(std::ostream& os, const ProtocolResult& r);
/// Columns t, E_estimate, E_uncertainty.
void write_sweep_csv(std::ostream& os, const std::vector<ProtocolResult>& runs);

}  // namespace vnps
