#pragma once

#include <cstddef>
#include <iosfwd>
#include <vector>

#include "vnps/pauli.hpp"

namespace vnps {

/// Spatial-orbital integrals of a second-quantized electronic Hamiltonian
///
///   H = constant + sum_{pq,s} h_pq a+_ps a_qs
///       + 1/2 sum_{pqrs,st} (pq|rs) a+_ps a+_rt a_st a_qs
///
/// with two-electron integrals in chemist ordering (pq|rs). Energies in Hartree.
struct FermionIntegrals {
  std::size_t n_orbitals = 0;
  std::size_t n_electrons = 0;
  int ms2 = 0;
  double constant = 0.0;
  Eigen::MatrixXd one_body;
  std::vector<double> two_body;  // n^4, index ((p*n+q)*n+r)*n+s

  FermionIntegrals() = default;
  FermionIntegrals(std::size_t n_orbitals, std::size_t n_electrons);

  double& eri(std::size_t p, std::size_t q, std::size_t r, std::size_t s) {
    return two_body[((p * n_orbitals + q) * n_orbitals + r) * n_orbitals + s];
  }
  double eri(std::size_t p, std::size_t q, std::size_t r, std::size_t s) const {
    return two_body[((p * n_orbitals + q) * n_orbitals + r) * n_orbitals + s];
  }
  /// Writes v into all eight real-orbital permutations of (pq|rs).
  void set_eri_symmetric(std::size_t p, std::size_t q, std::size_t r, std::size_t s, double v);

  /// Checks the symmetric one-body matrix and 8-fold two-body symmetry.
  void validate(double tol = 1e-10) const;
};

/// Parses the FCIDUMP convention (namelist header, 1-based "value i j k l"
/// records, i=j=k=l=0 for the constant). Throws ParseError with a line number.
FermionIntegrals parse_fcidump(std::istream& in);

/// Folds the n_frozen lowest orbitals (doubly occupied) into the constant and
/// an effective one-body operator, keeping orbitals [n_frozen, n_frozen+n_active).
FermionIntegrals freeze_core(const FermionIntegrals& integrals, std::size_t n_frozen,
                             std::size_t n_active);

/// Jordan-Wigner mapping with interleaved spins: spatial orbital p goes to
/// qubits 2p (alpha) and 2p+1 (beta); a mode is occupied when its qubit is |1>.
PauliSum jordan_wigner(const FermionIntegrals& integrals);

/// JW images of a single spin-orbital mode on `n_modes` qubits.
PauliSum jw_annihilation(std::size_t mode, std::size_t n_modes);
PauliSum jw_creation(std::size_t mode, std::size_t n_modes);

/// (N - n_particles)^2 with N = sum_i (1 - Z_i) / 2.
PauliSum number_penalty(std::size_t n_modes, std::size_t n_particles);

}  // namespace vnps
