#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "vnps/circuit.hpp"
#include "vnps/linalg.hpp"
#include "vnps/mpo.hpp"
#include "vnps/mps.hpp"
#include "vnps/pauli.hpp"

namespace vnps {

/// Amplitudes over 2^n basis states, qubit 0 most significant.
using DenseState = Vec;

inline constexpr std::size_t kDenseQubitLimit = 14;
inline constexpr std::size_t kSparseQubitLimit = 20;
/// exact_spectrum diagonalizes densely up to this many qubits (or sector size).
inline constexpr std::size_t kDenseSpectrumDim = 1024;

Mat pauli_sum_to_dense(const PauliSum& h, std::size_t max_qubits = kDenseQubitLimit);
Mat mpo_to_dense(const Mpo& m, std::size_t max_qubits = kDenseQubitLimit);
/// O|v> by contracting the MPO against the full amplitude vector.
DenseState mpo_apply_dense(const Mpo& m, const DenseState& v);

/// H|v> computed term by term from the Pauli masks.
DenseState pauli_apply(const PauliSum& h, const DenseState& v);

struct Eigenpair {
  double value = 0.0;
  DenseState state;
  double residual = 0.0;
};

/// k lowest eigenpairs, ascending. With `hamming_weight`, the search is
/// confined to basis states with that many ones (exact for operators that
/// conserve it). Large problems use deflated Lanczos on the Pauli matvec.
std::vector<Eigenpair> exact_spectrum(const PauliSum& h, std::size_t k_lowest,
                                      std::optional<std::size_t> hamming_weight = {});

/// exp(-i H t) psi by dense eigendecomposition.
DenseState exact_evolve(const PauliSum& h, const DenseState& psi, double t);

enum class DistributionPath { spectral, echo };

/// Pointer outcome probabilities after coupling through h (x) p for time t,
/// h already in mapped units.
std::vector<double> exact_pointer_distribution(const PauliSum& h, const DenseState& psi, double t,
                                               std::size_t r,
                                               DistributionPath path = DistributionPath::spectral);

DenseState mps_to_statevector(const Mps& mps, std::size_t max_qubits = kDenseQubitLimit);
DenseState circuit_apply(const CircuitPlan& plan, const DenseState& input);

/// Partial trace onto qubits [first, first+count) of a pure state.
Mat dense_reduced_density_matrix(const DenseState& psi, std::size_t n_qubits, std::size_t first,
                                 std::size_t count);

}  // namespace vnps
