#pragma once

#include <cstddef>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "vnps/linalg.hpp"
#include "vnps/mps.hpp"
#include "vnps/pauli.hpp"

namespace vnps {

/// A dense gate; support[0] is the most significant qubit of `unitary`.
struct Gate {
  Mat unitary;
  std::vector<std::size_t> support;
  std::string label;
};

struct CircuitPlan {
  std::size_t n_qubits = 0;
  std::vector<Gate> gates;

  /// Throws unless every gate is unitary within tol and supported in range.
  void validate(double tol = 1e-10) const;
};

/// Completes a matrix with orthonormal columns to a unitary whose leading
/// columns are `iso`. The complement is Gram-Schmidt over e_0, e_1, ... .
Mat complete_isometry(const Mat& iso, double tol = 1e-10);

/// Sequential staircase U_{N-1} ... U_0 |0...0> reproducing a right-canonical
/// MPS. Gate i acts on qubits i .. i + ceil(log2 chi_i).
CircuitPlan mps_to_staircase(const Mps& mps);

/// CNOT-ladder circuit for exp(-i angle/2 P); the term's coefficient is
/// ignored, only its string is used. With a pointer qubit j
/// (1-based weight index) at `pointer_qubit`, the central rotation is
/// controlled on that qubit with angle 2^{-j-1} * angle.
struct PointerControl {
  std::size_t qubit = 0;
  std::size_t j = 1;
};
CircuitPlan pauli_exponential_template(const PauliTerm& term, double angle, std::size_t n_qubits,
                                       std::optional<PointerControl> pointer = {});

struct TermResources {
  std::string term;
  std::size_t locality = 0;
  std::size_t cnot = 0;
  std::size_t single_qubit = 0;
  std::size_t controlled_rz = 0;
};

struct ResourceEstimate {
  std::size_t cnot_count = 0;
  std::size_t single_qubit_count_max = 0;
  std::size_t controlled_rz_count = 0;
  std::size_t term_count = 0;
  std::size_t trotter_steps = 0;
  std::optional<std::size_t> pointer_r;
  bool use_conjugation = true;
  /// Per term and per Trotter step.
  std::vector<TermResources> per_term;
};

/// First-order Trotter gate counts; identity terms are skipped.
ResourceEstimate trotter_resources(const PauliSum& h, std::size_t n_steps,
                                   std::optional<std::size_t> pointer_r, bool use_conjugation);

std::string to_json(const CircuitPlan& plan);
std::string to_json(const ResourceEstimate& r);

/// "label,cnot_count,term_count" header plus one row.
void write_resources_csv(std::ostream& os, const std::string& label, const ResourceEstimate& r);

}  // namespace vnps
