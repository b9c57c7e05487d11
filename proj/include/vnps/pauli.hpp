#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "vnps/linalg.hpp"

namespace vnps {

enum class Pauli : std::uint8_t { I = 0, X = 1, Y = 2, Z = 3 };

char pauli_char(Pauli p);

/// Tensor product of single-qubit Paulis on up to 64 qubits.
///
/// Bit q of `x` / `z` marks an X / Z component on qubit q; Y sets both.
struct PauliString {
  std::uint64_t x = 0;
  std::uint64_t z = 0;

  static constexpr std::size_t kMaxQubits = 64;

  Pauli op(std::size_t qubit) const;
  void set(std::size_t qubit, Pauli p);
  std::size_t locality() const;
  bool is_identity() const { return (x | z) == 0; }
  /// Highest qubit carrying a non-identity operator, or -1 for identity.
  int max_qubit() const;
  /// Sorted (qubit, op) pairs of the non-identity factors.
  std::vector<std::pair<std::size_t, Pauli>> ops() const;
  std::string to_string() const;

  friend bool operator==(const PauliString&, const PauliString&) = default;
};

/// Lexicographic order on the sorted (qubit, op) list.
bool lex_less(const PauliString& a, const PauliString& b);

/// a*b = phase * string.
std::pair<cplx, PauliString> multiply(const PauliString& a, const PauliString& b);

struct PauliTerm {
  cplx coefficient{0.0, 0.0};
  PauliString string;
};

/// Weighted sum of Pauli strings on `n_qubits` qubits.
class PauliSum {
 public:
  PauliSum() = default;
  explicit PauliSum(std::size_t n_qubits);
  PauliSum(std::size_t n_qubits, std::vector<PauliTerm> terms);

  std::size_t n_qubits() const { return n_qubits_; }
  const std::vector<PauliTerm>& terms() const { return terms_; }
  std::size_t size() const { return terms_.size(); }
  bool empty() const { return terms_.empty(); }

  void add(cplx coefficient, const PauliString& s);
  void add(const PauliTerm& t) { add(t.coefficient, t.string); }

  /// All coefficients real within `tol`.
  bool is_hermitian(double tol = 1e-12) const;
  /// Coefficient of the identity string (summed over duplicates).
  cplx identity_coefficient() const;

  PauliSum& operator+=(const PauliSum& other);
  PauliSum& operator*=(cplx factor);
  friend PauliSum operator*(const PauliSum& a, const PauliSum& b);
  friend PauliSum operator+(PauliSum a, const PauliSum& b) { return a += b; }
  friend PauliSum operator*(cplx f, PauliSum a) { return a *= f; }

 private:
  std::size_t n_qubits_ = 0;
  std::vector<PauliTerm> terms_;
};

inline constexpr double kPruneThreshold = 1e-12;

/// Merges duplicate strings, drops |c| < threshold, sorts lexicographically.
PauliSum simplify(const PauliSum& h, double threshold = kPruneThreshold);

struct SpectralBounds {
  double lower;
  double upper;
};

/// Bracket of the spectrum from the triangle inequality on unit-norm strings.
SpectralBounds spectral_bounds(const PauliSum& h);

/// Parses a single string such as "X0 Z3 Y7" ("I" or "" for identity).
PauliString parse_pauli_string(const std::string& text);

/// Line-oriented text format: "coeff_re coeff_im pauli_string" per line,
/// '#' starts a comment; an optional "# n_qubits N" line fixes the width.
PauliSum read_pauli_sum(std::istream& in);
void write_pauli_sum(std::ostream& out, const PauliSum& h);

}  // namespace vnps
