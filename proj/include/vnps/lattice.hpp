#pragma once

#include <cstddef>
#include <utility>
#include <vector>

#include "vnps/pauli.hpp"

namespace vnps {

/// A rows x cols lattice with row-major site labels (label = row * cols + col).
struct LatticeSpec {
  std::size_t rows = 0;
  std::size_t cols = 0;
  bool periodic = false;
  /// Undirected bonds between row-major labels, stored with first < second.
  std::vector<std::pair<std::size_t, std::size_t>> edges;
  /// site_order[label] = position of that site on the MPS chain.
  std::vector<std::size_t> site_order;

  std::size_t n_sites() const { return rows * cols; }
  void validate() const;
};

/// Square grid plus the (r, c)-(r+1, c+1) diagonal of every plaquette, i.e. a
/// triangular lattice of coordination 6 when periodic. Chain order is a
/// row-major snake.
LatticeSpec build_triangular_lattice(std::size_t rows, std::size_t cols, bool periodic);

/// sum over bonds of J (X_i X_j + Y_i Y_j + Z_i Z_j), qubits in chain order.
PauliSum build_heisenberg(const LatticeSpec& lattice, double J);

}  // namespace vnps
