#include "vnps/lattice.hpp"

#include <algorithm>
#include <set>

#include "vnps/error.hpp"

namespace vnps {

void LatticeSpec::validate() const {
  const std::size_t n = n_sites();
  if (n == 0) throw InvalidArgument("lattice has no sites");
  if (site_order.size() != n) throw InvalidArgument("site_order size does not match lattice");
  std::vector<bool> used(n, false);
  for (const auto pos : site_order) {
    if (pos >= n || used[pos]) throw InvalidArgument("site_order is not a permutation");
    used[pos] = true;
  }
  std::set<std::pair<std::size_t, std::size_t>> seen;
  for (auto [a, b] : edges) {
    if (a >= n || b >= n || a == b) throw InvalidArgument("edge references an invalid site");
    if (a > b) std::swap(a, b);
    if (!seen.insert({a, b}).second) throw InvalidArgument("duplicate undirected edge");
  }
}

LatticeSpec build_triangular_lattice(std::size_t rows, std::size_t cols, bool periodic) {
  if (rows == 0 || cols == 0) throw InvalidArgument("lattice dimensions must be >= 1");
  LatticeSpec lat;
  lat.rows = rows;
  lat.cols = cols;
  lat.periodic = periodic;

  std::set<std::pair<std::size_t, std::size_t>> seen;
  auto label = [cols](std::size_t r, std::size_t c) { return r * cols + c; };
  auto bond = [&](std::size_t r0, std::size_t c0, std::size_t r1, std::size_t c1) {
    if (r1 >= rows || c1 >= cols) {
      if (!periodic) return;
      r1 %= rows;
      c1 %= cols;
    }
    std::size_t a = label(r0, c0);
    std::size_t b = label(r1, c1);
    if (a == b) return;
    if (a > b) std::swap(a, b);
    if (seen.insert({a, b}).second) lat.edges.emplace_back(a, b);
  };
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t c = 0; c < cols; ++c) {
      bond(r, c, r, c + 1);
    }
  }
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t c = 0; c < cols; ++c) {
      bond(r, c, r + 1, c);
    }
  }
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t c = 0; c < cols; ++c) {
      bond(r, c, r + 1, c + 1);
    }
  }

  lat.site_order.resize(rows * cols);
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t c = 0; c < cols; ++c) {
      const std::size_t snake_c = (r % 2 == 0) ? c : cols - 1 - c;
      lat.site_order[label(r, c)] = r * cols + snake_c;
    }
  }
  return lat;
}

PauliSum build_heisenberg(const LatticeSpec& lattice, double J) {
  lattice.validate();
  PauliSum h(lattice.n_sites());
  for (const auto& [a, b] : lattice.edges) {
    const std::size_t qa = lattice.site_order[a];
    const std::size_t qb = lattice.site_order[b];
    for (const Pauli p : {Pauli::X, Pauli::Y, Pauli::Z}) {
      PauliString s;
      s.set(qa, p);
      s.set(qb, p);
      h.add(J, s);
    }
  }
  return h;
}

}  // namespace vnps
