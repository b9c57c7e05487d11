#pragma once

#include <random>
#include <vector>

#include "vnps/lattice.hpp"
#include "vnps/linalg.hpp"
#include "vnps/mpo.hpp"
#include "vnps/mps.hpp"
#include "vnps/pauli.hpp"

namespace vnps::test {

inline PauliSum heisenberg_chain(std::size_t n, double J = 1.0) {
  return build_heisenberg(build_triangular_lattice(1, n, false), J);
}

inline PauliSum single(std::size_t n, const std::string& s, cplx c = 1.0) {
  PauliSum h(n);
  h.add(c, parse_pauli_string(s));
  return h;
}

/// Random Hermitian Pauli sum with `terms` strings of locality <= kmax.
inline PauliSum random_pauli_sum(std::size_t n, std::size_t terms, std::size_t kmax,
                                 std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<std::size_t> qubit(0, n - 1);
  std::uniform_int_distribution<int> op(1, 3);
  std::uniform_real_distribution<double> coeff(-1.0, 1.0);
  PauliSum h(n);
  for (std::size_t t = 0; t < terms; ++t) {
    PauliString s;
    const std::size_t k = 1 + qubit(rng) % kmax;
    for (std::size_t j = 0; j < k; ++j) s.set(qubit(rng), static_cast<Pauli>(op(rng)));
    h.add(coeff(rng), s);
  }
  return simplify(h);
}

inline Vec random_state(std::size_t dim, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g;
  Vec v(static_cast<Eigen::Index>(dim));
  for (Eigen::Index i = 0; i < v.size(); ++i) v(i) = cplx(g(rng), g(rng));
  return v / v.norm();
}

inline Mat random_hermitian(std::size_t dim, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g;
  Mat a(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(dim));
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j) a(i, j) = cplx(g(rng), g(rng));
  return (a + a.adjoint()) / 2.0;
}

inline double fidelity(const Vec& a, const Vec& b) {
  return std::norm(a.dot(b)) / (a.squaredNorm() * b.squaredNorm());
}

inline std::vector<int> neel(std::size_t n) {
  std::vector<int> bits(n);
  for (std::size_t i = 0; i < n; ++i) bits[i] = static_cast<int>(i % 2);
  return bits;
}

}  // namespace vnps::test
