#pragma once

#include <cstddef>
#include <vector>

#include "vnps/linalg.hpp"
#include "vnps/mps.hpp"
#include "vnps/pauli.hpp"

namespace vnps {

/// Rank-4 MPO site tensor W[bl, out, in, br] stored densely in that order.
struct MpoTensor {
  std::size_t left = 1;
  std::size_t right = 1;
  std::vector<cplx> data;

  MpoTensor() = default;
  MpoTensor(std::size_t l, std::size_t r) : left(l), right(r), data(l * 4 * r, cplx{}) {}

  cplx& at(std::size_t bl, std::size_t out, std::size_t in, std::size_t br) {
    return data[((bl * 2 + out) * 2 + in) * right + br];
  }
  cplx at(std::size_t bl, std::size_t out, std::size_t in, std::size_t br) const {
    return data[((bl * 2 + out) * 2 + in) * right + br];
  }
};

/// Open-boundary matrix product operator on qubits.
class Mpo {
 public:
  Mpo() = default;
  Mpo(std::vector<MpoTensor> tensors, bool hermitian);

  std::size_t size() const { return tensors_.size(); }
  const MpoTensor& tensor(std::size_t i) const { return tensors_[i]; }
  const std::vector<MpoTensor>& tensors() const { return tensors_; }
  /// D_0 .. D_N.
  std::vector<std::size_t> bond_dims() const;
  std::size_t max_bond() const;
  /// Set by constructors that produce Hermitian operators by construction.
  bool hermitian() const { return hermitian_; }

 private:
  std::vector<MpoTensor> tensors_;
  bool hermitian_ = false;
};

/// Exact MPO of a Pauli sum. Bond states are the distinct (up to scale)
/// operators still to be placed to the right of each cut, which is what
/// deparallelizing the direct sum of single-term MPOs produces.
Mpo mpo_from_pauli_sum(const PauliSum& h);

/// p = sum_{j=1..r} 2^{-j} (1 - Z_j)/2 on r sites; site 0 is j = 1, the most
/// significant bit of z, so p|z> = z / 2^r |z>.
Mpo pointer_momentum_mpo(std::size_t r);

/// K = H (x) p on the concatenated chain.
Mpo couple_system_pointer(const Mpo& h, const Mpo& p);

Mpo mpo_sum(const Mpo& a, const Mpo& b);
Mpo mpo_scaled(const Mpo& a, cplx factor);
/// Identity MPO on n sites.
Mpo identity_mpo(std::size_t n);
/// |ket><bra| with bond dimensions chi_ket * chi_bra.
Mpo outer_product_mpo(const Mps& ket, const Mps& bra);

/// SVD compression in the Frobenius norm. Operators whose normalized
/// Frobenius norm falls below 1e-12 collapse to bond dimension 1.
Mpo mpo_compress(const Mpo& m, const TruncationPolicy& policy);

/// (I - |w><w|) H (I - |w><w|) assembled exactly and compressed at 1e-12.
Mpo projected_hamiltonian_mpo(const Mpo& h, const Mps& omega);

struct Applied {
  Mps state;
  double truncation_error = 0.0;
};

/// O|psi> followed by compression under `policy`; the norm is kept.
Applied apply_mpo(const Mpo& m, const Mps& psi, const TruncationPolicy& policy);

}  // namespace vnps
