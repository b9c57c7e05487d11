#pragma once

// Transfer-matrix environments and effective operators shared by the
// expectation, DMRG and TDVP code paths.

#include <cstddef>
#include <vector>

#include "vnps/linalg.hpp"
#include "vnps/mpo.hpp"

namespace vnps::detail {

struct MpoEntry {
  std::size_t bl;
  std::size_t out;
  std::size_t in;
  std::size_t br;
  cplx value;
};

/// Nonzero entries of an MPO tensor, sorted by right bond index.
struct SparseSite {
  std::size_t left = 1;
  std::size_t right = 1;
  std::vector<MpoEntry> entries;
  /// entries[offsets[br] .. offsets[br+1]) share right index br.
  std::vector<std::size_t> offsets;
};

SparseSite sparsify(const MpoTensor& w);
std::vector<SparseSite> sparsify(const Mpo& m);

/// One (bra x ket) block per MPO bond index.
using Env = std::vector<Mat>;

Env trivial_env();

/// Extend through one site from the left / right. `bra` and `ket` are site
/// tensors in the (left*2) x right layout.
Env extend_left(const Env& L, const Mat& bra, const SparseSite& w, const Mat& ket);
Env extend_right(const Env& R, const Mat& bra, const SparseSite& w, const Mat& ket);

/// H_eff acting on a one-site tensor (chi_l*2*chi_r vector).
Vec apply_one_site(const Env& L, const SparseSite& w, const Env& R, const Vec& v,
                   std::size_t chi_l, std::size_t chi_r);

/// H_eff acting on a two-site tensor (chi_l*4*chi_r vector).
Vec apply_two_site(const Env& L, const SparseSite& w1, const SparseSite& w2, const Env& R,
                   const Vec& v, std::size_t chi_l, std::size_t chi_r);

}  // namespace vnps::detail
