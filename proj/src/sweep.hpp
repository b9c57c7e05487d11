#pragma once

// State shared by the two-site sweeping algorithms: site tensors, the sparse
// MPO and cached left/right environments.

#include <cstddef>
#include <vector>

#include "environment.hpp"
#include "vnps/mpo.hpp"
#include "vnps/mps.hpp"

namespace vnps::detail {

struct SplitResult {
  double truncation_error = 0.0;  // relative, before renormalization
  std::size_t kept = 0;
};

class SweepChain {
 public:
  /// Takes a normalized state, right-canonicalizes it and builds R envs.
  SweepChain(const Mpo& h, const Mps& psi);

  std::size_t size() const { return t_.size(); }
  std::size_t left_dim(std::size_t i) const { return static_cast<std::size_t>(t_[i].rows() / 2); }
  std::size_t right_dim(std::size_t i) const { return static_cast<std::size_t>(t_[i].cols()); }

  /// theta for sites (i, i+1), flattened as chi_l x 4 x chi_r.
  Vec two_site(std::size_t i) const;
  Vec apply_two(std::size_t i, const Vec& theta) const;
  Vec apply_one(std::size_t i, const Vec& a) const;

  /// SVD-split theta into sites i, i+1. With move_right the center ends on
  /// i+1 and L[i+1] is refreshed, otherwise on i and R[i+1] is refreshed.
  SplitResult split(std::size_t i, const Vec& theta, bool move_right,
                    const TruncationPolicy& policy);

  /// Like split, but the kept basis diagonalizes the reduced density matrix
  /// plus `noise` times the normalized weight of H_eff acting on theta with
  /// the bond on the far side left open. The kept rank may exceed the rank
  /// of theta.
  SplitResult split_perturbed(std::size_t i, const Vec& theta, bool move_right,
                              const TruncationPolicy& policy, double noise);

  const Mat& site(std::size_t i) const { return t_[i]; }
  void set_site(std::size_t i, const Vec& v);

  Mps state() const;

 private:
  std::vector<Mat> t_;
  std::vector<SparseSite> w_;
  std::vector<Env> left_;   // left_[i]: sites < i
  std::vector<Env> right_;  // right_[i]: sites >= i
};

}  // namespace vnps::detail
