#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <vector>

#include "vnps/linalg.hpp"

namespace vnps {

class Mpo;

struct TruncationPolicy {
  std::size_t chi_max = 128;
  /// Singular values below svd_cutoff * (largest) are discarded.
  double svd_cutoff = 1e-12;

  void validate() const;
};

struct CanonicalForm {
  enum class Kind { none, center, right };
  Kind kind = Kind::none;
  std::size_t center = 0;
};

/// Open-boundary matrix product state of qubits.
///
/// Site tensor i is stored as a row-major (left*2) x right matrix, so entry
/// T[a, s, b] lives at (2a + s, b) and the same buffer read as
/// left x (2*right) is the right-grouped matrix.
class Mps {
 public:
  Mps() = default;
  explicit Mps(std::vector<Mat> tensors, CanonicalForm form = {});

  std::size_t size() const { return tensors_.size(); }
  const Mat& tensor(std::size_t i) const { return tensors_[i]; }
  const std::vector<Mat>& tensors() const { return tensors_; }
  std::size_t left_dim(std::size_t i) const {
    return static_cast<std::size_t>(tensors_[i].rows() / 2);
  }
  std::size_t right_dim(std::size_t i) const {
    return static_cast<std::size_t>(tensors_[i].cols());
  }
  /// chi_0 .. chi_N, with chi_0 = chi_N = 1.
  std::vector<std::size_t> bond_dims() const;
  std::size_t max_bond() const;
  const CanonicalForm& form() const { return form_; }

 private:
  std::vector<Mat> tensors_;
  CanonicalForm form_;
};

/// Product state from per-site normalized 2-vectors.
Mps product_state(const std::vector<std::array<cplx, 2>>& local_states);
/// Computational basis state, bits[0] on site 0.
Mps basis_state(const std::vector<int>& bits);
/// (|0> + |1>)^{(x) r} / 2^{r/2}, the pointer register prepared at x = 0.
Mps pointer_plus_state(std::size_t r);
/// Normalized MPS with Gaussian entries and bond dimensions min(chi, 2^i, 2^{N-i}).
Mps random_mps(std::size_t n_sites, std::size_t chi, std::uint64_t seed);

/// Mixed-canonical form with the orthogonality center at `center`.
Mps canonicalize(const Mps& mps, std::size_t center);
/// Right-canonical form (center at site 0, which then holds the norm).
Mps right_canonicalize(const Mps& mps);
/// Max deviation of sum_s T^s T^s+ from the identity, over all sites.
double right_canonical_defect(const Mps& mps);

struct Compressed {
  Mps state;
  double truncation_error = 0.0;
};

/// SVD truncation sweep; output is normalized, error is sqrt(sum of discarded
/// squared singular values) of the normalized input.
Compressed compress(const Mps& mps, const TruncationPolicy& policy);
/// Same sweep without renormalizing; the returned error is relative.
Compressed compress_keep_norm(const Mps& mps, const TruncationPolicy& policy);

cplx inner(const Mps& bra, const Mps& ket);
double norm(const Mps& mps);
Mps scaled(const Mps& mps, cplx factor);

/// <psi|O|psi> by a three-layer transfer contraction.
cplx expectation(const Mps& psi, const Mpo& op);
/// <bra|O|ket>.
cplx matrix_element(const Mps& bra, const Mpo& op, const Mps& ket);

/// system (x) pointer as one chain; the junction bond has dimension 1.
Mps join(const Mps& system, const Mps& pointer);

inline constexpr std::size_t kDefaultRdmMaxSites = 10;

/// Reduced density matrix of sites [first, first+count), site `first` most
/// significant in the 2^count basis.
Mat reduced_density_matrix(const Mps& mps, std::size_t first, std::size_t count,
                           std::size_t max_sites = kDefaultRdmMaxSites);

}  // namespace vnps
