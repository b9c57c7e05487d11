#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>

#include "vnps/linalg.hpp"

namespace vnps {

using LinearMap = std::function<Vec(const Vec&)>;

struct EigenResult {
  double value = 0.0;
  Vec vector;
  double residual = 0.0;
  std::size_t iterations = 0;
  bool converged = false;
};

/// Smallest eigenpair of a Hermitian map by restarted Lanczos with full
/// reorthogonalization. Stops when ||Av - lv|| <= tol * max(1, |l|).
/// Without `start` the initial vector is drawn from `seed`.
EigenResult lanczos_smallest(const LinearMap& apply, std::size_t dim, double tol,
                             std::size_t max_iters, const std::optional<Vec>& start = {},
                             std::uint64_t seed = 7);

struct ExpResult {
  Vec vector;
  double error_estimate = 0.0;
  std::size_t krylov_dim = 0;
  bool converged = false;
};

/// exp(-i dt A) v in a Krylov subspace of dimension <= max_dim.
ExpResult local_krylov_exp(const LinearMap& apply, const Vec& v, cplx dt, double tol,
                           std::size_t max_dim);

}  // namespace vnps
