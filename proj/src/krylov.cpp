#include "vnps/krylov.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "vnps/error.hpp"

namespace vnps {

namespace {

Vec random_vector(std::size_t dim, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g;
  Vec v(static_cast<Eigen::Index>(dim));
  for (Eigen::Index i = 0; i < v.size(); ++i) v(i) = cplx(g(rng), g(rng));
  return v / v.norm();
}

// Orthogonalize w against the first k columns of basis, twice.
void reorthogonalize(const Mat& basis, std::size_t k, Vec& w) {
  for (int pass = 0; pass < 2; ++pass) {
    for (std::size_t j = 0; j < k; ++j) {
      const auto col = basis.col(static_cast<Eigen::Index>(j));
      w -= col * col.dot(w);
    }
  }
}

}  // namespace

EigenResult lanczos_smallest(const LinearMap& apply, std::size_t dim, double tol,
                             std::size_t max_iters, const std::optional<Vec>& start,
                             std::uint64_t seed) {
  if (dim == 0) throw InvalidArgument("lanczos_smallest: zero dimension");
  if (tol <= 0.0) throw InvalidArgument("lanczos_smallest: tolerance must be positive");
  Vec v = start && start->size() == static_cast<Eigen::Index>(dim) && start->norm() > 0.0
              ? Vec(*start / start->norm())
              : random_vector(dim, seed);

  EigenResult best;
  best.vector = v;
  best.residual = std::numeric_limits<double>::infinity();
  if (dim == 1) {
    const Vec av = apply(v);
    best.value = v.dot(av).real();
    best.residual = 0.0;
    best.converged = true;
    best.iterations = 1;
    return best;
  }

  const std::size_t block = std::min<std::size_t>(dim, 40);
  std::size_t total = 0;
  while (total < max_iters) {
    Mat basis(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(block));
    std::vector<double> alpha;
    std::vector<double> beta;
    basis.col(0) = v;
    std::size_t k = 0;
    double ritz = 0.0;
    Vec ritz_vec;
    for (; k < block && total < max_iters; ++k, ++total) {
      Vec w = apply(basis.col(static_cast<Eigen::Index>(k)));
      alpha.push_back(basis.col(static_cast<Eigen::Index>(k)).dot(w).real());
      reorthogonalize(basis, k + 1, w);
      const double b = w.norm();
      const std::size_t m = k + 1;
      Eigen::MatrixXd t = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(m),
                                                static_cast<Eigen::Index>(m));
      for (std::size_t i = 0; i < m; ++i) {
        t(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i)) = alpha[i];
        if (i + 1 < m) {
          t(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i + 1)) = beta[i];
          t(static_cast<Eigen::Index>(i + 1), static_cast<Eigen::Index>(i)) = beta[i];
        }
      }
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(t);
      ritz = es.eigenvalues()(0);
      const Eigen::VectorXd y = es.eigenvectors().col(0);
      const double res = std::abs(b * y(static_cast<Eigen::Index>(m - 1)));
      const bool invariant = b < 1e-14 * std::max(1.0, std::abs(ritz));
      if (res <= tol * std::max(1.0, std::abs(ritz)) || invariant || m == dim ||
          k + 1 == block || total + 1 == max_iters) {
        ritz_vec = basis.leftCols(static_cast<Eigen::Index>(m)) * y.cast<cplx>();
        ritz_vec /= ritz_vec.norm();
        ++total;
        ++k;
        break;
      }
      beta.push_back(b);
      basis.col(static_cast<Eigen::Index>(k + 1)) = w / b;
    }
    // True residual of the Ritz pair.
    const Vec av = apply(ritz_vec);
    const double lambda = ritz_vec.dot(av).real();
    const double res = (av - lambda * ritz_vec).norm();
    if (res < best.residual) {
      best.value = lambda;
      best.vector = ritz_vec;
      best.residual = res;
    }
    best.iterations = total;
    const bool exhausted = k >= dim;
    if (res <= tol * std::max(1.0, std::abs(lambda)) || exhausted) {
      best.converged = true;
      break;
    }
    v = ritz_vec;
  }
  // Deterministic phase: largest-magnitude component real and positive.
  Eigen::Index idx = 0;
  best.vector.cwiseAbs().maxCoeff(&idx);
  const cplx c = best.vector(idx);
  if (std::abs(c) > 0.0) best.vector *= std::conj(c) / std::abs(c);
  return best;
}

ExpResult local_krylov_exp(const LinearMap& apply, const Vec& v, cplx dt, double tol,
                           std::size_t max_dim) {
  ExpResult out;
  const double nv = v.norm();
  if (nv == 0.0) {
    out.vector = v;
    out.converged = true;
    return out;
  }
  const auto dim = static_cast<std::size_t>(v.size());
  const std::size_t mmax = std::max<std::size_t>(1, std::min(max_dim, dim));
  Mat basis(v.size(), static_cast<Eigen::Index>(mmax));
  basis.col(0) = v / nv;
  std::vector<double> alpha;
  std::vector<double> beta;
  Vec prev_coeffs;
  for (std::size_t k = 0; k < mmax; ++k) {
    Vec w = apply(basis.col(static_cast<Eigen::Index>(k)));
    alpha.push_back(basis.col(static_cast<Eigen::Index>(k)).dot(w).real());
    reorthogonalize(basis, k + 1, w);
    const double b = w.norm();
    const std::size_t m = k + 1;
    Eigen::MatrixXd t = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(m),
                                              static_cast<Eigen::Index>(m));
    for (std::size_t i = 0; i < m; ++i) {
      t(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i)) = alpha[i];
      if (i + 1 < m) {
        t(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i + 1)) = beta[i];
        t(static_cast<Eigen::Index>(i + 1), static_cast<Eigen::Index>(i)) = beta[i];
      }
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(t);
    const Eigen::VectorXd& ev = es.eigenvalues();
    const Eigen::MatrixXd& q = es.eigenvectors();
    // c = exp(-i dt T) e_1
    Vec coeffs = Vec::Zero(static_cast<Eigen::Index>(m));
    for (Eigen::Index j = 0; j < static_cast<Eigen::Index>(m); ++j)
      coeffs += q.col(j).cast<cplx>() * (std::exp(-kI * dt * ev(j)) * q(0, j));
    // Error estimate: weight that would leak into the next Krylov vector.
    const double err = b * std::abs(coeffs(static_cast<Eigen::Index>(m - 1)));
    const bool invariant = b < 1e-14 * std::max(1.0, t.norm());
    if (err <= tol || invariant || m == mmax) {
      out.vector = nv * (basis.leftCols(static_cast<Eigen::Index>(m)) * coeffs);
      out.error_estimate = invariant ? 0.0 : err;
      out.krylov_dim = m;
      out.converged = err <= tol || invariant || m == dim;
      return out;
    }
    beta.push_back(b);
    basis.col(static_cast<Eigen::Index>(k + 1)) = w / b;
  }
  return out;
}

}  // namespace vnps
