#include "sweep.hpp"

#include <algorithm>
#include <cmath>

#include "vnps/error.hpp"

namespace vnps::detail {

SweepChain::SweepChain(const Mpo& h, const Mps& psi) {
  if (h.size() != psi.size()) throw InvalidArgument("operator and state lengths differ");
  const Mps rc = right_canonicalize(psi);
  t_ = rc.tensors();
  w_ = sparsify(h);
  const std::size_t n = t_.size();
  left_.assign(n + 1, Env{});
  right_.assign(n + 1, Env{});
  left_[0] = trivial_env();
  right_[n] = trivial_env();
  for (std::size_t i = n; i-- > 1;) right_[i] = extend_right(right_[i + 1], t_[i], w_[i], t_[i]);
}

Vec SweepChain::two_site(std::size_t i) const {
  const Mat& a = t_[i];
  const Mat& b = t_[i + 1];
  ConstMatMap b_rg(b.data(), b.rows() / 2, 2 * b.cols());
  Mat theta = a * b_rg;
  return Eigen::Map<Vec>(theta.data(), theta.size());
}

Vec SweepChain::apply_two(std::size_t i, const Vec& theta) const {
  return apply_two_site(left_[i], w_[i], w_[i + 1], right_[i + 2], theta, left_dim(i),
                        right_dim(i + 1));
}

Vec SweepChain::apply_one(std::size_t i, const Vec& a) const {
  return apply_one_site(left_[i], w_[i], right_[i + 1], a, left_dim(i), right_dim(i));
}

SplitResult SweepChain::split(std::size_t i, const Vec& theta, bool move_right,
                              const TruncationPolicy& policy) {
  const auto cl = static_cast<Eigen::Index>(left_dim(i));
  const auto cr = static_cast<Eigen::Index>(right_dim(i + 1));
  ConstMatMap m(theta.data(), 2 * cl, 2 * cr);
  Svd d = svd(m);
  const std::size_t k = truncation_rank(d.s, policy.chi_max, policy.svd_cutoff);
  const auto kk = static_cast<Eigen::Index>(k);
  const double total = d.s.squaredNorm();
  const double kept_sq = d.s.head(kk).squaredNorm();
  SplitResult out;
  out.kept = k;
  out.truncation_error = total > 0.0 ? std::sqrt(std::max(0.0, total - kept_sq) / total) : 0.0;
  RealVec s = d.s.head(kk);
  if (kept_sq > 0.0) s /= std::sqrt(kept_sq);
  if (move_right) {
    t_[i] = d.u.leftCols(kk);
    Mat sv = s.asDiagonal() * d.vh.topRows(kk);
    t_[i + 1] = Eigen::Map<Mat>(sv.data(), 2 * kk, cr);
    left_[i + 1] = extend_left(left_[i], t_[i], w_[i], t_[i]);
  } else {
    t_[i] = d.u.leftCols(kk) * s.asDiagonal();
    Mat vh = d.vh.topRows(kk);
    t_[i + 1] = Eigen::Map<Mat>(vh.data(), 2 * kk, cr);
    right_[i + 1] = extend_right(right_[i + 2], t_[i + 1], w_[i + 1], t_[i + 1]);
  }
  return out;
}

SplitResult SweepChain::split_perturbed(std::size_t i, const Vec& theta, bool move_right,
                                        const TruncationPolicy& policy, double noise) {
  if (!(noise > 0.0)) return split(i, theta, move_right, policy);
  const auto cl = static_cast<Eigen::Index>(left_dim(i));
  const auto cr = static_cast<Eigen::Index>(right_dim(i + 1));
  ConstMatMap m(theta.data(), 2 * cl, 2 * cr);
  const double norm_sq = m.squaredNorm();

  Mat pert;
  if (move_right) {
    pert = Mat::Zero(2 * cl, 2 * cl);
    const SparseSite& w = w_[i];
    ConstMatMap view(theta.data(), cl, 4 * cr);
    std::vector<Mat> x(w.left);
    std::vector<bool> have(w.left, false);
    Mat y(cl, 4 * cr);
    for (std::size_t br = 0; br < w.right; ++br) {
      const std::size_t begin = w.offsets[br];
      const std::size_t end = w.offsets[br + 1];
      if (begin == end) continue;
      y.setZero();
      for (std::size_t k = begin; k < end; ++k) {
        const auto& e = w.entries[k];
        if (!have[e.bl]) {
          x[e.bl] = left_[i][e.bl] * view;
          have[e.bl] = true;
        }
        y.middleCols(static_cast<Eigen::Index>(e.out) * 2 * cr, 2 * cr) +=
            e.value * x[e.bl].middleCols(static_cast<Eigen::Index>(e.in) * 2 * cr, 2 * cr);
      }
      ConstMatMap p(y.data(), 2 * cl, 2 * cr);
      pert.noalias() += p * p.adjoint();
    }
  } else {
    pert = Mat::Zero(2 * cr, 2 * cr);
    const SparseSite& w = w_[i + 1];
    const Env& r = right_[i + 2];
    ConstMatMap lg(theta.data(), 4 * cl, cr);
    std::vector<Mat> q(w.left);
    std::vector<bool> used(w.left, false);
    Mat x;
    for (std::size_t br = 0; br < w.right; ++br) {
      const std::size_t begin = w.offsets[br];
      const std::size_t end = w.offsets[br + 1];
      if (begin == end) continue;
      x = lg * r[br].transpose();
      ConstMatMap xv(x.data(), 2 * cl, 2 * cr);
      for (std::size_t k = begin; k < end; ++k) {
        const auto& e = w.entries[k];
        if (!used[e.bl]) {
          q[e.bl] = Mat::Zero(2 * cl, 2 * cr);
          used[e.bl] = true;
        }
        q[e.bl].middleCols(static_cast<Eigen::Index>(e.out) * cr, cr) +=
            e.value * xv.middleCols(static_cast<Eigen::Index>(e.in) * cr, cr);
      }
    }
    for (std::size_t l = 0; l < w.left; ++l)
      if (used[l]) pert.noalias() += q[l].adjoint() * q[l];
  }

  Mat rho = move_right ? Mat(m * m.adjoint()) : Mat(m.adjoint() * m);
  const double pert_trace = pert.trace().real();
  if (pert_trace > 0.0) rho += (noise * norm_sq / pert_trace) * pert;
  RealVec evals;
  Mat evecs;
  hermitian_eigh(rho, evals, evecs);
  // Descending order, as singular values.
  const Eigen::Index dim = evals.size();
  RealVec weights(dim);
  Mat basis(dim, dim);
  for (Eigen::Index k = 0; k < dim; ++k) {
    weights(k) = std::sqrt(std::max(0.0, evals(dim - 1 - k)));
    basis.col(k) = evecs.col(dim - 1 - k);
  }
  const std::size_t k = truncation_rank(weights, policy.chi_max, policy.svd_cutoff);
  const auto kk = static_cast<Eigen::Index>(k);
  Mat kept_basis = basis.leftCols(kk);

  SplitResult out;
  out.kept = k;
  if (move_right) {
    Mat rest = kept_basis.adjoint() * m;
    const double kept_sq = rest.squaredNorm();
    out.truncation_error =
        norm_sq > 0.0 ? std::sqrt(std::max(0.0, norm_sq - kept_sq) / norm_sq) : 0.0;
    if (kept_sq > 0.0) rest /= std::sqrt(kept_sq);
    t_[i] = kept_basis;
    t_[i + 1] = Eigen::Map<Mat>(rest.data(), 2 * kk, cr);
    left_[i + 1] = extend_left(left_[i], t_[i], w_[i], t_[i]);
  } else {
    Mat rest = m * kept_basis;
    const double kept_sq = rest.squaredNorm();
    out.truncation_error =
        norm_sq > 0.0 ? std::sqrt(std::max(0.0, norm_sq - kept_sq) / norm_sq) : 0.0;
    if (kept_sq > 0.0) rest /= std::sqrt(kept_sq);
    t_[i] = rest;
    Mat vh = kept_basis.adjoint();
    t_[i + 1] = Eigen::Map<Mat>(vh.data(), 2 * kk, cr);
    right_[i + 1] = extend_right(right_[i + 2], t_[i + 1], w_[i + 1], t_[i + 1]);
  }
  return out;
}

void SweepChain::set_site(std::size_t i, const Vec& v) {
  t_[i] = Eigen::Map<const Mat>(v.data(), t_[i].rows(), t_[i].cols());
}

Mps SweepChain::state() const { return Mps(t_); }

}  // namespace vnps::detail
