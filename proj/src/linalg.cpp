#include "vnps/linalg.hpp"

#include <algorithm>
#include <cmath>

namespace vnps {

Svd svd(const Mat& m) {
  Eigen::MatrixXcd colmajor = m;
  Eigen::BDCSVD<Eigen::MatrixXcd> dec(colmajor, Eigen::ComputeThinU | Eigen::ComputeThinV);
  Svd out;
  out.u = dec.matrixU();
  out.s = dec.singularValues();
  out.vh = dec.matrixV().adjoint();
  for (Eigen::Index k = 0; k < out.u.cols(); ++k) {
    Eigen::Index best = 0;
    double best_abs = -1.0;
    for (Eigen::Index i = 0; i < out.u.rows(); ++i) {
      const double a = std::abs(out.u(i, k));
      // strict > keeps the first index on ties
      if (a > best_abs + 1e-14) {
        best_abs = a;
        best = i;
      }
    }
    if (best_abs <= 0.0) continue;
    const cplx phase = std::conj(out.u(best, k)) / best_abs;
    out.u.col(k) *= phase;
    out.vh.row(k) *= std::conj(phase);
  }
  return out;
}

std::size_t truncation_rank(const RealVec& s, std::size_t chi_max, double rel_cutoff,
                            double abs_cutoff) {
  if (s.size() == 0) return 0;
  const double smax = s(0);
  const double floor = std::max(rel_cutoff * smax, abs_cutoff);
  std::size_t keep = 0;
  for (Eigen::Index i = 0; i < s.size(); ++i) {
    if (keep >= chi_max) break;
    if (s(i) <= floor && keep > 0) break;
    ++keep;
  }
  return std::max<std::size_t>(keep, 1);
}

void qr_positive(const Mat& m, Mat& q, Mat& r) {
  const Eigen::Index rows = m.rows();
  const Eigen::Index cols = m.cols();
  const Eigen::Index k = std::min(rows, cols);
  Eigen::MatrixXcd colmajor = m;
  Eigen::HouseholderQR<Eigen::MatrixXcd> dec(colmajor);
  Eigen::MatrixXcd full_r = dec.matrixQR().triangularView<Eigen::Upper>();
  q = dec.householderQ() * Eigen::MatrixXcd::Identity(rows, k);
  r = full_r.topRows(k);
  for (Eigen::Index i = 0; i < k; ++i) {
    const double a = std::abs(r(i, i));
    if (a == 0.0) continue;
    const cplx phase = std::conj(r(i, i)) / a;
    r.row(i) *= phase;
    q.col(i) *= std::conj(phase);
  }
}

bool is_unitary(const Mat& u, double tol) {
  if (u.rows() != u.cols()) return false;
  const Mat prod = u.adjoint() * u;
  return (prod - Mat::Identity(u.rows(), u.cols())).cwiseAbs().maxCoeff() <= tol;
}

bool is_hermitian(const Mat& m, double tol) {
  if (m.rows() != m.cols()) return false;
  return (m - m.adjoint()).cwiseAbs().maxCoeff() <= tol;
}

void hermitian_eigh(const Mat& m, RealVec& values, Mat& vectors) {
  Eigen::MatrixXcd colmajor = m;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(colmajor);
  values = es.eigenvalues();
  vectors = es.eigenvectors();
}

}  // namespace vnps
