#pragma once

#include <Eigen/Dense>
#include <complex>
#include <cstddef>
#include <vector>

namespace vnps {

using cplx = std::complex<double>;
using Mat = Eigen::Matrix<cplx, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using Vec = Eigen::VectorXcd;
using RealVec = Eigen::VectorXd;

using MatMap = Eigen::Map<Mat>;
using ConstMatMap = Eigen::Map<const Mat>;

inline constexpr cplx kI{0.0, 1.0};

/// Thin SVD M = U diag(S) Vh with singular values sorted descending.
///
/// Sign convention: the largest-magnitude entry of every column of U is
/// real and positive (the matching row of Vh absorbs the conjugate phase),
/// so results are reproducible bit-for-bit on one platform.
struct Svd {
  Mat u;
  RealVec s;
  Mat vh;
};

Svd svd(const Mat& m);

/// Number of singular values kept under a hard cap and a cutoff relative to
/// the largest value. Always keeps at least one.
std::size_t truncation_rank(const RealVec& s, std::size_t chi_max, double rel_cutoff,
                            double abs_cutoff = 0.0);

/// Thin QR with the diagonal of R made real and non-negative.
void qr_positive(const Mat& m, Mat& q, Mat& r);

/// Orthonormal completion / Hermitian helpers.
bool is_unitary(const Mat& u, double tol);
bool is_hermitian(const Mat& m, double tol);

/// Dense Hermitian eigendecomposition, ascending eigenvalues.
void hermitian_eigh(const Mat& m, RealVec& values, Mat& vectors);

}  // namespace vnps
