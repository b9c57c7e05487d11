#include "vnps/mps.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "environment.hpp"
#include "vnps/error.hpp"
#include "vnps/mpo.hpp"

namespace vnps {

void TruncationPolicy::validate() const {
  if (chi_max < 1) throw InvalidArgument("chi_max must be >= 1");
  if (!(svd_cutoff >= 0.0 && svd_cutoff < 1.0))
    throw InvalidArgument("svd_cutoff must lie in [0, 1)");
}

Mps::Mps(std::vector<Mat> tensors, CanonicalForm form)
    : tensors_(std::move(tensors)), form_(form) {
  if (tensors_.empty()) throw InvalidArgument("an MPS needs at least one site");
  for (std::size_t i = 0; i < tensors_.size(); ++i) {
    const Mat& t = tensors_[i];
    if (t.rows() % 2 != 0 || t.rows() == 0 || t.cols() == 0)
      throw InvalidArgument("MPS tensor " + std::to_string(i) + " has an invalid shape");
    if (i > 0 && left_dim(i) != right_dim(i - 1))
      throw InvalidArgument("MPS bond " + std::to_string(i) + " has inconsistent dimensions");
  }
  if (left_dim(0) != 1 || right_dim(size() - 1) != 1)
    throw InvalidArgument("MPS boundary bonds must have dimension 1");
  if (form_.kind == CanonicalForm::Kind::center && form_.center >= size())
    throw InvalidArgument("canonical center outside the chain");
}

std::vector<std::size_t> Mps::bond_dims() const {
  std::vector<std::size_t> d;
  d.reserve(size() + 1);
  d.push_back(left_dim(0));
  for (std::size_t i = 0; i < size(); ++i) d.push_back(right_dim(i));
  return d;
}

std::size_t Mps::max_bond() const {
  const auto d = bond_dims();
  return *std::max_element(d.begin(), d.end());
}

Mps product_state(const std::vector<std::array<cplx, 2>>& local_states) {
  if (local_states.empty()) throw InvalidArgument("product_state needs at least one site");
  std::vector<Mat> t;
  t.reserve(local_states.size());
  for (const auto& v : local_states) {
    const double n2 = std::norm(v[0]) + std::norm(v[1]);
    if (std::abs(n2 - 1.0) > 1e-10) throw InvalidArgument("local state is not normalized");
    Mat m(2, 1);
    m(0, 0) = v[0];
    m(1, 0) = v[1];
    t.push_back(std::move(m));
  }
  return Mps(std::move(t), {CanonicalForm::Kind::right, 0});
}

Mps basis_state(const std::vector<int>& bits) {
  std::vector<std::array<cplx, 2>> local;
  local.reserve(bits.size());
  for (const int b : bits) {
    if (b != 0 && b != 1) throw InvalidArgument("basis_state expects bits in {0, 1}");
    local.push_back(b == 0 ? std::array<cplx, 2>{1.0, 0.0} : std::array<cplx, 2>{0.0, 1.0});
  }
  return product_state(local);
}

Mps pointer_plus_state(std::size_t r) {
  if (r == 0) throw InvalidArgument("pointer needs r >= 1 qubits");
  const double a = 1.0 / std::sqrt(2.0);
  return product_state(std::vector<std::array<cplx, 2>>(r, {a, a}));
}

Mps random_mps(std::size_t n_sites, std::size_t chi, std::uint64_t seed) {
  if (n_sites == 0 || chi == 0) throw InvalidArgument("random_mps needs n_sites, chi >= 1");
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::vector<std::size_t> dims(n_sites + 1, 1);
  for (std::size_t i = 1; i < n_sites; ++i) {
    const std::size_t left_cap = i < 20 ? (std::size_t{1} << i) : chi;
    const std::size_t right_cap = (n_sites - i) < 20 ? (std::size_t{1} << (n_sites - i)) : chi;
    dims[i] = std::min({chi, left_cap, right_cap});
  }
  std::vector<Mat> t;
  for (std::size_t i = 0; i < n_sites; ++i) {
    Mat m(2 * dims[i], dims[i + 1]);
    for (Eigen::Index r = 0; r < m.rows(); ++r)
      for (Eigen::Index c = 0; c < m.cols(); ++c) m(r, c) = cplx(gauss(rng), gauss(rng));
    t.push_back(std::move(m));
  }
  Mps raw(std::move(t));
  Mps out = right_canonicalize(raw);
  return scaled(out, 1.0 / norm(out));
}

namespace {

// Left-orthonormalize site i, pushing R into site i+1.
void left_step(std::vector<Mat>& t, std::size_t i) {
  Mat q;
  Mat r;
  qr_positive(t[i], q, r);
  t[i] = std::move(q);
  const auto next_left = r.cols();
  ConstMatMap next_rg(t[i + 1].data(), next_left, t[i + 1].cols() * 2);
  Mat merged = r * next_rg;
  t[i + 1] = ConstMatMap(merged.data(), merged.rows() * 2, merged.cols() / 2);
}

// Right-orthonormalize site i via LQ, pushing L into site i-1.
void right_step(std::vector<Mat>& t, std::size_t i) {
  const auto left = t[i].rows() / 2;
  const auto right = t[i].cols();
  ConstMatMap rg(t[i].data(), left, 2 * right);
  Mat q;
  Mat r;
  qr_positive(rg.adjoint(), q, r);
  // rg = r^+ q^+
  Mat new_rg = q.adjoint();
  const auto k = new_rg.rows();
  t[i] = ConstMatMap(new_rg.data(), k * 2, right);
  t[i - 1] = t[i - 1] * r.adjoint();
}

}  // namespace

Mps canonicalize(const Mps& mps, std::size_t center) {
  if (center >= mps.size()) throw InvalidArgument("canonical center outside the chain");
  std::vector<Mat> t = mps.tensors();
  for (std::size_t i = 0; i < center; ++i) left_step(t, i);
  for (std::size_t i = t.size() - 1; i > center; --i) right_step(t, i);
  return Mps(std::move(t), {CanonicalForm::Kind::center, center});
}

Mps right_canonicalize(const Mps& mps) {
  Mps c = canonicalize(mps, 0);
  return Mps(c.tensors(), {CanonicalForm::Kind::right, 0});
}

double right_canonical_defect(const Mps& mps) {
  double worst = 0.0;
  for (std::size_t i = 0; i < mps.size(); ++i) {
    const auto l = static_cast<Eigen::Index>(mps.left_dim(i));
    ConstMatMap rg(mps.tensor(i).data(), l, 2 * mps.tensor(i).cols());
    const Mat g = rg * rg.adjoint();
    worst = std::max(worst, (g - Mat::Identity(l, l)).cwiseAbs().maxCoeff());
  }
  return worst;
}

namespace {

Compressed compress_impl(const Mps& mps, const TruncationPolicy& policy, bool normalize) {
  policy.validate();
  Mps rc = canonicalize(mps, 0);
  std::vector<Mat> t = rc.tensors();
  const double nrm = t[0].norm();
  if (nrm == 0.0) throw InvalidArgument("cannot compress the zero state");
  t[0] /= nrm;
  double discarded = 0.0;
  for (std::size_t i = 0; i + 1 < t.size(); ++i) {
    Svd d = svd(t[i]);
    const std::size_t k = truncation_rank(d.s, policy.chi_max, policy.svd_cutoff);
    for (Eigen::Index j = static_cast<Eigen::Index>(k); j < d.s.size(); ++j)
      discarded += d.s(j) * d.s(j);
    const auto kk = static_cast<Eigen::Index>(k);
    t[i] = d.u.leftCols(kk);
    Mat sv = d.s.head(kk).asDiagonal() * d.vh.topRows(kk);
    const double kept = d.s.head(kk).norm();
    if (kept > 0.0) sv /= kept;
    ConstMatMap next_rg(t[i + 1].data(), t[i + 1].rows() / 2, t[i + 1].cols() * 2);
    Mat merged = sv * next_rg;
    t[i + 1] = ConstMatMap(merged.data(), merged.rows() * 2, merged.cols() / 2);
  }
  const double last = t.back().norm();
  if (last > 0.0) t.back() /= last;
  if (!normalize) t.back() *= nrm;
  const std::size_t n = t.size();
  return {Mps(std::move(t), {CanonicalForm::Kind::center, n - 1}), std::sqrt(discarded)};
}

}  // namespace

Compressed compress(const Mps& mps, const TruncationPolicy& policy) {
  return compress_impl(mps, policy, true);
}

Compressed compress_keep_norm(const Mps& mps, const TruncationPolicy& policy) {
  return compress_impl(mps, policy, false);
}

cplx inner(const Mps& bra, const Mps& ket) {
  if (bra.size() != ket.size()) throw InvalidArgument("inner: MPS lengths differ");
  Mat e = Mat::Ones(1, 1);
  for (std::size_t i = 0; i < ket.size(); ++i) {
    const Mat& a = bra.tensor(i);
    const Mat& b = ket.tensor(i);
    ConstMatMap b_rg(b.data(), b.rows() / 2, 2 * b.cols());
    Mat x = e * b_rg;
    ConstMatMap x_lg(x.data(), x.rows() * 2, b.cols());
    e = a.adjoint() * x_lg;
  }
  return e(0, 0);
}

double norm(const Mps& mps) { return std::sqrt(std::max(0.0, inner(mps, mps).real())); }

Mps scaled(const Mps& mps, cplx factor) {
  std::vector<Mat> t = mps.tensors();
  std::size_t where = 0;
  if (mps.form().kind != CanonicalForm::Kind::none) where = mps.form().center;
  t[where] *= factor;
  CanonicalForm f = mps.form();
  if (f.kind == CanonicalForm::Kind::right && std::abs(std::abs(factor) - 1.0) > 1e-12)
    f.kind = CanonicalForm::Kind::center;
  return Mps(std::move(t), f);
}

cplx matrix_element(const Mps& bra, const Mpo& op, const Mps& ket) {
  if (bra.size() != ket.size() || op.size() != ket.size())
    throw InvalidArgument("matrix_element: MPS/MPO lengths differ");
  detail::Env env = detail::trivial_env();
  for (std::size_t i = 0; i < ket.size(); ++i)
    env = detail::extend_left(env, bra.tensor(i), detail::sparsify(op.tensor(i)), ket.tensor(i));
  return env[0](0, 0);
}

cplx expectation(const Mps& psi, const Mpo& op) { return matrix_element(psi, op, psi); }

Mps join(const Mps& system, const Mps& pointer) {
  std::vector<Mat> t = system.tensors();
  t.insert(t.end(), pointer.tensors().begin(), pointer.tensors().end());
  return Mps(std::move(t));
}

Mat reduced_density_matrix(const Mps& mps, std::size_t first, std::size_t count,
                           std::size_t max_sites) {
  if (count == 0 || first + count > mps.size())
    throw InvalidArgument("reduced_density_matrix: window outside the chain");
  if (count > max_sites)
    throw ResourceLimit("reduced_density_matrix: window of " + std::to_string(count) +
                        " sites exceeds the limit of " + std::to_string(max_sites));
  const Mps c = canonicalize(mps, first);
  // m holds (left, s_1..s_k) x right.
  Mat m = c.tensor(first);
  for (std::size_t k = 1; k < count; ++k) {
    const Mat& next = c.tensor(first + k);
    ConstMatMap next_rg(next.data(), next.rows() / 2, 2 * next.cols());
    Mat merged = m * next_rg;
    m = ConstMatMap(merged.data(), merged.rows() * 2, merged.cols() / 2);
  }
  const auto left = static_cast<Eigen::Index>(c.left_dim(first));
  const Eigen::Index phys = Eigen::Index{1} << count;
  Mat rho = Mat::Zero(phys, phys);
  for (Eigen::Index a = 0; a < left; ++a) {
    const auto block = m.middleRows(a * phys, phys);
    rho.noalias() += block * block.adjoint();
  }
  const double tr = rho.trace().real();
  if (tr > 0.0) rho /= tr;
  return rho;
}

}  // namespace vnps
