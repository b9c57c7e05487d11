#include "environment.hpp"

#include <algorithm>

namespace vnps::detail {

SparseSite sparsify(const MpoTensor& w) {
  SparseSite s;
  s.left = w.left;
  s.right = w.right;
  for (std::size_t bl = 0; bl < w.left; ++bl)
    for (std::size_t o = 0; o < 2; ++o)
      for (std::size_t i = 0; i < 2; ++i)
        for (std::size_t br = 0; br < w.right; ++br) {
          const cplx v = w.at(bl, o, i, br);
          if (v != cplx{}) s.entries.push_back({bl, o, i, br, v});
        }
  std::stable_sort(s.entries.begin(), s.entries.end(),
                   [](const MpoEntry& a, const MpoEntry& b) { return a.br < b.br; });
  s.offsets.assign(s.right + 1, 0);
  for (const auto& e : s.entries) ++s.offsets[e.br + 1];
  for (std::size_t k = 0; k < s.right; ++k) s.offsets[k + 1] += s.offsets[k];
  return s;
}

std::vector<SparseSite> sparsify(const Mpo& m) {
  std::vector<SparseSite> out;
  out.reserve(m.size());
  for (const auto& t : m.tensors()) out.push_back(sparsify(t));
  return out;
}

Env trivial_env() { return Env{Mat::Ones(1, 1)}; }

Env extend_left(const Env& L, const Mat& bra, const SparseSite& w, const Mat& ket) {
  const auto kl = ket.rows() / 2;
  const auto kr = ket.cols();
  const auto bl = bra.rows() / 2;
  ConstMatMap ket_rg(ket.data(), kl, 2 * kr);

  std::vector<Mat> x(w.left);
  std::vector<bool> have(w.left, false);
  Env out(w.right);
  Mat y(bl, 2 * kr);
  for (std::size_t br = 0; br < w.right; ++br) {
    const std::size_t begin = w.offsets[br];
    const std::size_t end = w.offsets[br + 1];
    if (begin == end) {
      out[br] = Mat::Zero(bra.cols(), kr);
      continue;
    }
    y.setZero();
    for (std::size_t k = begin; k < end; ++k) {
      const auto& e = w.entries[k];
      if (!have[e.bl]) {
        x[e.bl] = L[e.bl] * ket_rg;
        have[e.bl] = true;
      }
      y.middleCols(static_cast<Eigen::Index>(e.out) * kr, kr) +=
          e.value * x[e.bl].middleCols(static_cast<Eigen::Index>(e.in) * kr, kr);
    }
    ConstMatMap y_lg(y.data(), bl * 2, kr);
    out[br] = bra.adjoint() * y_lg;
  }
  return out;
}

Env extend_right(const Env& R, const Mat& bra, const SparseSite& w, const Mat& ket) {
  const auto kl = ket.rows() / 2;
  const auto br_dim = bra.cols();
  const auto bl = bra.rows() / 2;
  ConstMatMap bra_rg(bra.data(), bl, 2 * br_dim);

  Env out(w.left);
  for (std::size_t l = 0; l < w.left; ++l) out[l] = Mat::Zero(kl, 2 * br_dim);
  std::vector<bool> touched(w.left, false);
  Mat x;
  for (std::size_t r = 0; r < w.right; ++r) {
    const std::size_t begin = w.offsets[r];
    const std::size_t end = w.offsets[r + 1];
    if (begin == end) continue;
    x = ket * R[r].transpose();  // (kl*2) x br_dim
    ConstMatMap xv(x.data(), kl, 2 * br_dim);
    for (std::size_t k = begin; k < end; ++k) {
      const auto& e = w.entries[k];
      out[e.bl].middleCols(static_cast<Eigen::Index>(e.out) * br_dim, br_dim) +=
          e.value * xv.middleCols(static_cast<Eigen::Index>(e.in) * br_dim, br_dim);
      touched[e.bl] = true;
    }
  }
  for (std::size_t l = 0; l < w.left; ++l) {
    if (!touched[l]) {
      out[l] = Mat::Zero(bl, kl);
      continue;
    }
    Mat y = std::move(out[l]);
    out[l] = bra_rg.conjugate() * y.transpose();
  }
  return out;
}

Vec apply_one_site(const Env& L, const SparseSite& w, const Env& R, const Vec& v,
                   std::size_t chi_l, std::size_t chi_r) {
  const auto cl = static_cast<Eigen::Index>(chi_l);
  const auto cr = static_cast<Eigen::Index>(chi_r);
  ConstMatMap a(v.data(), cl, 2 * cr);
  std::vector<Mat> x(w.left);
  std::vector<bool> have(w.left, false);
  Vec result = Vec::Zero(v.size());
  MatMap out(result.data(), 2 * cl, cr);
  Mat y(cl, 2 * cr);
  for (std::size_t br = 0; br < w.right; ++br) {
    const std::size_t begin = w.offsets[br];
    const std::size_t end = w.offsets[br + 1];
    if (begin == end) continue;
    y.setZero();
    for (std::size_t k = begin; k < end; ++k) {
      const auto& e = w.entries[k];
      if (!have[e.bl]) {
        x[e.bl] = L[e.bl] * a;
        have[e.bl] = true;
      }
      y.middleCols(static_cast<Eigen::Index>(e.out) * cr, cr) +=
          e.value * x[e.bl].middleCols(static_cast<Eigen::Index>(e.in) * cr, cr);
    }
    ConstMatMap y_lg(y.data(), 2 * cl, cr);
    out.noalias() += y_lg * R[br].transpose();
  }
  return result;
}

Vec apply_two_site(const Env& L, const SparseSite& w1, const SparseSite& w2, const Env& R,
                   const Vec& v, std::size_t chi_l, std::size_t chi_r) {
  const auto cl = static_cast<Eigen::Index>(chi_l);
  const auto cr = static_cast<Eigen::Index>(chi_r);
  ConstMatMap theta(v.data(), cl, 4 * cr);

  std::vector<Mat> x(w1.left);
  std::vector<bool> have(w1.left, false);
  std::vector<Mat> z(w2.right);
  std::vector<bool> z_used(w2.right, false);

  // w2 entries grouped by their left index.
  std::vector<std::vector<std::size_t>> w2_by_left(w2.left);
  for (std::size_t k = 0; k < w2.entries.size(); ++k) w2_by_left[w2.entries[k].bl].push_back(k);

  Mat y(cl, 4 * cr);
  for (std::size_t mid = 0; mid < w1.right; ++mid) {
    const std::size_t begin = w1.offsets[mid];
    const std::size_t end = w1.offsets[mid + 1];
    if (begin == end || w2_by_left[mid].empty()) continue;
    y.setZero();
    for (std::size_t k = begin; k < end; ++k) {
      const auto& e = w1.entries[k];
      if (!have[e.bl]) {
        x[e.bl] = L[e.bl] * theta;
        have[e.bl] = true;
      }
      y.middleCols(static_cast<Eigen::Index>(e.out) * 2 * cr, 2 * cr) +=
          e.value * x[e.bl].middleCols(static_cast<Eigen::Index>(e.in) * 2 * cr, 2 * cr);
    }
    for (const std::size_t k : w2_by_left[mid]) {
      const auto& e = w2.entries[k];
      if (!z_used[e.br]) {
        z[e.br] = Mat::Zero(cl, 4 * cr);
        z_used[e.br] = true;
      }
      for (Eigen::Index t1 = 0; t1 < 2; ++t1) {
        z[e.br].middleCols((2 * t1 + static_cast<Eigen::Index>(e.out)) * cr, cr) +=
            e.value * y.middleCols((2 * t1 + static_cast<Eigen::Index>(e.in)) * cr, cr);
      }
    }
  }

  Vec result = Vec::Zero(v.size());
  MatMap out(result.data(), 4 * cl, cr);
  for (std::size_t r = 0; r < w2.right; ++r) {
    if (!z_used[r]) continue;
    ConstMatMap z_lg(z[r].data(), 4 * cl, cr);
    out.noalias() += z_lg * R[r].transpose();
  }
  return result;
}

}  // namespace vnps::detail
