#include "vnps/mpo.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <tuple>

#include "vnps/error.hpp"

namespace vnps {

Mpo::Mpo(std::vector<MpoTensor> tensors, bool hermitian)
    : tensors_(std::move(tensors)), hermitian_(hermitian) {
  if (tensors_.empty()) throw InvalidArgument("an MPO needs at least one site");
  for (std::size_t i = 0; i < tensors_.size(); ++i) {
    const auto& t = tensors_[i];
    if (t.data.size() != t.left * 4 * t.right)
      throw InvalidArgument("MPO tensor " + std::to_string(i) + " has an invalid shape");
    if (i > 0 && t.left != tensors_[i - 1].right)
      throw InvalidArgument("MPO bond " + std::to_string(i) + " has inconsistent dimensions");
  }
  if (tensors_.front().left != 1 || tensors_.back().right != 1)
    throw InvalidArgument("MPO boundary bonds must have dimension 1");
}

std::vector<std::size_t> Mpo::bond_dims() const {
  std::vector<std::size_t> d{tensors_.front().left};
  for (const auto& t : tensors_) d.push_back(t.right);
  return d;
}

std::size_t Mpo::max_bond() const {
  const auto d = bond_dims();
  return *std::max_element(d.begin(), d.end());
}

namespace {

// <out|P|in> for a single-qubit Pauli.
cplx pauli_element(Pauli p, std::size_t out, std::size_t in) {
  switch (p) {
    case Pauli::I:
      return out == in ? 1.0 : 0.0;
    case Pauli::X:
      return out != in ? 1.0 : 0.0;
    case Pauli::Y:
      if (out == in) return 0.0;
      return out == 0 ? cplx(0.0, -1.0) : cplx(0.0, 1.0);
    case Pauli::Z:
      return out != in ? 0.0 : (out == 0 ? 1.0 : -1.0);
  }
  return 0.0;
}

std::uint64_t low_mask(std::size_t b) {
  return b >= 64 ? ~std::uint64_t{0} : ((std::uint64_t{1} << b) - 1);
}

struct StringLess {
  bool operator()(const PauliString& a, const PauliString& b) const {
    return std::tie(a.x, a.z) < std::tie(b.x, b.z);
  }
};

// Scale-free fingerprint of the operator still to be placed right of a cut.
using SuffixKey = std::vector<std::tuple<std::uint64_t, std::uint64_t, double, double>>;

struct BondClasses {
  std::map<PauliString, std::size_t, StringLess> class_of;  // prefix -> class
  std::map<PauliString, cplx, StringLess> scale_of;         // prefix -> lambda
  std::vector<PauliString> representative;                  // class -> prefix
};

BondClasses classify_bond(const std::vector<PauliTerm>& terms, std::size_t b) {
  const std::uint64_t low = low_mask(b);
  std::map<PauliString, std::vector<std::pair<PauliString, cplx>>, StringLess> groups;
  for (const auto& t : terms) {
    const PauliString prefix{t.string.x & low, t.string.z & low};
    const PauliString suffix{t.string.x & ~low, t.string.z & ~low};
    groups[prefix].emplace_back(suffix, t.coefficient);
  }
  BondClasses out;
  std::map<SuffixKey, std::size_t> ids;
  for (auto& [prefix, list] : groups) {
    std::sort(list.begin(), list.end(),
              [](const auto& a, const auto& b) { return StringLess{}(a.first, b.first); });
    // Equal suffixes were merged by simplify, so the list is duplicate free.
    const cplx lead = list.front().second;
    SuffixKey key;
    key.reserve(list.size());
    for (const auto& [s, c] : list) {
      const cplx ratio = c / lead;
      key.emplace_back(s.x, s.z, std::round(ratio.real() * 1e11), std::round(ratio.imag() * 1e11));
    }
    auto [it, inserted] = ids.emplace(std::move(key), out.representative.size());
    if (inserted) out.representative.push_back(prefix);
    out.class_of[prefix] = it->second;
    out.scale_of[prefix] = lead;
  }
  return out;
}

}  // namespace

Mpo mpo_from_pauli_sum(const PauliSum& h) {
  const std::size_t n = h.n_qubits();
  if (n == 0) throw InvalidArgument("mpo_from_pauli_sum: zero qubits");
  const PauliSum s = simplify(h);
  if (s.empty()) {
    std::vector<MpoTensor> zero(n, MpoTensor(1, 1));
    return Mpo(std::move(zero), true);
  }
  const auto& terms = s.terms();

  std::vector<BondClasses> bonds;
  bonds.reserve(n + 1);
  for (std::size_t b = 0; b <= n; ++b) bonds.push_back(classify_bond(terms, b));

  std::vector<MpoTensor> tensors;
  tensors.reserve(n);
  for (std::size_t site = 0; site < n; ++site) {
    const BondClasses& left = bonds[site];
    const BondClasses& right = bonds[site + 1];
    MpoTensor w(left.representative.size(), right.representative.size());
    const std::uint64_t low = low_mask(site);
    const std::uint64_t next_low = low_mask(site + 1);
    // Distinct one-site continuations of each class representative.
    std::set<std::tuple<std::size_t, std::uint64_t, std::uint64_t>> done;
    for (const auto& t : terms) {
      const PauliString prefix{t.string.x & low, t.string.z & low};
      const std::size_t cls = left.class_of.at(prefix);
      if (!(left.representative[cls] == prefix)) continue;
      const PauliString next{t.string.x & next_low, t.string.z & next_low};
      if (!done.emplace(cls, next.x, next.z).second) continue;
      const std::size_t next_cls = right.class_of.at(next);
      const cplx factor = right.scale_of.at(next) / left.scale_of.at(prefix);
      const Pauli p = t.string.op(site);
      for (std::size_t o = 0; o < 2; ++o)
        for (std::size_t i = 0; i < 2; ++i) {
          const cplx e = pauli_element(p, o, i);
          if (e != cplx{}) w.at(cls, o, i, next_cls) += factor * e;
        }
    }
    tensors.push_back(std::move(w));
  }
  // The empty prefix carries the overall scale of the sum.
  const cplx lead = bonds[0].scale_of.begin()->second;
  for (auto& v : tensors.front().data) v *= lead;
  return Mpo(std::move(tensors), s.is_hermitian());
}

Mpo pointer_momentum_mpo(std::size_t r) {
  if (r == 0) throw InvalidArgument("pointer needs r >= 1 qubits");
  // state 0: nothing placed yet, state 1: one weighted number operator placed
  std::vector<MpoTensor> t;
  for (std::size_t j = 1; j <= r; ++j) {
    const std::size_t left = j == 1 ? 1 : 2;
    const std::size_t right = j == r ? 1 : 2;
    MpoTensor w(left, right);
    const double weight = std::ldexp(1.0, -static_cast<int>(j));
    const std::size_t done = right == 1 ? 0 : 1;
    // 0 -> 0 : identity
    if (right == 2) {
      w.at(0, 0, 0, 0) = 1.0;
      w.at(0, 1, 1, 0) = 1.0;
    }
    // 0 -> done : weight * |1><1|
    w.at(0, 1, 1, done) = weight;
    // 1 -> done : identity
    if (left == 2) {
      w.at(1, 0, 0, done) = 1.0;
      w.at(1, 1, 1, done) = 1.0;
    }
    t.push_back(std::move(w));
  }
  return Mpo(std::move(t), true);
}

Mpo couple_system_pointer(const Mpo& h, const Mpo& p) {
  std::vector<MpoTensor> t = h.tensors();
  t.insert(t.end(), p.tensors().begin(), p.tensors().end());
  return Mpo(std::move(t), h.hermitian() && p.hermitian());
}

Mpo mpo_sum(const Mpo& a, const Mpo& b) {
  if (a.size() != b.size()) throw InvalidArgument("mpo_sum: lengths differ");
  const std::size_t n = a.size();
  std::vector<MpoTensor> t;
  t.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto& x = a.tensor(i);
    const auto& y = b.tensor(i);
    const bool first = i == 0;
    const bool last = i + 1 == n;
    const std::size_t l = first ? 1 : x.left + y.left;
    const std::size_t r = last ? 1 : x.right + y.right;
    MpoTensor w(l, r);
    const std::size_t yl_off = first ? 0 : x.left;
    const std::size_t yr_off = last ? 0 : x.right;
    for (std::size_t bl = 0; bl < x.left; ++bl)
      for (std::size_t o = 0; o < 2; ++o)
        for (std::size_t in = 0; in < 2; ++in)
          for (std::size_t br = 0; br < x.right; ++br) w.at(bl, o, in, br) += x.at(bl, o, in, br);
    for (std::size_t bl = 0; bl < y.left; ++bl)
      for (std::size_t o = 0; o < 2; ++o)
        for (std::size_t in = 0; in < 2; ++in)
          for (std::size_t br = 0; br < y.right; ++br)
            w.at(bl + yl_off, o, in, br + yr_off) += y.at(bl, o, in, br);
    t.push_back(std::move(w));
  }
  return Mpo(std::move(t), a.hermitian() && b.hermitian());
}

Mpo mpo_scaled(const Mpo& a, cplx factor) {
  std::vector<MpoTensor> t = a.tensors();
  for (auto& v : t.front().data) v *= factor;
  return Mpo(std::move(t), a.hermitian() && std::abs(factor.imag()) <= 1e-15);
}

Mpo identity_mpo(std::size_t n) {
  if (n == 0) throw InvalidArgument("identity_mpo: zero sites");
  MpoTensor w(1, 1);
  w.at(0, 0, 0, 0) = 1.0;
  w.at(0, 1, 1, 0) = 1.0;
  return Mpo(std::vector<MpoTensor>(n, w), true);
}

Mpo outer_product_mpo(const Mps& ket, const Mps& bra) {
  if (ket.size() != bra.size()) throw InvalidArgument("outer_product_mpo: lengths differ");
  std::vector<MpoTensor> t;
  for (std::size_t i = 0; i < ket.size(); ++i) {
    const Mat& a = ket.tensor(i);
    const Mat& b = bra.tensor(i);
    const std::size_t al = ket.left_dim(i), ar = ket.right_dim(i);
    const std::size_t bl = bra.left_dim(i), br = bra.right_dim(i);
    MpoTensor w(al * bl, ar * br);
    for (std::size_t x = 0; x < al; ++x)
      for (std::size_t y = 0; y < bl; ++y)
        for (std::size_t o = 0; o < 2; ++o)
          for (std::size_t in = 0; in < 2; ++in)
            for (std::size_t xr = 0; xr < ar; ++xr)
              for (std::size_t yr = 0; yr < br; ++yr)
                w.at(x * bl + y, o, in, xr * br + yr) =
                    a(static_cast<Eigen::Index>(2 * x + o), static_cast<Eigen::Index>(xr)) *
                    std::conj(b(static_cast<Eigen::Index>(2 * y + in),
                                static_cast<Eigen::Index>(yr)));
    t.push_back(std::move(w));
  }
  return Mpo(std::move(t), false);
}

namespace {

// Views of an MPO tensor as (left*4) x right and left x (4*right) matrices.
Mat as_left_grouped(const MpoTensor& w) {
  return ConstMatMap(w.data.data(), static_cast<Eigen::Index>(w.left * 4),
                     static_cast<Eigen::Index>(w.right));
}

MpoTensor from_matrix(const Mat& m, std::size_t left, std::size_t right) {
  MpoTensor w(left, right);
  std::copy(m.data(), m.data() + m.size(), w.data.begin());
  return w;
}

}  // namespace

Mpo mpo_compress(const Mpo& m, const TruncationPolicy& policy) {
  policy.validate();
  std::vector<MpoTensor> t = m.tensors();
  const std::size_t n = t.size();
  if (n == 1) return m;
  // Left-orthonormalize.
  for (std::size_t i = 0; i + 1 < n; ++i) {
    Mat q;
    Mat r;
    qr_positive(as_left_grouped(t[i]), q, r);
    const auto k = static_cast<std::size_t>(q.cols());
    t[i] = from_matrix(q, t[i].left, k);
    ConstMatMap next_rg(t[i + 1].data.data(), static_cast<Eigen::Index>(t[i + 1].left),
                        static_cast<Eigen::Index>(4 * t[i + 1].right));
    Mat merged = r * next_rg;
    t[i + 1] = from_matrix(merged, k, t[i + 1].right);
  }
  // Right-to-left truncation; singular values are Frobenius Schmidt values.
  const double abs_floor = 1e-12 * std::pow(2.0, 0.5 * static_cast<double>(n));
  for (std::size_t i = n - 1; i > 0; --i) {
    ConstMatMap rg(t[i].data.data(), static_cast<Eigen::Index>(t[i].left),
                   static_cast<Eigen::Index>(4 * t[i].right));
    Svd d = svd(rg);
    const std::size_t k = truncation_rank(d.s, policy.chi_max, policy.svd_cutoff, abs_floor);
    const auto kk = static_cast<Eigen::Index>(k);
    const bool all_noise = d.s(0) <= abs_floor;
    Mat vh = d.vh.topRows(kk);
    Mat us = d.u.leftCols(kk) * d.s.head(kk).asDiagonal();
    if (all_noise) us.setZero();
    t[i] = from_matrix(vh, k, t[i].right);
    Mat prev = as_left_grouped(t[i - 1]) * us;
    t[i - 1] = from_matrix(prev, t[i - 1].left, k);
  }
  return Mpo(std::move(t), m.hermitian());
}

Applied apply_mpo(const Mpo& m, const Mps& psi, const TruncationPolicy& policy) {
  if (m.size() != psi.size()) throw InvalidArgument("apply_mpo: lengths differ");
  std::vector<Mat> t;
  t.reserve(psi.size());
  for (std::size_t i = 0; i < psi.size(); ++i) {
    const auto& w = m.tensor(i);
    const Mat& a = psi.tensor(i);
    const std::size_t al = psi.left_dim(i), ar = psi.right_dim(i);
    Mat out = Mat::Zero(static_cast<Eigen::Index>(w.left * al * 2),
                        static_cast<Eigen::Index>(w.right * ar));
    for (std::size_t bl = 0; bl < w.left; ++bl)
      for (std::size_t o = 0; o < 2; ++o)
        for (std::size_t in = 0; in < 2; ++in)
          for (std::size_t br = 0; br < w.right; ++br) {
            const cplx v = w.at(bl, o, in, br);
            if (v == cplx{}) continue;
            for (std::size_t x = 0; x < al; ++x) {
              const auto row = static_cast<Eigen::Index>((bl * al + x) * 2 + o);
              const auto src = static_cast<Eigen::Index>(2 * x + in);
              out.row(row).segment(static_cast<Eigen::Index>(br * ar),
                                   static_cast<Eigen::Index>(ar)) += v * a.row(src);
            }
          }
    t.push_back(std::move(out));
  }
  Mps raw(std::move(t));
  if (norm(raw) == 0.0) return {raw, 0.0};
  Compressed c = compress_keep_norm(raw, policy);
  return {std::move(c.state), c.truncation_error};
}

Mpo projected_hamiltonian_mpo(const Mpo& h, const Mps& omega) {
  if (h.size() != omega.size()) throw InvalidArgument("projected_hamiltonian_mpo: lengths differ");
  if (std::abs(norm(omega) - 1.0) > 1e-8)
    throw InvalidArgument("projected_hamiltonian_mpo: omega must be normalized");
  const TruncationPolicy exact{1u << 20, 1e-14};
  const Mps phi = apply_mpo(h, omega, exact).state;  // H|w>
  const double e = inner(omega, phi).real();
  Mpo out = h;
  out = mpo_sum(out, mpo_scaled(outer_product_mpo(omega, phi), -1.0));
  out = mpo_sum(out, mpo_scaled(outer_product_mpo(phi, omega), -1.0));
  out = mpo_sum(out, mpo_scaled(outer_product_mpo(omega, omega), e));
  Mpo compressed = mpo_compress(out, TruncationPolicy{1u << 20, 1e-12});
  return Mpo(compressed.tensors(), h.hermitian());
}

}  // namespace vnps
