#include "vnps/oracle.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numbers>
#include <random>
#include <unsupported/Eigen/MatrixFunctions>

#include "vnps/error.hpp"

namespace vnps {

namespace {

struct TermMasks {
  std::uint64_t flip;   // basis-index bits toggled
  std::uint64_t phase;  // basis-index bits contributing a sign
  cplx coefficient;     // includes i^{#Y}
};

std::vector<TermMasks> term_masks(const PauliSum& h) {
  const std::size_t n = h.n_qubits();
  std::vector<TermMasks> out;
  out.reserve(h.size());
  for (const auto& t : h.terms()) {
    TermMasks m{0, 0, t.coefficient};
    for (std::size_t q = 0; q < n; ++q) {
      const std::uint64_t bit = std::uint64_t{1} << (n - 1 - q);
      if ((t.string.x >> q) & 1u) m.flip |= bit;
      if ((t.string.z >> q) & 1u) m.phase |= bit;
    }
    static const cplx ipow[4] = {1.0, kI, -1.0, -kI};
    m.coefficient *= ipow[std::popcount(t.string.x & t.string.z) % 4];
    out.push_back(m);
  }
  return out;
}

void check_qubits(std::size_t n, std::size_t limit, const char* what) {
  if (n > limit)
    throw ResourceLimit(std::string(what) + ": " + std::to_string(n) + " qubits exceeds limit " +
                        std::to_string(limit));
}

// Matvec restricted to a list of basis states.
class SectorOperator {
 public:
  SectorOperator(const PauliSum& h, std::vector<std::uint64_t> basis)
      : masks_(term_masks(h)), basis_(std::move(basis)) {
    const std::size_t full = std::size_t{1} << h.n_qubits();
    index_.assign(full, -1);
    for (std::size_t i = 0; i < basis_.size(); ++i)
      index_[basis_[i]] = static_cast<std::int64_t>(i);
  }

  std::size_t dim() const { return basis_.size(); }
  const std::vector<std::uint64_t>& basis() const { return basis_; }

  Vec apply(const Vec& v) const {
    Vec out = Vec::Zero(v.size());
    for (std::size_t i = 0; i < basis_.size(); ++i) {
      const cplx a = v(static_cast<Eigen::Index>(i));
      if (a == cplx{}) continue;
      const std::uint64_t b = basis_[i];
      for (const auto& m : masks_) {
        const std::int64_t j = index_[b ^ m.flip];
        if (j < 0) continue;
        const double sign = (std::popcount(b & m.phase) & 1) ? -1.0 : 1.0;
        out(j) += sign * m.coefficient * a;
      }
    }
    return out;
  }

  Mat dense() const {
    const auto d = static_cast<Eigen::Index>(basis_.size());
    Mat m = Mat::Zero(d, d);
    for (std::size_t i = 0; i < basis_.size(); ++i) {
      const std::uint64_t b = basis_[i];
      for (const auto& t : masks_) {
        const std::int64_t j = index_[b ^ t.flip];
        if (j < 0) continue;
        const double sign = (std::popcount(b & t.phase) & 1) ? -1.0 : 1.0;
        m(j, static_cast<Eigen::Index>(i)) += sign * t.coefficient;
      }
    }
    return m;
  }

 private:
  std::vector<TermMasks> masks_;
  std::vector<std::uint64_t> basis_;
  std::vector<std::int64_t> index_;
};

void project_out(const std::vector<Vec>& found, Vec& v) {
  for (int pass = 0; pass < 2; ++pass)
    for (const auto& f : found) v -= f * f.dot(v);
}

// Lowest eigenpair of op on the complement of `found`.
Eigenpair deflated_lanczos(const SectorOperator& op, const std::vector<Vec>& found,
                           std::uint64_t seed) {
  const std::size_t dim = op.dim();
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g;
  Vec v(static_cast<Eigen::Index>(dim));
  for (Eigen::Index i = 0; i < v.size(); ++i) v(i) = cplx(g(rng), g(rng));
  project_out(found, v);
  v /= v.norm();
  auto apply = [&](const Vec& x) {
    Vec y = op.apply(x);
    project_out(found, y);
    return y;
  };
  const std::size_t m = std::min<std::size_t>(dim - found.size(), 160);
  Eigenpair best;
  best.residual = std::numeric_limits<double>::infinity();
  for (int restart = 0; restart < 200; ++restart) {
    Mat q(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(m));
    Eigen::MatrixXd t = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(m),
                                              static_cast<Eigen::Index>(m));
    q.col(0) = v;
    std::size_t used = m;
    for (std::size_t k = 0; k < m; ++k) {
      const auto kk = static_cast<Eigen::Index>(k);
      Vec w = apply(q.col(kk));
      t(kk, kk) = q.col(kk).dot(w).real();
      for (int pass = 0; pass < 2; ++pass)
        for (Eigen::Index j = 0; j <= kk; ++j) w -= q.col(j) * q.col(j).dot(w);
      const double b = w.norm();
      if (k + 1 == m) break;
      if (b < 1e-13) {
        used = k + 1;
        break;
      }
      t(kk, kk + 1) = b;
      t(kk + 1, kk) = b;
      q.col(kk + 1) = w / b;
    }
    const auto u = static_cast<Eigen::Index>(used);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(t.topLeftCorner(u, u));
    Vec ritz = q.leftCols(u) * es.eigenvectors().col(0).cast<cplx>();
    project_out(found, ritz);
    ritz /= ritz.norm();
    const Vec hr = op.apply(ritz);
    const double lambda = ritz.dot(hr).real();
    const double res = (hr - lambda * ritz).norm();
    if (res < best.residual) {
      best.value = lambda;
      best.state = ritz;
      best.residual = res;
    }
    if (res <= 1e-10 * std::max(1.0, std::abs(lambda)) || used < m) break;
    v = ritz;
  }
  return best;
}

DenseState embed(const Vec& sector_vec, const std::vector<std::uint64_t>& basis, std::size_t n) {
  DenseState out = DenseState::Zero(static_cast<Eigen::Index>(std::size_t{1} << n));
  for (std::size_t i = 0; i < basis.size(); ++i)
    out(static_cast<Eigen::Index>(basis[i])) = sector_vec(static_cast<Eigen::Index>(i));
  return out;
}

void fix_phase(DenseState& v) {
  Eigen::Index idx = 0;
  v.cwiseAbs().maxCoeff(&idx);
  const cplx c = v(idx);
  if (std::abs(c) > 0.0) v *= std::conj(c) / std::abs(c);
}

}  // namespace

Mat pauli_sum_to_dense(const PauliSum& h, std::size_t max_qubits) {
  check_qubits(h.n_qubits(), max_qubits, "pauli_sum_to_dense");
  const auto dim = static_cast<Eigen::Index>(std::size_t{1} << h.n_qubits());
  Mat out = Mat::Zero(dim, dim);
  for (const auto& m : term_masks(h))
    for (Eigen::Index b = 0; b < dim; ++b) {
      const auto ub = static_cast<std::uint64_t>(b);
      const double sign = (std::popcount(ub & m.phase) & 1) ? -1.0 : 1.0;
      out(static_cast<Eigen::Index>(ub ^ m.flip), b) += sign * m.coefficient;
    }
  return out;
}

Mat mpo_to_dense(const Mpo& m, std::size_t max_qubits) {
  check_qubits(m.size(), max_qubits, "mpo_to_dense");
  std::vector<Mat> blocks{Mat::Identity(1, 1)};
  for (const auto& w : m.tensors()) {
    const Eigen::Index d = blocks.front().rows();
    std::vector<Mat> next(w.right, Mat::Zero(d * 2, d * 2));
    for (std::size_t bl = 0; bl < w.left; ++bl)
      for (std::size_t o = 0; o < 2; ++o)
        for (std::size_t in = 0; in < 2; ++in)
          for (std::size_t br = 0; br < w.right; ++br) {
            const cplx v = w.at(bl, o, in, br);
            if (v == cplx{}) continue;
            for (Eigen::Index a = 0; a < d; ++a)
              for (Eigen::Index b = 0; b < d; ++b)
                next[br](a * 2 + static_cast<Eigen::Index>(o), b * 2 + static_cast<Eigen::Index>(in)) +=
                    blocks[bl](a, b) * v;
          }
    blocks = std::move(next);
  }
  return blocks.front();
}

DenseState mpo_apply_dense(const Mpo& m, const DenseState& v) {
  const std::size_t n = m.size();
  check_qubits(n, kSparseQubitLimit, "mpo_apply_dense");
  if (v.size() != static_cast<Eigen::Index>(std::size_t{1} << n))
    throw InvalidArgument("mpo_apply_dense: state dimension mismatch");
  // blocks[b] holds the partially transformed vector for MPO bond state b;
  // sites < i already carry output indices.
  std::vector<Vec> blocks{v};
  for (std::size_t i = 0; i < n; ++i) {
    const auto& w = m.tensor(i);
    const std::uint64_t bit = std::uint64_t{1} << (n - 1 - i);
    std::vector<Vec> next(w.right, Vec::Zero(v.size()));
    for (std::size_t bl = 0; bl < w.left; ++bl)
      for (std::size_t o = 0; o < 2; ++o)
        for (std::size_t in = 0; in < 2; ++in)
          for (std::size_t br = 0; br < w.right; ++br) {
            const cplx c = w.at(bl, o, in, br);
            if (c == cplx{}) continue;
            const Vec& src = blocks[bl];
            Vec& dst = next[br];
            for (Eigen::Index b = 0; b < v.size(); ++b) {
              const auto ub = static_cast<std::uint64_t>(b);
              if (((ub & bit) != 0) != (in == 1)) continue;
              const std::uint64_t target = o == 1 ? (ub | bit) : (ub & ~bit);
              dst(static_cast<Eigen::Index>(target)) += c * src(b);
            }
          }
    blocks = std::move(next);
  }
  return blocks.front();
}

DenseState pauli_apply(const PauliSum& h, const DenseState& v) {
  const std::size_t n = h.n_qubits();
  check_qubits(n, kSparseQubitLimit, "pauli_apply");
  if (v.size() != static_cast<Eigen::Index>(std::size_t{1} << n))
    throw InvalidArgument("pauli_apply: state dimension mismatch");
  const auto masks = term_masks(h);
  DenseState out = DenseState::Zero(v.size());
  for (const auto& m : masks)
    for (Eigen::Index b = 0; b < v.size(); ++b) {
      const auto ub = static_cast<std::uint64_t>(b);
      const double sign = (std::popcount(ub & m.phase) & 1) ? -1.0 : 1.0;
      out(static_cast<Eigen::Index>(ub ^ m.flip)) += sign * m.coefficient * v(b);
    }
  return out;
}

std::vector<Eigenpair> exact_spectrum(const PauliSum& h, std::size_t k_lowest,
                                      std::optional<std::size_t> hamming_weight) {
  const std::size_t n = h.n_qubits();
  check_qubits(n, kSparseQubitLimit, "exact_spectrum");
  if (!h.is_hermitian()) throw InvalidArgument("exact_spectrum: Hamiltonian is not Hermitian");
  std::vector<std::uint64_t> basis;
  for (std::uint64_t b = 0; b < (std::uint64_t{1} << n); ++b)
    if (!hamming_weight || static_cast<std::size_t>(std::popcount(b)) == *hamming_weight)
      basis.push_back(b);
  if (basis.empty()) throw InvalidArgument("exact_spectrum: empty sector");
  k_lowest = std::min(k_lowest, basis.size());
  const SectorOperator op(h, basis);

  std::vector<Eigenpair> out;
  if (basis.size() <= kDenseSpectrumDim) {
    const Mat m = op.dense();
    RealVec values;
    Mat vectors;
    hermitian_eigh(m, values, vectors);
    for (std::size_t i = 0; i < k_lowest; ++i) {
      Eigenpair e;
      e.value = values(static_cast<Eigen::Index>(i));
      Vec v = vectors.col(static_cast<Eigen::Index>(i));
      e.residual = (op.apply(v) - e.value * v).norm();
      e.state = embed(v, basis, n);
      fix_phase(e.state);
      out.push_back(std::move(e));
    }
    return out;
  }

  std::vector<Vec> found;
  for (std::size_t i = 0; i < k_lowest; ++i) {
    Eigenpair e = deflated_lanczos(op, found, 1234 + i);
    if (!(e.residual <= 1e-6 * std::max(1.0, std::abs(e.value))))
      throw NumericFailure("exact_spectrum: Lanczos did not converge (residual " +
                           std::to_string(e.residual) + ")");
    found.push_back(e.state);
    e.state = embed(e.state, basis, n);
    fix_phase(e.state);
    out.push_back(std::move(e));
  }
  std::stable_sort(out.begin(), out.end(),
                   [](const Eigenpair& a, const Eigenpair& b) { return a.value < b.value; });
  return out;
}

DenseState exact_evolve(const PauliSum& h, const DenseState& psi, double t) {
  const Mat m = pauli_sum_to_dense(h);
  if (psi.size() != m.rows()) throw InvalidArgument("exact_evolve: state dimension mismatch");
  RealVec values;
  Mat vectors;
  hermitian_eigh(m, values, vectors);
  Vec c = vectors.adjoint() * psi;
  for (Eigen::Index i = 0; i < c.size(); ++i) c(i) *= std::exp(-kI * values(i) * t);
  return vectors * c;
}

std::vector<double> exact_pointer_distribution(const PauliSum& h, const DenseState& psi, double t,
                                               std::size_t r, DistributionPath path) {
  check_qubits(h.n_qubits(), 12, "exact_pointer_distribution");
  if (r == 0 || r > 8) throw InvalidArgument("exact_pointer_distribution: r must be in 1..8");
  const Mat m = pauli_sum_to_dense(h);
  if (psi.size() != m.rows()) throw InvalidArgument("exact_pointer_distribution: dimension mismatch");
  const std::size_t big = std::size_t{1} << r;
  const double two_pi = 2.0 * std::numbers::pi;
  std::vector<double> p(big, 0.0);

  if (path == DistributionPath::spectral) {
    RealVec values;
    Mat vectors;
    hermitian_eigh(m, values, vectors);
    const Vec c = vectors.adjoint() * psi;
    for (Eigen::Index j = 0; j < c.size(); ++j) {
      const double w = std::norm(c(j));
      if (w == 0.0) continue;
      const double shift = values(j) * t / two_pi;
      for (std::size_t x = 0; x < big; ++x) {
        // f = 2^{-r} sum_z exp(2 pi i z (x - shift) / 2^r)
        cplx f{};
        for (std::size_t z = 0; z < big; ++z)
          f += std::exp(kI * (two_pi * static_cast<double>(z) *
                              (static_cast<double>(x) - shift) / static_cast<double>(big)));
        f /= static_cast<double>(big);
        p[x] += w * std::norm(f);
      }
    }
    return p;
  }

  // Loschmidt echo G(D) = <psi| exp(-i t D H / 2^r) |psi>.
  const Eigen::MatrixXcd gen = Eigen::MatrixXcd(m) * (-kI * t / static_cast<double>(big));
  const Eigen::MatrixXcd u = gen.exp();
  std::vector<cplx> g(big);
  Eigen::VectorXcd phi = psi;
  for (std::size_t d = 0; d < big; ++d) {
    g[d] = psi.dot(phi);
    phi = u * phi;
  }
  const double norm4 = static_cast<double>(big) * static_cast<double>(big);
  for (std::size_t x = 0; x < big; ++x) {
    cplx acc = static_cast<double>(big) * g[0];
    for (std::size_t d = 1; d < big; ++d) {
      const cplx phase = std::exp(kI * (two_pi * static_cast<double>(x * d) / static_cast<double>(big)));
      const double weight = static_cast<double>(big - d);
      acc += weight * (phase * g[d] + std::conj(phase) * std::conj(g[d]));
    }
    p[x] = acc.real() / norm4;
  }
  return p;
}

DenseState mps_to_statevector(const Mps& mps, std::size_t max_qubits) {
  check_qubits(mps.size(), max_qubits, "mps_to_statevector");
  Mat acc = Mat::Identity(1, 1);
  for (std::size_t i = 0; i < mps.size(); ++i) {
    const Mat& t = mps.tensor(i);
    ConstMatMap rg(t.data(), static_cast<Eigen::Index>(mps.left_dim(i)),
                   static_cast<Eigen::Index>(2 * mps.right_dim(i)));
    Mat prod = acc * rg;
    acc = Eigen::Map<Mat>(prod.data(), prod.rows() * 2, prod.cols() / 2);
  }
  return Eigen::Map<Vec>(acc.data(), acc.size());
}

DenseState circuit_apply(const CircuitPlan& plan, const DenseState& input) {
  const std::size_t n = plan.n_qubits;
  check_qubits(n, kDenseQubitLimit, "circuit_apply");
  if (input.size() != static_cast<Eigen::Index>(std::size_t{1} << n))
    throw InvalidArgument("circuit_apply: state dimension mismatch");
  DenseState psi = input;
  for (const auto& g : plan.gates) {
    const std::size_t m = g.support.size();
    std::vector<std::uint64_t> bits(m);
    std::uint64_t support_mask = 0;
    for (std::size_t k = 0; k < m; ++k) {
      if (g.support[k] >= n) throw InvalidArgument("circuit_apply: gate support out of range");
      bits[k] = std::uint64_t{1} << (n - 1 - g.support[k]);
      support_mask |= bits[k];
    }
    const std::size_t local = std::size_t{1} << m;
    std::vector<std::uint64_t> offsets(local, 0);
    for (std::size_t l = 0; l < local; ++l)
      for (std::size_t k = 0; k < m; ++k)
        if ((l >> (m - 1 - k)) & 1u) offsets[l] |= bits[k];
    Vec buf(static_cast<Eigen::Index>(local));
    for (std::uint64_t base = 0; base < (std::uint64_t{1} << n); ++base) {
      if (base & support_mask) continue;
      for (std::size_t l = 0; l < local; ++l) buf(static_cast<Eigen::Index>(l)) = psi(static_cast<Eigen::Index>(base | offsets[l]));
      const Vec res = g.unitary * buf;
      for (std::size_t l = 0; l < local; ++l) psi(static_cast<Eigen::Index>(base | offsets[l])) = res(static_cast<Eigen::Index>(l));
    }
  }
  return psi;
}

Mat dense_reduced_density_matrix(const DenseState& psi, std::size_t n_qubits, std::size_t first,
                                 std::size_t count) {
  if (first + count > n_qubits) throw InvalidArgument("dense_reduced_density_matrix: bad window");
  const auto left = static_cast<Eigen::Index>(std::size_t{1} << first);
  const auto mid = static_cast<Eigen::Index>(std::size_t{1} << count);
  const auto right = static_cast<Eigen::Index>(std::size_t{1} << (n_qubits - first - count));
  Mat rho = Mat::Zero(mid, mid);
  for (Eigen::Index a = 0; a < left; ++a)
    for (Eigen::Index c = 0; c < right; ++c) {
      Vec v(mid);
      for (Eigen::Index b = 0; b < mid; ++b) v(b) = psi((a * mid + b) * right + c);
      rho += v * v.adjoint();
    }
  return rho;
}

}  // namespace vnps
