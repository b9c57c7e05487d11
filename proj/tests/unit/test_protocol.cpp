#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "test_util.hpp"
#include "vnps/dmrg.hpp"
#include "vnps/error.hpp"
#include "vnps/oracle.hpp"
#include "vnps/protocol.hpp"

using namespace vnps;

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

double l1(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0;
  for (std::size_t i = 0; i < a.size(); ++i) s += std::abs(a[i] - b[i]);
  return s;
}

// Dense state -> exact MPS by sequential SVD.
Mps from_dense(const Vec& v, std::size_t n) {
  std::vector<Mat> t;
  Mat rest = Eigen::Map<const Mat>(v.data(), 1, v.size());
  for (std::size_t i = 0; i + 1 < n; ++i) {
    const Eigen::Index l = rest.rows();
    Mat m = Eigen::Map<Mat>(rest.data(), l * 2, rest.size() / (l * 2));
    Svd d = svd(m);
    Eigen::Index k = 0;
    while (k < d.s.size() && d.s(k) > 1e-14 * d.s(0)) ++k;
    k = std::max<Eigen::Index>(k, 1);
    t.push_back(d.u.leftCols(k));
    rest = d.s.head(k).asDiagonal() * d.vh.topRows(k);
  }
  t.push_back(Eigen::Map<Mat>(rest.data(), rest.rows() * 2, 1));
  return Mps(t);
}

}  // namespace

TEST(Window, Examples) {
  auto c = choose_window(test::single(1, "Z0"), 3, 0.0);
  EXPECT_DOUBLE_EQ(c.shift, -1.0);
  EXPECT_DOUBLE_EQ(c.scale, 1.0);
  EXPECT_NEAR(c.t, 2 * std::numbers::pi * 8 / 2, 1e-12);
  EXPECT_NEAR(c.t, 25.13, 0.01);

  PauliSum id(1);
  id.add(2.0, PauliString{});
  c = choose_window(id, 3, 0.1);
  EXPECT_DOUBLE_EQ(c.shift, 2.0);
  EXPECT_GT(c.t, 0.0);
  EXPECT_DOUBLE_EQ(c.scale * (2.0 - c.shift) * c.t / kTwoPi, 0.0);

  c = choose_window(test::heisenberg_chain(2), 4, 0.1);
  const double x_lo = c.scale * (-3 - c.shift) * c.t / kTwoPi;
  const double x_hi = c.scale * (1 - c.shift) * c.t / kTwoPi;
  EXPECT_GE(x_lo, 0.0);
  EXPECT_LT(x_hi, 16 * 0.9);
  EXPECT_NE(std::lround(x_lo), std::lround(x_hi));
  EXPECT_THROW(choose_window(test::single(1, "Z0"), 0, 0.1), InvalidArgument);
}

TEST(Theory, DeltaAtIntegerAlignment) {
  const double t = 1.0;
  const auto p = theoretical_distribution(3 * kTwoPi / t, t, 3);
  for (std::size_t x = 0; x < 8; ++x) EXPECT_EQ(p[x], x == 3 ? 1.0 : 0.0);
}

TEST(Theory, HalfIntegerSymmetric) {
  const auto p = theoretical_distribution(2.5 * kTwoPi, 1.0, 3);
  EXPECT_NEAR(p[2], p[3], 1e-14);
  // sin^2(pi/2) / (64 sin^2(pi/16))
  EXPECT_NEAR(p[2], 1.0 / (64 * std::pow(std::sin(std::numbers::pi / 16), 2)), 1e-14);
  EXPECT_NEAR(p[2], 0.4105, 1e-4);
}

TEST(Theory, Normalized) {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(-20, 20);
  std::uniform_int_distribution<std::size_t> rr(1, 6);
  for (int i = 0; i < 100; ++i) {
    const auto p = theoretical_distribution(u(rng), std::abs(u(rng)) + 0.1, rr(rng));
    double s = 0;
    for (double v : p) {
      s += v;
      EXPECT_GE(v, -1e-15);
    }
    EXPECT_NEAR(s, 1.0, 1e-12);
  }
}

TEST(Theory, MatchesOraclePaths) {
  const auto h = test::single(1, "Z0");
  Vec up = Vec::Zero(2);
  up(0) = 1;
  for (double t : {0.37, 1.9, 5.2}) {
    const auto spectral = exact_pointer_distribution(h, up, t, 4, DistributionPath::spectral);
    const auto echo = exact_pointer_distribution(h, up, t, 4, DistributionPath::echo);
    EXPECT_LT(l1(spectral, theoretical_distribution(1.0, t, 4)), 1e-12);
    EXPECT_LT(l1(echo, theoretical_distribution(1.0, t, 4)), 1e-10);
  }
}

TEST(Readout, DisplacementIsExactDelta) {
  for (std::size_t r : {2u, 3u, 5u}) {
    for (std::size_t target : {0u, 1u, 3u}) {
      const double alpha = kTwoPi * static_cast<double>(target);
      TdvpConfig cfg;
      cfg.dt = 0.05;
      cfg.n_steps = 20;
      const auto evolved = tdvp_evolve(mpo_scaled(pointer_momentum_mpo(r), alpha), pointer_plus_state(r), cfg);
      const auto p = pointer_readout(reduced_density_matrix(evolved.state, 0, r));
      for (std::size_t x = 0; x < p.size(); ++x) EXPECT_NEAR(p[x], x == target ? 1.0 : 0.0, 1e-10);
    }
  }
}

TEST(Protocol, EigenstateMatchesLaw) {
  const auto h = test::heisenberg_chain(2);
  const auto gs = exact_spectrum(h, 1)[0];
  const auto cfg = choose_window(h, 4, 0.1);
  TdvpConfig evo;
  const auto res = run_protocol(h, from_dense(gs.state, 2), cfg, evo);
  const auto law = theoretical_distribution(cfg.scale * (gs.value - cfg.shift), cfg.t, 4);
  EXPECT_LT(l1(res.distribution, law), 1e-6);
  double s = 0;
  for (double v : res.distribution) {
    EXPECT_GE(v, -1e-12);
    s += v;
  }
  EXPECT_NEAR(s, 1.0, 1e-8);
  EXPECT_LE(std::abs(res.E_estimate - gs.value), res.E_uncertainty);
}

TEST(Protocol, SuperpositionOfZEigenstates) {
  const auto h = test::single(1, "Z0");
  const auto init = product_state({{cplx(1 / std::sqrt(2.0)), cplx(1 / std::sqrt(2.0))}});
  const auto cfg = choose_window(h, 4, 0.1);
  const auto res = run_protocol(h, init, cfg, TdvpConfig{});
  const auto a = theoretical_distribution(cfg.scale * (1.0 - cfg.shift), cfg.t, 4);
  const auto b = theoretical_distribution(cfg.scale * (-1.0 - cfg.shift), cfg.t, 4);
  std::vector<double> mix(16);
  for (std::size_t x = 0; x < 16; ++x) mix[x] = 0.5 * a[x] + 0.5 * b[x];
  EXPECT_LT(l1(res.distribution, mix), 1e-6);
}

TEST(Protocol, RandomSuperpositionMatchesOracle) {
  const auto h = test::random_pauli_sum(4, 12, 3, 8);
  const auto spec = exact_spectrum(h, 16);
  std::mt19937_64 rng(3);
  std::normal_distribution<double> g;
  Vec psi = Vec::Zero(16);
  for (std::size_t j = 0; j < 3; ++j) psi += cplx(g(rng), g(rng)) * spec[j * 4].state;
  psi /= psi.norm();
  const auto cfg = choose_window(h, 5, 0.1);
  PauliSum mapped = h;
  mapped.add(-cfg.shift, PauliString{});
  mapped = simplify(mapped);
  const auto oracle = exact_pointer_distribution(mapped, psi, cfg.t, 5);
  const auto res = run_protocol(h, from_dense(psi, 4), cfg, TdvpConfig{});
  EXPECT_LT(l1(res.distribution, oracle), 1e-6);
}

TEST(Protocol, RejectsWindowViolation) {
  auto cfg = choose_window(test::single(1, "Z0"), 3, 0.1);
  cfg.t *= 1.5;
  EXPECT_THROW(run_protocol(test::single(1, "Z0"), basis_state({0}), cfg, TdvpConfig{}), InvalidArgument);
}

TEST(Sweep, EigenstateEstimatesStable) {
  const auto h = test::heisenberg_chain(2);
  const auto gs = exact_spectrum(h, 1)[0];
  const auto base = choose_window(h, 4, 0.1);
  const std::vector<double> ts{base.t / 4, base.t / 2, base.t};
  const auto runs = time_sweep(h, from_dense(gs.state, 2), ts, 4, TdvpConfig{}, 0.1, 2);
  ASSERT_EQ(runs.size(), 3u);
  for (std::size_t i = 0; i < runs.size(); ++i) {
    EXPECT_LE(std::abs(runs[i].E_estimate - gs.value), runs[i].E_uncertainty);
    if (i > 0) EXPECT_NEAR(runs[i].E_uncertainty, runs[i - 1].E_uncertainty / 2, 1e-12);
  }
  EXPECT_THROW(time_sweep(h, from_dense(gs.state, 2), {1.0, 0.5}, 4, TdvpConfig{}), InvalidArgument);
}

TEST(Protocol, UnmapConsistency) {
  const auto h = test::random_pauli_sum(3, 8, 2, 4);
  const auto spec = exact_spectrum(h, 8);
  const auto cfg = choose_window(h, 5, 0.1);
  for (const auto& e : spec) {
    ProtocolResult r;
    r.config = cfg;
    estimate_energy(theoretical_distribution(cfg.scale * (e.value - cfg.shift), cfg.t, 5), cfg, r);
    EXPECT_LE(std::abs(r.E_estimate - e.value), cfg.bin_width());
  }
}
