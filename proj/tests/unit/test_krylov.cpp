#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <unsupported/Eigen/MatrixFunctions>

#include "test_util.hpp"
#include "vnps/krylov.hpp"

using namespace vnps;

TEST(Lanczos, Examples) {
  auto id = lanczos_smallest([](const Vec& v) { return v; }, 5, 1e-12, 100);
  EXPECT_NEAR(id.value, 1.0, 1e-14);
  EXPECT_TRUE(id.converged);
  const RealVec d = (RealVec(3) << -2, 0, 3).finished();
  auto r = lanczos_smallest([&](const Vec& v) { return Vec(d.cast<cplx>().cwiseProduct(v)); }, 3, 1e-12, 100);
  EXPECT_NEAR(r.value, -2.0, 1e-12);
}

TEST(Lanczos, RandomHermitian) {
  const Mat a = test::random_hermitian(200, 5);
  const auto r = lanczos_smallest([&](const Vec& v) { return Vec(a * v); }, 200, 1e-11, 5000);
  RealVec ev;
  Mat vec;
  hermitian_eigh(a, ev, vec);
  EXPECT_NEAR(r.value, ev(0), 1e-9);
  EXPECT_TRUE(r.converged);
  // deterministic
  const auto r2 = lanczos_smallest([&](const Vec& v) { return Vec(a * v); }, 200, 1e-11, 5000);
  EXPECT_EQ(r.value, r2.value);
}

TEST(KrylovExp, Examples) {
  const Vec v = test::random_state(4, 1);
  auto zero = local_krylov_exp([](const Vec& x) { return Vec(Vec::Zero(x.size())); }, v, 1.0, 1e-12, 20);
  EXPECT_LT((zero.vector - v).norm(), 1e-15);
  Vec e(2);
  e << 1, 1;
  e /= std::sqrt(2.0);
  const double pi = std::numbers::pi;
  auto diag = local_krylov_exp(
      [](const Vec& x) {
        Vec y = x;
        y(1) *= 2.0;
        return y;
      },
      e, pi, 1e-12, 10);
  EXPECT_LT(std::abs(diag.vector(0) - std::exp(-kI * pi) * e(0)), 1e-10);
  EXPECT_LT(std::abs(diag.vector(1) - std::exp(-2.0 * kI * pi) * e(1)), 1e-10);
}

TEST(KrylovExp, RandomHermitian) {
  const Mat a = test::random_hermitian(100, 9) / 10.0;
  const Vec v = test::random_state(100, 10);
  const auto r = local_krylov_exp([&](const Vec& x) { return Vec(a * x); }, v, 0.5, 1e-12, 60);
  const Eigen::MatrixXcd u = (Eigen::MatrixXcd(a) * (-kI * 0.5)).exp();
  EXPECT_LT((r.vector - u * v).norm(), 1e-9);
  EXPECT_TRUE(r.converged);
}
