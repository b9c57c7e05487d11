#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <sstream>

#include "test_util.hpp"
#include "vnps/circuit.hpp"
#include "vnps/error.hpp"
#include "vnps/oracle.hpp"

using namespace vnps;

namespace {

Mat plan_matrix(const CircuitPlan& plan) {
  const auto dim = static_cast<Eigen::Index>(std::size_t{1} << plan.n_qubits);
  Mat u(dim, dim);
  for (Eigen::Index c = 0; c < dim; ++c) {
    Vec e = Vec::Zero(dim);
    e(c) = 1.0;
    u.col(c) = circuit_apply(plan, e);
  }
  return u;
}

Mat pauli_matrix(const std::string& s, std::size_t n) {
  return pauli_sum_to_dense(test::single(n, s));
}

// exp(-i a/2 P) = cos(a/2) I - i sin(a/2) P.
Mat rotation(const std::string& s, std::size_t n, double a) {
  const Mat p = pauli_matrix(s, n);
  return std::cos(a / 2) * Mat::Identity(p.rows(), p.cols()) - kI * std::sin(a / 2) * p;
}

std::size_t count(const CircuitPlan& plan, const std::string& label) {
  std::size_t k = 0;
  for (const auto& g : plan.gates) k += g.label == label;
  return k;
}

Vec zero_state(std::size_t n) {
  Vec v = Vec::Zero(static_cast<Eigen::Index>(std::size_t{1} << n));
  v(0) = 1.0;
  return v;
}

}  // namespace

TEST(Isometry, IdentityColumns) {
  const Mat id = Mat::Identity(4, 4);
  EXPECT_LT((complete_isometry(id) - id).cwiseAbs().maxCoeff(), 1e-15);
  Mat col = Mat::Zero(2, 1);
  col(0, 0) = 1.0;
  EXPECT_LT((complete_isometry(col) - Mat::Identity(2, 2)).cwiseAbs().maxCoeff(), 1e-15);
}

TEST(Isometry, RandomCompletion) {
  const Mat a = test::random_hermitian(8, 3);
  Mat q, r;
  qr_positive(a.leftCols(4), q, r);
  const Mat u = complete_isometry(q);
  EXPECT_LT((u * u.adjoint() - Mat::Identity(8, 8)).cwiseAbs().maxCoeff(), 1e-12);
  EXPECT_EQ(u.leftCols(4), q);
}

TEST(Isometry, RejectsNonIsometry) {
  Mat a = Mat::Ones(4, 2);
  EXPECT_THROW(complete_isometry(a), InvalidArgument);
  EXPECT_THROW(complete_isometry(Mat::Identity(2, 3)), InvalidArgument);
}

TEST(Staircase, ProductStateUsesSingleQubitGates) {
  const auto psi = right_canonicalize(basis_state({1, 0, 1}));
  const auto plan = mps_to_staircase(psi);
  ASSERT_EQ(plan.gates.size(), 3u);
  for (const auto& g : plan.gates) EXPECT_EQ(g.support.size(), 1u);
  const Vec out = circuit_apply(plan, zero_state(3));
  EXPECT_NEAR(std::norm(out.dot(mps_to_statevector(psi))), 1.0, 1e-12);
}

TEST(Staircase, BellState) {
  Mat a(2, 2), b(4, 1);
  a << 1.0, 0.0, 0.0, 1.0;
  const double s = 1.0 / std::sqrt(2.0);
  a *= s;
  b << 1.0, 0.0, 0.0, 1.0;
  const auto psi = right_canonicalize(Mps({a, b}));
  const auto plan = mps_to_staircase(psi);
  ASSERT_EQ(plan.gates.size(), 2u);
  EXPECT_EQ(plan.gates[0].support.size(), 2u);
  EXPECT_EQ(plan.gates[1].support.size(), 1u);
  Vec bell = Vec::Zero(4);
  bell(0) = bell(3) = s;
  const Vec out = circuit_apply(plan, zero_state(2));
  EXPECT_NEAR(std::norm(out.dot(bell)), 1.0, 1e-12);
}

TEST(Staircase, RandomChiTwo) {
  for (std::uint64_t seed : {1, 2, 3}) {
    const auto psi = right_canonicalize(random_mps(6, 2, seed));
    const auto plan = mps_to_staircase(psi);
    plan.validate();
    for (const auto& g : plan.gates) EXPECT_LE(g.support.size(), 2u);
    const Vec out = circuit_apply(plan, zero_state(6));
    EXPECT_GE(std::norm(out.dot(mps_to_statevector(psi))), 1.0 - 1e-10);
  }
}

TEST(Staircase, WideGatesForLargerBonds) {
  for (std::size_t chi : {3, 4, 5, 8}) {
    const auto psi = right_canonicalize(random_mps(8, chi, 10 + chi));
    const auto plan = mps_to_staircase(psi);
    plan.validate();
    const Vec out = circuit_apply(plan, zero_state(8));
    EXPECT_GE(std::norm(out.dot(mps_to_statevector(psi))), 1.0 - 1e-10) << "chi=" << chi;
  }
}

TEST(Staircase, RejectsNonCanonical) {
  const auto psi = canonicalize(random_mps(5, 2, 4), 4);
  EXPECT_THROW(mps_to_staircase(psi), InvalidState);
}

TEST(Staircase, PlanIsUnitary) {
  const auto psi = right_canonicalize(random_mps(6, 4, 9));
  const Mat u = plan_matrix(mps_to_staircase(psi));
  EXPECT_LT((u * u.adjoint() - Mat::Identity(u.rows(), u.cols())).cwiseAbs().maxCoeff(), 1e-8);
}

TEST(Template, SingleZ) {
  const double a = std::numbers::pi / 2;
  const auto plan = pauli_exponential_template({1.0, parse_pauli_string("Z0")}, a, 1);
  ASSERT_EQ(plan.gates.size(), 1u);
  EXPECT_EQ(plan.gates[0].label, "Rz");
  Mat want = Mat::Zero(2, 2);
  want(0, 0) = std::exp(-kI * (a / 2));
  want(1, 1) = std::exp(kI * (a / 2));
  EXPECT_LT((plan_matrix(plan) - want).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(Template, ZZ) {
  const auto plan = pauli_exponential_template({1.0, parse_pauli_string("Z0 Z1")}, 0.37, 2);
  EXPECT_EQ(count(plan, "CNOT"), 2u);
  EXPECT_EQ(count(plan, "Rz"), 1u);
  EXPECT_LT((plan_matrix(plan) - rotation("Z0 Z1", 2, 0.37)).cwiseAbs().maxCoeff(), 1e-10);
}

TEST(Template, MatchesExponentialForAllStrings) {
  std::mt19937_64 rng(5);
  std::uniform_int_distribution<int> op(0, 3);
  for (int trial = 0; trial < 40; ++trial) {
    PauliString s;
    for (std::size_t q = 0; q < 5; ++q) s.set(q, static_cast<Pauli>(op(rng)));
    if (s.is_identity()) continue;
    const double a = 0.1 + 0.07 * trial;
    const auto plan = pauli_exponential_template({1.0, s}, a, 5);
    plan.validate();
    EXPECT_EQ(count(plan, "CNOT"), 2 * (s.locality() - 1));
    EXPECT_LE(plan.gates.size() - count(plan, "CNOT"), 2 * s.locality() + 1);
    EXPECT_LT((plan_matrix(plan) - rotation(s.to_string(), 5, a)).cwiseAbs().maxCoeff(), 1e-10)
        << s.to_string();
  }
}

TEST(Template, PointerControlledXXYY) {
  const double a = 0.9;
  const std::string s = "X0 X1 Y2 Y3";
  for (std::size_t j : {1, 2, 3}) {
    const auto plan = pauli_exponential_template({1.0, parse_pauli_string(s)}, a, 5, PointerControl{4, j});
    EXPECT_EQ(count(plan, "CRz"), 1u);
    EXPECT_EQ(count(plan, "CNOT"), 6u);
    // |0><0|_p (x) I + |1><1|_p (x) exp(-i a 2^{-j-1}/2 P); qubit 4 is the least significant.
    const Mat id = Mat::Identity(32, 32);
    const Mat proj1 = 0.5 * (id - pauli_matrix("Z4", 5));
    const Mat rot = rotation(s, 5, std::ldexp(a, -static_cast<int>(j) - 1));
    const Mat want = id - proj1 + proj1 * rot;
    EXPECT_LT((plan_matrix(plan) - want).cwiseAbs().maxCoeff(), 1e-10) << "j=" << j;
  }
}

TEST(Template, Errors) {
  EXPECT_THROW(pauli_exponential_template({1.0, PauliString{}}, 0.1, 2), InvalidArgument);
  EXPECT_THROW(pauli_exponential_template({1.0, parse_pauli_string("Z3")}, 0.1, 2), InvalidArgument);
  EXPECT_THROW(pauli_exponential_template({1.0, parse_pauli_string("Z0")}, 0.1, 2, PointerControl{0, 1}),
               InvalidArgument);
}

TEST(Resources, ZZZZ) {
  const auto r = trotter_resources(test::single(4, "Z0 Z1 Z2 Z3"), 1, std::nullopt, true);
  EXPECT_EQ(r.cnot_count, 6u);
  EXPECT_EQ(r.term_count, 1u);
  EXPECT_EQ(r.controlled_rz_count, 0u);
  EXPECT_EQ(r.single_qubit_count_max, 1u);
}

TEST(Resources, XXYYHasBasisLayer) {
  const auto r = trotter_resources(test::single(4, "X0 X1 Y2 Y3"), 1, std::nullopt, true);
  EXPECT_EQ(r.cnot_count, 6u);
  EXPECT_EQ(r.single_qubit_count_max, 9u);
}

TEST(Resources, PointerCountLaw) {
  const auto h = test::random_pauli_sum(8, 60, 4, 17);
  std::size_t k = 0, cnots = 0;
  for (const auto& t : h.terms())
    if (!t.string.is_identity()) {
      ++k;
      cnots += 2 * (t.string.locality() - 1);
    }
  for (std::size_t steps : {1, 3}) {
    const auto r = trotter_resources(h, steps, 5, true);
    EXPECT_EQ(r.term_count, k);
    EXPECT_EQ(r.controlled_rz_count, 5 * k * steps);
    EXPECT_EQ(r.cnot_count, cnots * steps);
    const auto plain = trotter_resources(h, steps, 5, false);
    EXPECT_EQ(plain.cnot_count, 5 * cnots * steps);
  }
}

TEST(Resources, MatchesTemplateEnumeration) {
  const auto h = test::random_pauli_sum(6, 30, 4, 23);
  const auto r = trotter_resources(h, 1, std::nullopt, true);
  std::size_t cnot = 0, single = 0, i = 0;
  for (const auto& t : h.terms()) {
    if (t.string.is_identity()) continue;
    const auto plan = pauli_exponential_template(t, 0.3, 6);
    EXPECT_EQ(r.per_term[i].cnot, count(plan, "CNOT"));
    EXPECT_EQ(r.per_term[i].single_qubit, plan.gates.size() - count(plan, "CNOT"));
    cnot += count(plan, "CNOT");
    single += plan.gates.size() - count(plan, "CNOT");
    ++i;
  }
  EXPECT_EQ(r.cnot_count, cnot);
  EXPECT_EQ(r.single_qubit_count_max, single);
}

TEST(Resources, IdentityExcluded) {
  PauliSum h(4);
  h.add(2.0, PauliString{});
  h.add(1.0, parse_pauli_string("Z0"));
  const auto r = trotter_resources(h, 1, 5, true);
  EXPECT_EQ(r.term_count, 1u);
  EXPECT_EQ(r.controlled_rz_count, 5u);
}

TEST(Resources, CsvAndJson) {
  const auto r = trotter_resources(test::single(4, "Z0 Z1 Z2 Z3"), 1, std::nullopt, true);
  std::ostringstream os;
  write_resources_csv(os, "zzzz", r);
  EXPECT_EQ(os.str(), "label,cnot_count,term_count\nzzzz,6,1\n");
  EXPECT_NE(to_json(r).find("\"cnot_count\": 6"), std::string::npos);
}
