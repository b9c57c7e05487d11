#include "vnps/circuit.hpp"

#include <algorithm>
#include <cmath>

#include "json.hpp"
#include "vnps/error.hpp"

namespace vnps {

namespace {

Mat cnot() {
  Mat m = Mat::Zero(4, 4);
  m(0, 0) = m(1, 1) = 1.0;
  m(2, 3) = m(3, 2) = 1.0;
  return m;
}

Mat rz(double theta) {
  Mat m = Mat::Zero(2, 2);
  m(0, 0) = std::exp(-kI * (theta / 2));
  m(1, 1) = std::exp(kI * (theta / 2));
  return m;
}

Mat controlled_rz(double theta) {
  Mat m = Mat::Identity(4, 4);
  m(2, 2) = std::exp(-kI * (theta / 2));
  m(3, 3) = std::exp(kI * (theta / 2));
  return m;
}

Mat hadamard() {
  Mat m(2, 2);
  const double s = 1.0 / std::sqrt(2.0);
  m << s, s, s, -s;
  return m;
}

Mat phase_s() {
  Mat m = Mat::Zero(2, 2);
  m(0, 0) = 1.0;
  m(1, 1) = kI;
  return m;
}

std::size_t ceil_log2(std::size_t v) {
  std::size_t b = 0;
  while ((std::size_t{1} << b) < v) ++b;
  return b;
}

}  // namespace

void CircuitPlan::validate(double tol) const {
  for (std::size_t g = 0; g < gates.size(); ++g) {
    const Gate& gate = gates[g];
    const auto dim = static_cast<Eigen::Index>(std::size_t{1} << gate.support.size());
    if (gate.support.empty() || gate.unitary.rows() != dim || gate.unitary.cols() != dim)
      throw InvalidArgument("gate " + std::to_string(g) + ": matrix does not match its support");
    for (std::size_t q : gate.support)
      if (q >= n_qubits) throw InvalidArgument("gate " + std::to_string(g) + ": qubit out of range");
    auto sorted = gate.support;
    std::sort(sorted.begin(), sorted.end());
    if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
      throw InvalidArgument("gate " + std::to_string(g) + ": repeated qubit");
    if (!is_unitary(gate.unitary, tol))
      throw InvalidArgument("gate " + std::to_string(g) + ": matrix is not unitary");
  }
}

Mat complete_isometry(const Mat& iso, double tol) {
  const Eigen::Index rows = iso.rows();
  const Eigen::Index cols = iso.cols();
  if (cols > rows || rows == 0) throw InvalidArgument("complete_isometry: too many columns");
  const Mat gram = iso.adjoint() * iso;
  if ((gram - Mat::Identity(cols, cols)).cwiseAbs().maxCoeff() > tol)
    throw InvalidArgument("complete_isometry: columns are not orthonormal");
  Mat u = Mat::Zero(rows, rows);
  u.leftCols(cols) = iso;
  Eigen::Index filled = cols;
  for (Eigen::Index e = 0; e < rows && filled < rows; ++e) {
    Vec v = Vec::Zero(rows);
    v(e) = 1.0;
    // Two Gram-Schmidt passes keep the completion orthonormal to rounding.
    for (int pass = 0; pass < 2; ++pass) v -= u.leftCols(filled) * (u.leftCols(filled).adjoint() * v);
    const double nv = v.norm();
    if (nv < 1e-8) continue;
    u.col(filled++) = v / nv;
  }
  if (filled != rows) throw NumericFailure("complete_isometry: completion failed");
  return u;
}

CircuitPlan mps_to_staircase(const Mps& mps) {
  const std::size_t n = mps.size();
  if (n == 0) throw InvalidArgument("mps_to_staircase: empty state");
  if (right_canonical_defect(mps) > 1e-10)
    throw InvalidState("mps_to_staircase: state is not right-canonical (canonicalize first)");
  CircuitPlan plan;
  plan.n_qubits = n;
  std::size_t in_bits = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t chi_l = mps.left_dim(i);
    const std::size_t chi_r = mps.right_dim(i);
    const std::size_t out_bits = ceil_log2(chi_r);
    const std::size_t width = out_bits + 1;
    if (i + width > n) throw InvalidState("mps_to_staircase: bond dimension too large for the chain");
    const auto dim = static_cast<Eigen::Index>(std::size_t{1} << width);
    const Mat& t = mps.tensor(i);
    Mat iso = Mat::Zero(dim, static_cast<Eigen::Index>(chi_l));
    for (std::size_t a = 0; a < chi_l; ++a)
      for (std::size_t s = 0; s < 2; ++s)
        for (std::size_t b = 0; b < chi_r; ++b)
          iso(static_cast<Eigen::Index>((s << out_bits) + b), static_cast<Eigen::Index>(a)) =
              t(static_cast<Eigen::Index>(2 * a + s), static_cast<Eigen::Index>(b));
    const Mat full = complete_isometry(iso, 1e-9);
    // The incoming bond sits on the top in_bits qubits; the rest start in |0>.
    const std::size_t shift = width - in_bits;
    std::vector<Eigen::Index> order(static_cast<std::size_t>(dim), -1);
    std::vector<bool> used(static_cast<std::size_t>(dim), false);
    for (std::size_t a = 0; a < chi_l; ++a) {
      order[a << shift] = static_cast<Eigen::Index>(a);
      used[a << shift] = true;
    }
    Eigen::Index next = static_cast<Eigen::Index>(chi_l);
    for (std::size_t c = 0; c < order.size(); ++c)
      if (!used[c]) order[c] = next++;
    Gate g;
    g.unitary.resize(dim, dim);
    for (Eigen::Index c = 0; c < dim; ++c) g.unitary.col(c) = full.col(order[static_cast<std::size_t>(c)]);
    for (std::size_t q = 0; q < width; ++q) g.support.push_back(i + q);
    g.label = "U" + std::to_string(i);
    plan.gates.push_back(std::move(g));
    in_bits = out_bits;
  }
  return plan;
}

CircuitPlan pauli_exponential_template(const PauliTerm& term, double angle, std::size_t n_qubits,
                                       std::optional<PointerControl> pointer) {
  const auto ops = term.string.ops();
  if (ops.empty()) throw InvalidArgument("pauli_exponential_template: identity term");
  if (static_cast<std::size_t>(term.string.max_qubit()) >= n_qubits)
    throw InvalidArgument("pauli_exponential_template: term exceeds qubit count");
  if (pointer) {
    if (pointer->qubit >= n_qubits) throw InvalidArgument("pauli_exponential_template: pointer qubit out of range");
    if (pointer->j == 0) throw InvalidArgument("pauli_exponential_template: pointer index j starts at 1");
    if (term.string.op(pointer->qubit) != Pauli::I)
      throw InvalidArgument("pauli_exponential_template: pointer qubit overlaps the term");
  }
  CircuitPlan plan;
  plan.n_qubits = n_qubits;
  const Mat h = hadamard();
  const Mat sdg = phase_s().adjoint();
  // V maps Z to the local Pauli; V^dagger is applied first.
  for (const auto& [q, p] : ops) {
    if (p == Pauli::X) plan.gates.push_back({h, {q}, "H"});
    if (p == Pauli::Y) plan.gates.push_back({h * sdg, {q}, "HSdg"});
  }
  for (std::size_t k = 0; k + 1 < ops.size(); ++k)
    plan.gates.push_back({cnot(), {ops[k].first, ops[k + 1].first}, "CNOT"});
  const std::size_t last = ops.back().first;
  if (pointer) {
    const double reduced = std::ldexp(angle, -static_cast<int>(pointer->j) - 1);
    plan.gates.push_back({controlled_rz(reduced), {pointer->qubit, last}, "CRz"});
  } else {
    plan.gates.push_back({rz(angle), {last}, "Rz"});
  }
  for (std::size_t k = ops.size() - 1; k-- > 0;)
    plan.gates.push_back({cnot(), {ops[k].first, ops[k + 1].first}, "CNOT"});
  for (const auto& [q, p] : ops) {
    if (p == Pauli::X) plan.gates.push_back({h, {q}, "H"});
    if (p == Pauli::Y) plan.gates.push_back({phase_s() * h, {q}, "SH"});
  }
  return plan;
}

ResourceEstimate trotter_resources(const PauliSum& h, std::size_t n_steps,
                                   std::optional<std::size_t> pointer_r, bool use_conjugation) {
  if (pointer_r && *pointer_r == 0) throw InvalidArgument("trotter_resources: pointer_r must be positive");
  ResourceEstimate est;
  est.trotter_steps = n_steps;
  est.pointer_r = pointer_r;
  est.use_conjugation = use_conjugation;
  std::size_t cnot = 0, single = 0, crz = 0;
  for (const auto& t : h.terms()) {
    if (t.string.is_identity()) continue;
    TermResources tr;
    tr.term = t.string.to_string();
    tr.locality = t.string.locality();
    std::size_t basis = 0;
    for (const auto& [q, p] : t.string.ops())
      if (p != Pauli::Z) basis += 2;
    const std::size_t ladder = 2 * (tr.locality - 1);
    if (!pointer_r) {
      tr.cnot = ladder;
      tr.single_qubit = basis + 1;
    } else if (use_conjugation) {
      tr.cnot = ladder;
      tr.single_qubit = basis;
      tr.controlled_rz = *pointer_r;
    } else {
      tr.cnot = *pointer_r * ladder;
      tr.single_qubit = *pointer_r * basis;
      tr.controlled_rz = *pointer_r;
    }
    cnot += tr.cnot;
    single += tr.single_qubit;
    crz += tr.controlled_rz;
    est.per_term.push_back(std::move(tr));
  }
  est.term_count = est.per_term.size();
  est.cnot_count = cnot * n_steps;
  est.single_qubit_count_max = single * n_steps;
  est.controlled_rz_count = crz * n_steps;
  return est;
}

std::string to_json(const CircuitPlan& plan) {
  nlohmann::json j;
  j["n_qubits"] = plan.n_qubits;
  j["gates"] = nlohmann::json::array();
  for (const auto& g : plan.gates) {
    nlohmann::json jg;
    jg["label"] = g.label;
    jg["support"] = g.support;
    std::vector<double> re, im;
    for (Eigen::Index r = 0; r < g.unitary.rows(); ++r)
      for (Eigen::Index c = 0; c < g.unitary.cols(); ++c) {
        re.push_back(g.unitary(r, c).real());
        im.push_back(g.unitary(r, c).imag());
      }
    jg["real"] = re;
    jg["imag"] = im;
    j["gates"].push_back(std::move(jg));
  }
  return j.dump(2);
}

std::string to_json(const ResourceEstimate& r) {
  nlohmann::json j;
  j["cnot_count"] = r.cnot_count;
  j["single_qubit_count_max"] = r.single_qubit_count_max;
  j["controlled_rz_count"] = r.controlled_rz_count;
  j["term_count"] = r.term_count;
  j["trotter_steps"] = r.trotter_steps;
  j["pointer_r"] = r.pointer_r ? nlohmann::json(*r.pointer_r) : nlohmann::json(nullptr);
  j["use_conjugation"] = r.use_conjugation;
  j["per_term"] = nlohmann::json::array();
  for (const auto& t : r.per_term)
    j["per_term"].push_back({{"term", t.term},
                             {"locality", t.locality},
                             {"cnot", t.cnot},
                             {"single_qubit", t.single_qubit},
                             {"controlled_rz", t.controlled_rz}});
  return j.dump(2);
}

void write_resources_csv(std::ostream& os, const std::string& label, const ResourceEstimate& r) {
  os << "label,cnot_count,term_count\n" << label << ',' << r.cnot_count << ',' << r.term_count << '\n';
}

}  // namespace vnps
