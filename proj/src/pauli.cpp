#include "vnps/pauli.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <iomanip>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>

#include "vnps/error.hpp"

namespace vnps {

char pauli_char(Pauli p) {
  switch (p) {
    case Pauli::X:
      return 'X';
    case Pauli::Y:
      return 'Y';
    case Pauli::Z:
      return 'Z';
    default:
      return 'I';
  }
}

Pauli PauliString::op(std::size_t qubit) const {
  const bool bx = (x >> qubit) & 1U;
  const bool bz = (z >> qubit) & 1U;
  if (bx && bz) return Pauli::Y;
  if (bx) return Pauli::X;
  if (bz) return Pauli::Z;
  return Pauli::I;
}

void PauliString::set(std::size_t qubit, Pauli p) {
  if (qubit >= kMaxQubits) throw InvalidArgument("qubit index exceeds 64");
  const std::uint64_t bit = std::uint64_t{1} << qubit;
  x &= ~bit;
  z &= ~bit;
  if (p == Pauli::X || p == Pauli::Y) x |= bit;
  if (p == Pauli::Z || p == Pauli::Y) z |= bit;
}

std::size_t PauliString::locality() const { return std::popcount(x | z); }

int PauliString::max_qubit() const {
  const std::uint64_t m = x | z;
  if (m == 0) return -1;
  return 63 - std::countl_zero(m);
}

std::vector<std::pair<std::size_t, Pauli>> PauliString::ops() const {
  std::vector<std::pair<std::size_t, Pauli>> out;
  std::uint64_t m = x | z;
  while (m != 0) {
    const auto q = static_cast<std::size_t>(std::countr_zero(m));
    out.emplace_back(q, op(q));
    m &= m - 1;
  }
  return out;
}

std::string PauliString::to_string() const {
  if (is_identity()) return "I";
  std::string s;
  for (const auto& [q, p] : ops()) {
    if (!s.empty()) s += ' ';
    s += pauli_char(p);
    s += std::to_string(q);
  }
  return s;
}

bool lex_less(const PauliString& a, const PauliString& b) {
  const auto oa = a.ops();
  const auto ob = b.ops();
  return std::lexicographical_compare(
      oa.begin(), oa.end(), ob.begin(), ob.end(), [](const auto& l, const auto& r) {
        if (l.first != r.first) return l.first < r.first;
        return static_cast<int>(l.second) < static_cast<int>(r.second);
      });
}

std::pair<cplx, PauliString> multiply(const PauliString& a, const PauliString& b) {
  // P = i^{|x&z|} X^x Z^z, and Z^z1 X^x2 = (-1)^{|z1&x2|} X^x2 Z^z1.
  PauliString c{a.x ^ b.x, a.z ^ b.z};
  int power = std::popcount(a.x & a.z) + std::popcount(b.x & b.z) - std::popcount(c.x & c.z) +
              2 * std::popcount(a.z & b.x);
  power = ((power % 4) + 4) % 4;
  static constexpr cplx kPowers[4] = {{1, 0}, {0, 1}, {-1, 0}, {0, -1}};
  return {kPowers[power], c};
}

PauliSum::PauliSum(std::size_t n_qubits) : n_qubits_(n_qubits) {
  if (n_qubits > PauliString::kMaxQubits) throw InvalidArgument("at most 64 qubits supported");
}

PauliSum::PauliSum(std::size_t n_qubits, std::vector<PauliTerm> terms) : PauliSum(n_qubits) {
  for (const auto& t : terms) add(t);
}

void PauliSum::add(cplx coefficient, const PauliString& s) {
  if (s.max_qubit() >= static_cast<int>(n_qubits_)) {
    throw InvalidArgument("Pauli term acts on qubit " + std::to_string(s.max_qubit()) +
                          " outside a " + std::to_string(n_qubits_) + "-qubit sum");
  }
  terms_.push_back({coefficient, s});
}

bool PauliSum::is_hermitian(double tol) const {
  return std::all_of(terms_.begin(), terms_.end(),
                     [tol](const PauliTerm& t) { return std::abs(t.coefficient.imag()) <= tol; });
}

cplx PauliSum::identity_coefficient() const {
  cplx c{0.0, 0.0};
  for (const auto& t : terms_)
    if (t.string.is_identity()) c += t.coefficient;
  return c;
}

PauliSum& PauliSum::operator+=(const PauliSum& other) {
  n_qubits_ = std::max(n_qubits_, other.n_qubits_);
  terms_.insert(terms_.end(), other.terms_.begin(), other.terms_.end());
  return *this;
}

PauliSum& PauliSum::operator*=(cplx factor) {
  for (auto& t : terms_) t.coefficient *= factor;
  return *this;
}

PauliSum operator*(const PauliSum& a, const PauliSum& b) {
  PauliSum out(std::max(a.n_qubits_, b.n_qubits_));
  out.terms_.reserve(a.terms_.size() * b.terms_.size());
  for (const auto& ta : a.terms_) {
    for (const auto& tb : b.terms_) {
      const auto [phase, s] = multiply(ta.string, tb.string);
      out.terms_.push_back({phase * ta.coefficient * tb.coefficient, s});
    }
  }
  return out;
}

namespace {

struct MaskLess {
  bool operator()(const PauliString& a, const PauliString& b) const {
    return a.x != b.x ? a.x < b.x : a.z < b.z;
  }
};

}  // namespace

PauliSum simplify(const PauliSum& h, double threshold) {
  std::map<PauliString, cplx, MaskLess> merged;
  for (const auto& t : h.terms()) merged[t.string] += t.coefficient;
  std::vector<PauliTerm> kept;
  kept.reserve(merged.size());
  for (const auto& [s, c] : merged)
    if (std::abs(c) >= threshold) kept.push_back({c, s});
  std::sort(kept.begin(), kept.end(),
            [](const PauliTerm& a, const PauliTerm& b) { return lex_less(a.string, b.string); });
  return PauliSum(h.n_qubits(), std::move(kept));
}

SpectralBounds spectral_bounds(const PauliSum& h) {
  if (!h.is_hermitian()) throw InvalidArgument("spectral_bounds requires a Hermitian Pauli sum");
  const PauliSum s = simplify(h, 0.0);
  double center = 0.0;
  double radius = 0.0;
  for (const auto& t : s.terms()) {
    if (t.string.is_identity())
      center += t.coefficient.real();
    else
      radius += std::abs(t.coefficient.real());
  }
  return {center - radius, center + radius};
}

PauliString parse_pauli_string(const std::string& text) {
  PauliString s;
  std::istringstream in(text);
  std::string tok;
  std::uint64_t seen = 0;
  while (in >> tok) {
    if (tok == "I") continue;
    Pauli p;
    switch (tok[0]) {
      case 'X':
        p = Pauli::X;
        break;
      case 'Y':
        p = Pauli::Y;
        break;
      case 'Z':
        p = Pauli::Z;
        break;
      default:
        throw InvalidArgument("bad Pauli factor '" + tok + "'");
    }
    std::size_t q = 0;
    try {
      std::size_t used = 0;
      q = std::stoul(tok.substr(1), &used);
      if (used != tok.size() - 1) throw std::invalid_argument(tok);
    } catch (const std::exception&) {
      throw InvalidArgument("bad qubit index in '" + tok + "'");
    }
    if (q >= PauliString::kMaxQubits) throw InvalidArgument("qubit index exceeds 64");
    const std::uint64_t bit = std::uint64_t{1} << q;
    if (seen & bit) throw InvalidArgument("qubit " + std::to_string(q) + " appears twice");
    seen |= bit;
    s.set(q, p);
  }
  return s;
}

PauliSum read_pauli_sum(std::istream& in) {
  std::vector<PauliTerm> terms;
  std::size_t declared = 0;
  std::size_t width = 0;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos) continue;
    if (line[first] == '#') {
      std::istringstream hdr(line.substr(first + 1));
      std::string key;
      if (hdr >> key && key == "n_qubits") {
        if (!(hdr >> declared)) throw ParseError(lineno, "bad n_qubits header");
      }
      continue;
    }
    std::istringstream ls(line);
    double re = 0.0;
    double im = 0.0;
    if (!(ls >> re >> im)) throw ParseError(lineno, "expected 'coeff_re coeff_im pauli_string'");
    std::string rest;
    std::getline(ls, rest);
    PauliString s;
    try {
      s = parse_pauli_string(rest);
    } catch (const InvalidArgument& e) {
      throw ParseError(lineno, e.what());
    }
    width = std::max<std::size_t>(width, static_cast<std::size_t>(s.max_qubit() + 1));
    terms.push_back({{re, im}, s});
  }
  if (declared != 0 && width > declared)
    throw ParseError(lineno, "term exceeds declared n_qubits");
  return PauliSum(declared != 0 ? declared : width, std::move(terms));
}

void write_pauli_sum(std::ostream& out, const PauliSum& h) {
  out << "# n_qubits " << h.n_qubits() << '\n';
  std::ostringstream line;
  line << std::setprecision(17);
  for (const auto& t : h.terms()) {
    line.str("");
    line << t.coefficient.real() << ' ' << t.coefficient.imag() << ' ' << t.string.to_string()
         << '\n';
    out << line.str();
  }
}

}  // namespace vnps
