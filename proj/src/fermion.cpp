#include "vnps/fermion.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <istream>
#include <map>
#include <sstream>
#include <string>

#include "vnps/error.hpp"

namespace vnps {

FermionIntegrals::FermionIntegrals(std::size_t n, std::size_t n_elec)
    : n_orbitals(n),
      n_electrons(n_elec),
      one_body(Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n))),
      two_body(n * n * n * n, 0.0) {}

void FermionIntegrals::set_eri_symmetric(std::size_t p, std::size_t q, std::size_t r,
                                         std::size_t s, double v) {
  eri(p, q, r, s) = v;
  eri(q, p, r, s) = v;
  eri(p, q, s, r) = v;
  eri(q, p, s, r) = v;
  eri(r, s, p, q) = v;
  eri(s, r, p, q) = v;
  eri(r, s, q, p) = v;
  eri(s, r, q, p) = v;
}

void FermionIntegrals::validate(double tol) const {
  const auto n = static_cast<Eigen::Index>(n_orbitals);
  if (one_body.rows() != n || one_body.cols() != n)
    throw InvalidArgument("one-body matrix has wrong shape");
  if (two_body.size() != n_orbitals * n_orbitals * n_orbitals * n_orbitals)
    throw InvalidArgument("two-body array has wrong size");
  if ((one_body - one_body.transpose()).cwiseAbs().maxCoeff() > tol)
    throw InvalidArgument("one-body integrals are not symmetric");
  const std::size_t m = n_orbitals;
  for (std::size_t p = 0; p < m; ++p)
    for (std::size_t q = 0; q < m; ++q)
      for (std::size_t r = 0; r < m; ++r)
        for (std::size_t s = 0; s < m; ++s) {
          const double v = eri(p, q, r, s);
          if (std::abs(v - eri(q, p, r, s)) > tol || std::abs(v - eri(p, q, s, r)) > tol ||
              std::abs(v - eri(r, s, p, q)) > tol)
            throw InvalidArgument("two-body integrals break 8-fold symmetry");
        }
}

namespace {

std::string upper(std::string s) {
  for (auto& c : s) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
  return s;
}

// Splits "NORB=  8,NELEC= 8,MS2=0," into key -> list of value tokens.
void parse_namelist(const std::string& text, std::size_t lineno,
                    std::map<std::string, std::vector<std::string>>& out) {
  std::string key;
  std::string token;
  auto flush = [&] {
    if (token.empty()) return;
    if (key.empty()) throw ParseError(lineno, "value '" + token + "' without a key in header");
    out[key].push_back(token);
    token.clear();
  };
  for (std::size_t i = 0; i < text.size(); ++i) {
    const char c = text[i];
    if (c == '=') {
      key = upper(token);
      token.clear();
      if (key.empty()) throw ParseError(lineno, "empty key in header");
      out[key];
    } else if (c == ',' || std::isspace(static_cast<unsigned char>(c))) {
      flush();
    } else {
      token += c;
    }
  }
  flush();
}

double parse_real(std::string tok, std::size_t lineno) {
  std::replace(tok.begin(), tok.end(), 'D', 'E');
  std::replace(tok.begin(), tok.end(), 'd', 'e');
  try {
    std::size_t used = 0;
    const double v = std::stod(tok, &used);
    if (used != tok.size()) throw std::invalid_argument(tok);
    return v;
  } catch (const std::exception&) {
    throw ParseError(lineno, "non-numeric value '" + tok + "'");
  }
}

long parse_index(const std::string& tok, std::size_t lineno) {
  try {
    std::size_t used = 0;
    const long v = std::stol(tok, &used);
    if (used != tok.size()) throw std::invalid_argument(tok);
    return v;
  } catch (const std::exception&) {
    throw ParseError(lineno, "non-integer index '" + tok + "'");
  }
}

}  // namespace

FermionIntegrals parse_fcidump(std::istream& in) {
  std::string line;
  std::size_t lineno = 0;
  std::string header;
  bool in_header = false;
  bool header_done = false;
  while (!header_done && std::getline(in, line)) {
    ++lineno;
    std::string u = upper(line);
    if (!in_header) {
      const auto pos = u.find("&FCI");
      if (pos == std::string::npos) {
        if (u.find_first_not_of(" \t\r") == std::string::npos) continue;
        throw ParseError(lineno, "expected '&FCI' namelist header");
      }
      in_header = true;
      u = u.substr(pos + 4);
      line = line.substr(pos + 4);
    }
    auto end = u.find("&END");
    if (end == std::string::npos) end = u.find('/');
    if (end != std::string::npos) {
      header += ' ' + line.substr(0, end);
      header_done = true;
    } else {
      header += ' ' + line;
    }
  }
  if (!header_done) throw ParseError(lineno, "unterminated or missing FCIDUMP header");

  std::map<std::string, std::vector<std::string>> keys;
  parse_namelist(header, lineno, keys);
  auto scalar = [&](const std::string& k, bool required, long fallback) -> long {
    const auto it = keys.find(k);
    if (it == keys.end() || it->second.empty()) {
      if (required) throw ParseError(lineno, "header is missing " + k);
      return fallback;
    }
    return parse_index(it->second.front(), lineno);
  };
  const long norb = scalar("NORB", true, 0);
  const long nelec = scalar("NELEC", true, 0);
  if (norb <= 0) throw ParseError(lineno, "NORB must be positive");
  if (nelec < 0 || nelec > 2 * norb) throw ParseError(lineno, "NELEC out of range");

  FermionIntegrals out(static_cast<std::size_t>(norb), static_cast<std::size_t>(nelec));
  out.ms2 = static_cast<int>(scalar("MS2", false, 0));

  while (std::getline(in, line)) {
    ++lineno;
    std::istringstream ls(line);
    std::string tok[5];
    std::size_t count = 0;
    while (count < 5 && ls >> tok[count]) ++count;
    if (count == 0) continue;
    std::string extra;
    if (count != 5 || (ls >> extra)) throw ParseError(lineno, "expected 'value i j k l'");
    const double v = parse_real(tok[0], lineno);
    long idx[4];
    for (int a = 0; a < 4; ++a) {
      idx[a] = parse_index(tok[a + 1], lineno);
      if (idx[a] < 0 || idx[a] > norb) throw ParseError(lineno, "orbital index out of range");
    }
    const auto [i, j, k, l] = idx;
    if (i == 0 && j == 0 && k == 0 && l == 0) {
      out.constant = v;
    } else if (i > 0 && j > 0 && k > 0 && l > 0) {
      out.set_eri_symmetric(i - 1, j - 1, k - 1, l - 1, v);
    } else if (i > 0 && j > 0 && k == 0 && l == 0) {
      out.one_body(i - 1, j - 1) = v;
      out.one_body(j - 1, i - 1) = v;
    } else if (i > 0 && j == 0 && k == 0 && l == 0) {
      // orbital energy record; not part of the Hamiltonian
    } else {
      throw ParseError(lineno, "unrecognised index pattern");
    }
  }
  return out;
}

FermionIntegrals freeze_core(const FermionIntegrals& in, std::size_t n_frozen,
                             std::size_t n_active) {
  if (n_frozen + n_active > in.n_orbitals)
    throw InvalidArgument("frozen + active window exceeds the orbital count");
  if (2 * n_frozen > in.n_electrons)
    throw InvalidArgument("not enough electrons to doubly occupy the frozen orbitals");
  if (n_frozen == 0 && n_active == in.n_orbitals) return in;

  FermionIntegrals out(n_active, in.n_electrons - 2 * n_frozen);
  out.ms2 = in.ms2;
  double e = in.constant;
  for (std::size_t i = 0; i < n_frozen; ++i) {
    e += 2.0 * in.one_body(i, i);
    for (std::size_t j = 0; j < n_frozen; ++j) e += 2.0 * in.eri(i, i, j, j) - in.eri(i, j, j, i);
  }
  out.constant = e;
  for (std::size_t k = 0; k < n_active; ++k) {
    for (std::size_t l = 0; l < n_active; ++l) {
      const std::size_t K = k + n_frozen;
      const std::size_t L = l + n_frozen;
      double h = in.one_body(K, L);
      for (std::size_t i = 0; i < n_frozen; ++i) h += 2.0 * in.eri(K, L, i, i) - in.eri(K, i, i, L);
      out.one_body(k, l) = h;
      for (std::size_t m = 0; m < n_active; ++m)
        for (std::size_t n = 0; n < n_active; ++n)
          out.eri(k, l, m, n) = in.eri(K, L, m + n_frozen, n + n_frozen);
    }
  }
  return out;
}

PauliSum jw_annihilation(std::size_t mode, std::size_t n_modes) {
  // a_j = Z_0 ... Z_{j-1} (X_j + i Y_j) / 2
  if (mode >= n_modes) throw InvalidArgument("mode index out of range");
  PauliString zs;
  for (std::size_t q = 0; q < mode; ++q) zs.set(q, Pauli::Z);
  PauliString xs = zs;
  xs.set(mode, Pauli::X);
  PauliString ys = zs;
  ys.set(mode, Pauli::Y);
  PauliSum out(n_modes);
  out.add(0.5, xs);
  out.add(0.5 * kI, ys);
  return out;
}

PauliSum jw_creation(std::size_t mode, std::size_t n_modes) {
  PauliSum out = jw_annihilation(mode, n_modes);
  std::vector<PauliTerm> terms = out.terms();
  for (auto& t : terms) t.coefficient = std::conj(t.coefficient);
  return PauliSum(n_modes, std::move(terms));
}

PauliSum jordan_wigner(const FermionIntegrals& ints) {
  ints.validate();
  const std::size_t n = ints.n_orbitals;
  const std::size_t modes = 2 * n;
  if (modes > PauliString::kMaxQubits) throw InvalidArgument("too many spin orbitals");

  std::vector<PauliSum> create;
  std::vector<PauliSum> annihilate;
  for (std::size_t m = 0; m < modes; ++m) {
    create.push_back(jw_creation(m, modes));
    annihilate.push_back(jw_annihilation(m, modes));
  }

  PauliSum h(modes);
  h.add(ints.constant, PauliString{});
  for (std::size_t p = 0; p < n; ++p)
    for (std::size_t q = 0; q < n; ++q) {
      const double v = ints.one_body(p, q);
      if (std::abs(v) < kPruneThreshold) continue;
      for (std::size_t s = 0; s < 2; ++s) h += v * (create[2 * p + s] * annihilate[2 * q + s]);
    }

  // Merge periodically so the raw term list stays small.
  h = simplify(h, 0.0);
  for (std::size_t p = 0; p < n; ++p) {
    for (std::size_t q = 0; q < n; ++q) {
      for (std::size_t r = 0; r < n; ++r) {
        for (std::size_t s = 0; s < n; ++s) {
          const double v = 0.5 * ints.eri(p, q, r, s);
          if (std::abs(v) < kPruneThreshold) continue;
          for (std::size_t a = 0; a < 2; ++a) {
            for (std::size_t b = 0; b < 2; ++b) {
              const std::size_t P = 2 * p + a;
              const std::size_t Q = 2 * q + a;
              const std::size_t R = 2 * r + b;
              const std::size_t S = 2 * s + b;
              if (P == R || Q == S) continue;
              h += v * (create[P] * create[R] * annihilate[S] * annihilate[Q]);
            }
          }
        }
      }
      h = simplify(h, 0.0);
    }
  }

  PauliSum merged = simplify(h);
  std::vector<PauliTerm> real_terms;
  real_terms.reserve(merged.size());
  for (const auto& t : merged.terms()) {
    if (std::abs(t.coefficient.imag()) > 1e-10)
      throw NumericFailure("Jordan-Wigner image is not Hermitian: " + t.string.to_string());
    if (std::abs(t.coefficient.real()) >= kPruneThreshold)
      real_terms.push_back({t.coefficient.real(), t.string});
  }
  return PauliSum(modes, std::move(real_terms));
}

PauliSum number_penalty(std::size_t n_modes, std::size_t n_particles) {
  if (n_modes == 0 || n_modes > PauliString::kMaxQubits) throw InvalidArgument("number_penalty: bad mode count");
  if (n_particles > n_modes) throw InvalidArgument("number_penalty: more particles than modes");
  // N - n = c - sum_i Z_i / 2 with c = n_modes / 2 - n.
  const double c = static_cast<double>(n_modes) / 2.0 - static_cast<double>(n_particles);
  PauliSum out(n_modes);
  out.add(c * c + static_cast<double>(n_modes) / 4.0, PauliString{});
  for (std::size_t i = 0; i < n_modes; ++i) {
    PauliString z;
    z.set(i, Pauli::Z);
    out.add(-c, z);
    for (std::size_t j = i + 1; j < n_modes; ++j) {
      PauliString zz = z;
      zz.set(j, Pauli::Z);
      out.add(0.5, zz);
    }
  }
  return simplify(out);
}

}  // namespace vnps
