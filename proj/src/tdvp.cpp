#include "vnps/tdvp.hpp"

#include <algorithm>
#include <cmath>

#include "json.hpp"
#include "sweep.hpp"
#include "vnps/error.hpp"
#include "vnps/krylov.hpp"

namespace vnps {

void TdvpConfig::validate() const {
  policy.validate();
  if (dt == 0.0 || !std::isfinite(dt)) throw InvalidArgument("dt must be finite and nonzero");
  if (!(krylov_tol > 0.0)) throw InvalidArgument("krylov_tol must be positive");
  if (krylov_max_dim < 2) throw InvalidArgument("krylov_max_dim must be at least 2");
  if (startup_halvings > 60) throw InvalidArgument("startup_halvings must be at most 60");
}

namespace {

constexpr int kMaxHalvings = 8;

// exp(-i tau A) v, halving the step while the Krylov estimate misses tol.
Vec evolve_local(const LinearMap& apply, const Vec& v, double tau, const TdvpConfig& cfg,
                 TdvpDiagnostics& diag, int depth = 0) {
  ExpResult r = local_krylov_exp(apply, v, tau, cfg.krylov_tol, cfg.krylov_max_dim);
  if (r.converged || depth >= kMaxHalvings) {
    diag.worst_krylov_error = std::max(diag.worst_krylov_error, r.error_estimate);
    return r.vector;
  }
  ++diag.krylov_substeps;
  const Vec half = evolve_local(apply, v, tau / 2, cfg, diag, depth + 1);
  return evolve_local(apply, half, tau / 2, cfg, diag, depth + 1);
}

Mat local_matrix(const Mpo& h) {
  const auto& w = h.tensor(0);
  Mat m(2, 2);
  for (std::size_t o = 0; o < 2; ++o)
    for (std::size_t i = 0; i < 2; ++i)
      m(static_cast<Eigen::Index>(o), static_cast<Eigen::Index>(i)) = w.at(0, o, i, 0);
  return m;
}

}  // namespace

TdvpResult tdvp_evolve(const Mpo& h, const Mps& psi, const TdvpConfig& cfg) {
  cfg.validate();
  if (!h.hermitian()) throw InvalidArgument("tdvp_evolve: operator is not Hermitian");
  if (h.size() != psi.size()) throw InvalidArgument("tdvp_evolve: lengths differ");
  if (std::abs(norm(psi) - 1.0) > 1e-8) throw InvalidArgument("tdvp_evolve: state must be normalized");

  TdvpResult out;
  auto& diag = out.diagnostics;
  const std::size_t n = psi.size();

  if (n == 1) {
    const Mat m = local_matrix(h);
    Vec v = psi.tensor(0).col(0);
    const LinearMap apply = [&](const Vec& x) { return Vec(m * x); };
    for (std::size_t s = 0; s < cfg.n_steps; ++s) {
      v = evolve_local(apply, v, cfg.dt, cfg, diag);
      const double nv = v.norm();
      v /= nv;
      diag.steps.push_back({s + 1, cfg.dt * static_cast<double>(s + 1), nv,
                            v.dot(m * v).real(), 1, 0.0});
    }
    Mat t(2, 1);
    t.col(0) = v;
    out.state = Mps({t});
    diag.final_bond_dims = out.state.bond_dims();
    return out;
  }

  detail::SweepChain chain(h, psi);

  // One symmetric sweep pair of length delta; returns the largest truncation.
  auto sweep = [&](double delta) {
    const double tau = delta / 2;
    double trunc = 0.0;
    // Left to right: forward two-site, backward one-site.
    for (std::size_t i = 0; i + 1 < n; ++i) {
      const LinearMap two = [&](const Vec& v) { return chain.apply_two(i, v); };
      const Vec theta = evolve_local(two, chain.two_site(i), tau, cfg, diag);
      trunc = std::max(trunc, chain.split(i, theta, true, cfg.policy).truncation_error);
      if (i + 2 < n) {
        const std::size_t j = i + 1;
        const Mat& a = chain.site(j);
        const Vec site = Eigen::Map<const Vec>(a.data(), a.size());
        const LinearMap one = [&](const Vec& v) { return chain.apply_one(j, v); };
        chain.set_site(j, evolve_local(one, site, -tau, cfg, diag));
      }
    }
    // Right to left.
    for (std::size_t i = n - 1; i-- > 0;) {
      const LinearMap two = [&](const Vec& v) { return chain.apply_two(i, v); };
      const Vec theta = evolve_local(two, chain.two_site(i), tau, cfg, diag);
      trunc = std::max(trunc, chain.split(i, theta, false, cfg.policy).truncation_error);
      if (i > 0) {
        const Mat& a = chain.site(i);
        const Vec site = Eigen::Map<const Vec>(a.data(), a.size());
        const LinearMap one = [&](const Vec& v) { return chain.apply_one(i, v); };
        chain.set_site(i, evolve_local(one, site, -tau, cfg, diag));
      }
    }
    return trunc;
  };

  for (std::size_t step = 0; step < cfg.n_steps; ++step) {
    double trunc = 0.0;
    if (step == 0 && cfg.startup_halvings > 0) {
      // Once every bond is as large as it can get the manifold stops growing,
      // and the rest of the step is taken at once.
      const auto saturated = [&] {
        for (std::size_t i = 0; i + 1 < n; ++i) {
          const std::size_t left = std::min<std::size_t>(i + 1, 62);
          const std::size_t right = std::min<std::size_t>(n - i - 1, 62);
          const std::size_t full = std::size_t{1} << std::min(left, right);
          if (chain.right_dim(i) < std::min(full, cfg.policy.chi_max)) return false;
        }
        return true;
      };
      const int k = static_cast<int>(cfg.startup_halvings);
      double done = std::ldexp(cfg.dt, -k);
      trunc = sweep(done);
      for (int e = k; e >= 1; --e) {
        if (saturated()) {
          trunc = std::max(trunc, sweep(cfg.dt - done));
          break;
        }
        trunc = std::max(trunc, sweep(std::ldexp(cfg.dt, -e)));
        done += std::ldexp(cfg.dt, -e);
      }
    } else {
      trunc = sweep(cfg.dt);
    }
    TdvpStep rec;
    rec.step = step + 1;
    rec.time = cfg.dt * static_cast<double>(step + 1);
    rec.truncation_error = trunc;
    const Mps current = chain.state();
    rec.norm = norm(current);
    rec.max_bond = current.max_bond();
    if (cfg.track_energy) rec.energy = expectation(current, h).real() / (rec.norm * rec.norm);
    diag.steps.push_back(rec);
  }
  out.state = chain.state();
  const double nn = norm(out.state);
  out.state = scaled(out.state, 1.0 / nn);
  diag.final_bond_dims = out.state.bond_dims();
  return out;
}

std::string to_json(const TdvpDiagnostics& d) {
  nlohmann::json j;
  j["krylov_substeps"] = d.krylov_substeps;
  j["worst_krylov_error"] = d.worst_krylov_error;
  j["final_bond_dims"] = d.final_bond_dims;
  auto& steps = j["steps"] = nlohmann::json::array();
  for (const auto& s : d.steps)
    steps.push_back({{"step", s.step},
                     {"time", s.time},
                     {"norm", s.norm},
                     {"energy", s.energy},
                     {"max_bond", s.max_bond},
                     {"truncation_error", s.truncation_error}});
  return j.dump(2);
}

}  // namespace vnps
