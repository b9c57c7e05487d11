#include "vnps/protocol.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <iomanip>
#include <numbers>
#include <thread>

#include "json.hpp"
#include "vnps/error.hpp"
#include "vnps/mpo.hpp"

namespace vnps {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

double window_bins(std::size_t r, double margin) {
  return std::ldexp(1.0, static_cast<int>(r)) * (1.0 - margin);
}

}  // namespace

void PointerConfig::validate(double lo, double up) const {
  if (r == 0) throw InvalidArgument("pointer needs r >= 1");
  if (r > kDefaultRdmMaxSites) throw ResourceLimit("pointer register larger than the readout limit");
  if (!(scale > 0.0) || !std::isfinite(scale)) throw InvalidArgument("scale must be positive");
  if (!(t > 0.0) || !std::isfinite(t)) throw InvalidArgument("t must be positive");
  if (!(margin >= 0.0 && margin < 1.0)) throw InvalidArgument("margin must lie in [0, 1)");
  if (!std::isfinite(shift)) throw InvalidArgument("shift must be finite");
  if (!(mpo_cutoff >= 0.0 && mpo_cutoff < 1e-3)) throw InvalidArgument("mpo_cutoff must lie in [0, 1e-3)");
  const double used = scale * (up - lo) * t / kTwoPi;
  const double lo_bin = scale * (lo - shift) * t / kTwoPi;
  const double limit = window_bins(r, margin);
  const double slack = 1e-9 * std::max(1.0, limit);
  if (used > limit + slack || lo_bin < -slack || lo_bin + used > limit + slack)
    throw InvalidArgument("spectrum does not fit the pointer window: uses " + std::to_string(lo_bin + used) +
                          " of " + std::to_string(limit) + " bins");
}

double PointerConfig::bin_width() const { return kTwoPi / (scale * t); }

PointerConfig choose_window(const PauliSum& h, std::size_t r, double margin) {
  if (r == 0) throw InvalidArgument("pointer needs r >= 1");
  if (!(margin >= 0.0 && margin < 1.0)) throw InvalidArgument("margin must lie in [0, 1)");
  const auto b = spectral_bounds(h);
  double width = b.upper - b.lower;
  if (!(width > 1e-12 * std::max(1.0, std::abs(b.lower)))) width = 1.0;
  PointerConfig cfg;
  cfg.r = r;
  cfg.margin = margin;
  cfg.scale = 1.0;
  cfg.shift = b.lower;
  cfg.t = kTwoPi * window_bins(r, margin) / width;
  return cfg;
}

std::vector<double> theoretical_distribution(double E_mapped, double t, std::size_t r) {
  if (r == 0 || r > 30) throw InvalidArgument("theoretical_distribution: r out of range");
  const std::size_t big = std::size_t{1} << r;
  const double nb = static_cast<double>(big);
  const double centre = E_mapped * t / kTwoPi;
  std::vector<double> p(big);
  for (std::size_t x = 0; x < big; ++x) {
    const double theta = static_cast<double>(x) - centre;
    const double wrapped = theta - nb * std::round(theta / nb);
    if (wrapped == 0.0) {
      p[x] = 1.0;
      continue;
    }
    const double den = std::sin(std::numbers::pi * wrapped / nb);
    if (std::abs(den) >= 1e-8) {
      const double num = std::sin(std::numbers::pi * (theta - std::round(theta)));
      p[x] = num * num / (nb * nb * den * den);
    } else {
      cplx f{};
      for (std::size_t z = 0; z < big; ++z)
        f += std::exp(kI * (kTwoPi * static_cast<double>(z) * wrapped / nb));
      p[x] = std::norm(f) / (nb * nb);
    }
  }
  return p;
}

std::vector<double> pointer_readout(const Mat& rho) {
  const Eigen::Index big = rho.rows();
  if (rho.cols() != big || big == 0 || (big & (big - 1)) != 0)
    throw InvalidArgument("pointer_readout: density matrix must be 2^r square");
  Mat f(big, big);
  const double nb = static_cast<double>(big);
  for (Eigen::Index x = 0; x < big; ++x)
    for (Eigen::Index z = 0; z < big; ++z)
      f(x, z) = std::exp(kI * (kTwoPi * static_cast<double>((x * z) % big) / nb)) / std::sqrt(nb);
  const Mat m = f * rho * f.adjoint();
  std::vector<double> p(static_cast<std::size_t>(big));
  for (Eigen::Index x = 0; x < big; ++x) p[static_cast<std::size_t>(x)] = m(x, x).real();
  return p;
}

void estimate_energy(const std::vector<double>& p, const PointerConfig& cfg, ProtocolResult& out) {
  const auto big = static_cast<std::ptrdiff_t>(p.size());
  out.peak_x = static_cast<std::size_t>(std::max_element(p.begin(), p.end()) - p.begin());
  double weight = 0.0;
  double moment = 0.0;
  for (std::ptrdiff_t d = -1; d <= 1; ++d) {
    const std::ptrdiff_t pos = static_cast<std::ptrdiff_t>(out.peak_x) + d;
    const double w = std::max(0.0, p[static_cast<std::size_t>(((pos % big) + big) % big)]);
    weight += w;
    moment += w * static_cast<double>(pos);
  }
  out.refined_x = weight > 0.0 ? moment / weight : static_cast<double>(out.peak_x);
  out.E_estimate = cfg.shift + kTwoPi * out.refined_x / (cfg.scale * cfg.t);
  out.E_uncertainty = cfg.bin_width();
}

ProtocolResult run_protocol(const PauliSum& h, const Mps& init_system, const PointerConfig& cfg,
                            const TdvpConfig& evo) {
  if (init_system.size() != h.n_qubits())
    throw InvalidArgument("run_protocol: state and Hamiltonian sizes differ");
  const auto bounds = spectral_bounds(h);
  cfg.validate(bounds.lower, bounds.upper);
  evo.validate();
  const double n0 = norm(init_system);
  if (std::abs(n0 - 1.0) > 1e-8) throw InvalidArgument("run_protocol: initial state must be normalized");

  PauliSum mapped = h;
  mapped.add(-cfg.shift, PauliString{});
  mapped *= cfg.scale;
  mapped = simplify(mapped);
  if (mapped.empty()) mapped.add(0.0, PauliString{});
  Mpo hm = mpo_from_pauli_sum(mapped);
  if (cfg.mpo_cutoff > 0.0) {
    TruncationPolicy lossless;
    lossless.chi_max = std::numeric_limits<std::size_t>::max();
    lossless.svd_cutoff = cfg.mpo_cutoff;
    hm = mpo_compress(hm, lossless);
  }
  const Mpo k = couple_system_pointer(hm, pointer_momentum_mpo(cfg.r));
  const Mps start = join(init_system, pointer_plus_state(cfg.r));

  TdvpConfig run = evo;
  const double dt = std::abs(evo.dt);
  run.n_steps = static_cast<std::size_t>(std::ceil(cfg.t / dt - 1e-9));
  run.n_steps = std::max<std::size_t>(run.n_steps, 1);
  run.dt = cfg.t / static_cast<double>(run.n_steps);
  TdvpResult evolved = tdvp_evolve(k, start, run);

  const Mat rho = reduced_density_matrix(evolved.state, h.n_qubits(), cfg.r,
                                         std::max(cfg.r, kDefaultRdmMaxSites));
  ProtocolResult out;
  out.distribution = pointer_readout(rho);
  out.config = cfg;
  out.evolution = run;
  out.diagnostics = std::move(evolved.diagnostics);
  estimate_energy(out.distribution, cfg, out);
  return out;
}

std::vector<ProtocolResult> time_sweep(const PauliSum& h, const Mps& init,
                                       const std::vector<double>& t_values, std::size_t r,
                                       const TdvpConfig& evo, double margin, std::size_t jobs,
                                       double mpo_cutoff) {
  if (t_values.empty()) throw InvalidArgument("time_sweep: no t values");
  for (std::size_t i = 0; i < t_values.size(); ++i) {
    if (!(t_values[i] > 0.0)) throw InvalidArgument("time_sweep: t values must be positive");
    if (i > 0 && !(t_values[i] > t_values[i - 1]))
      throw InvalidArgument("time_sweep: t values must be ascending");
  }
  PointerConfig base = choose_window(h, r, margin);
  base.mpo_cutoff = mpo_cutoff;
  const auto bounds = spectral_bounds(h);
  std::vector<PointerConfig> cfgs;
  for (double t : t_values) {
    PointerConfig c = base;
    c.t = t;
    c.validate(bounds.lower, bounds.upper);
    cfgs.push_back(c);
  }
  std::vector<ProtocolResult> out(t_values.size());
  std::vector<std::exception_ptr> errors(t_values.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < cfgs.size(); i = next++) {
      try {
        out[i] = run_protocol(h, init, cfgs[i], evo);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  const std::size_t n_threads = std::clamp<std::size_t>(jobs, 1, cfgs.size());
  if (n_threads == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (std::size_t i = 0; i < n_threads; ++i) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
  return out;
}

std::string to_json(const ProtocolResult& r, bool with_diagnostics) {
  nlohmann::json j;
  j["distribution"] = r.distribution;
  j["peak_x"] = r.peak_x;
  j["refined_x"] = r.refined_x;
  j["E_estimate"] = r.E_estimate;
  j["E_uncertainty"] = r.E_uncertainty;
  j["pointer"] = {{"r", r.config.r},
                  {"t", r.config.t},
                  {"scale", r.config.scale},
                  {"shift", r.config.shift},
                  {"margin", r.config.margin}};
  j["evolution"] = {{"dt", r.evolution.dt},
                    {"n_steps", r.evolution.n_steps},
                    {"chi_max", r.evolution.policy.chi_max},
                    {"svd_cutoff", r.evolution.policy.svd_cutoff}};
  if (with_diagnostics) j["diagnostics"] = nlohmann::json::parse(to_json(r.diagnostics));
  return j.dump(2);
}

void write_distribution_csv(std::ostream& os, const ProtocolResult& r) {
  os << "x,probability,E_bin_center\n" << std::setprecision(17);
  for (std::size_t x = 0; x < r.distribution.size(); ++x)
    os << x << ',' << r.distribution[x] << ','
       << r.config.shift + kTwoPi * static_cast<double>(x) / (r.config.scale * r.config.t) << '\n';
}

void write_sweep_csv(std::ostream& os, const std::vector<ProtocolResult>& runs) {
  os << "t,E_estimate,E_uncertainty\n" << std::setprecision(17);
  for (const auto& r : runs) os << r.config.t << ',' << r.E_estimate << ',' << r.E_uncertainty << '\n';
}

}  // namespace vnps
