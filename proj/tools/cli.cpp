#include "cli.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <set>
#include <sstream>

#include "CLI11.hpp"
#include "vnps/circuit.hpp"
#include "vnps/error.hpp"
#include "vnps/fermion.hpp"
#include "vnps/io.hpp"
#include "vnps/lattice.hpp"
#include "vnps/mpo.hpp"
#include "vnps/oracle.hpp"
#include "vnps/pauli.hpp"

namespace vnps::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string join_errors(const std::vector<std::string>& errors) {
  std::string s = "invalid configuration";
  for (const auto& e : errors) s += "\n  " + e;
  return s;
}

const char* type_name(const json& v) { return v.type_name(); }

// One object of the config document. Reads typed fields, records problems,
// echoes resolved values into `out`.
class Section {
 public:
  Section(const json& doc, const std::string& key, std::vector<std::string>& errors, bool required = false,
          const std::vector<std::string>& required_fields = {})
      : path_(key), errors_(errors) {
    if (!doc.contains(key)) {
      if (required)
        for (const auto& f : required_fields) errors_.push_back(key + "." + f + ": required field is missing");
      return;
    }
    present_ = true;
    if (!doc.at(key).is_object()) {
      errors_.push_back(key + ": expected an object, got " + type_name(doc.at(key)));
      return;
    }
    obj_ = &doc.at(key);
  }

  bool present() const { return present_; }
  bool has(const std::string& key) const { return obj_ && obj_->contains(key) && !obj_->at(key).is_null(); }

  double real(const std::string& key, double def, double lo, double hi, bool open_lo = false) {
    double v = def;
    if (const json* j = get(key)) {
      if (!j->is_number()) {
        bad(key, "expected a number");
      } else {
        v = j->get<double>();
        if (!std::isfinite(v) || v < lo || v > hi || (open_lo && v == lo)) {
          std::ostringstream msg;
          msg << "value " << v << " outside " << (open_lo ? "(" : "[") << lo << ", " << hi << "]";
          bad(key, msg.str());
          v = def;
        }
      }
    }
    out[key] = v;
    return v;
  }

  std::optional<double> opt_real(const std::string& key, double lo, double hi, bool open_lo = false) {
    if (!has(key)) {
      mark(key);
      out[key] = nullptr;
      return std::nullopt;
    }
    return real(key, lo, lo, hi, open_lo);
  }

  std::size_t count(const std::string& key, std::size_t def, std::size_t lo, std::size_t hi) {
    std::size_t v = def;
    if (const json* j = get(key)) {
      if (!j->is_number_integer()) {
        bad(key, "expected an integer");
      } else if (j->is_number_unsigned() || j->get<long long>() >= 0) {
        const auto u = j->get<unsigned long long>();
        if (u < lo || u > hi) {
          bad(key, "value " + std::to_string(u) + " outside [" + std::to_string(lo) + ", " + std::to_string(hi) + "]");
        } else {
          v = static_cast<std::size_t>(u);
        }
      } else {
        bad(key, "value " + std::to_string(j->get<long long>()) + " is negative");
      }
    }
    out[key] = v;
    return v;
  }

  std::optional<std::size_t> opt_count(const std::string& key, std::size_t lo, std::size_t hi) {
    if (!has(key)) {
      mark(key);
      out[key] = nullptr;
      return std::nullopt;
    }
    return count(key, lo, lo, hi);
  }

  bool flag(const std::string& key, bool def) {
    bool v = def;
    if (const json* j = get(key)) {
      if (!j->is_boolean()) bad(key, "expected true or false");
      else v = j->get<bool>();
    }
    out[key] = v;
    return v;
  }

  std::string text(const std::string& key, const std::string& def, const std::vector<std::string>& allowed = {},
                   bool required = false) {
    std::string v = def;
    const json* j = get(key);
    if (!j && required) {
      errors_.push_back(path_ + "." + key + ": required field is missing");
    } else if (j) {
      if (!j->is_string()) {
        bad(key, "expected a string");
      } else {
        v = j->get<std::string>();
        if (!allowed.empty() && std::find(allowed.begin(), allowed.end(), v) == allowed.end()) {
          std::string list;
          for (const auto& a : allowed) list += (list.empty() ? "" : ", ") + a;
          bad(key, "'" + v + "' is not one of {" + list + "}");
        }
      }
    }
    out[key] = v;
    return v;
  }

  /// A path that must exist, resolved against base.
  std::string file(const std::string& key, const std::string& base, bool required) {
    const std::string raw = text(key, "", {}, required);
    if (raw.empty()) {
      if (has(key)) bad(key, "empty path");
      return raw;
    }
    fs::path p(raw);
    if (p.is_relative()) p = fs::path(base) / p;
    if (!fs::exists(p)) bad(key, "file '" + p.string() + "' does not exist");
    out[key] = p.string();
    return p.string();
  }

  const json* raw(const std::string& key) { return get(key); }

  void error(const std::string& key, const std::string& what) { bad(key, what); }

  /// Unknown keys are errors.
  void finish() {
    if (!obj_) return;
    for (const auto& [k, v] : obj_->items())
      if (!seen_.count(k)) errors_.push_back(path_ + "." + k + ": unknown key");
  }

  json out = json::object();

 private:
  const json* get(const std::string& key) {
    mark(key);
    if (!obj_ || !obj_->contains(key) || obj_->at(key).is_null()) return nullptr;
    return &obj_->at(key);
  }
  void mark(const std::string& key) { seen_.insert(key); }
  void bad(const std::string& key, const std::string& what) { errors_.push_back(path_ + "." + key + ": " + what); }

  std::string path_;
  std::vector<std::string>& errors_;
  const json* obj_ = nullptr;
  bool present_ = false;
  std::set<std::string> seen_;
};

bool needs_model(const std::string& task) { return task != "mps2circuit"; }

bool needs_initial(const std::string& task) { return task == "protocol" || task == "sweep"; }

// ---------------------------------------------------------------------------
// Execution helpers

struct Model {
  PauliSum h;
  std::optional<std::size_t> n_electrons;
};

Model build_model(const ModelConfig& m) {
  Model out;
  if (m.kind == "heisenberg") {
    out.h = build_heisenberg(build_triangular_lattice(m.rows, m.cols, m.periodic), m.J);
  } else if (m.kind == "pauli") {
    std::ifstream in(m.path);
    if (!in) throw InvalidArgument("cannot open '" + m.path + "'");
    out.h = read_pauli_sum(in);
  } else if (m.kind == "fcidump") {
    std::ifstream in(m.path);
    if (!in) throw InvalidArgument("cannot open '" + m.path + "'");
    FermionIntegrals f = parse_fcidump(in);
    if (m.n_frozen || m.n_active) {
      const std::size_t frozen = m.n_frozen.value_or(0);
      if (frozen > f.n_orbitals) throw InvalidArgument("model.n_frozen exceeds the orbital count");
      f = freeze_core(f, frozen, m.n_active.value_or(f.n_orbitals - frozen));
    }
    out.h = simplify(jordan_wigner(f));
    out.n_electrons = f.n_electrons;
  } else {
    PauliSum h(m.n_qubits);
    for (const auto& [s, c] : m.terms) h.add(c, parse_pauli_string(s));
    out.h = simplify(h);
  }
  if (out.h.n_qubits() == 0) throw InvalidArgument("model has no qubits");
  return out;
}

struct Prepared {
  Mps state;
  std::optional<DmrgResult> dmrg;
};

// Start of the ground-state search: Neel for spin models, the Hartree-Fock
// determinant for molecular models, a seeded random bond-2 state otherwise.
Mps dmrg_start(const RunConfig& cfg, const Model& model) {
  const std::size_t n = model.h.n_qubits();
  if (cfg.model.kind == "heisenberg") {
    std::vector<int> bits(n);
    for (std::size_t i = 0; i < n; ++i) bits[i] = static_cast<int>(i % 2);
    return basis_state(bits);
  }
  if (model.n_electrons && *model.n_electrons <= n) {
    std::vector<int> bits(n, 0);
    for (std::size_t i = 0; i < *model.n_electrons; ++i) bits[i] = 1;
    return basis_state(bits);
  }
  return random_mps(n, std::min<std::size_t>(2, cfg.dmrg.policy.chi_max), cfg.dmrg.seed);
}

// The operator DMRG minimizes: H, plus the optional particle-number penalty
// for molecular models.
Mpo dmrg_operator(const RunConfig& cfg, const Model& model) {
  if (model.n_electrons && cfg.model.penalty > 0.0) {
    PauliSum pen = number_penalty(model.h.n_qubits(), *model.n_electrons);
    pen *= cfg.model.penalty;
    PauliSum total = model.h;
    total += pen;
    return mpo_from_pauli_sum(simplify(total));
  }
  return mpo_from_pauli_sum(model.h);
}

DmrgResult ground_state(const RunConfig& cfg, const Model& model) {
  DmrgResult r = dmrg_ground_state(dmrg_operator(cfg, model), dmrg_start(cfg, model), cfg.dmrg);
  r.energy = expectation(r.state, mpo_from_pauli_sum(model.h)).real();
  return r;
}

Prepared initial_state(const RunConfig& cfg, const Model& model) {
  const std::size_t n = model.h.n_qubits();
  Prepared p;
  if (cfg.initial.kind == "dmrg") {
    p.dmrg = ground_state(cfg, model);
    p.state = p.dmrg->state;
  } else if (cfg.initial.kind == "mps") {
    const Mps loaded = load_mps(cfg.initial.path);
    if (loaded.size() != n) throw InvalidArgument("initial_state: MPS has " + std::to_string(loaded.size()) +
                                                  " sites, model has " + std::to_string(n));
    const double nn = norm(loaded);
    if (!(nn > 0.0)) throw InvalidArgument("initial_state: MPS has zero norm");
    p.state = scaled(loaded, 1.0 / nn);
  } else {
    if (cfg.initial.bits.size() != n)
      throw InvalidArgument("initial_state.bits: expected " + std::to_string(n) + " entries");
    p.state = basis_state(cfg.initial.bits);
  }
  return p;
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InvalidArgument("cannot write '" + path.string() + "'");
  out << text;
}

void write_json(const fs::path& path, const json& j) { write_text(path, j.dump(2) + "\n"); }

json model_summary(const Model& m) {
  const auto b = spectral_bounds(m.h);
  json j;
  j["n_qubits"] = m.h.n_qubits();
  j["n_terms"] = m.h.size();
  j["spectral_bounds"] = {b.lower, b.upper};
  if (m.n_electrons) j["n_electrons"] = *m.n_electrons;
  return j;
}

PointerConfig pointer_for(const RunConfig& cfg, const PauliSum& h) {
  PointerConfig p = choose_window(h, cfg.pointer.r, cfg.pointer.margin);
  if (cfg.pointer_t) p.t = *cfg.pointer_t;
  if (cfg.pointer_shift) p.shift = *cfg.pointer_shift;
  if (cfg.pointer_scale) p.scale = *cfg.pointer_scale;
  p.mpo_cutoff = cfg.pointer.mpo_cutoff;
  return p;
}

json base_result(const RunConfig& cfg) {
  json j;
  j["task"] = cfg.task;
  j["config"] = cfg.resolved;
  j["seeds"] = {{"dmrg", cfg.dmrg.seed}};
  return j;
}

json dmrg_report_json(const DmrgResult& r) {
  json j = json::parse(to_json(r.report));
  j["energy"] = r.energy;
  return j;
}

void run_build(const RunConfig& cfg, const fs::path& out) {
  const Model m = build_model(cfg.model);
  const Mpo mpo = mpo_from_pauli_sum(m.h);
  {
    std::ofstream os(out / "hamiltonian.txt");
    write_pauli_sum(os, m.h);
  }
  save((out / "hamiltonian.mpo").string(), mpo);
  json r = base_result(cfg);
  r["model"] = model_summary(m);
  r["mpo_bond_dims"] = mpo.bond_dims();
  write_json(out / "result.json", r);
}

void run_dmrg(const RunConfig& cfg, const fs::path& out) {
  const Model m = build_model(cfg.model);
  json r = base_result(cfg);
  r["model"] = model_summary(m);
  json report = json::array();
  if (cfg.dmrg_states == 1) {
    const DmrgResult g = ground_state(cfg, m);
    save((out / "state_0.mps").string(), g.state);
    r["energies"] = {g.energy};
    r["bond_dims"] = g.state.bond_dims();
    report.push_back(dmrg_report_json(g));
  } else {
    const auto states = dmrg_excited_states(dmrg_operator(cfg, m), cfg.dmrg_states, cfg.dmrg);
    const Mpo hm = mpo_from_pauli_sum(m.h);
    json energies = json::array();
    for (std::size_t i = 0; i < states.size(); ++i) {
      DmrgResult s = states[i];
      s.energy = expectation(s.state, hm).real();
      save((out / ("state_" + std::to_string(i) + ".mps")).string(), s.state);
      energies.push_back(s.energy);
      report.push_back(dmrg_report_json(s));
    }
    r["energies"] = energies;
  }
  write_json(out / "result.json", r);
  write_json(out / "report.json", json{{"dmrg", report}});
}

void write_protocol_run(const RunConfig& cfg, const ProtocolResult& p, const fs::path& dir) {
  json r = base_result(cfg);
  r["protocol"] = json::parse(to_json(p, false));
  write_json(dir / "result.json", r);
  std::ofstream csv(dir / "distribution.csv");
  write_distribution_csv(csv, p);
}

void run_protocol_task(const RunConfig& cfg, const fs::path& out) {
  const Model m = build_model(cfg.model);
  const Prepared init = initial_state(cfg, m);
  const PointerConfig pc = pointer_for(cfg, m.h);
  const ProtocolResult p = run_protocol(m.h, init.state, pc, cfg.tdvp);
  write_protocol_run(cfg, p, out);
  json report;
  if (init.dmrg) report["dmrg"] = dmrg_report_json(*init.dmrg);
  report["tdvp"] = json::parse(to_json(p.diagnostics));
  write_json(out / "report.json", report);
}

void run_sweep(const RunConfig& cfg, const fs::path& out, std::size_t jobs) {
  const Model m = build_model(cfg.model);
  const Prepared init = initial_state(cfg, m);
  std::vector<double> ts = cfg.t_values;
  if (ts.empty()) {
    const PointerConfig w = choose_window(m.h, cfg.pointer.r, cfg.pointer.margin);
    const std::size_t k = cfg.resolved["sweep"]["count"].get<std::size_t>();
    for (std::size_t i = 1; i <= k; ++i) ts.push_back(w.t * static_cast<double>(i) / static_cast<double>(k));
  }
  const auto runs =
      time_sweep(m.h, init.state, ts, cfg.pointer.r, cfg.tdvp, cfg.pointer.margin, jobs, cfg.pointer.mpo_cutoff);
  json report;
  if (init.dmrg) report["dmrg"] = dmrg_report_json(*init.dmrg);
  report["runs"] = json::array();
  json summary = json::array();
  for (std::size_t i = 0; i < runs.size(); ++i) {
    std::ostringstream name;
    name << "run_" << std::setw(3) << std::setfill('0') << i;
    const fs::path dir = out / name.str();
    fs::create_directories(dir);
    write_protocol_run(cfg, runs[i], dir);
    report["runs"].push_back(json::parse(to_json(runs[i].diagnostics)));
    summary.push_back({{"t", runs[i].config.t},
                       {"E_estimate", runs[i].E_estimate},
                       {"E_uncertainty", runs[i].E_uncertainty},
                       {"dir", name.str()}});
  }
  std::ofstream csv(out / "sweep.csv");
  write_sweep_csv(csv, runs);
  json r = base_result(cfg);
  r["model"] = model_summary(m);
  r["runs"] = summary;
  write_json(out / "result.json", r);
  write_json(out / "report.json", report);
}

void run_resources(const RunConfig& cfg, const fs::path& out) {
  const Model m = build_model(cfg.model);
  const auto est = trotter_resources(m.h, cfg.resources.n_steps, cfg.resources.pointer_r,
                                     cfg.resources.use_conjugation);
  std::ofstream csv(out / "resources.csv");
  write_resources_csv(csv, cfg.resources.label, est);
  json r = base_result(cfg);
  r["resources"] = json::parse(to_json(est));
  write_json(out / "result.json", r);
}

void run_mps2circuit(const RunConfig& cfg, const fs::path& out) {
  const Mps loaded = load_mps(cfg.mps_path);
  const double nn = norm(loaded);
  if (!(nn > 0.0)) throw InvalidArgument("mps2circuit: MPS has zero norm");
  const Mps psi = right_canonicalize(scaled(loaded, 1.0 / nn));
  const CircuitPlan plan = mps_to_staircase(psi);
  write_text(out / "circuit.json", to_json(plan) + "\n");
  json r = base_result(cfg);
  r["n_qubits"] = plan.n_qubits;
  r["n_gates"] = plan.gates.size();
  json widths = json::array();
  for (const auto& g : plan.gates) widths.push_back(g.support.size());
  r["gate_widths"] = widths;
  if (plan.n_qubits <= kDenseQubitLimit) {
    Vec zero = Vec::Zero(static_cast<Eigen::Index>(std::size_t{1} << plan.n_qubits));
    zero(0) = 1.0;
    r["fidelity"] = std::norm(circuit_apply(plan, zero).dot(mps_to_statevector(psi)));
  }
  write_json(out / "result.json", r);
}

void run_oracle(const RunConfig& cfg, const fs::path& out) {
  const Model m = build_model(cfg.model);
  std::optional<std::size_t> weight = cfg.oracle.hamming_weight;
  if (!weight && m.n_electrons) weight = m.n_electrons;
  const auto pairs = exact_spectrum(m.h, cfg.oracle.k, weight);
  json r = base_result(cfg);
  r["model"] = model_summary(m);
  json values = json::array(), residuals = json::array();
  for (const auto& p : pairs) {
    values.push_back(p.value);
    residuals.push_back(p.residual);
  }
  r["eigenvalues"] = values;
  r["residuals"] = residuals;
  r["hamming_weight"] = weight ? json(*weight) : json(nullptr);
  if (cfg.oracle.distribution) {
    const Prepared init = initial_state(cfg, m);
    const PointerConfig pc = pointer_for(cfg, m.h);
    const auto b = spectral_bounds(m.h);
    pc.validate(b.lower, b.upper);
    PauliSum mapped = m.h;
    mapped.add(-pc.shift, PauliString{});
    mapped *= pc.scale;
    ProtocolResult pr;
    pr.distribution = exact_pointer_distribution(simplify(mapped), mps_to_statevector(init.state), pc.t, pc.r);
    pr.config = pc;
    estimate_energy(pr.distribution, pc, pr);
    r["protocol"] = json::parse(to_json(pr, false));
    std::ofstream csv(out / "distribution.csv");
    write_distribution_csv(csv, pr);
  }
  write_json(out / "result.json", r);
}

}  // namespace

ConfigError::ConfigError(std::vector<std::string> errors)
    : std::runtime_error(join_errors(errors)), errors_(std::move(errors)) {}

RunConfig validate_config(const std::string& task, const json& raw, const std::string& base_dir) {
  std::vector<std::string> errors;
  RunConfig cfg;
  cfg.task = task;
  if (std::find(kTasks.begin(), kTasks.end(), task) == kTasks.end()) errors.push_back("task: unknown task '" + task + "'");
  if (!raw.is_object()) throw ConfigError({"document: expected a JSON object"});

  static const std::set<std::string> kSections = {"task",        "model",  "dmrg",     "tdvp",     "pointer",
                                                  "initial_state", "sweep", "resources", "oracle", "mps2circuit"};
  for (const auto& [k, v] : raw.items())
    if (!kSections.count(k)) errors.push_back(k + ": unknown key");
  if (raw.contains("task") && (!raw["task"].is_string() || raw["task"].get<std::string>() != task))
    errors.push_back("task: document names task " + raw["task"].dump() + " but '" + task + "' was requested");

  json resolved;
  resolved["task"] = task;

  // model
  {
    Section s(raw, "model", errors, needs_model(task), {"kind"});
    if (s.present()) {
      auto& m = cfg.model;
      m.kind = s.text("kind", "", {"heisenberg", "pauli", "fcidump", "terms"}, true);
      if (m.kind == "heisenberg") {
        m.rows = s.count("rows", 0, 1, 64);
        m.cols = s.count("cols", 0, 1, 64);
        if (!s.has("rows")) s.error("rows", "required field is missing");
        if (!s.has("cols")) s.error("cols", "required field is missing");
        m.periodic = s.flag("periodic", false);
        m.J = s.real("J", 1.0, -1e6, 1e6);
        if (m.rows * m.cols > PauliString::kMaxQubits) s.error("rows", "lattice exceeds 64 sites");
      } else if (m.kind == "pauli") {
        m.path = s.file("path", base_dir, true);
      } else if (m.kind == "fcidump") {
        m.path = s.file("path", base_dir, true);
        m.n_frozen = s.opt_count("n_frozen", 0, 32);
        m.n_active = s.opt_count("n_active", 1, 32);
        m.penalty = s.real("number_penalty", 1.0, 0.0, 1e6);
      } else if (m.kind == "terms") {
        m.n_qubits = s.count("n_qubits", 0, 1, PauliString::kMaxQubits);
        if (!s.has("n_qubits")) s.error("n_qubits", "required field is missing");
        const json* terms = s.raw("terms");
        if (!terms || !terms->is_array() || terms->empty()) {
          s.error("terms", "expected a non-empty array of {\"string\", \"coeff\"} objects");
        } else {
          for (std::size_t i = 0; i < terms->size(); ++i) {
            const json& t = (*terms)[i];
            const std::string where = "terms[" + std::to_string(i) + "]";
            if (!t.is_object() || !t.contains("string") || !t["string"].is_string() || !t.contains("coeff") ||
                !t["coeff"].is_number()) {
              s.error(where, "expected {\"string\": text, \"coeff\": number[, \"coeff_im\": number]}");
              continue;
            }
            for (const auto& [k, v] : t.items())
              if (k != "string" && k != "coeff" && k != "coeff_im") s.error(where + "." + k, "unknown key");
            const double im = t.contains("coeff_im") && t["coeff_im"].is_number() ? t["coeff_im"].get<double>() : 0.0;
            try {
              const PauliString ps = parse_pauli_string(t["string"].get<std::string>());
              if (ps.max_qubit() >= static_cast<int>(m.n_qubits) && m.n_qubits > 0)
                s.error(where, "string acts beyond n_qubits");
            } catch (const std::exception& e) {
              s.error(where, e.what());
            }
            m.terms.emplace_back(t["string"].get<std::string>(), cplx(t["coeff"].get<double>(), im));
          }
          s.out["terms"] = *terms;
        }
      }
    }
    s.finish();
    if (s.present()) resolved["model"] = s.out;
  }

  // dmrg
  {
    Section s(raw, "dmrg", errors);
    auto& d = cfg.dmrg;
    d.policy.chi_max = s.count("chi_max", 64, 1, 4096);
    d.policy.svd_cutoff = s.real("svd_cutoff", 1e-12, 0.0, 1e-2);
    d.max_sweeps = s.count("max_sweeps", 50, 1, 10000);
    d.energy_tol = s.real("energy_tol", 1e-8, 0.0, 1.0, true);
    d.local_solver_tol = s.real("local_solver_tol", 1e-10, 0.0, 1e-2, true);
    d.local_solver_max_iters = s.count("local_solver_max_iters", 400, 2, 100000);
    d.seed = s.count("seed", 1, 0, std::numeric_limits<std::uint32_t>::max());
    d.noise = s.real("noise", 0.0, 0.0, 0.999);
    d.noise_sweeps = s.count("noise_sweeps", 0, 0, 10000);
    if (d.noise > 0.0 && d.noise_sweeps >= d.max_sweeps)
      s.error("noise_sweeps", "must be below max_sweeps");
    cfg.dmrg_states = s.count("n_states", 1, 1, 64);
    s.finish();
    resolved["dmrg"] = s.out;
  }

  // tdvp
  {
    Section s(raw, "tdvp", errors);
    auto& t = cfg.tdvp;
    t.dt = s.real("dt", 0.05, 0.0, 1e3, true);
    t.policy.chi_max = s.count("chi_max", 128, 1, 4096);
    t.policy.svd_cutoff = s.real("svd_cutoff", 1e-12, 0.0, 1e-2);
    t.krylov_tol = s.real("krylov_tol", 1e-12, 0.0, 1e-2, true);
    t.krylov_max_dim = s.count("krylov_max_dim", 40, 2, 500);
    t.startup_halvings = s.count("startup_halvings", 30, 0, 60);
    t.track_energy = s.flag("track_energy", true);
    s.finish();
    resolved["tdvp"] = s.out;
  }

  // pointer
  {
    Section s(raw, "pointer", errors);
    auto& p = cfg.pointer;
    p.r = s.count("r", 5, 1, kDefaultRdmMaxSites);
    p.margin = s.real("margin", 0.1, 0.0, 0.999);
    cfg.pointer_t = s.opt_real("t", 0.0, 1e9, true);
    cfg.pointer_shift = s.opt_real("shift", -1e12, 1e12);
    cfg.pointer_scale = s.opt_real("scale", 0.0, 1e12, true);
    p.mpo_cutoff = s.real("mpo_cutoff", 0.0, 0.0, 1e-4);
    s.finish();
    resolved["pointer"] = s.out;
  }

  // initial_state
  {
    Section s(raw, "initial_state", errors);
    auto& i = cfg.initial;
    i.kind = s.text("kind", "dmrg", {"dmrg", "mps", "basis"});
    if (i.kind == "mps") {
      i.path = s.file("path", base_dir, true);
    } else if (i.kind == "basis") {
      const json* bits = s.raw("bits");
      if (!bits || !bits->is_array() || bits->empty()) {
        s.error("bits", "expected a non-empty array of 0/1");
      } else {
        for (const auto& b : *bits) {
          if (!b.is_number_integer() || (b.get<long long>() != 0 && b.get<long long>() != 1)) {
            s.error("bits", "entries must be 0 or 1");
            break;
          }
          i.bits.push_back(b.get<int>());
        }
        s.out["bits"] = *bits;
      }
    }
    s.finish();
    if (needs_initial(task) || task == "oracle") resolved["initial_state"] = s.out;
  }

  // sweep
  {
    Section s(raw, "sweep", errors, task == "sweep", {"t_values (or count)"});
    if (s.present()) {
      const json* tv = s.raw("t_values");
      if (tv) {
        if (!tv->is_array() || tv->empty()) {
          s.error("t_values", "expected a non-empty array of positive numbers");
        } else {
          for (const auto& v : *tv) {
            if (!v.is_number() || !(v.get<double>() > 0.0)) {
              s.error("t_values", "entries must be positive numbers");
              break;
            }
            cfg.t_values.push_back(v.get<double>());
          }
          for (std::size_t k = 1; k < cfg.t_values.size(); ++k)
            if (!(cfg.t_values[k] > cfg.t_values[k - 1])) {
              s.error("t_values", "entries must be strictly ascending");
              break;
            }
          s.out["t_values"] = *tv;
        }
        if (s.has("count")) s.error("count", "give either t_values or count, not both");
        s.raw("count");
      } else {
        s.count("count", 0, 1, 1000);
        if (!s.has("count") && task == "sweep") s.error("t_values", "required: t_values or count");
      }
    }
    s.finish();
    if (s.present()) resolved["sweep"] = s.out;
  }

  // resources
  {
    Section s(raw, "resources", errors);
    auto& r = cfg.resources;
    r.n_steps = s.count("n_steps", 1, 1, 1000000000);
    r.pointer_r = s.opt_count("pointer_r", 1, 64);
    r.use_conjugation = s.flag("use_conjugation", true);
    r.label = s.text("label", "hamiltonian");
    s.finish();
    if (task == "resources") resolved["resources"] = s.out;
  }

  // oracle
  {
    Section s(raw, "oracle", errors);
    auto& o = cfg.oracle;
    o.k = s.count("k", 1, 1, 1024);
    o.hamming_weight = s.opt_count("hamming_weight", 0, 64);
    o.distribution = s.flag("distribution", false);
    s.finish();
    if (task == "oracle") resolved["oracle"] = s.out;
  }

  // mps2circuit
  {
    Section s(raw, "mps2circuit", errors, task == "mps2circuit", {"path"});
    if (s.present()) cfg.mps_path = s.file("path", base_dir, true);
    s.finish();
    if (s.present()) resolved["mps2circuit"] = s.out;
  }

  if (!errors.empty()) throw ConfigError(std::move(errors));
  cfg.resolved = std::move(resolved);
  return cfg;
}

void run(const RunConfig& cfg, const std::string& out_dir, std::size_t jobs) {
  const fs::path out(out_dir);
  fs::create_directories(out);
  if (cfg.task == "build") run_build(cfg, out);
  else if (cfg.task == "dmrg") run_dmrg(cfg, out);
  else if (cfg.task == "protocol") run_protocol_task(cfg, out);
  else if (cfg.task == "sweep") run_sweep(cfg, out, jobs);
  else if (cfg.task == "resources") run_resources(cfg, out);
  else if (cfg.task == "mps2circuit") run_mps2circuit(cfg, out);
  else if (cfg.task == "oracle") run_oracle(cfg, out);
  else throw ConfigError({"task: unknown task '" + cfg.task + "'"});
}

namespace {

int report_error(const std::string& out_dir, const std::string& category, const std::vector<std::string>& messages,
                 int code) {
  json e;
  e["status"] = "error";
  e["category"] = category;
  e["exit_code"] = code;
  e["errors"] = messages;
  std::cerr << e.dump(2) << "\n";
  if (!out_dir.empty()) {
    std::error_code ec;
    fs::create_directories(out_dir, ec);
    if (!ec) {
      std::ofstream os(fs::path(out_dir) / "error.json");
      os << e.dump(2) << "\n";
    }
  }
  return code;
}

}  // namespace

int main_entry(int argc, char** argv) {
  CLI::App app{"Tensor-network pointer-measurement simulator"};
  std::string task, config_path, out_dir = "vnps_out";
  std::size_t jobs = 1;
  app.add_option("task", task, "build | dmrg | protocol | sweep | resources | mps2circuit | oracle")->required();
  app.add_option("--config", config_path, "JSON run configuration")->required();
  app.add_option("--jobs", jobs, "parallel protocol runs for the sweep task")->check(CLI::Range(1, 256));
  app.add_option("--out", out_dir, "output directory");
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);
    app.exit(e);
    return kExitConfig;
  }

  try {
    std::ifstream in(config_path);
    if (!in) return report_error(out_dir, "config", {"cannot open config '" + config_path + "'"}, kExitConfig);
    json raw;
    try {
      raw = json::parse(in);
    } catch (const json::exception& e) {
      return report_error(out_dir, "config", {std::string("config is not valid JSON: ") + e.what()}, kExitConfig);
    }
    const std::string base = fs::absolute(config_path).parent_path().string();
    const RunConfig cfg = validate_config(task, raw, base);
    run(cfg, out_dir, jobs);
    return kExitOk;
  } catch (const ConfigError& e) {
    return report_error(out_dir, "config", e.errors(), kExitConfig);
  } catch (const ResourceLimit& e) {
    return report_error(out_dir, "resource_limit", {e.what()}, kExitResource);
  } catch (const NumericFailure& e) {
    return report_error(out_dir, "numeric", {e.what()}, kExitNumeric);
  } catch (const InvalidState& e) {
    return report_error(out_dir, "numeric", {e.what()}, kExitNumeric);
  } catch (const InvalidArgument& e) {
    return report_error(out_dir, "input", {e.what()}, kExitConfig);
  } catch (const ParseError& e) {
    return report_error(out_dir, "input", {e.what()}, kExitConfig);
  } catch (const FormatError& e) {
    return report_error(out_dir, "input", {e.what()}, kExitConfig);
  } catch (const std::exception& e) {
    return report_error(out_dir, "numeric", {e.what()}, kExitNumeric);
  }
}

}  // namespace vnps::cli
