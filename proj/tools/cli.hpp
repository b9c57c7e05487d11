#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"
#include "vnps/dmrg.hpp"
#include "vnps/linalg.hpp"
#include "vnps/protocol.hpp"
#include "vnps/tdvp.hpp"

namespace vnps::cli {

// Exit codes.
inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitNumeric = 3;
inline constexpr int kExitResource = 4;

/// Every problem found while validating a config document.
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(std::vector<std::string> errors);
  const std::vector<std::string>& errors() const { return errors_; }

 private:
  std::vector<std::string> errors_;
};

struct ModelConfig {
  std::string kind;  // heisenberg | pauli | fcidump | terms
  std::size_t rows = 0;
  std::size_t cols = 0;
  bool periodic = false;
  double J = 1.0;
  std::string path;
  std::optional<std::size_t> n_frozen;
  std::optional<std::size_t> n_active;
  /// Weight of (N - n_electrons)^2 added to the DMRG operator (molecular models).
  double penalty = 1.0;
  std::size_t n_qubits = 0;
  std::vector<std::pair<std::string, cplx>> terms;
};

struct InitialStateConfig {
  std::string kind = "dmrg";  // dmrg | mps | basis
  std::string path;
  std::vector<int> bits;
};

struct ResourcesConfig {
  std::size_t n_steps = 1;
  std::optional<std::size_t> pointer_r;
  bool use_conjugation = true;
  std::string label = "hamiltonian";
};

struct OracleConfig {
  std::size_t k = 1;
  std::optional<std::size_t> hamming_weight;
  bool distribution = false;
};

struct RunConfig {
  std::string task;
  ModelConfig model;
  DmrgConfig dmrg;
  std::size_t dmrg_states = 1;
  TdvpConfig tdvp;
  /// r, margin and mpo_cutoff; t, shift and scale come from choose_window
  /// unless given explicitly.
  PointerConfig pointer;
  std::optional<double> pointer_t;
  std::optional<double> pointer_shift;
  std::optional<double> pointer_scale;
  InitialStateConfig initial;
  std::vector<double> t_values;
  ResourcesConfig resources;
  OracleConfig oracle;
  std::string mps_path;
  /// The fully resolved document, defaults included, echoed into results.
  nlohmann::json resolved;
};

inline const std::vector<std::string> kTasks = {"build", "dmrg",        "protocol", "sweep",
                                                "resources", "mps2circuit", "oracle"};

/// Strict validation; relative paths resolve against base_dir.
RunConfig validate_config(const std::string& task, const nlohmann::json& raw,
                          const std::string& base_dir = ".");

/// Executes one task, writing artifacts into out_dir.
void run(const RunConfig& cfg, const std::string& out_dir, std::size_t jobs = 1);

/// Full command-line entry point; returns the process exit code.
int main_entry(int argc, char** argv);

}  // namespace vnps::cli
