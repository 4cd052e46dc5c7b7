#pragma once

#include <string>
#include <utility>
#include <vector>

#include "model.hpp"
#include "pauli.hpp"
#include "vqe.hpp"

struct config_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct RunConfig {
  LatticeSpec lattice;  // triangle, g=0.15, m=0, mu=0 unless overridden
  int depth = 3;
  Entanglement entanglement = Entanglement::Full;
  OptimizerKind optimizer = OptimizerKind::GradientQuasiNewton;
  int max_iterations = 600;
  int restarts = 5;
  std::uint64_t seed = 1234567;
  double pauli_threshold = 1e-12;
  bool safe_padding = false;
  double mu_start = 0.0;
  double mu_end = 2.0;
  double mu_step = 0.1;
  std::string out_dir = "out";
  bool mass_explicit = false;  // eos defaults the mass to 1.0 when left unset
};

// flat key=value file (later keys win), then override pairs from flags.
// unknown keys and malformed values raise config_error naming the key.
RunConfig resolve_config(const std::string* config_path,
                         const std::vector<std::pair<std::string, std::string>>& overrides,
                         const std::string& subcommand);

struct EdReport {
  double ground_energy = 0.0;
  int dim = 0;
  int n_qubits = 0;
};

struct VqeReport {
  double exact_energy = 0.0;
  double gap = 0.0;
  int pauli_terms = 0;
  int dim = 0;
  int n_qubits = 0;
  double lambda_used = 0.0;
  VqeResult vqe;
};

struct PauliReport {
  int n_qubits = 0;
  int count = 0;
  double threshold = 0.0;
};

struct EosPoint {
  double mu = 0.0;
  double exact_energy = 0.0;
  double vqe_energy = 0.0;
  double gap = 0.0;  // vqe - exact
};

struct TableRow {
  std::string name;
  int dim = 0;
  int n_qubits = 0;
  int pauli_terms = 0;
  double exact_energy = 0.0;
  double vqe_energy = 0.0;
};

// ground energy by exact diagonalization of the unpadded physical matrix
EdReport run_ed(const RunConfig& config);
// padded VQE run with trace and summary artifacts
VqeReport run_vqe(const RunConfig& config);
// Pauli decomposition with unit identity padding (lambda = 1)
PauliReport run_pauli(const RunConfig& config);
// chemical potential sweep on the triangle; unpadded exact, safe-padded VQE
std::vector<EosPoint> run_eos(const RunConfig& config);
// the three reference systems side by side
std::vector<TableRow> run_tables(const RunConfig& config);

int eos_grid_count(double mu_start, double mu_end, double mu_step);
double safe_padding_lambda(double m, double mu);

// entry point used by the command line binary; returns the process exit code
int harness_main(int argc, char** argv);
