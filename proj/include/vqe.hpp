#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "linalg.hpp"
#include "pauli.hpp"

enum class Entanglement { Full, Linear };
enum class OptimizerKind { GradientQuasiNewton, NelderMeadLike };

// hardware-efficient circuit: [Ry layer, Rz layer], then depth times
// [entangler block, Ry layer, Rz layer]
struct Ansatz {
  int n_qubits = 0;
  int depth = 0;
  Entanglement entanglement = Entanglement::Full;
  std::vector<std::pair<int, int>> pairs;  // (control, target) per entangler block
  int param_count = 0;
};

Ansatz build_ansatz(int n_qubits, int depth, Entanglement mode);

// qubit 0 is the most significant tensor factor; starts from |0...0>
StateVector prepare_state(const Ansatz& ansatz, const std::vector<double>& params);

// real part of <v|H|v> / <v|v>; throws when the imaginary residue exceeds 1e-10
double expectation(const StateVector& state, const OperatorMatrix& h);

// term-by-term <psi|P|psi> without forming the dense sum
double expectation_pauli(const StateVector& state, const PauliSum& sum);

// parameter-shift rule: dE/dtheta_k = (E(theta_k + pi/2) - E(theta_k - pi/2)) / 2
std::vector<double> gradient(const OperatorMatrix& h, const Ansatz& ansatz,
                             const std::vector<double>& params);

struct TracePoint {
  long long evaluation = 0;  // 1-based
  double energy = 0.0;
};

struct MinimizeConfig {
  OptimizerKind optimizer = OptimizerKind::GradientQuasiNewton;
  int max_iterations = 600;
  int restarts = 5;
  std::uint64_t seed = 0;
};

struct VqeResult {
  double energy = 0.0;
  std::vector<double> optimal_params;
  std::vector<TracePoint> trace;  // every energy evaluation, final entry = energy
  long long evaluations = 0;
  int restarts_used = 0;
  std::uint64_t seed = 0;
  bool converged = false;
};

// best of `restarts` seeded starts; initial angles uniform in [-pi, pi) drawn
// from mt19937_64(seed + restart index). deterministic for fixed inputs.
VqeResult minimize(const OperatorMatrix& h, const Ansatz& ansatz, const MinimizeConfig& config);
