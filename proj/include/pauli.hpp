#pragma once

#include <string>
#include <vector>

#include "linalg.hpp"

// one weighted Pauli string; label char 0 acts on the most significant factor
struct PauliTerm {
  std::string label;
  double coefficient = 0.0;
};

struct PauliSum {
  int n_qubits = 0;
  std::vector<PauliTerm> terms;  // unique labels, sorted by label
};

// project H onto the Pauli string basis: coefficient = Tr(P H) / 2^n.
// terms with |coefficient| <= threshold are dropped. throws numeric_error when a
// projection has imaginary part >= 1e-12 (non-Hermitian input).
PauliSum decompose(const OperatorMatrix& h, double threshold);

OperatorMatrix reconstruct(const PauliSum& sum);

int term_count(const PauliSum& sum);

// one term per line, "<label> <coefficient>" with 17 significant digits
std::string serialize(const PauliSum& sum);

// 17-significant-digit shortest-round-trip style formatting used everywhere
std::string format_real(double x);
