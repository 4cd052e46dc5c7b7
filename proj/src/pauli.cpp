#include "pauli.hpp"

#include <bit>
#include <cmath>
#include <cstdint>
#include <cstdio>

namespace {

bool is_power_of_two(int d) { return d > 0 && (d & (d - 1)) == 0; }

// P|c> = phase(c) |c XOR xmask> with phase(c) = i^{n_y} (-1)^{popcount(c & zymask)},
// where xmask flags X/Y characters and zymask flags Y/Z characters.
struct LabelMasks {
  uint32_t xmask = 0;
  uint32_t zymask = 0;
  int n_y = 0;
};

LabelMasks masks_for(const std::string& label) {
  LabelMasks m;
  int n = static_cast<int>(label.size());
  for (int q = 0; q < n; ++q) {
    uint32_t bit = 1u << (n - 1 - q);  // qubit 0 is the most significant factor
    switch (label[q]) {
      case 'I': break;
      case 'X': m.xmask |= bit; break;
      case 'Y': m.xmask |= bit; m.zymask |= bit; ++m.n_y; break;
      case 'Z': m.zymask |= bit; break;
      default: throw std::invalid_argument("pauli label: bad character");
    }
  }
  return m;
}

cdouble quadrant_phase(int n_y) {
  switch (n_y & 3) {
    case 0: return {1.0, 0.0};
    case 1: return {0.0, 1.0};
    case 2: return {-1.0, 0.0};
    default: return {0.0, -1.0};
  }
}

// Tr(P H) accumulated along the single nonzero diagonal of P
cdouble pauli_trace(const OperatorMatrix& h, const LabelMasks& m) {
  uint32_t d = static_cast<uint32_t>(h.dim);
  cdouble acc = 0.0;
  for (uint32_t c = 0; c < d; ++c) {
    cdouble entry = h.a[static_cast<size_t>(c) * d + (c ^ m.xmask)];
    if (std::popcount(c & m.zymask) & 1)
      acc -= entry;
    else
      acc += entry;
  }
  return quadrant_phase(m.n_y) * acc;
}

}  // namespace

PauliSum decompose(const OperatorMatrix& h, double threshold) {
  if (!is_power_of_two(h.dim))
    throw std::invalid_argument("decompose: dimension " + std::to_string(h.dim) +
                                " is not a power of two");
  int n = 0;
  while ((1 << n) < h.dim) ++n;

  PauliSum sum;
  sum.n_qubits = n;
  std::string label(static_cast<size_t>(n), 'I');
  const char alphabet[4] = {'I', 'X', 'Y', 'Z'};
  uint64_t total = 1;
  for (int q = 0; q < n; ++q) total *= 4;

  for (uint64_t idx = 0; idx < total; ++idx) {
    uint64_t rest = idx;
    for (int q = n - 1; q >= 0; --q) {
      label[static_cast<size_t>(q)] = alphabet[rest & 3];
      rest >>= 2;
    }
    cdouble tr = pauli_trace(h, masks_for(label));
    cdouble coeff = tr / static_cast<double>(h.dim);
    if (std::abs(coeff.imag()) >= 1e-12)
      throw numeric_error("decompose: projection onto " + label +
                          " has imaginary part " + std::to_string(coeff.imag()));
    if (std::abs(coeff.real()) > threshold)
      sum.terms.push_back({label, coeff.real()});
  }
  return sum;  // labels were visited in lexicographic order, so terms are sorted
}

OperatorMatrix reconstruct(const PauliSum& sum) {
  uint32_t d = 1u << sum.n_qubits;
  OperatorMatrix m(static_cast<int>(d));
  for (const PauliTerm& term : sum.terms) {
    if (static_cast<int>(term.label.size()) != sum.n_qubits)
      throw std::invalid_argument("reconstruct: label length mismatch");
    LabelMasks masks = masks_for(term.label);
    cdouble base = term.coefficient * quadrant_phase(masks.n_y);
    for (uint32_t c = 0; c < d; ++c) {
      cdouble value = (std::popcount(c & masks.zymask) & 1) ? -base : base;
      m.a[static_cast<size_t>(c ^ masks.xmask) * d + c] += value;
    }
  }
  return m;
}

int term_count(const PauliSum& sum) { return static_cast<int>(sum.terms.size()); }

std::string format_real(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::string serialize(const PauliSum& sum) {
  std::string out;
  for (const PauliTerm& term : sum.terms) {
    out += term.label;
    out += ' ';
    out += format_real(term.coefficient);
    out += '\n';
  }
  return out;
}
