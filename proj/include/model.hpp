#pragma once

#include <utility>
#include <vector>

#include "linalg.hpp"

enum class Topology { OpenChain, ClosedTriangle };

// one lattice instance: fermion sites joined by Z3 gauge links
struct LatticeSpec {
  int n_sites = 3;
  int n_links = 3;
  Topology topology = Topology::ClosedTriangle;
  double m = 0.0;            // staggered mass
  double g = 0.15;           // gauge coupling in exp(i g 2pi/3 A)
  double mu = 0.0;           // chemical potential
  double padding_lambda = 1.0;
  int stagger_offset = 1;    // 1: site 1 carries -m, 0: site 1 carries +m
  double hopping_scale = 1.0;  // test hook, 1.0 for physics

  void validate() const;  // throws std::invalid_argument naming the field
  int physical_dim() const;
};

struct ModelOperators {
  std::vector<OperatorMatrix> fermion_ops;     // c_j, one per site
  std::vector<OperatorMatrix> link_pos_ops;    // A_k
  std::vector<OperatorMatrix> link_field_ops;  // E_k
  int physical_dim = 0;
};

// 3x3 clock position operator diag(-1, 0, 1)
OperatorMatrix clock_x();
// 3x3 discrete Fourier style unitary relating position and field bases
OperatorMatrix sylvester();
// conjugate field operator P = S^dag X S
OperatorMatrix clock_p();

// c_j as an explicit matrix: (j-1) sign factors diag(1,-1), then [[0,1],[0,0]],
// then identities, fermionic factors leftmost, link factors rightmost
OperatorMatrix fermion_op(int j, int n_sites, int n_links);
// (A_k, E_k) lifted to the full space
std::pair<OperatorMatrix, OperatorMatrix> link_ops(int k, int n_sites, int n_links);

ModelOperators build_operators(const LatticeSpec& spec);

// H = sum_k 1/2 E_k^2 + m sum_j (-1)^j n_j + mu sum_j n_j
//     + (i/2) sum_k (e^{i g 2pi/3 A_k} c_head^dag c_tail - h.c.)
// open chain: link k joins sites (k, k+1); triangle: link 3 joins (3, 1)
OperatorMatrix build_hamiltonian(const LatticeSpec& spec);

// pad to the next power of two with a lambda block; returns (padded, n_qubits)
std::pair<OperatorMatrix, int> qubitize(const OperatorMatrix& h, double lambda);
