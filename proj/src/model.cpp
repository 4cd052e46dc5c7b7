#include "model.hpp"

#include <cmath>
#include <numbers>

void LatticeSpec::validate() const {
  if (n_sites < 2 || n_sites > 4)
    throw std::invalid_argument("n_sites must be 2..4, got " + std::to_string(n_sites));
  if (n_links < 1) throw std::invalid_argument("n_links must be positive");
  if (topology == Topology::OpenChain && n_links != n_sites - 1)
    throw std::invalid_argument("n_links: open chain needs n_sites-1 links, got " +
                                std::to_string(n_links));
  if (topology == Topology::ClosedTriangle && (n_sites != 3 || n_links != 3))
    throw std::invalid_argument("topology: closed triangle needs n_sites = n_links = 3");
  if (stagger_offset != 0 && stagger_offset != 1)
    throw std::invalid_argument("stagger_offset must be 0 or 1");
}

int LatticeSpec::physical_dim() const {
  int d = 1;
  for (int i = 0; i < n_sites; ++i) d *= 2;
  for (int i = 0; i < n_links; ++i) d *= 3;
  return d;
}

OperatorMatrix clock_x() {
  OperatorMatrix x(3);
  x.at(0, 0) = -1.0;
  x.at(2, 2) = 1.0;
  return x;
}

OperatorMatrix sylvester() {
  const double r = 1.0 / std::sqrt(3.0);
  const cdouble w = std::polar(1.0, 2.0 * std::numbers::pi / 3.0);
  const cdouble wb = std::conj(w);
  OperatorMatrix s(3);
  s.at(0, 0) = r * w;
  s.at(0, 1) = r;
  s.at(0, 2) = r * wb;
  s.at(1, 0) = r;
  s.at(1, 1) = r;
  s.at(1, 2) = r;
  s.at(2, 0) = r * wb;
  s.at(2, 1) = r;
  s.at(2, 2) = r * w;
  return s;
}

OperatorMatrix clock_p() {
  OperatorMatrix s = sylvester();
  return mat_mul(mat_mul(dagger(s), clock_x()), s);
}

namespace {

int pow_int(int b, int e) {
  int r = 1;
  for (int i = 0; i < e; ++i) r *= b;
  return r;
}

}  // namespace

OperatorMatrix fermion_op(int j, int n_sites, int n_links) {
  if (j < 1 || j > n_sites) throw std::invalid_argument("fermion_op: site index out of range");
  OperatorMatrix sign(2);
  sign.at(0, 0) = 1.0;
  sign.at(1, 1) = -1.0;
  OperatorMatrix lower(2);
  lower.at(0, 1) = 1.0;

  OperatorMatrix r = OperatorMatrix::identity(1);
  for (int i = 1; i < j; ++i) r = kron(r, sign);
  r = kron(r, lower);
  for (int i = j; i < n_sites; ++i) r = kron(r, OperatorMatrix::identity(2));
  return kron(r, OperatorMatrix::identity(pow_int(3, n_links)));
}

std::pair<OperatorMatrix, OperatorMatrix> link_ops(int k, int n_sites, int n_links) {
  if (k < 1 || k > n_links) throw std::invalid_argument("link_ops: link index out of range");
  OperatorMatrix front = OperatorMatrix::identity(pow_int(2, n_sites));
  front = kron(front, OperatorMatrix::identity(pow_int(3, k - 1)));
  OperatorMatrix back = OperatorMatrix::identity(pow_int(3, n_links - k));
  OperatorMatrix a = kron(kron(front, clock_x()), back);
  OperatorMatrix e = kron(kron(front, clock_p()), back);
  return {std::move(a), std::move(e)};
}

ModelOperators build_operators(const LatticeSpec& spec) {
  spec.validate();
  ModelOperators ops;
  ops.physical_dim = spec.physical_dim();
  for (int j = 1; j <= spec.n_sites; ++j)
    ops.fermion_ops.push_back(fermion_op(j, spec.n_sites, spec.n_links));
  for (int k = 1; k <= spec.n_links; ++k) {
    auto [a, e] = link_ops(k, spec.n_sites, spec.n_links);
    ops.link_pos_ops.push_back(std::move(a));
    ops.link_field_ops.push_back(std::move(e));
  }
  return ops;
}

OperatorMatrix build_hamiltonian(const LatticeSpec& spec) {
  ModelOperators ops = build_operators(spec);
  int d = ops.physical_dim;
  OperatorMatrix h(d);

  for (const OperatorMatrix& e : ops.link_field_ops) mat_axpy(h, 0.5, mat_mul(e, e));

  for (int j = 1; j <= spec.n_sites; ++j) {
    const OperatorMatrix& c = ops.fermion_ops[j - 1];
    OperatorMatrix n = mat_mul(dagger(c), c);
    double sgn = ((j - 1 + spec.stagger_offset) % 2 == 1) ? -1.0 : 1.0;
    mat_axpy(h, spec.m * sgn + spec.mu, n);
  }

  // exp(i g 2pi/3 A) is diagonal in the link basis: diag(e^{-i phi}, 1, e^{+i phi})
  double phi = spec.g * 2.0 * std::numbers::pi / 3.0;
  for (int k = 1; k <= spec.n_links; ++k) {
    int tail = k, head = k + 1;
    if (spec.topology == Topology::ClosedTriangle && k == spec.n_links) {
      tail = spec.n_links;
      head = 1;
    }
    const OperatorMatrix& apos = ops.link_pos_ops[k - 1];
    OperatorMatrix u(d);
    for (int i = 0; i < d; ++i) u.at(i, i) = std::polar(1.0, phi * apos.at(i, i).real());
    OperatorMatrix t = mat_mul(u, mat_mul(dagger(ops.fermion_ops[head - 1]), ops.fermion_ops[tail - 1]));
    cdouble half_i(0.0, 0.5 * spec.hopping_scale);
    mat_axpy(h, half_i, t);
    mat_axpy(h, std::conj(half_i), dagger(t));
  }
  return h;
}

std::pair<OperatorMatrix, int> qubitize(const OperatorMatrix& h, double lambda) {
  double defect = hermiticity_defect(h);
  if (defect > 1e-10)
    throw numeric_error("qubitize: input not Hermitian, defect " + std::to_string(defect));
  int n_qubits = 0;
  int target = 1;
  while (target < h.dim) {
    target *= 2;
    ++n_qubits;
  }
  return {direct_sum_pad(h, target, lambda), n_qubits};
}
