#include "linalg.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

OperatorMatrix OperatorMatrix::identity(int d) {
  OperatorMatrix m(d);
  for (int i = 0; i < d; ++i) m.at(i, i) = 1.0;
  return m;
}

double StateVector::norm() const {
  double s = 0.0;
  for (const cdouble& z : v) s += std::norm(z);
  return std::sqrt(s);
}

OperatorMatrix kron(const OperatorMatrix& a, const OperatorMatrix& b) {
  if (a.dim < 1 || b.dim < 1) throw std::invalid_argument("kron: empty operand");
  long long d = static_cast<long long>(a.dim) * b.dim;
  if (d > kMaxMatrixDim)
    throw numeric_error("kron: result dimension " + std::to_string(d) + " exceeds maximum " +
                        std::to_string(kMaxMatrixDim));
  OperatorMatrix r(static_cast<int>(d));
  for (int i = 0; i < a.dim; ++i)
    for (int j = 0; j < a.dim; ++j) {
      cdouble aij = a.at(i, j);
      if (aij == cdouble(0.0, 0.0)) continue;
      for (int k = 0; k < b.dim; ++k)
        for (int l = 0; l < b.dim; ++l)
          r.at(i * b.dim + k, j * b.dim + l) = aij * b.at(k, l);
    }
  return r;
}

OperatorMatrix dagger(const OperatorMatrix& a) {
  OperatorMatrix r(a.dim);
  for (int i = 0; i < a.dim; ++i)
    for (int j = 0; j < a.dim; ++j) r.at(i, j) = std::conj(a.at(j, i));
  return r;
}

StateVector matvec(const OperatorMatrix& a, const StateVector& x) {
  if (a.dim != x.dim) throw std::invalid_argument("matvec: dimension mismatch");
  StateVector y(a.dim);
  for (int i = 0; i < a.dim; ++i) {
    const cdouble* row = &a.a[static_cast<size_t>(i) * a.dim];
    cdouble s = 0.0;
    for (int j = 0; j < a.dim; ++j) s += row[j] * x.v[j];
    y.v[i] = s;
  }
  return y;
}

OperatorMatrix mat_mul(const OperatorMatrix& a, const OperatorMatrix& b) {
  if (a.dim != b.dim) throw std::invalid_argument("mat_mul: dimension mismatch");
  int n = a.dim;
  OperatorMatrix r(n);
  for (int i = 0; i < n; ++i) {
    for (int k = 0; k < n; ++k) {
      cdouble aik = a.at(i, k);
      if (aik == cdouble(0.0, 0.0)) continue;
      const cdouble* brow = &b.a[static_cast<size_t>(k) * n];
      cdouble* rrow = &r.a[static_cast<size_t>(i) * n];
      for (int j = 0; j < n; ++j) rrow[j] += aik * brow[j];
    }
  }
  return r;
}

OperatorMatrix mat_add(const OperatorMatrix& a, const OperatorMatrix& b) {
  if (a.dim != b.dim) throw std::invalid_argument("mat_add: dimension mismatch");
  OperatorMatrix r = a;
  for (size_t i = 0; i < r.a.size(); ++i) r.a[i] += b.a[i];
  return r;
}

void mat_axpy(OperatorMatrix& y, cdouble alpha, const OperatorMatrix& x) {
  if (y.dim != x.dim) throw std::invalid_argument("mat_axpy: dimension mismatch");
  for (size_t i = 0; i < y.a.size(); ++i) y.a[i] += alpha * x.a[i];
}

OperatorMatrix mat_scale(cdouble alpha, const OperatorMatrix& a) {
  OperatorMatrix r = a;
  for (cdouble& z : r.a) z *= alpha;
  return r;
}

double hermiticity_defect(const OperatorMatrix& a) {
  double worst = 0.0;
  for (int i = 0; i < a.dim; ++i)
    for (int j = i; j < a.dim; ++j)
      worst = std::max(worst, std::abs(a.at(i, j) - std::conj(a.at(j, i))));
  return worst;
}

double max_abs_diff(const OperatorMatrix& a, const OperatorMatrix& b) {
  if (a.dim != b.dim) throw std::invalid_argument("max_abs_diff: dimension mismatch");
  double worst = 0.0;
  for (size_t i = 0; i < a.a.size(); ++i) worst = std::max(worst, std::abs(a.a[i] - b.a[i]));
  return worst;
}

double max_abs_entry(const OperatorMatrix& a) {
  double worst = 0.0;
  for (const cdouble& z : a.a) worst = std::max(worst, std::abs(z));
  return worst;
}

OperatorMatrix direct_sum_pad(const OperatorMatrix& a, int target_dim, double lambda) {
  if (target_dim < a.dim)
    throw std::invalid_argument("direct_sum_pad: target dimension " + std::to_string(target_dim) +
                                " below matrix dimension " + std::to_string(a.dim));
  if (target_dim > kMaxMatrixDim)
    throw numeric_error("direct_sum_pad: target dimension exceeds maximum");
  OperatorMatrix r(target_dim);
  for (int i = 0; i < a.dim; ++i)
    for (int j = 0; j < a.dim; ++j) r.at(i, j) = a.at(i, j);
  for (int i = a.dim; i < target_dim; ++i) r.at(i, i) = lambda;
  return r;
}

namespace {

// one two-sided Jacobi rotation zeroing a(p,q), applied to a and accumulated in v.
// the 2x2 block [[alpha, gamma],[conj(gamma), beta]] is diagonalized by
// u = [[c, -s e^{i phi}],[s e^{-i phi}, c]] with gamma = |gamma| e^{i phi} and
// tan(2 theta) = 2|gamma| / (alpha - beta).
void jacobi_rotate(OperatorMatrix& a, OperatorMatrix& v, int p, int q) {
  cdouble gamma = a.at(p, q);
  double b = std::abs(gamma);
  if (b == 0.0) return;
  double alpha = a.at(p, p).real();
  double beta = a.at(q, q).real();
  double tau = (alpha - beta) / (2.0 * b);
  double t;
  if (tau >= 0.0)
    t = 1.0 / (tau + std::sqrt(1.0 + tau * tau));
  else
    t = -1.0 / (-tau + std::sqrt(1.0 + tau * tau));
  double c = 1.0 / std::sqrt(1.0 + t * t);
  double s = t * c;
  cdouble phase = gamma / b;
  cdouble sp = s * phase;             // s e^{i phi}
  cdouble spc = s * std::conj(phase); // s e^{-i phi}

  int n = a.dim;
  // columns: col_p <- c col_p + s e^{-i phi} col_q ; col_q <- -s e^{i phi} col_p + c col_q
  for (int k = 0; k < n; ++k) {
    cdouble akp = a.at(k, p), akq = a.at(k, q);
    a.at(k, p) = c * akp + spc * akq;
    a.at(k, q) = -sp * akp + c * akq;
  }
  // rows: row_p <- c row_p + s e^{i phi} row_q ; row_q <- -s e^{-i phi} row_p + c row_q
  for (int k = 0; k < n; ++k) {
    cdouble apk = a.at(p, k), aqk = a.at(q, k);
    a.at(p, k) = c * apk + sp * aqk;
    a.at(q, k) = -spc * apk + c * aqk;
  }
  a.at(p, q) = 0.0;
  a.at(q, p) = 0.0;
  for (int k = 0; k < n; ++k) {
    cdouble vkp = v.at(k, p), vkq = v.at(k, q);
    v.at(k, p) = c * vkp + spc * vkq;
    v.at(k, q) = -sp * vkp + c * vkq;
  }
}

double max_offdiag(const OperatorMatrix& a) {
  double worst = 0.0;
  for (int i = 0; i < a.dim; ++i)
    for (int j = i + 1; j < a.dim; ++j) worst = std::max(worst, std::abs(a.at(i, j)));
  return worst;
}

}  // namespace

EighResult eigh(const OperatorMatrix& input) {
  if (input.dim < 1) throw std::invalid_argument("eigh: empty matrix");
  if (input.dim > kMaxMatrixDim) throw numeric_error("eigh: dimension exceeds maximum");
  double defect = hermiticity_defect(input);
  if (defect > 1e-10)
    throw numeric_error("eigh: input not Hermitian, defect " + std::to_string(defect));

  int n = input.dim;
  // symmetrize exactly so sub-tolerance asymmetry cannot drift through the sweeps
  OperatorMatrix a(n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) a.at(i, j) = 0.5 * (input.at(i, j) + std::conj(input.at(j, i)));
  OperatorMatrix v = OperatorMatrix::identity(n);

  double scale = std::max(1.0, max_abs_entry(a));
  double stop = 1e-14 * scale;
  const int max_sweeps = 60;
  bool converged = (n == 1);
  for (int sweep = 0; sweep < max_sweeps && !converged; ++sweep) {
    // skip rotations whose pivot is already negligible this sweep
    double thresh = std::max(stop, 1e-2 * max_offdiag(a) / n);
    for (int p = 0; p < n - 1; ++p)
      for (int q = p + 1; q < n; ++q)
        if (std::abs(a.at(p, q)) > thresh) jacobi_rotate(a, v, p, q);
    if (max_offdiag(a) <= stop) converged = true;
  }
  if (!converged)
    throw numeric_error("eigh: Jacobi sweeps exhausted, residual off-diagonal " +
                        std::to_string(max_offdiag(a)));

  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::vector<double> diag(n);
  for (int i = 0; i < n; ++i) diag[i] = a.at(i, i).real();
  std::stable_sort(order.begin(), order.end(), [&](int x, int y) { return diag[x] < diag[y]; });

  EighResult r;
  r.eigenvalues.resize(n);
  r.eigenvectors = OperatorMatrix(n);
  for (int k = 0; k < n; ++k) {
    int src = order[k];
    r.eigenvalues[k] = diag[src];
    // fix the phase: largest-magnitude component made real and positive
    int imax = 0;
    double best = -1.0;
    for (int i = 0; i < n; ++i) {
      double m = std::abs(v.at(i, src));
      if (m > best) {
        best = m;
        imax = i;
      }
    }
    cdouble z = v.at(imax, src);
    cdouble rot = (best > 0.0) ? std::conj(z) / best : cdouble(1.0, 0.0);
    for (int i = 0; i < n; ++i) r.eigenvectors.at(i, k) = rot * v.at(i, src);
  }
  return r;
}
