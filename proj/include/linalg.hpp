#pragma once

#include <complex>
#include <stdexcept>
#include <string>
#include <vector>

using cdouble = std::complex<double>;

// numerical failures (non-convergence, hermiticity violations, size limits)
struct numeric_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

inline constexpr int kMaxMatrixDim = 4096;

// dense complex square matrix, row-major
struct OperatorMatrix {
  int dim = 0;
  std::vector<cdouble> a;

  OperatorMatrix() = default;
  explicit OperatorMatrix(int d) : dim(d), a(static_cast<size_t>(d) * static_cast<size_t>(d)) {}

  cdouble& at(int i, int j) { return a[static_cast<size_t>(i) * dim + j]; }
  const cdouble& at(int i, int j) const { return a[static_cast<size_t>(i) * dim + j]; }

  static OperatorMatrix zero(int d) { return OperatorMatrix(d); }
  static OperatorMatrix identity(int d);
};

struct StateVector {
  int dim = 0;
  std::vector<cdouble> v;

  StateVector() = default;
  explicit StateVector(int d) : dim(d), v(static_cast<size_t>(d)) {}

  double norm() const;
};

OperatorMatrix kron(const OperatorMatrix& a, const OperatorMatrix& b);
OperatorMatrix dagger(const OperatorMatrix& a);
StateVector matvec(const OperatorMatrix& a, const StateVector& x);

OperatorMatrix mat_mul(const OperatorMatrix& a, const OperatorMatrix& b);
OperatorMatrix mat_add(const OperatorMatrix& a, const OperatorMatrix& b);
// y += alpha * x, elementwise on matrices
void mat_axpy(OperatorMatrix& y, cdouble alpha, const OperatorMatrix& x);
OperatorMatrix mat_scale(cdouble alpha, const OperatorMatrix& a);

// max elementwise |a - a^dagger|
double hermiticity_defect(const OperatorMatrix& a);
// max elementwise |a - b|
double max_abs_diff(const OperatorMatrix& a, const OperatorMatrix& b);
double max_abs_entry(const OperatorMatrix& a);

// diag(a, lambda * I) extended to target_dim
OperatorMatrix direct_sum_pad(const OperatorMatrix& a, int target_dim, double lambda);

struct EighResult {
  std::vector<double> eigenvalues;  // ascending
  OperatorMatrix eigenvectors;      // column k pairs with eigenvalues[k]
};

// dense Hermitian eigensolver (cyclic complex Jacobi).
// eigenvectors come out orthonormal; each column's largest-magnitude entry is
// rotated to the positive real axis so repeated runs give identical output.
EighResult eigh(const OperatorMatrix& a);
