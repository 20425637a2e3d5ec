#pragma once

// Small dense-linear-algebra and quadrature kernels shared by the modules.
// Everything here is deterministic: fixed operation order, no parallelism.

#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

namespace mlab::numeric {

// Compensated (Neumaier) accumulator; immune to cancellation between
// large intermediate partial sums.
class KahanSum {
public:
  void add(double x) {
    double t = sum_ + x;
    if (std::abs(sum_) >= std::abs(x))
      comp_ += (sum_ - t) + x;
    else
      comp_ += (x - t) + sum_;
    sum_ = t;
  }
  double value() const { return sum_ + comp_; }

private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

struct GaussRule {
  std::vector<double> nodes;    // on (-1,1), ascending
  std::vector<double> weights;  // sum = 2
};

// Gauss-Legendre rule of the given order (exact through degree 2*order-1).
// Cached per order; safe to call concurrently.
const GaussRule& gauss_legendre(int order);

// Dense row-major matrix, minimal surface.
class Matrix {
public:
  Matrix() = default;
  Matrix(int rows, int cols) : rows_(rows), cols_(cols), a_(size_t(rows) * cols, 0.0) {}
  int rows() const { return rows_; }
  int cols() const { return cols_; }
  double& operator()(int i, int j) { return a_[size_t(i) * cols_ + j]; }
  double operator()(int i, int j) const { return a_[size_t(i) * cols_ + j]; }
  double* row(int i) { return a_.data() + size_t(i) * cols_; }
  const double* row(int i) const { return a_.data() + size_t(i) * cols_; }

private:
  int rows_ = 0, cols_ = 0;
  std::vector<double> a_;
};

// In-place Householder triangularisation of `m` (rows >= cols); on return the
// upper triangle of the leading cols x cols block is the R factor (Q is not
// formed). Used both for one-shot QR and for streaming [R; block] updates.
void householder_triangularize(Matrix& m);

// Incremental QR of a tall matrix presented block-by-block: after absorbing
// blocks B1, B2, ... the r() matrix is the triangular factor of [B1; B2; ...]
// up to row signs. Deterministic given the block order.
class StreamingQR {
public:
  explicit StreamingQR(int cols);
  void absorb(const Matrix& block);  // block.cols() == cols
  const Matrix& r() const { return r_; }
  // max |r_ii| / min |r_ii|; infinity when a diagonal entry is exactly 0.
  double diag_ratio() const;

private:
  int cols_;
  bool seeded_ = false;
  Matrix r_;
};

// Solve R^T z = b (R upper triangular, nonsingular); z may alias b.
void solve_rt(const Matrix& r, std::span<const double> b, std::span<double> z);

// Solve R z = b.
void solve_r(const Matrix& r, std::span<const double> b, std::span<double> z);

// Eigenvalues of a symmetric matrix by cyclic Jacobi rotations, ascending.
// Off-diagonal mass is reduced below tol * frobenius_norm.
std::vector<double> jacobi_eigenvalues(Matrix a, double tol = 1e-12);

// Cholesky factor L (lower) of an SPD matrix; throws Error(Conditioning)
// when a pivot is not strictly positive.
Matrix cholesky(const Matrix& g);

// Minimum-residual solution of the least-squares problem A x = b via
// Householder QR; A.rows() >= A.cols() required.
std::vector<double> least_squares(Matrix a, std::vector<double> b);

}  // namespace mlab::numeric
