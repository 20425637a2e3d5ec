#pragma once

// Bivariate polynomials of bounded total degree on the bounding box
// [0,1] x [0, ymax], represented in the tensor shifted-Legendre basis
//   e_{ij}(x,y) = P_i(2x - 1) * P_j(2y/ymax - 1),   i + j <= n,
// together with the coefficient-space derivative operators, Gram matrices
// over a cuspidal domain (or its x >= x_lo truncation), and triangular
// orthonormalizing transforms.

#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "domain.hpp"
#include "numeric.hpp"

namespace mlab::quad {
struct QuadSpec;  // defined in quad.hpp
}

namespace mlab::polybasis {

enum class Axis { X, Y };

// Hard ceiling on the total degree; beyond it the Gram factor is too
// ill-conditioned in double precision to certify results, and requests are
// rejected rather than answered inaccurately.
inline constexpr int kDegreeCap = 16;

class TensorBasis {
public:
  // degree in [0, kDegreeCap], ymax > 0.
  TensorBasis(int degree, double ymax);

  int degree() const { return degree_; }
  double y_max() const { return ymax_; }
  int size() const { return (degree_ + 1) * (degree_ + 2) / 2; }

  // Functions are ordered by total degree, then by x-degree:
  // t = d(d+1)/2 + i with d = i + j.
  int index_of(int i, int j) const;
  std::pair<int, int> powers(int t) const;  // (i, j)

  // All basis values at a point; out.size() == size().
  void eval_into(double x, double y, std::span<double> out) const;

  bool operator==(const TensorBasis& o) const {
    return degree_ == o.degree_ && ymax_ == o.ymax_;
  }

private:
  int degree_;
  double ymax_;
};

class Poly2 {
public:
  Poly2(TensorBasis basis, std::vector<double> coeffs);

  const TensorBasis& basis() const { return basis_; }
  std::span<const double> coeffs() const { return coeffs_; }
  double coeff(int i, int j) const;

  double eval(double x, double y) const;
  // Largest total degree (resp. y-degree) carrying a nonzero coefficient.
  int total_degree() const;
  int y_degree() const;

private:
  TensorBasis basis_;
  std::vector<double> coeffs_;
};

// Sparse coefficient-space form of d/dx or d/dy on a TensorBasis. The
// operator is nilpotent: degree+1 applications annihilate every polynomial.
class DiffOperator {
public:
  DiffOperator(const TensorBasis& basis, Axis axis);

  Axis axis() const { return axis_; }
  // out = D * c  (coefficients of the derivative).
  void apply(std::span<const double> c, std::span<double> out) const;
  // out = D^T * v (adjoint action on value/functional vectors).
  void apply_transpose(std::span<const double> v, std::span<double> out) const;

private:
  Axis axis_;
  int size_;
  // column t of D: the expansion of d(e_t) in the basis
  std::vector<std::vector<std::pair<int, double>>> cols_;
};

Poly2 differentiate(const Poly2& p, Axis axis);

struct Monomial {
  int i = 0, j = 0;   // powers of x and y
  double coef = 0.0;
};

// Exact change of basis from sum( coef * x^i y^j ); total degrees must not
// exceed kDegreeCap.
Poly2 from_monomials(std::span<const Monomial> terms, double ymax);

// Triangular square-root data of a quadrature-assembled Gram matrix:
// with column scaling S = diag(col_scale), R is the triangular factor of the
// weighted, scaled basis-evaluation matrix, so G ≈ S^{-1} R^T R S^{-1}.
struct GramFactor {
  numeric::Matrix r;
  std::vector<double> col_scale;
  double cond_estimate = 0.0;  // (max|r_ii| / min|r_ii|)^2
};

struct GramMatrix {
  int degree = 0;
  domain::Subdomain region;
  numeric::Matrix g;  // symmetric, size() x size()
  std::optional<GramFactor> factor;
};

// Inner-product matrix of the basis over the (possibly truncated) domain,
// assembled panel-by-panel in a fixed order with compensated summation.
// Carries its triangular factor for downstream orthonormalization.
GramMatrix gram(const domain::CuspidalDomain& d, const domain::Subdomain& sub,
                int degree, const quad::QuadSpec& spec);

struct BasisTransform {
  // columns of t are coefficient vectors of an orthonormal family
  numeric::Matrix t;
  double cond_estimate = 0.0;
};

// T with T^T G T = I. Uses the stored square-root factor when present,
// otherwise a Cholesky factorization of the explicit entries. Throws
// Error(Conditioning) when the condition estimate exceeds `cond_cap`.
BasisTransform orthonormalize(const GramMatrix& g, double cond_cap = 1e12);

}  // namespace mlab::polybasis
