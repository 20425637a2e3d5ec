#include "polybasis.hpp"

#include <cmath>
#include <string>

#include "errors.hpp"
#include "quad.hpp"

namespace mlab::polybasis {

namespace {

// P_0..P_n at u via the Legendre three-term recurrence.
void legendre_values(int n, double u, std::span<double> out) {
  out[0] = 1.0;
  if (n >= 1) out[1] = u;
  for (int m = 2; m <= n; ++m)
    out[m] = ((2.0 * m - 1.0) * u * out[m - 1] - (m - 1.0) * out[m - 2]) / m;
}

}  // namespace

TensorBasis::TensorBasis(int degree, double ymax)
    : degree_(degree), ymax_(ymax) {
  require(degree >= 0, ErrorCode::ParameterDomain,
          "basis: degree must be >= 0");
  require(degree <= kDegreeCap, ErrorCode::DegreeCap,
          "basis: degree " + std::to_string(degree) +
              " exceeds the supported cap " + std::to_string(kDegreeCap));
  require(std::isfinite(ymax) && ymax > 0.0, ErrorCode::ParameterDomain,
          "basis: ymax must be positive");
}

int TensorBasis::index_of(int i, int j) const {
  require(i >= 0 && j >= 0 && i + j <= degree_, ErrorCode::ParameterDomain,
          "basis: index (" + std::to_string(i) + "," + std::to_string(j) +
              ") outside degree " + std::to_string(degree_));
  int d = i + j;
  return d * (d + 1) / 2 + i;
}

std::pair<int, int> TensorBasis::powers(int t) const {
  require(t >= 0 && t < size(), ErrorCode::ParameterDomain,
          "basis: flat index out of range");
  int d = 0;
  while ((d + 1) * (d + 2) / 2 <= t) ++d;
  int i = t - d * (d + 1) / 2;
  return {i, d - i};
}

void TensorBasis::eval_into(double x, double y, std::span<double> out) const {
  const int n = degree_;
  double lx[kDegreeCap + 1], ly[kDegreeCap + 1];
  legendre_values(n, 2.0 * x - 1.0, {lx, size_t(n) + 1});
  legendre_values(n, 2.0 * y / ymax_ - 1.0, {ly, size_t(n) + 1});
  int t = 0;
  for (int d = 0; d <= n; ++d)
    for (int i = 0; i <= d; ++i, ++t) out[t] = lx[i] * ly[d - i];
}

Poly2::Poly2(TensorBasis basis, std::vector<double> coeffs)
    : basis_(basis), coeffs_(std::move(coeffs)) {
  require(int(coeffs_.size()) == basis_.size(), ErrorCode::ParameterDomain,
          "poly: coefficient count does not match the basis size");
}

double Poly2::coeff(int i, int j) const {
  return coeffs_[basis_.index_of(i, j)];
}

double Poly2::eval(double x, double y) const {
  const int n = basis_.degree();
  double lx[kDegreeCap + 1], ly[kDegreeCap + 1];
  legendre_values(n, 2.0 * x - 1.0, {lx, size_t(n) + 1});
  legendre_values(n, 2.0 * y / basis_.y_max() - 1.0, {ly, size_t(n) + 1});
  double acc = 0.0;
  int t = 0;
  for (int d = 0; d <= n; ++d)
    for (int i = 0; i <= d; ++i, ++t) acc += coeffs_[t] * lx[i] * ly[d - i];
  return acc;
}

int Poly2::total_degree() const {
  int deg = 0, t = 0;
  for (int d = 0; d <= basis_.degree(); ++d)
    for (int i = 0; i <= d; ++i, ++t)
      if (coeffs_[t] != 0.0) deg = d;
  return deg;
}

int Poly2::y_degree() const {
  int deg = 0, t = 0;
  for (int d = 0; d <= basis_.degree(); ++d)
    for (int i = 0; i <= d; ++i, ++t)
      if (coeffs_[t] != 0.0) deg = std::max(deg, d - i);
  return deg;
}

DiffOperator::DiffOperator(const TensorBasis& basis, Axis axis)
    : axis_(axis), size_(basis.size()), cols_(basis.size()) {
  // d/du P_m(u) = sum over l < m, m-l odd, of (2l+1) P_l(u); the chain rule
  // contributes 2 for x in [0,1] and 2/ymax for y in [0,ymax].
  const double scale = axis == Axis::X ? 2.0 : 2.0 / basis.y_max();
  for (int t = 0; t < size_; ++t) {
    auto [i, j] = basis.powers(t);
    int m = axis == Axis::X ? i : j;
    for (int l = m - 1; l >= 0; l -= 2) {
      int u = axis == Axis::X ? basis.index_of(l, j) : basis.index_of(i, l);
      cols_[t].emplace_back(u, scale * (2.0 * l + 1.0));
    }
  }
}

void DiffOperator::apply(std::span<const double> c,
                         std::span<double> out) const {
  for (int u = 0; u < size_; ++u) out[u] = 0.0;
  for (int t = 0; t < size_; ++t) {
    if (c[t] == 0.0) continue;
    for (const auto& [u, coef] : cols_[t]) out[u] += coef * c[t];
  }
}

void DiffOperator::apply_transpose(std::span<const double> v,
                                   std::span<double> out) const {
  for (int t = 0; t < size_; ++t) {
    double s = 0.0;
    for (const auto& [u, coef] : cols_[t]) s += coef * v[u];
    out[t] = s;
  }
}

Poly2 differentiate(const Poly2& p, Axis axis) {
  DiffOperator d(p.basis(), axis);
  std::vector<double> out(p.coeffs().size());
  d.apply(p.coeffs(), out);
  return Poly2(p.basis(), std::move(out));
}

namespace {

// multiply-by-coordinate in 1-D shifted Legendre coefficients;
// x = (u+1)/2 * width + 0 with width 1 for x, ymax for y.
std::vector<double> mul_coordinate(const std::vector<double>& c, double width) {
  std::vector<double> out(c.size() + 1, 0.0);
  for (size_t m = 0; m < c.size(); ++m) {
    if (c[m] == 0.0) continue;
    double w = 0.5 * width * c[m];
    out[m + 1] += w * (double(m) + 1.0) / (2.0 * double(m) + 1.0);
    out[m] += w;
    if (m > 0) out[m - 1] += w * double(m) / (2.0 * double(m) + 1.0);
  }
  return out;
}

}  // namespace

Poly2 from_monomials(std::span<const Monomial> terms, double ymax) {
  int deg = 0;
  for (const auto& t : terms) {
    require(t.i >= 0 && t.j >= 0, ErrorCode::ParameterDomain,
            "from_monomials: negative powers");
    require(t.i + t.j <= kDegreeCap, ErrorCode::DegreeCap,
            "from_monomials: total degree " + std::to_string(t.i + t.j) +
                " exceeds the supported cap " + std::to_string(kDegreeCap));
    deg = std::max(deg, t.i + t.j);
  }
  TensorBasis basis(deg, ymax);
  std::vector<double> coeffs(basis.size(), 0.0);
  for (const auto& term : terms) {
    std::vector<double> vx{1.0}, vy{1.0};
    for (int q = 0; q < term.i; ++q) vx = mul_coordinate(vx, 1.0);
    for (int q = 0; q < term.j; ++q) vy = mul_coordinate(vy, ymax);
    for (size_t i = 0; i < vx.size(); ++i)
      for (size_t j = 0; j < vy.size(); ++j)
        if (vx[i] != 0.0 && vy[j] != 0.0)
          coeffs[basis.index_of(int(i), int(j))] +=
              term.coef * vx[i] * vy[j];
  }
  return Poly2(basis, std::move(coeffs));
}

GramMatrix gram(const domain::CuspidalDomain& d, const domain::Subdomain& sub,
                int degree, const quad::QuadSpec& spec) {
  spec.validate();
  TensorBasis basis(degree, d.y_max());
  const int n = basis.size();
  const int s_order = quad::exact_s_order(spec, d.k(), 2 * degree);

  // entries with compensated accumulation, upper triangle
  std::vector<numeric::KahanSum> acc(size_t(n) * (n + 1) / 2);
  std::vector<double> b(n);
  quad::visit_panels(d, sub.x_lo, spec, s_order, 1,
                     [&](const std::vector<quad::QuadNode>& nodes) {
                       for (const auto& nd : nodes) {
                         basis.eval_into(nd.x, nd.y, b);
                         size_t idx = 0;
                         for (int u = 0; u < n; ++u) {
                           double wu = nd.w * b[u];
                           for (int v = u; v < n; ++v, ++idx)
                             acc[idx].add(wu * b[v]);
                         }
                       }
                     });

  GramMatrix g;
  g.degree = degree;
  g.region = sub;
  g.g = numeric::Matrix(n, n);
  {
    size_t idx = 0;
    for (int u = 0; u < n; ++u)
      for (int v = u; v < n; ++v, ++idx) {
        double val = acc[idx].value();
        g.g(u, v) = val;
        g.g(v, u) = val;
      }
  }

  // square-root factor: QR of the weighted evaluation matrix with columns
  // scaled to unit norm (scales read off the accumulated diagonal)
  GramFactor factor;
  factor.col_scale.resize(n);
  for (int t = 0; t < n; ++t) {
    double diag = g.g(t, t);
    require(diag > 0.0, ErrorCode::Conditioning,
            "gram: zero diagonal entry at degree " + std::to_string(degree));
    factor.col_scale[t] = 1.0 / std::sqrt(diag);
  }
  numeric::StreamingQR qr(n);
  numeric::Matrix block;
  quad::visit_panels(
      d, sub.x_lo, spec, s_order, 1,
      [&](const std::vector<quad::QuadNode>& nodes) {
        if (nodes.empty()) return;
        block = numeric::Matrix(int(nodes.size()), n);
        for (size_t row = 0; row < nodes.size(); ++row) {
          basis.eval_into(nodes[row].x, nodes[row].y, b);
          double sw = std::sqrt(nodes[row].w);
          for (int t = 0; t < n; ++t)
            block(int(row), t) = sw * b[t] * factor.col_scale[t];
        }
        qr.absorb(block);
      });
  factor.r = qr.r();
  double ratio = qr.diag_ratio();
  factor.cond_estimate = ratio * ratio;
  g.factor = std::move(factor);
  return g;
}

namespace {

// One refinement pass in equilibrated coordinates. With S = diag(scale),
// G_s = S G S and T = S T_s, the residual TᵀGT - I equals T_sᵀG_sT_s - I,
// and M = T_sᵀG_sT_s accumulated in extended precision carries error
// ~ size·eps_ld·|mass|, far below the target in the regime where the
// stored entries determine the form. Replacing T_s by T_s L⁻ᵀ with
// M = LLᵀ then cancels the measured residual. Beyond that regime (true
// condition near 1/eps) the corner of M reflects rounding of the stored
// entries, not the transform: correcting against it would warp or even
// break (M indefinite), while the QR factor is already optimal there, so
// the pass is skipped unless M is genuinely close to the identity.
void refine_scaled(const numeric::Matrix& g_s, numeric::Matrix& t_s) {
  const int n = g_s.rows();
  std::vector<long double> gt(size_t(n) * size_t(n));
  numeric::Matrix m(n, n);
  for (int u = 0; u < n; ++u)
    for (int j = 0; j < n; ++j) {
      long double s = 0.0L;
      for (int v = 0; v < n; ++v)
        s += static_cast<long double>(g_s(u, v)) * t_s(v, j);
      gt[size_t(u) * n + j] = s;
    }
  double drift = 0.0;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      long double s = 0.0L;
      for (int u = 0; u < n; ++u)
        s += static_cast<long double>(t_s(u, i)) * gt[size_t(u) * n + j];
      m(i, j) = static_cast<double>(s);
      drift = std::max(drift, std::fabs(m(i, j) - (i == j ? 1.0 : 0.0)));
    }
  if (!(drift <= 1e-3)) return;
  for (int i = 0; i < n; ++i)  // symmetrize rounding noise before factoring
    for (int j = i + 1; j < n; ++j) {
      double s = 0.5 * (m(i, j) + m(j, i));
      m(i, j) = s;
      m(j, i) = s;
    }
  numeric::Matrix l = numeric::cholesky(m);
  // row-wise T_s <- T_s L⁻ᵀ: solve L yᵀ = rowᵀ by forward substitution
  for (int u = 0; u < n; ++u) {
    double* row = t_s.row(u);
    for (int j = 0; j < n; ++j) {
      double s = row[j];
      for (int v = 0; v < j; ++v) s -= l(j, v) * row[v];
      row[j] = s / l(j, j);
    }
  }
}

numeric::Matrix scaled_gram(const numeric::Matrix& g,
                            const std::vector<double>& scale) {
  const int n = g.rows();
  numeric::Matrix g_s(n, n);
  for (int u = 0; u < n; ++u)
    for (int v = 0; v < n; ++v) g_s(u, v) = scale[u] * g(u, v) * scale[v];
  return g_s;
}

}  // namespace

BasisTransform orthonormalize(const GramMatrix& g, double cond_cap) {
  const int n = g.g.rows();
  BasisTransform out;
  out.t = numeric::Matrix(n, n);

  if (g.factor) {
    const auto& f = *g.factor;
    out.cond_estimate = f.cond_estimate;
    require(out.cond_estimate <= cond_cap, ErrorCode::Conditioning,
            "orthonormalize: condition estimate " +
                std::to_string(out.cond_estimate) + " at degree " +
                std::to_string(g.degree) + " exceeds the cap");
    // T_s = R^{-1}, columns via back substitution
    numeric::Matrix ts(n, n);
    std::vector<double> e(n, 0.0), z(n);
    for (int col = 0; col < n; ++col) {
      std::fill(e.begin(), e.end(), 0.0);
      e[col] = 1.0;
      numeric::solve_r(f.r, e, z);
      for (int u = 0; u < n; ++u) ts(u, col) = z[u];
    }
    refine_scaled(scaled_gram(g.g, f.col_scale), ts);
    for (int u = 0; u < n; ++u)
      for (int col = 0; col < n; ++col)
        out.t(u, col) = f.col_scale[u] * ts(u, col);
    return out;
  }

  // explicit-entry path: equilibrate by the diagonal, then factor
  std::vector<double> scale(n);
  for (int i = 0; i < n; ++i) {
    require(g.g(i, i) > 0.0, ErrorCode::Conditioning,
            "orthonormalize: non-positive diagonal entry at index " +
                std::to_string(i));
    scale[i] = 1.0 / std::sqrt(g.g(i, i));
  }
  numeric::Matrix gs = scaled_gram(g.g, scale);
  numeric::Matrix l = numeric::cholesky(gs);
  double lo = l(0, 0), hi = l(0, 0);
  for (int i = 1; i < n; ++i) {
    lo = std::min(lo, l(i, i));
    hi = std::max(hi, l(i, i));
  }
  out.cond_estimate = (hi / lo) * (hi / lo);
  require(out.cond_estimate <= cond_cap, ErrorCode::Conditioning,
          "orthonormalize: condition estimate " +
              std::to_string(out.cond_estimate) + " at degree " +
              std::to_string(g.degree) + " exceeds the cap");
  // T_s = L^{-T}: solve L^T t_col = e_col (upper-triangular back substitution)
  numeric::Matrix ts(n, n);
  for (int col = 0; col < n; ++col) {
    for (int i = n - 1; i >= 0; --i) {
      double s = (i == col) ? 1.0 : 0.0;
      for (int j = i + 1; j < n; ++j) s -= l(j, i) * ts(j, col);
      ts(i, col) = s / l(i, i);
    }
  }
  refine_scaled(gs, ts);
  for (int u = 0; u < n; ++u)
    for (int col = 0; col < n; ++col) out.t(u, col) = scale[u] * ts(u, col);
  return out;
}

}  // namespace mlab::polybasis
