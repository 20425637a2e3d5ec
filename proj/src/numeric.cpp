#include "numeric.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <mutex>

#include "errors.hpp"

namespace mlab::numeric {

namespace {

// Newton iteration on P_m with the three-term recurrence; the classical
// Chebyshev-like initial guess converges in a handful of steps.
GaussRule compute_gauss(int m) {
  GaussRule rule;
  rule.nodes.resize(m);
  rule.weights.resize(m);
  for (int i = 0; i < (m + 1) / 2; ++i) {
    double x = std::cos(M_PI * (i + 0.75) / (m + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = x;
      for (int j = 2; j <= m; ++j) {
        double p2 = ((2.0 * j - 1.0) * x * p1 - (j - 1.0) * p0) / j;
        p0 = p1;
        p1 = p2;
      }
      dp = m * (x * p1 - p0) / (x * x - 1.0);
      double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-15) {
        // one clean-up step, then stop
        p0 = 1.0;
        p1 = x;
        for (int j = 2; j <= m; ++j) {
          double p2 = ((2.0 * j - 1.0) * x * p1 - (j - 1.0) * p0) / j;
          p0 = p1;
          p1 = p2;
        }
        dp = m * (x * p1 - p0) / (x * x - 1.0);
        break;
      }
    }
    double w = 2.0 / ((1.0 - x * x) * dp * dp);
    rule.nodes[m - 1 - i] = x;
    rule.weights[m - 1 - i] = w;
    rule.nodes[i] = -x;
    rule.weights[i] = w;
  }
  if (m % 2 == 1) {
    // midpoint node: x = 0 exactly
    int mid = m / 2;
    double p0 = 1.0, p1 = 0.0;
    double x = 0.0;
    for (int j = 2; j <= m; ++j) {
      double p2 = ((2.0 * j - 1.0) * x * p1 - (j - 1.0) * p0) / j;
      p0 = p1;
      p1 = p2;
    }
    double dp = m * (x * p1 - p0) / (x * x - 1.0);
    rule.nodes[mid] = 0.0;
    rule.weights[mid] = 2.0 / (dp * dp);
  }
  return rule;
}

std::mutex g_gauss_mutex;
std::map<int, GaussRule> g_gauss_cache;

}  // namespace

const GaussRule& gauss_legendre(int order) {
  require(order >= 1 && order <= 512, ErrorCode::ParameterDomain,
          "gauss_legendre: order must be in [1, 512]");
  std::lock_guard<std::mutex> lock(g_gauss_mutex);
  auto it = g_gauss_cache.find(order);
  if (it == g_gauss_cache.end())
    it = g_gauss_cache.emplace(order, compute_gauss(order)).first;
  return it->second;
}

void householder_triangularize(Matrix& m) {
  const int rows = m.rows(), cols = m.cols();
  std::vector<double> v(rows);
  for (int kcol = 0; kcol < cols && kcol < rows - 1; ++kcol) {
    // norm of the trailing column segment
    double scale = 0.0;
    for (int i = kcol; i < rows; ++i) scale = std::max(scale, std::abs(m(i, kcol)));
    if (scale == 0.0) continue;
    double ss = 0.0;
    for (int i = kcol; i < rows; ++i) {
      double t = m(i, kcol) / scale;
      ss += t * t;
    }
    double alpha = scale * std::sqrt(ss);
    if (m(kcol, kcol) > 0) alpha = -alpha;
    double vnorm2 = 0.0;
    for (int i = kcol; i < rows; ++i) {
      v[i] = m(i, kcol);
      if (i == kcol) v[i] -= alpha;
      vnorm2 += v[i] * v[i];
    }
    if (vnorm2 == 0.0) continue;
    m(kcol, kcol) = alpha;
    for (int i = kcol + 1; i < rows; ++i) m(i, kcol) = 0.0;
    for (int j = kcol + 1; j < cols; ++j) {
      double dot = 0.0;
      for (int i = kcol; i < rows; ++i) dot += v[i] * m(i, j);
      double f = 2.0 * dot / vnorm2;
      for (int i = kcol; i < rows; ++i) m(i, j) -= f * v[i];
    }
  }
}

StreamingQR::StreamingQR(int cols) : cols_(cols), r_(cols, cols) {}

void StreamingQR::absorb(const Matrix& block) {
  require(block.cols() == cols_, ErrorCode::Internal,
          "StreamingQR: block width mismatch");
  const int extra = seeded_ ? cols_ : 0;
  Matrix work(extra + block.rows(), cols_);
  for (int i = 0; i < extra; ++i)
    for (int j = i; j < cols_; ++j) work(i, j) = r_(i, j);
  for (int i = 0; i < block.rows(); ++i)
    for (int j = 0; j < cols_; ++j) work(extra + i, j) = block(i, j);
  householder_triangularize(work);
  for (int i = 0; i < cols_; ++i)
    for (int j = 0; j < cols_; ++j)
      r_(i, j) = (j >= i && i < work.rows()) ? work(i, j) : 0.0;
  seeded_ = true;
}

double StreamingQR::diag_ratio() const {
  double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
  for (int i = 0; i < cols_; ++i) {
    double d = std::abs(r_(i, i));
    lo = std::min(lo, d);
    hi = std::max(hi, d);
  }
  if (lo == 0.0) return std::numeric_limits<double>::infinity();
  return hi / lo;
}

void solve_rt(const Matrix& r, std::span<const double> b, std::span<double> z) {
  const int n = r.cols();
  for (int i = 0; i < n; ++i) {
    double s = b[i];
    for (int j = 0; j < i; ++j) s -= r(j, i) * z[j];
    double d = r(i, i);
    require(d != 0.0, ErrorCode::Conditioning, "triangular solve: zero pivot");
    z[i] = s / d;
  }
}

void solve_r(const Matrix& r, std::span<const double> b, std::span<double> z) {
  const int n = r.cols();
  for (int i = n - 1; i >= 0; --i) {
    double s = b[i];
    for (int j = i + 1; j < n; ++j) s -= r(i, j) * z[j];
    double d = r(i, i);
    require(d != 0.0, ErrorCode::Conditioning, "triangular solve: zero pivot");
    z[i] = s / d;
  }
}

std::vector<double> jacobi_eigenvalues(Matrix a, double tol) {
  const int n = a.rows();
  require(n == a.cols(), ErrorCode::Internal, "jacobi: matrix not square");
  double fro = 0.0;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) fro += a(i, j) * a(i, j);
  fro = std::sqrt(fro);
  const double stop = tol * std::max(fro, 1e-300);

  for (int sweep = 0; sweep < 100; ++sweep) {
    double off = 0.0;
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j) off += 2.0 * a(i, j) * a(i, j);
    if (std::sqrt(off) <= stop) break;
    for (int p = 0; p < n - 1; ++p) {
      for (int q = p + 1; q < n; ++q) {
        double apq = a(p, q);
        if (apq == 0.0) continue;
        double theta = (a(q, q) - a(p, p)) / (2.0 * apq);
        double t = (theta >= 0 ? 1.0 : -1.0) /
                   (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        double c = 1.0 / std::sqrt(t * t + 1.0);
        double s = t * c;
        for (int i = 0; i < n; ++i) {
          double aip = a(i, p), aiq = a(i, q);
          a(i, p) = c * aip - s * aiq;
          a(i, q) = s * aip + c * aiq;
        }
        for (int i = 0; i < n; ++i) {
          double api = a(p, i), aqi = a(q, i);
          a(p, i) = c * api - s * aqi;
          a(q, i) = s * api + c * aqi;
        }
      }
    }
  }
  std::vector<double> ev(n);
  for (int i = 0; i < n; ++i) ev[i] = a(i, i);
  std::sort(ev.begin(), ev.end());
  return ev;
}

Matrix cholesky(const Matrix& g) {
  const int n = g.rows();
  require(n == g.cols(), ErrorCode::Internal, "cholesky: matrix not square");
  Matrix l(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j <= i; ++j) {
      double s = g(i, j);
      for (int k = 0; k < j; ++k) s -= l(i, k) * l(j, k);
      if (i == j) {
        require(s > 0.0, ErrorCode::Conditioning,
                "cholesky: matrix not positive definite at pivot " +
                    std::to_string(i));
        l(i, i) = std::sqrt(s);
      } else {
        l(i, j) = s / l(j, j);
      }
    }
  }
  return l;
}

std::vector<double> least_squares(Matrix a, std::vector<double> b) {
  const int rows = a.rows(), cols = a.cols();
  require(rows >= cols, ErrorCode::InsufficientData,
          "least_squares: fewer rows than unknowns");
  // Triangularise [A | b] jointly so b receives the same reflections.
  Matrix ab(rows, cols + 1);
  for (int i = 0; i < rows; ++i) {
    for (int j = 0; j < cols; ++j) ab(i, j) = a(i, j);
    ab(i, cols) = b[i];
  }
  householder_triangularize(ab);
  std::vector<double> x(cols);
  for (int i = cols - 1; i >= 0; --i) {
    double s = ab(i, cols);
    for (int j = i + 1; j < cols; ++j) s -= ab(i, j) * x[j];
    double d = ab(i, i);
    require(d != 0.0, ErrorCode::InsufficientData,
            "least_squares: rank-deficient system");
    x[i] = s / d;
  }
  return x;
}

}  // namespace mlab::numeric
