#include "quad.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include "errors.hpp"
#include "numeric.hpp"

namespace mlab::quad {

namespace {

double ipow(double base, int e) {
  double r = 1.0;
  while (e > 0) {
    if (e & 1) r *= base;
    base *= base;
    e >>= 1;
  }
  return r;
}

bool is_even_integer(double p) {
  return p == std::floor(p) && p < 1e9 && (long long)(p) % 2 == 0;
}

double abs_pow(double v, double p) {
  if (p == 2.0) return v * v;
  if (p == 1.0) return std::abs(v);
  if (p == std::floor(p) && p > 0 && p < 64) {
    double r = ipow(std::abs(v), int(p));
    return r;
  }
  return std::pow(std::abs(v), p);
}

struct AdaptiveBudget {
  long long evals = 0;
  long long cap = 200000;
  double x = 0.0;  // slice abscissa, for diagnostics
};

// Standard adaptive Simpson bisection with Richardson end correction.
double adaptive_simpson(const std::function<double(double)>& g, double a,
                        double fa, double m, double fm, double b, double fb,
                        double whole, double eps, int depth,
                        AdaptiveBudget& budget) {
  double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
  budget.evals += 2;
  if (budget.evals > budget.cap) {
    std::ostringstream os;
    os << "adaptive s-rule exhausted its budget at x = " << budget.x
       << " over s in [" << a << ", " << b << "]; current estimate " << whole;
    fail(ErrorCode::QuadratureBudget, os.str());
  }
  double flm = g(lm), frm = g(rm);
  double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
  double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
  double delta = left + right - whole;
  if (depth <= 0 || std::abs(delta) <= 15.0 * eps || b - a < 1e-15 * std::abs(a) + 1e-300)
    return left + right + delta / 15.0;
  return adaptive_simpson(g, a, fa, lm, flm, m, fm, left, 0.5 * eps, depth - 1,
                          budget) +
         adaptive_simpson(g, m, fm, rm, frm, b, fb, right, 0.5 * eps,
                          depth - 1, budget);
}

// eps_floor guards slices whose own value sits at the rounding noise of the
// global integral: their tolerance is taken relative to the whole integral
// rather than the (possibly vanishing) local slice.
double adaptive_s_integral(const std::function<double(double)>& g, double s0,
                           double s1, double rel_tol, double x,
                           double eps_floor) {
  double m = 0.5 * (s0 + s1);
  double fa = g(s0), fm = g(m), fb = g(s1);
  double whole = (s1 - s0) / 6.0 * (fa + 4.0 * fm + fb);
  double eps = std::max(rel_tol * std::abs(whole), eps_floor);
  AdaptiveBudget budget;
  budget.x = x;
  return adaptive_simpson(g, s0, fa, m, fm, s1, fb, whole, eps, 48, budget);
}

}  // namespace

void QuadSpec::validate() const {
  require(grading_ratio > 0.0 && grading_ratio < 1.0,
          ErrorCode::ParameterDomain,
          "quad: grading_ratio must lie in (0,1)");
  require(num_graded_panels >= 1 && num_graded_panels <= 4096,
          ErrorCode::ParameterDomain,
          "quad: num_graded_panels must lie in [1, 4096]");
  require(std::pow(grading_ratio, num_graded_panels) <= 1e-12,
          ErrorCode::ParameterDomain,
          "quad: grading must reach 1e-12 (ratio^panels too large)");
  require(base_gauss_order >= 0 && base_gauss_order <= 512,
          ErrorCode::ParameterDomain,
          "quad: base_gauss_order must lie in [0, 512]");
  require(rel_tol > 0.0 && rel_tol < 1.0, ErrorCode::ParameterDomain,
          "quad: rel_tol must lie in (0,1)");
}

std::vector<std::pair<double, double>> graded_panels(double x_lo,
                                                     const QuadSpec& spec,
                                                     int refine) {
  spec.validate();
  require(x_lo >= 0.0 && x_lo < 1.0, ErrorCode::ParameterDomain,
          "graded_panels: x_lo must lie in [0,1)");
  require(refine >= 1 && refine <= 64, ErrorCode::ParameterDomain,
          "graded_panels: refine must lie in [1,64]");
  const double w = 1.0 - x_lo;
  std::vector<double> cuts;  // ascending breakpoints, x_lo .. 1
  cuts.push_back(x_lo);
  for (int i = spec.num_graded_panels; i >= 0; --i)
    cuts.push_back(x_lo + w * std::pow(spec.grading_ratio, i));
  std::vector<std::pair<double, double>> panels;
  panels.reserve((cuts.size() - 1) * refine);
  for (size_t i = 0; i + 1 < cuts.size(); ++i) {
    double lo = cuts[i], hi = cuts[i + 1];
    if (!(hi > lo)) continue;
    for (int q = 0; q < refine; ++q) {
      double a = lo + (hi - lo) * q / refine;
      double b = (q == refine - 1) ? hi : lo + (hi - lo) * (q + 1) / refine;
      panels.emplace_back(a, b);
    }
  }
  return panels;
}

int exact_s_order(const QuadSpec& spec, int k, int y_degree) {
  // the substituted integrand has s-degree y_degree*k + k - 1
  int needed = (y_degree * k + k) / 2 + 1;
  int order = std::max(spec.base_gauss_order, needed);
  require(order <= 512, ErrorCode::QuadratureBudget,
          "s-rule order " + std::to_string(order) +
              " exceeds the supported cap (reduce p, k or the degree)");
  return order;
}

void visit_panels(const domain::CuspidalDomain& d, double x_lo,
                  const QuadSpec& spec, int s_order, int refine,
                  const std::function<void(const std::vector<QuadNode>&)>& panel) {
  require(s_order >= 1, ErrorCode::ParameterDomain,
          "visit_panels: s_order must be >= 1");
  const auto panels = graded_panels(x_lo, spec, refine);
  const auto& xr = numeric::gauss_legendre(kXPanelOrder);
  const auto& sr = numeric::gauss_legendre(s_order);
  const double a_root = std::pow(d.a(), 1.0 / d.k());
  const int k = d.k();

  std::vector<QuadNode> nodes;
  nodes.reserve(size_t(kXPanelOrder) * s_order);
  for (const auto& [lo, hi] : panels) {
    nodes.clear();
    const double xm = 0.5 * (lo + hi), xh = 0.5 * (hi - lo);
    for (int ix = 0; ix < kXPanelOrder; ++ix) {
      const double x = xm + xh * xr.nodes[ix];
      const double wx = xh * xr.weights[ix];
      const double fx = d.upper(x);
      if (!(fx > 0.0)) continue;
      const double s1 = std::pow(fx, 1.0 / k);
      const double s0 = a_root * x;
      if (!(s1 > s0)) continue;  // empty slice
      const double sm = 0.5 * (s0 + s1), sh = 0.5 * (s1 - s0);
      for (int is = 0; is < s_order; ++is) {
        const double s = sm + sh * sr.nodes[is];
        const double jac = k * ipow(s, k - 1);
        nodes.push_back({x, ipow(s, k), wx * sh * sr.weights[is] * jac});
      }
    }
    panel(nodes);
  }
}

double integrate_abs_p(const domain::CuspidalDomain& d,
                       const domain::Subdomain& sub, const QuadSpec& spec,
                       double p,
                       const std::function<double(double, double)>& f,
                       int exact_y_degree, int refine) {
  spec.validate();
  require(p >= 1.0 && std::isfinite(p), ErrorCode::ParameterDomain,
          "integrate: p must lie in [1, inf)");
  require(sub.x_lo >= 0.0 && sub.x_lo < 1.0, ErrorCode::ParameterDomain,
          "integrate: subdomain x_lo must lie in [0,1)");

  numeric::KahanSum total;
  if (exact_y_degree >= 0) {
    const int s_order = exact_s_order(spec, d.k(), exact_y_degree);
    visit_panels(d, sub.x_lo, spec, s_order, refine,
                 [&](const std::vector<QuadNode>& nodes) {
                   for (const auto& nd : nodes)
                     total.add(nd.w * abs_pow(f(nd.x, nd.y), p));
                 });
    return total.value();
  }

  require(spec.p_adaptive, ErrorCode::ParameterDomain,
          "integrate: adaptive s-rule disabled but required for this p");
  const auto panels = graded_panels(sub.x_lo, spec, refine);
  const auto& xr = numeric::gauss_legendre(kXPanelOrder);
  const double a_root = std::pow(d.a(), 1.0 / d.k());
  const int k = d.k();

  // First pass: coarse Simpson estimate per vertical slice, to learn the
  // overall scale of the integral before any slice is refined.
  struct Slice {
    double x, wx, s0, s1;
  };
  std::vector<Slice> slices;
  slices.reserve(panels.size() * kXPanelOrder);
  numeric::KahanSum scale;
  for (const auto& [lo, hi] : panels) {
    const double xm = 0.5 * (lo + hi), xh = 0.5 * (hi - lo);
    for (int ix = 0; ix < kXPanelOrder; ++ix) {
      const double x = xm + xh * xr.nodes[ix];
      const double wx = xh * xr.weights[ix];
      const double fx = d.upper(x);
      if (!(fx > 0.0)) continue;
      const double s1 = std::pow(fx, 1.0 / k);
      const double s0 = a_root * x;
      if (!(s1 > s0)) continue;
      auto g = [&f, p, x, k](double s) {
        return abs_pow(f(x, ipow(s, k)), p) * k * ipow(s, k - 1);
      };
      const double m = 0.5 * (s0 + s1);
      const double coarse = (s1 - s0) / 6.0 * (g(s0) + 4.0 * g(m) + g(s1));
      slices.push_back({x, wx, s0, s1});
      scale.add(wx * std::abs(coarse));
    }
  }

  // Second pass: refine each slice, but never push a slice's tolerance below
  // its fair share of the global budget.  Slices near the cusp contribute
  // next to nothing yet evaluate with absolute rounding noise; a purely
  // relative criterion would chase that noise forever.
  const double eps_floor =
      slices.empty() ? 0.0
                     : spec.rel_tol * scale.value() / double(slices.size());
  for (const auto& sl : slices) {
    auto g = [&f, p, &sl, k](double s) {
      return abs_pow(f(sl.x, ipow(s, k)), p) * k * ipow(s, k - 1);
    };
    total.add(sl.wx * adaptive_s_integral(g, sl.s0, sl.s1, spec.rel_tol, sl.x,
                                          eps_floor));
  }
  return total.value();
}

double lp_norm(const polybasis::Poly2& poly, const domain::CuspidalDomain& d,
               const domain::Subdomain& sub, double p, const QuadSpec& spec) {
  int exact_deg = -1;
  if (is_even_integer(p)) exact_deg = int(p) * poly.y_degree();
  auto f = [&poly](double x, double y) { return poly.eval(x, y); };
  double integral = integrate_abs_p(d, sub, spec, p, f, exact_deg);
  return std::pow(std::max(integral, 0.0), 1.0 / p);
}

double area(const domain::CuspidalDomain& d, const domain::Subdomain& sub,
            const QuadSpec& spec) {
  return integrate_abs_p(d, sub, spec, 1.0,
                         [](double, double) { return 1.0; }, 0);
}

ConvergenceReport convergence_order(const domain::CuspidalDomain& d,
                                    const polybasis::Poly2& poly, double p,
                                    const QuadSpec& spec) {
  int exact_deg = -1;
  if (is_even_integer(p)) exact_deg = int(p) * poly.y_degree();
  auto f = [&poly](double x, double y) { return poly.eval(x, y); };

  const double ref = integrate_abs_p(d, {}, spec, p, f, exact_deg, 16);
  const double scale = std::max(std::abs(ref), 1e-300);

  ConvergenceReport rep;
  for (int refine : {1, 2, 4, 8}) {
    double v = integrate_abs_p(d, {}, spec, p, f, exact_deg, refine);
    rep.errors.push_back(std::abs(v - ref));
  }
  rep.saturated = true;
  for (double e : rep.errors) rep.saturated = rep.saturated && e <= 1e-12 * scale;
  if (rep.saturated) {
    rep.order = std::numeric_limits<double>::infinity();
    return rep;
  }
  double sum = 0.0;
  int cnt = 0;
  for (size_t i = 0; i + 1 < rep.errors.size(); ++i) {
    double e0 = rep.errors[i], e1 = rep.errors[i + 1];
    if (e0 > 1e-14 * scale && e1 > 1e-14 * scale) {
      sum += std::log2(e0 / e1);
      ++cnt;
    }
  }
  rep.order = cnt > 0 ? sum / cnt : std::numeric_limits<double>::infinity();
  return rep;
}

}  // namespace mlab::quad
