#pragma once

// Integration of |F(x,y)|^p over a cuspidal domain (or its x >= x_lo
// truncation). The y-integral is computed after the cusp-regularizing
// substitution y = s^k, which turns the vanishing slice heights into a
// smooth strip in (x,s):
//
//   ∫∫_K |F|^p dx dy = ∫ dx ∫_{(a x^k)^{1/k} x? }  -- concretely:
//   y in [a x^k, f(x)]  <=>  s in [a^{1/k} x, f(x)^{1/k}],
//   dy = k s^{k-1} ds.
//
// The x-direction uses Gauss panels graded geometrically toward the cusp;
// the s-direction uses either an exact Gauss rule (integrand polynomial in
// y, e.g. even integer p) or adaptive Simpson bisection.

#include <functional>
#include <vector>

#include "domain.hpp"
#include "polybasis.hpp"

namespace mlab::quad {

struct QuadSpec {
  double grading_ratio = 0.5;  // successive x-panel width ratio, in (0,1)
  int num_graded_panels = 40;  // panels between x = 1 and the cusp
  int base_gauss_order = 0;    // floor for the s-rule order; 0 = automatic
  double rel_tol = 1e-10;      // target for adaptive paths
  bool p_adaptive = true;      // allow the adaptive s-rule for non-even p

  void validate() const;  // also requires ratio^panels <= 1e-12
};

// x-panels of the graded scheme over [x_lo, 1], ascending; the first panel
// is the residual sliver between x_lo and the last geometric breakpoint.
// refine > 1 splits every panel into `refine` equal parts.
std::vector<std::pair<double, double>> graded_panels(double x_lo,
                                                     const QuadSpec& spec,
                                                     int refine = 1);

// Gauss order per x-panel (fixed; not part of QuadSpec).
inline constexpr int kXPanelOrder = 24;

// Order of the exact s-rule for an integrand of degree `y_degree` in y.
int exact_s_order(const QuadSpec& spec, int k, int y_degree);

struct QuadNode {
  double x, y, w;  // w includes the substitution jacobian k s^{k-1}
};

// Visit the nodes of the scheme grouped by x-panel, panels in ascending
// order (fixed, so accumulation order is deterministic). Only the exact
// s-rule is available at node level (s_order >= 1). Empty slices
// (f(x) <= a x^k) contribute no nodes.
void visit_panels(const domain::CuspidalDomain& d, double x_lo,
                  const QuadSpec& spec, int s_order, int refine,
                  const std::function<void(const std::vector<QuadNode>&)>& panel);

// ∫∫ |F|^p over the truncated domain. When |F|^p is a polynomial in y of
// known degree (e.g. even integer p and polynomial F), pass that degree as
// exact_y_degree and the s-rule is exact; otherwise pass -1 to select the
// adaptive rule (requires spec.p_adaptive).
double integrate_abs_p(const domain::CuspidalDomain& d,
                       const domain::Subdomain& sub, const QuadSpec& spec,
                       double p,
                       const std::function<double(double, double)>& f,
                       int exact_y_degree, int refine = 1);

// ( ∫∫_{K_sub} |P|^p )^{1/p}; p >= 1. Even integer p integrates exactly.
double lp_norm(const polybasis::Poly2& poly, const domain::CuspidalDomain& d,
               const domain::Subdomain& sub, double p, const QuadSpec& spec);

double area(const domain::CuspidalDomain& d, const domain::Subdomain& sub,
            const QuadSpec& spec);

struct ConvergenceReport {
  double order = 0.0;  // empirical order under panel refinement
  bool saturated = false;  // errors below 1e-12 relative at every level
  std::vector<double> errors;  // |I_refine - I_reference| for refine 1,2,4,8
};

// Empirical convergence of the x-panel scheme for ∫∫ |P|^p by successive
// panel doublings against a refine=16 reference.
ConvergenceReport convergence_order(const domain::CuspidalDomain& d,
                                    const polybasis::Poly2& poly, double p,
                                    const QuadSpec& spec);

}  // namespace mlab::quad
