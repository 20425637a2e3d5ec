#include "specfun.hpp"

#include <cmath>
#include <string>

#include "errors.hpp"
#include "numeric.hpp"

namespace mlab::specfun {

namespace {

constexpr double kLanczos[9] = {
    0.99999999999980993,     676.5203681218851,     -1259.1392167224028,
    771.32342877765313,      -176.61502916214059,   12.507343278686905,
    -0.13857109526572012,    9.9843695780195716e-6, 1.5056327351493116e-7};

}  // namespace

double gamma_fn(double x) {
  require(std::isfinite(x) && x > 0.0, ErrorCode::ParameterDomain,
          "gamma: argument must be positive and finite");
  if (x < 0.5) {
    // reflection keeps the Lanczos sum in its accurate range
    return M_PI / (std::sin(M_PI * x) * gamma_fn(1.0 - x));
  }
  double z = x - 1.0;
  double a = kLanczos[0];
  for (int i = 1; i < 9; ++i) a += kLanczos[i] / (z + i);
  double t = z + 7.5;
  return std::sqrt(2.0 * M_PI) * std::pow(t, z + 0.5) * std::exp(-t) * a;
}

BesselResult bessel_j(double omega, double z) {
  require(omega >= 0.0 && std::isfinite(omega), ErrorCode::ParameterDomain,
          "bessel_j: omega must be >= 0");
  require(z >= 0.0 && z <= 4.0, ErrorCode::ParameterDomain,
          "bessel_j: z must lie in [0, 4]");
  const double q = 0.25 * z * z;
  double term = std::pow(0.5 * z, omega) / gamma_fn(omega + 1.0);
  numeric::KahanSum sum;
  double next = term;
  for (int m = 0; m < 200; ++m) {
    sum.add(term);
    next = -term * q / ((m + 1.0) * (omega + m + 1.0));
    if (std::abs(next) <= 1e-17 * (std::abs(sum.value()) + 1e-300) && m >= 3)
      break;
    term = next;
  }
  return {sum.value(), std::abs(next)};
}

double scaled_bessel(double omega, double z) {
  require(omega >= 0.0 && std::isfinite(omega), ErrorCode::ParameterDomain,
          "scaled_bessel: omega must be >= 0");
  require(z >= 0.0 && z <= 16.0, ErrorCode::ParameterDomain,
          "scaled_bessel: z must lie in [0, 16]");
  const double q = 0.25 * z * z;
  double term = 1.0 / gamma_fn(omega + 1.0);
  numeric::KahanSum sum;
  for (int m = 0; m < 400; ++m) {
    sum.add(term);
    double next = -term * q / ((m + 1.0) * (omega + m + 1.0));
    if (std::abs(next) <= 1e-17 * (std::abs(sum.value()) + 1e-300) && m >= 3)
      break;
    term = next;
  }
  return sum.value();
}

double jacobi_eval(double omega, double sigma, int n, double t) {
  require(omega > -1.0 && sigma > -1.0, ErrorCode::ParameterDomain,
          "jacobi: weights must exceed -1");
  require(n >= 0 && n <= 512, ErrorCode::ParameterDomain,
          "jacobi: degree must lie in [0, 512]");
  require(std::isfinite(t), ErrorCode::ParameterDomain,
          "jacobi: argument must be finite");
  if (n == 0) return 1.0;
  double p0 = 1.0;
  double p1 = 0.5 * (omega - sigma) + 0.5 * (omega + sigma + 2.0) * t;
  for (int m = 2; m <= n; ++m) {
    double ab = omega + sigma;
    double c1 = 2.0 * m * (m + ab) * (2.0 * m + ab - 2.0);
    double c2 = (2.0 * m + ab - 1.0) * (omega * omega - sigma * sigma);
    double c3 = (2.0 * m + ab - 1.0) * (2.0 * m + ab) * (2.0 * m + ab - 2.0);
    double c4 = 2.0 * (m + omega - 1.0) * (m + sigma - 1.0) * (2.0 * m + ab);
    double p2 = ((c2 + c3 * t) * p1 - c4 * p0) / c1;
    p0 = p1;
    p1 = p2;
  }
  require(std::isfinite(p1), ErrorCode::Internal,
          "jacobi: recurrence overflowed");
  return p1;
}

bool admissible(double omega, double p, int k) {
  require(p >= 1.0 && std::isfinite(p), ErrorCode::ParameterDomain,
          "admissible: p must lie in [1, inf)");
  require(k >= 2, ErrorCode::ParameterDomain, "admissible: k must be >= 2");
  require(omega > -1.0 && std::isfinite(omega), ErrorCode::ParameterDomain,
          "admissible: omega must exceed -1");
  return omega * p + 0.5 * p - 2.0 > 2.0 * k * (p + 1.0);
}

double auto_omega(double p, int k) {
  require(p >= 1.0 && std::isfinite(p), ErrorCode::ParameterDomain,
          "auto_omega: p must lie in [1, inf)");
  require(k >= 2, ErrorCode::ParameterDomain, "auto_omega: k must be >= 2");
  double bound = (2.0 * k * (p + 1.0) + 2.0 - 0.5 * p) / p;
  double omega = std::floor(bound) + 1.0;  // smallest admissible integer
  return omega + 1.0;                      // one unit of slack
}

namespace {

void check_witness_spec(const WitnessSpec& ws, int k) {
  require(ws.n >= 1 && ws.n <= 64, ErrorCode::ParameterDomain,
          "witness: degree n must lie in [1, 64]");
  require(ws.sigma > -1.0 && std::isfinite(ws.sigma),
          ErrorCode::ParameterDomain, "witness: sigma must exceed -1");
  require(admissible(ws.omega, ws.p, k), ErrorCode::DomainHypothesis,
          "witness: (omega, p) inadmissible for cusp order k = " +
              std::to_string(k) +
              " (need omega*p + p/2 - 2 > 2k(p+1))");
}

}  // namespace

polybasis::Poly2 witness_poly(const WitnessSpec& ws,
                              const domain::CuspidalDomain& d) {
  check_witness_spec(ws, d.k());
  require(ws.n + 1 <= polybasis::kDegreeCap, ErrorCode::DegreeCap,
          "witness_poly: degree " + std::to_string(ws.n + 1) +
              " exceeds the basis cap; use witness_ratio instead");
  const double ymax = d.y_max();
  polybasis::TensorBasis basis(ws.n + 1, ymax);

  // expand J(x) = P_n^{(omega,sigma)}(1-x) over shifted Legendre by exact
  // Gauss projection: alpha_i = (2i+1) * Int_0^1 J(x) P_i(2x-1) dx
  const auto& rule = numeric::gauss_legendre(ws.n + 1);
  std::vector<double> alpha(ws.n + 1, 0.0);
  std::vector<double> lx(ws.n + 1);
  for (size_t q = 0; q < rule.nodes.size(); ++q) {
    double x = 0.5 * (rule.nodes[q] + 1.0);
    double w = 0.5 * rule.weights[q];
    double jv = jacobi_eval(ws.omega, ws.sigma, ws.n, 1.0 - x);
    lx[0] = 1.0;
    double u = 2.0 * x - 1.0;
    if (ws.n >= 1) lx[1] = u;
    for (int m = 2; m <= ws.n; ++m)
      lx[m] = ((2.0 * m - 1.0) * u * lx[m - 1] - (m - 1.0) * lx[m - 2]) / m;
    for (int i = 0; i <= ws.n; ++i) alpha[i] += w * jv * lx[i];
  }
  for (int i = 0; i <= ws.n; ++i) alpha[i] *= 2.0 * i + 1.0;

  // U = y * J(x) with y = (ymax/2) * (1 + (2y/ymax - 1))
  std::vector<double> coeffs(basis.size(), 0.0);
  for (int i = 0; i <= ws.n; ++i) {
    coeffs[basis.index_of(i, 0)] = 0.5 * ymax * alpha[i];
    coeffs[basis.index_of(i, 1)] = 0.5 * ymax * alpha[i];
  }
  return polybasis::Poly2(basis, std::move(coeffs));
}

WitnessRatio witness_ratio(const WitnessSpec& ws,
                           const domain::CuspidalDomain& d,
                           const quad::QuadSpec& spec) {
  check_witness_spec(ws, d.k());
  require(d.f().has_derivative(), ErrorCode::ParameterDomain,
          "witness_ratio: closed-form derivative required");

  const double om = ws.omega, sg = ws.sigma;
  const int n = ws.n;
  auto ju = [om, sg, n](double x, double y) {
    return y * jacobi_eval(om, sg, n, 1.0 - x);
  };
  auto jd = [om, sg, n](double x, double) {
    return jacobi_eval(om, sg, n, 1.0 - x);
  };

  // |U|^p is y-polynomial for integer p (y >= 0 on K), so the s-rule can be
  // exact; fractional p falls back to the adaptive rule.
  const bool int_p = ws.p == std::floor(ws.p) && ws.p <= 64.0;
  const int deg_u = int_p ? int(ws.p) : -1;
  const int deg_du = int_p ? 0 : -1;

  double den = quad::integrate_abs_p(d, {}, spec, ws.p, ju, deg_u);
  double num = quad::integrate_abs_p(d, {}, spec, ws.p, jd, deg_du);
  require(den > 0.0, ErrorCode::Internal, "witness_ratio: zero witness norm");

  WitnessRatio out;
  out.rho = std::pow(num, 1.0 / ws.p) / std::pow(den, 1.0 / ws.p);
  double x_n = 1.0 / (double(n) * double(n));
  double fp = d.f().derivative(x_n);
  require(std::isfinite(fp) && fp > 0.0, ErrorCode::DomainHypothesis,
          "witness_ratio: f'(1/n^2) not positive at n = " + std::to_string(n));
  out.eta_prime = fp;
  out.normalized = out.rho * fp / (double(n) * double(n));
  return out;
}

double mehler_heine_gap(double omega, int n, double z) {
  require(n >= 1, ErrorCode::ParameterDomain, "mehler_heine: n must be >= 1");
  require(z > 0.0 && z <= 2.0, ErrorCode::ParameterDomain,
          "mehler_heine: z must lie in (0, 2]");
  double scaled = std::pow(double(n), -omega) *
                  jacobi_eval(omega, 0.0, n, std::cos(z / n));
  return std::abs(scaled - scaled_bessel(omega, z));
}

BesselMinBound bessel_min_bound(double omega) {
  BesselMinBound out;
  out.lower_bound = omega / gamma_fn(omega + 2.0);

  // coarse grid, then golden-section refinement around the best bracket
  const int grid = 4096;
  double best_z = 0.0, best_v = scaled_bessel(omega, 0.0);
  for (int i = 1; i <= grid; ++i) {
    double z = 2.0 * i / grid;
    double v = scaled_bessel(omega, z);
    if (v < best_v) {
      best_v = v;
      best_z = z;
    }
  }
  double lo = std::max(0.0, best_z - 2.0 / grid);
  double hi = std::min(2.0, best_z + 2.0 / grid);
  const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
  double c = hi - gr * (hi - lo), e = lo + gr * (hi - lo);
  double fc = scaled_bessel(omega, c), fe = scaled_bessel(omega, e);
  for (int it = 0; it < 90; ++it) {
    if (fc < fe) {
      hi = e;
      e = c;
      fe = fc;
      c = hi - gr * (hi - lo);
      fc = scaled_bessel(omega, c);
    } else {
      lo = c;
      c = e;
      fc = fe;
      e = lo + gr * (hi - lo);
      fe = scaled_bessel(omega, e);
    }
  }
  double z_ref = 0.5 * (lo + hi);
  double v_ref = scaled_bessel(omega, z_ref);
  if (v_ref < best_v) {
    best_v = v_ref;
    best_z = z_ref;
  }
  out.min_value = best_v;
  out.arg_min = best_z;
  out.ok = out.min_value >= out.lower_bound;
  return out;
}

}  // namespace mlab::specfun
