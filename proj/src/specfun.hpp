#pragma once

// Gamma, Bessel and Jacobi evaluations backing the witness-polynomial
// construction U_n(x,y) = y * P_n^{(omega,sigma)}(1-x), whose derivative/norm
// ratio certifies the lower bound of the Markov exponent, plus the
// Mehler-Heine limit diagnostics that justify it.

#include "domain.hpp"
#include "polybasis.hpp"
#include "quad.hpp"

namespace mlab::specfun {

// Gamma function via the Lanczos approximation (g = 7, 9 terms);
// relative accuracy ~1e-13 across [0.5, 50].
double gamma_fn(double x);

struct BesselResult {
  double value = 0.0;
  double remainder_bound = 0.0;  // first omitted term of the power series
};

// J_omega(z) by the ascending power series; omega >= 0, z in [0, 4].
BesselResult bessel_j(double omega, double z);

// (z/2)^{-omega} J_omega(z), continued through z = 0 where it equals
// 1/Gamma(omega+1); omega >= 0, z in [0, 16].
double scaled_bessel(double omega, double z);

// Jacobi polynomial P_n^{(omega,sigma)}(t) by the three-term recurrence;
// omega, sigma > -1.
double jacobi_eval(double omega, double sigma, int n, double t);

// Weight admissibility for cusp order k: omega*p + p/2 - 2 > 2k(p+1).
bool admissible(double omega, double p, int k);

// Smallest integer weight admissible for (p, k), plus one unit of slack.
double auto_omega(double p, int k);

struct WitnessSpec {
  double omega = 0.0;
  double sigma = 0.0;
  int n = 1;       // Jacobi degree; the witness itself has degree n+1
  double p = 2.0;
};

// The witness as a Poly2 (requires n+1 within the basis degree cap).
polybasis::Poly2 witness_poly(const WitnessSpec& ws,
                              const domain::CuspidalDomain& d);

struct WitnessRatio {
  double rho = 0.0;        // ||dU/dy||_p / ||U||_p over K
  double eta_prime = 0.0;  // f'(1/n^2)
  double normalized = 0.0; // rho * eta_prime / n^2
};

// Ratio diagnostics of the witness at degree n (n in [1, 64]); requires an
// admissible (omega, sigma, p) for the domain's cusp order.
WitnessRatio witness_ratio(const WitnessSpec& ws,
                           const domain::CuspidalDomain& d,
                           const quad::QuadSpec& spec);

// | n^{-omega} P_n^{(omega,0)}(cos(z/n)) - (z/2)^{-omega} J_omega(z) |,
// the Mehler-Heine gap at z in (0, 2].
double mehler_heine_gap(double omega, int n, double z);

struct BesselMinBound {
  double min_value = 0.0;    // min of (z/2)^{-omega} J_omega(z) on [0,2]
  double arg_min = 0.0;
  double lower_bound = 0.0;  // omega / Gamma(omega+2)
  bool ok = false;           // min_value >= lower_bound
};

BesselMinBound bessel_min_bound(double omega);

}  // namespace mlab::specfun
