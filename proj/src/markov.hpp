#pragma once

// Extremal derivative/norm ratios over degree-n polynomial spaces on a
// cuspidal domain:
//
//   Markov factor   sup ||dP/daxis||_p / ||P||_p        over deg(P) <= n
//   Remez ratio     sup ||P||_p(K) / ||P||_p(K_{x_lo})  over deg(P) <= n
//
// For p = 2 both are top eigenvalues of symmetric forms expressed in a basis
// orthonormalized over the appropriate region; for general p a seeded
// coordinate-ascent search over the orthonormal coordinates applies.

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "domain.hpp"
#include "errors.hpp"
#include "polybasis.hpp"
#include "quad.hpp"

namespace mlab::markov {

using polybasis::Axis;

enum class FactorKind { MarkovX, MarkovY, Remez };
enum class Method { ExactEigen, Search };

// Exact p=2 Markov factor at degree n (0 <= n <= degree cap).
double markov_factor_p2(const domain::CuspidalDomain& d, int n, Axis axis,
                        const quad::QuadSpec& spec);

// Exact p=2 Remez ratio at degree n; x_lo in [0,1) is the truncation
// abscissa (the full and truncated regions coincide when x_lo = 0).
double remez_ratio_p2(const domain::CuspidalDomain& d, int n, double x_lo,
                      const quad::QuadSpec& spec);

// Lower-bound search for the Markov factor at any p >= 1: random starts in
// the orthonormalized coordinates followed by per-coordinate ascent with
// shrinking steps (relative step floor 1e-3). `budget` caps the number of
// ratio evaluations; `seeds` polynomials join the start list first.
// Deterministic given (seed, budget). Never exceeds the true supremum.
double markov_factor_search(const domain::CuspidalDomain& d, int n, double p,
                            Axis axis, const quad::QuadSpec& spec,
                            long long budget, uint64_t seed,
                            std::span<const polybasis::Poly2> seeds = {});

struct FactorSeries {
  FactorKind kind = FactorKind::MarkovY;
  double p = 2.0;
  Method method = Method::ExactEigen;
  std::string domain;                        // human-readable description
  std::vector<std::pair<int, double>> entries;  // (n, value), ascending n
  bool complete = true;   // false when a degree failed mid-series
  std::string error;      // message of the first failing degree
  std::optional<ErrorCode> error_code;
};

struct SeriesOptions {
  Method method = Method::ExactEigen;
  long long budget = 100000;   // search method only
  uint64_t seed = 1;           // search method only
  double x_lo_override = -1.0; // Remez: fixed truncation; < 0 = 1/n^2
  int threads = 1;             // worker count; results independent of it
};

// Factor values for every degree in [n_min, n_max]. Degrees are computed
// independently (optionally in parallel) and merged in ascending order; on
// the first failure the leading complete entries are retained.
FactorSeries factor_series(const domain::CuspidalDomain& d, FactorKind kind,
                           double p, int n_min, int n_max,
                           const quad::QuadSpec& spec,
                           const SeriesOptions& opts);

struct ExponentFit {
  double slope = 0.0;      // d ln(value) / d ln(n)
  double intercept = 0.0;
  double residual_rms = 0.0;
  int points_used = 0;
};

// ln-ln least squares over entries with n_lo <= n <= n_hi (n_hi = 0 means
// no upper limit). Entries with non-positive values are skipped; fewer than
// two usable points throws Error(InsufficientData).
ExponentFit fit_exponent(std::span<const int> ns,
                         std::span<const double> values, int n_lo, int n_hi);
ExponentFit fit_exponent(const FactorSeries& series, int n_lo = 0,
                         int n_hi = 0);

}  // namespace mlab::markov
