#include <cmath>
#include <random>

#include "doctest.h"
#include "domain.hpp"
#include "polybasis.hpp"
#include "quad.hpp"
#include "specfun.hpp"
#include "test_support.hpp"

using namespace mlab;
using testsup::rel_err;
using testsup::thrown_code;

namespace {
constexpr double kPi = 3.14159265358979323846;
}

TEST_CASE("gamma matches classical values and the recurrence") {
  CHECK(rel_err(specfun::gamma_fn(0.5), std::sqrt(kPi)) < 1e-14);
  CHECK(rel_err(specfun::gamma_fn(1.0), 1.0) < 1e-14);
  CHECK(rel_err(specfun::gamma_fn(5.0), 24.0) < 1e-14);
  // Gamma(7.5) = 5.5 * 4.5 * ... * 0.5 * sqrt(pi)
  double g75 = std::sqrt(kPi);
  for (double v = 0.5; v < 7.0; v += 1.0) g75 *= v;
  CHECK(rel_err(specfun::gamma_fn(7.5), g75) < 1e-13);

  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> ux(0.1, 20.0);
  for (int trial = 0; trial < 50; ++trial) {
    double x = ux(rng);
    CHECK(rel_err(specfun::gamma_fn(x + 1.0), x * specfun::gamma_fn(x)) <
          1e-12);
  }
  CHECK(thrown_code([] { specfun::gamma_fn(0.0); }) ==
        ErrorCode::ParameterDomain);
}

TEST_CASE("bessel J matches half-integer closed forms") {
  for (double z : {0.3, 1.0, 2.0, 3.7}) {
    double want_half = std::sqrt(2.0 / (kPi * z)) * std::sin(z);
    auto got = specfun::bessel_j(0.5, z);
    CHECK(std::abs(got.value - want_half) <=
          got.remainder_bound + 1e-14 * std::abs(want_half));
    CHECK(rel_err(got.value, want_half) < 1e-12);

    double want_3half =
        std::sqrt(2.0 / (kPi * z)) * (std::sin(z) / z - std::cos(z));
    auto got3 = specfun::bessel_j(1.5, z);
    CHECK(rel_err(got3.value, want_3half) < 1e-12);

    // the alternating series remainder is a real bound, and a tight one
    CHECK(got.remainder_bound >= 0.0);
    CHECK(got.remainder_bound < 1e-10);
  }
  CHECK(thrown_code([] { specfun::bessel_j(1.0, 5.0); }) ==
        ErrorCode::ParameterDomain);  // series cut off beyond z = 4
}

TEST_CASE("scaled bessel approaches 1/Gamma(omega+1) at the origin") {
  for (double om : {0.5, 2.0, 7.0}) {
    double want = 1.0 / specfun::gamma_fn(om + 1.0);
    CHECK(rel_err(specfun::scaled_bessel(om, 1e-8), want) < 1e-8);
  }
  // and keeps the closed form at moderate arguments
  double z = 2.0;
  double want = std::pow(z / 2.0, -0.5) *
                std::sqrt(2.0 / (kPi * z)) * std::sin(z);
  CHECK(rel_err(specfun::scaled_bessel(0.5, z), want) < 1e-12);
}

TEST_CASE("jacobi polynomials match the closed degree-1/2 forms") {
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> ut(-1.0, 1.0);
  for (double om : {0.5, 3.0, 8.0}) {
    for (double sg : {0.0, 0.25, 2.0}) {
      for (int trial = 0; trial < 20; ++trial) {
        double t = ut(rng);
        double p1 = 0.5 * (om - sg) + 0.5 * (om + sg + 2.0) * t;
        CHECK(std::abs(specfun::jacobi_eval(om, sg, 1, t) - p1) < 1e-12);
        double ws = om + sg;
        double p2 = 0.125 * ((ws + 3) * (ws + 4) * t * t +
                             2.0 * (om - sg) * (ws + 3) * t +
                             (om - sg) * (om - sg) - (ws + 4.0));
        CHECK(std::abs(specfun::jacobi_eval(om, sg, 2, t) - p2) < 1e-12);
      }
    }
  }
  CHECK(specfun::jacobi_eval(1.0, 1.0, 0, 0.3) == 1.0);
}

TEST_CASE("jacobi endpoint value and reflection symmetry") {
  // P_n^{(omega,sigma)}(1) = C(n+omega, n) for integer omega
  double binom = 1.0;  // C(18,10) computed incrementally
  for (int i = 1; i <= 10; ++i) binom *= double(8 + i) / double(i);
  CHECK(rel_err(specfun::jacobi_eval(8.0, 0.0, 10, 1.0), binom) < 1e-12);

  std::mt19937_64 rng(15);
  std::uniform_real_distribution<double> ut(-1.0, 1.0);
  for (int trial = 0; trial < 30; ++trial) {
    double t = ut(rng);
    double lhs = specfun::jacobi_eval(3.0, 1.5, 7, -t);
    double rhs = -specfun::jacobi_eval(1.5, 3.0, 7, t);  // (-1)^7
    CHECK(std::abs(lhs - rhs) < 1e-11 * std::max(1.0, std::abs(lhs)));
  }
}

TEST_CASE("admissibility threshold is sharp") {
  // omega*p + p/2 - 2 > 2k(p+1); at p=2, k=2 the threshold is omega > 6.5
  CHECK(specfun::admissible(7.0, 2.0, 2));
  CHECK(specfun::admissible(6.51, 2.0, 2));
  CHECK_FALSE(specfun::admissible(6.5, 2.0, 2));
  CHECK_FALSE(specfun::admissible(6.0, 2.0, 2));
  // p=2, k=3: omega > 9.5
  CHECK(specfun::admissible(10.0, 2.0, 3));
  CHECK_FALSE(specfun::admissible(9.0, 2.0, 3));
  CHECK(thrown_code([] { specfun::admissible(5.0, 0.5, 2); }) ==
        ErrorCode::ParameterDomain);
}

TEST_CASE("auto omega picks the smallest admissible integer plus slack") {
  double om = specfun::auto_omega(2.0, 2);
  CHECK(om == 8.0);
  CHECK(specfun::admissible(om, 2.0, 2));
  CHECK(specfun::admissible(om - 1.0, 2.0, 2));       // the unslacked choice
  CHECK_FALSE(specfun::admissible(om - 2.0, 2.0, 2)); // below the threshold
}

TEST_CASE("witness polynomial is y times the jacobi factor") {
  domain::CuspidalDomain d(0.5, 2, domain::CuspFunction::power(1.5, 0.9));
  specfun::WitnessSpec ws;
  ws.omega = 8.0;
  ws.sigma = 0.0;
  ws.p = 2.0;
  ws.n = 6;
  auto u = specfun::witness_poly(ws, d);
  CHECK(u.total_degree() == 7);

  std::mt19937_64 rng(21);
  std::uniform_real_distribution<double> ux(0.0, 1.0);
  for (int trial = 0; trial < 50; ++trial) {
    double x = ux(rng), y = d.y_max() * ux(rng);
    double want = y * specfun::jacobi_eval(8.0, 0.0, 6, 1.0 - x);
    CHECK(std::abs(u.eval(x, y) - want) <=
          1e-10 * std::max(1.0, std::abs(want)));
  }

  // dU/dy recovers the jacobi factor itself
  auto uy = polybasis::differentiate(u, polybasis::Axis::Y);
  for (int trial = 0; trial < 50; ++trial) {
    double x = ux(rng);
    double want = specfun::jacobi_eval(8.0, 0.0, 6, 1.0 - x);
    CHECK(std::abs(uy.eval(x, 0.3) - want) <=
          1e-10 * std::max(1.0, std::abs(want)));
  }
}

TEST_CASE("witness ratio reproduces frozen diagnostics") {
  domain::CuspidalDomain d(0.5, 2, domain::CuspFunction::power(1.5, 0.9));
  quad::QuadSpec spec;
  specfun::WitnessSpec ws;
  ws.omega = 8.0;
  ws.sigma = 0.0;
  ws.p = 2.0;
  ws.n = 10;
  auto r = specfun::witness_ratio(ws, d, spec);
  // eta' = f'(0.01) = 0.9 * 1.5 * 0.1 exactly; rho and the normalized ratio
  // were frozen from two independent quadrature routes
  CHECK(r.eta_prime == doctest::Approx(0.135).epsilon(1e-12));
  CHECK(r.rho == doctest::Approx(44.24709923).epsilon(1e-6));
  CHECK(r.normalized == doctest::Approx(0.05973358396).epsilon(1e-6));
  CHECK(r.normalized == doctest::Approx(r.rho * r.eta_prime / 100.0));

  // an inadmissible weight is refused
  specfun::WitnessSpec badw = ws;
  badw.omega = 5.0;
  CHECK(thrown_code([&] { specfun::witness_ratio(badw, d, spec); }) ==
        ErrorCode::DomainHypothesis);
  specfun::WitnessSpec badn = ws;
  badn.n = 0;
  CHECK(thrown_code([&] { specfun::witness_ratio(badn, d, spec); }) ==
        ErrorCode::ParameterDomain);
}

TEST_CASE("mehler-heine gap closes with n") {
  double g8 = specfun::mehler_heine_gap(7.0, 8, 1.0);
  double g64 = specfun::mehler_heine_gap(7.0, 64, 1.0);
  CHECK(g8 == doctest::Approx(2.68949197e-3).epsilon(1e-6));
  CHECK(g64 == doctest::Approx(9.96182619e-5).epsilon(1e-6));
  CHECK(g8 / g64 > 20.0);
  CHECK(thrown_code([] { specfun::mehler_heine_gap(7.0, 8, 2.5); }) ==
        ErrorCode::ParameterDomain);
}

TEST_CASE("scaled bessel minimum dominates the gamma bound") {
  for (double om : {0.5, 1.0, 2.0, 3.0, 5.0, 7.0, 10.0}) {
    auto b = specfun::bessel_min_bound(om);
    CHECK(b.ok);
    CHECK(b.min_value >= b.lower_bound);
    CHECK(rel_err(b.lower_bound, om / specfun::gamma_fn(om + 2.0)) < 1e-13);
    CHECK(b.arg_min >= 0.0);
    CHECK(b.arg_min <= 2.0);
  }
  // frozen instance: omega = 7
  auto b7 = specfun::bessel_min_bound(7.0);
  CHECK(b7.min_value == doctest::Approx(1.749440749e-4).epsilon(1e-6));
  CHECK(b7.lower_bound == doctest::Approx(7.0 / 40320.0).epsilon(1e-12));
}
