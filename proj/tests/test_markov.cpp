#include <cmath>
#include <vector>

#include "doctest.h"
#include "domain.hpp"
#include "markov.hpp"
#include "polybasis.hpp"
#include "quad.hpp"
#include "test_support.hpp"

using namespace mlab;
using markov::FactorKind;
using markov::Method;
using polybasis::Axis;
using testsup::rel_err;
using testsup::thrown_code;

namespace {

domain::CuspidalDomain moment_domain() {
  return domain::CuspidalDomain(0.5, 3, domain::CuspFunction::power(2.0, 1.0));
}

domain::CuspidalDomain gallery_r2() {
  return domain::CuspidalDomain(0.5, 3, domain::CuspFunction::power(2.0, 0.9));
}

double moment(int i, int j) {
  return (1.0 / (i + 2 * j + 3) - std::pow(0.5, j + 1) / (i + 3 * j + 4)) /
         (j + 1);
}

// largest lambda with N v = lambda G v for N = m00 * e_a e_a^T over the
// degree-1 space span{1, x, y}: lambda = m00 * (G^{-1})_{aa}.
double hand_degree1_factor(int axis_index) {
  double g[3][3] = {{moment(0, 0), moment(1, 0), moment(0, 1)},
                    {moment(1, 0), moment(2, 0), moment(1, 1)},
                    {moment(0, 1), moment(1, 1), moment(0, 2)}};
  double det = g[0][0] * (g[1][1] * g[2][2] - g[1][2] * g[2][1]) -
               g[0][1] * (g[1][0] * g[2][2] - g[1][2] * g[2][0]) +
               g[0][2] * (g[1][0] * g[2][1] - g[1][1] * g[2][0]);
  double cof;  // cofactor of the diagonal entry for the chosen axis
  if (axis_index == 1)
    cof = g[0][0] * g[2][2] - g[0][2] * g[2][0];
  else
    cof = g[0][0] * g[1][1] - g[0][1] * g[1][0];
  return std::sqrt(moment(0, 0) * cof / det);
}

}  // namespace

TEST_CASE("degree-one factors match a hand-built eigenproblem") {
  auto d = moment_domain();
  quad::QuadSpec spec;
  double handY = hand_degree1_factor(2);
  double handX = hand_degree1_factor(1);
  CHECK(rel_err(markov::markov_factor_p2(d, 1, Axis::Y, spec), handY) < 1e-10);
  CHECK(rel_err(markov::markov_factor_p2(d, 1, Axis::X, spec), handX) < 1e-10);
  // frozen values of the closed forms themselves
  CHECK(handY == doctest::Approx(8.9528845955864).epsilon(1e-12));
  CHECK(handX == doctest::Approx(10.1159181378623).epsilon(1e-12));
}

TEST_CASE("markov factors grow with degree") {
  auto d = gallery_r2();
  quad::QuadSpec spec;
  double prev = 0.0;
  for (int n = 1; n <= 6; ++n) {
    double m = markov::markov_factor_p2(d, n, Axis::Y, spec);
    CHECK(m > prev);
    prev = m;
  }
  // degree 0: constants have zero derivative
  CHECK(markov::markov_factor_p2(d, 0, Axis::Y, spec) == 0.0);
}

TEST_CASE("search stays below the eigen value and comes close") {
  auto d = moment_domain();
  quad::QuadSpec spec;
  for (int n = 1; n <= 3; ++n) {
    double eig = markov::markov_factor_p2(d, n, Axis::Y, spec);
    double got =
        markov::markov_factor_search(d, n, 2.0, Axis::Y, spec, 100000, 12345);
    CHECK(got <= eig * (1.0 + 1e-9));
    CHECK(got >= 0.9 * eig);
  }

  // deterministic for a fixed seed
  double a =
      markov::markov_factor_search(d, 2, 2.0, Axis::Y, spec, 20000, 777);
  double b =
      markov::markov_factor_search(d, 2, 2.0, Axis::Y, spec, 20000, 777);
  CHECK(a == b);

  // p = 1 also runs (no eigen shortcut available there)
  double p1 =
      markov::markov_factor_search(d, 1, 1.0, Axis::Y, spec, 4000, 99);
  CHECK(p1 > 0.0);
  CHECK(std::isfinite(p1));
}

TEST_CASE("remez ratios in lemma mode stay above one") {
  auto d = gallery_r2();
  quad::QuadSpec spec;
  for (int n = 2; n <= 6; ++n) {
    double r = markov::remez_ratio_p2(d, n, 1.0 / double(n * n), spec);
    CHECK(r >= 1.0);
    CHECK(r < 5.0);
  }
  // no truncation means identical regions
  CHECK(markov::remez_ratio_p2(d, 3, 0.0, spec) == 1.0);
  // a sliver of a truncation barely moves the ratio
  double tiny = markov::remez_ratio_p2(d, 3, 1e-6, spec);
  CHECK(tiny >= 1.0 - 1e-12);
  CHECK(tiny < 1.001);
  CHECK(thrown_code([&] { markov::remez_ratio_p2(d, 3, 1.0, spec); }) ==
        ErrorCode::ParameterDomain);
  CHECK(thrown_code([&] { markov::remez_ratio_p2(d, 99, 0.0, spec); }) ==
        ErrorCode::DegreeCap);
}

TEST_CASE("factor series merges degrees in order, independent of threads") {
  auto d = gallery_r2();
  quad::QuadSpec spec;
  markov::SeriesOptions one;
  one.threads = 1;
  auto s1 = markov::factor_series(d, FactorKind::MarkovY, 2.0, 1, 6, spec, one);
  REQUIRE(s1.complete);
  REQUIRE(s1.entries.size() == 6);
  for (size_t i = 0; i < s1.entries.size(); ++i)
    CHECK(s1.entries[i].first == int(i) + 1);

  markov::SeriesOptions four;
  four.threads = 4;
  auto s4 =
      markov::factor_series(d, FactorKind::MarkovY, 2.0, 1, 6, spec, four);
  REQUIRE(s4.entries.size() == s1.entries.size());
  for (size_t i = 0; i < s1.entries.size(); ++i) {
    CHECK(s4.entries[i].first == s1.entries[i].first);
    CHECK(s4.entries[i].second == s1.entries[i].second);  // bit for bit
  }
}

TEST_CASE("series reports the first failing degree") {
  auto d = gallery_r2();
  quad::QuadSpec spec;
  markov::SeriesOptions opts;
  auto s = markov::factor_series(d, FactorKind::MarkovY, 2.0, 17, 18, spec,
                                 opts);
  CHECK_FALSE(s.complete);
  CHECK(s.entries.empty());
  CHECK(s.error_code == ErrorCode::DegreeCap);
  CHECK_FALSE(s.error.empty());

  // eigen method demands p = 2
  CHECK(thrown_code([&] {
          markov::factor_series(d, FactorKind::MarkovY, 3.0, 1, 2, spec, opts);
        }) == ErrorCode::ParameterDomain);
  CHECK(thrown_code([&] {
          markov::factor_series(d, FactorKind::Remez, 1.0, 2, 4, spec, opts);
        }) == ErrorCode::ParameterDomain);
}

TEST_CASE("remez series honours a fixed truncation override") {
  auto d = gallery_r2();
  quad::QuadSpec spec;
  markov::SeriesOptions opts;
  opts.x_lo_override = 0.25;
  auto s = markov::factor_series(d, FactorKind::Remez, 2.0, 2, 4, spec, opts);
  REQUIRE(s.complete);
  for (const auto& [n, v] : s.entries) {
    CHECK(v == doctest::Approx(markov::remez_ratio_p2(d, n, 0.25, spec))
                   .epsilon(1e-12));
    CHECK(v >= 1.0);
  }
}

TEST_CASE("exponent fit recovers an exact power law") {
  std::vector<int> ns;
  std::vector<double> vals;
  for (int n = 2; n <= 40; ++n) {
    ns.push_back(n);
    vals.push_back(3.0 * std::pow(double(n), 2.5));
  }
  auto fit = markov::fit_exponent(ns, vals, 0, 0);
  CHECK(fit.slope == doctest::Approx(2.5).epsilon(1e-12));
  CHECK(fit.intercept == doctest::Approx(std::log(3.0)).epsilon(1e-10));
  CHECK(fit.residual_rms < 1e-12);
  CHECK(fit.points_used == int(ns.size()));

  // window selection and the insufficient-data contract
  auto window = markov::fit_exponent(ns, vals, 10, 20);
  CHECK(window.points_used == 11);
  CHECK(thrown_code([&] { markov::fit_exponent(ns, vals, 39, 39); }) ==
        ErrorCode::InsufficientData);

  // non-positive values are skipped, not fitted
  std::vector<int> ns2 = {2, 3, 4, 5};
  std::vector<double> vals2 = {4.0, -1.0, 16.0, 25.0};
  auto fit2 = markov::fit_exponent(ns2, vals2, 0, 0);
  CHECK(fit2.points_used == 3);
  CHECK(fit2.slope == doctest::Approx(2.0).epsilon(1e-10));
}

TEST_CASE("fitted slopes on the gallery separate the two axes") {
  auto d = gallery_r2();
  quad::QuadSpec spec;
  markov::SeriesOptions opts;
  auto sy =
      markov::factor_series(d, FactorKind::MarkovY, 2.0, 1, 10, spec, opts);
  auto sx =
      markov::factor_series(d, FactorKind::MarkovX, 2.0, 1, 10, spec, opts);
  auto fy = markov::fit_exponent(sy, 4, 10);
  auto fx = markov::fit_exponent(sx, 4, 10);
  CHECK(fy.slope > 3.0);
  CHECK(fy.slope < 5.0);
  CHECK(fx.slope > 1.4);
  CHECK(fx.slope < 2.6);
  CHECK(fy.slope > fx.slope);  // the cusp bites the y-derivative harder
}
