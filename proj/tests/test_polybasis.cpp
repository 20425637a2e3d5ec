#include <cmath>
#include <random>
#include <vector>

#include "doctest.h"
#include "domain.hpp"
#include "polybasis.hpp"
#include "quad.hpp"
#include "test_support.hpp"

using namespace mlab;
using polybasis::Axis;
using polybasis::Monomial;
using polybasis::Poly2;
using polybasis::TensorBasis;
using testsup::rel_err;
using testsup::thrown_code;

namespace {

// direct evaluation of a monomial expansion, the oracle for basis round-trips
double eval_monomials(const std::vector<Monomial>& ms, double x, double y) {
  double v = 0.0;
  for (const auto& m : ms) v += m.coef * std::pow(x, m.i) * std::pow(y, m.j);
  return v;
}

std::vector<Monomial> random_monomials(std::mt19937_64& rng, int max_deg) {
  std::uniform_real_distribution<double> uc(-2.0, 2.0);
  std::vector<Monomial> ms;
  for (int i = 0; i <= max_deg; ++i)
    for (int j = 0; i + j <= max_deg; ++j) ms.push_back({i, j, uc(rng)});
  return ms;
}

}  // namespace

TEST_CASE("index map is degree-major and invertible") {
  TensorBasis b(5, 1.0);
  CHECK(b.size() == 21);
  int t = 0;
  for (int d = 0; d <= 5; ++d)
    for (int i = d; i >= 0; --i) {  // walk degree blocks
      auto [pi, pj] = b.powers(b.index_of(i, d - i));
      CHECK(pi == i);
      CHECK(pj == d - i);
      ++t;
    }
  CHECK(t == b.size());
  CHECK(b.index_of(0, 0) == 0);
  CHECK(thrown_code([&] { b.index_of(3, 3); }) == ErrorCode::ParameterDomain);
}

TEST_CASE("basis elements are shifted legendre products") {
  double ymax = 0.4;
  TensorBasis b(3, ymax);
  std::vector<double> vals(b.size());

  // both 1-d factors equal 1 at the upper-right corner of the box
  b.eval_into(1.0, ymax, vals);
  for (double v : vals) CHECK(v == doctest::Approx(1.0).epsilon(1e-14));

  // e_{0,2}(x, y) = P_2(2y/ymax - 1) independently of x
  int t = b.index_of(0, 2);
  for (double y : {0.1, 0.25, 0.37}) {
    double u = 2.0 * y / ymax - 1.0;
    double want = 0.5 * (3.0 * u * u - 1.0);
    b.eval_into(0.2, y, vals);
    CHECK(rel_err(vals[t], want) < 1e-14);
    b.eval_into(0.9, y, vals);
    CHECK(rel_err(vals[t], want) < 1e-14);
  }
}

TEST_CASE("degree cap and parameter validation") {
  CHECK(thrown_code([] { TensorBasis(polybasis::kDegreeCap + 1, 1.0); }) ==
        ErrorCode::DegreeCap);
  CHECK(thrown_code([] { TensorBasis(-1, 1.0); }) == ErrorCode::ParameterDomain);
  CHECK(thrown_code([] { TensorBasis(3, 0.0); }) == ErrorCode::ParameterDomain);
  std::vector<Monomial> toodeep = {{10, 9, 1.0}};
  CHECK(thrown_code([&] { polybasis::from_monomials(toodeep, 1.0); }) ==
        ErrorCode::DegreeCap);
}

TEST_CASE("from_monomials round-trips against direct evaluation") {
  std::mt19937_64 rng(23);
  std::uniform_real_distribution<double> ux(0.0, 1.0);
  double ymax = 0.9;
  for (int trial = 0; trial < 10; ++trial) {
    auto ms = random_monomials(rng, 6);
    auto poly = polybasis::from_monomials(ms, ymax);
    CHECK(poly.total_degree() == 6);
    for (int pt = 0; pt < 100; ++pt) {
      double x = ux(rng), y = ymax * ux(rng);
      double want = eval_monomials(ms, x, y);
      CHECK(std::abs(poly.eval(x, y) - want) <=
            1e-11 * std::max(1.0, std::abs(want)));
    }
  }

  // degree bookkeeping sees through zero coefficients
  std::vector<Monomial> sparse = {{0, 0, 1.0}, {2, 1, 0.0}, {1, 1, 3.0}};
  auto p = polybasis::from_monomials(sparse, 1.0);
  CHECK(p.total_degree() == 2);
  CHECK(p.y_degree() == 1);
  CHECK(p.eval(0.3, 0.5) == doctest::Approx(1.0 + 3.0 * 0.15).epsilon(1e-13));
}

TEST_CASE("differentiation matches calculus") {
  double ymax = 0.9;
  std::vector<Monomial> ms = {{2, 1, 3.0}, {0, 3, -1.0}, {1, 0, 2.0}};
  auto p = polybasis::from_monomials(ms, ymax);
  auto px = polybasis::differentiate(p, Axis::X);
  auto py = polybasis::differentiate(p, Axis::Y);
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> ux(0.0, 1.0);
  for (int pt = 0; pt < 50; ++pt) {
    double x = ux(rng), y = ymax * ux(rng);
    CHECK(rel_err(px.eval(x, y), 6.0 * x * y + 2.0) < 1e-12);
    CHECK(std::abs(py.eval(x, y) - (3.0 * x * x - 3.0 * y * y)) < 1e-12);
  }
  // degree drops, constants vanish
  CHECK(px.total_degree() == 2);
  auto c = polybasis::from_monomials(std::vector<Monomial>{{0, 0, 4.0}}, ymax);
  auto cx = polybasis::differentiate(c, Axis::X);
  CHECK(cx.total_degree() == 0);
  CHECK(cx.eval(0.5, 0.5) == doctest::Approx(0.0));
}

TEST_CASE("mixed partials commute") {
  std::mt19937_64 rng(31);
  for (int trial = 0; trial < 10; ++trial) {
    auto ms = random_monomials(rng, 5);
    auto p = polybasis::from_monomials(ms, 0.7);
    auto pxy = polybasis::differentiate(polybasis::differentiate(p, Axis::X),
                                        Axis::Y);
    auto pyx = polybasis::differentiate(polybasis::differentiate(p, Axis::Y),
                                        Axis::X);
    auto cx = pxy.coeffs();
    auto cy = pyx.coeffs();
    REQUIRE(cx.size() == cy.size());
    for (size_t i = 0; i < cx.size(); ++i)
      CHECK(std::abs(cx[i] - cy[i]) < 1e-12 * std::max(1.0, std::abs(cx[i])));
  }
}

TEST_CASE("derivative operators are nilpotent and mutually adjoint") {
  TensorBasis b(6, 0.9);
  polybasis::DiffOperator dy(b, Axis::Y);

  std::mt19937_64 rng(13);
  std::uniform_real_distribution<double> uc(-1.0, 1.0);
  std::vector<double> c(b.size()), tmp(b.size());
  for (auto& v : c) v = uc(rng);

  // degree+1 applications annihilate everything
  for (int rep = 0; rep < 7; ++rep) {
    dy.apply(c, tmp);
    c = tmp;
  }
  for (double v : c) CHECK(v == 0.0);

  // <D c, v> == <c, D^T v>
  std::vector<double> u(b.size()), v(b.size()), du(b.size()), dtv(b.size());
  for (int trial = 0; trial < 20; ++trial) {
    for (auto& w : u) w = uc(rng);
    for (auto& w : v) w = uc(rng);
    dy.apply(u, du);
    dy.apply_transpose(v, dtv);
    double lhs = 0.0, rhs = 0.0;
    for (int i = 0; i < b.size(); ++i) {
      lhs += du[i] * v[i];
      rhs += u[i] * dtv[i];
    }
    CHECK(std::abs(lhs - rhs) < 1e-10 * std::max(1.0, std::abs(lhs)));
  }
}

TEST_CASE("gram matrix: symmetry, positivity, and the norm identity") {
  domain::CuspidalDomain d(0.5, 3, domain::CuspFunction::power(2.0, 1.0));
  quad::QuadSpec spec;
  auto g = polybasis::gram(d, {}, 5, spec);
  const int nb = g.g.rows();
  REQUIRE(nb == 21);

  // exact symmetry by construction, PSD within rounding of the trace
  double trace = 0.0;
  for (int i = 0; i < nb; ++i) trace += g.g(i, i);
  for (int i = 0; i < nb; ++i)
    for (int j = 0; j < nb; ++j) CHECK(g.g(i, j) == g.g(j, i));
  auto ev = numeric::jacobi_eigenvalues(g.g);
  CHECK(ev.front() >= -1e-10 * trace);

  // G[const,const] integrates 1 over K: area 5/24 (e_0 = 1 everywhere)
  CHECK(rel_err(g.g(0, 0), 5.0 / 24.0) < 1e-12);

  // v^T G v == ||P_v||_2^2 with the norm computed independently
  std::mt19937_64 rng(41);
  std::uniform_real_distribution<double> uc(-1.0, 1.0);
  for (int trial = 0; trial < 5; ++trial) {
    std::vector<double> v(nb);
    for (auto& w : v) w = uc(rng);
    double quad_form = 0.0;
    for (int i = 0; i < nb; ++i)
      for (int j = 0; j < nb; ++j) quad_form += v[i] * g.g(i, j) * v[j];
    Poly2 pv(TensorBasis(5, d.y_max()), v);
    double nrm = quad::lp_norm(pv, d, {}, 2.0, spec);
    CHECK(rel_err(quad_form, nrm * nrm) < 1e-9);
  }
}

TEST_CASE("truncation shrinks the gram quadratic form") {
  domain::CuspidalDomain d(0.5, 3, domain::CuspFunction::power(2.0, 1.0));
  quad::QuadSpec spec;
  auto gfull = polybasis::gram(d, {}, 4, spec);
  auto gsub = polybasis::gram(d, {0.3}, 4, spec);
  std::mt19937_64 rng(43);
  std::uniform_real_distribution<double> uc(-1.0, 1.0);
  const int nb = gfull.g.rows();
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<double> v(nb);
    for (auto& w : v) w = uc(rng);
    double qf = 0.0, qs = 0.0;
    for (int i = 0; i < nb; ++i)
      for (int j = 0; j < nb; ++j) {
        qf += v[i] * gfull.g(i, j) * v[j];
        qs += v[i] * gsub.g(i, j) * v[j];
      }
    CHECK(qs <= qf * (1.0 + 1e-12));
  }
}

namespace {

// Worst entry of T^T G T - I. Accumulated in extended precision because the
// quadratic form cancels through entries as large as max|T|^2 * |G|; a plain
// double sum of those terms carries noise above the tolerance being checked.
double ortho_residual(const polybasis::GramMatrix& g,
                      const polybasis::BasisTransform& bt) {
  const int nb = g.g.rows();
  std::vector<long double> gt(size_t(nb) * nb);
  for (int u = 0; u < nb; ++u)
    for (int j = 0; j < nb; ++j) {
      long double s = 0.0L;
      for (int v = 0; v < nb; ++v)
        s += static_cast<long double>(g.g(u, v)) * bt.t(v, j);
      gt[size_t(u) * nb + j] = s;
    }
  long double worst = 0.0L;
  for (int i = 0; i < nb; ++i)
    for (int j = i; j < nb; ++j) {
      long double s = 0.0L;
      for (int u = 0; u < nb; ++u)
        s += static_cast<long double>(bt.t(u, i)) * gt[size_t(u) * nb + j];
      worst = std::max(worst, fabsl(s - (i == j ? 1.0L : 0.0L)));
    }
  return double(worst);
}

}  // namespace

TEST_CASE("orthonormalize produces an orthonormal family") {
  // T^T G T == I within the advertised 1e-8 across cusp shapes, in the
  // conditioning regime where a double-precision transform can represent
  // orthonormality at all (the residual of any stored T grows with the
  // condition of G and passes 1e-8 near condition estimate ~1e4).
  quad::QuadSpec spec;
  domain::CuspidalDomain cubic(0.5, 3, domain::CuspFunction::power(2.0, 0.9));
  domain::CuspidalDomain mild(0.5, 2, domain::CuspFunction::power(1.5, 0.9));
  domain::CuspidalDomain wedge(0.5, 2, domain::CuspFunction::power(1.0, 1.0));
  for (const auto* d : {&cubic, &mild, &wedge}) {
    auto g = polybasis::gram(*d, {}, 4, spec);
    auto bt = polybasis::orthonormalize(g);
    CHECK(bt.cond_estimate >= 1.0);
    CHECK(ortho_residual(g, bt) < 1e-8);
  }

  auto g8 = polybasis::gram(cubic, {}, 8, spec);

  // past that regime the factorization must still go through (the markov
  // pipeline runs to the condition cap) and stay finite
  auto bt8 = polybasis::orthonormalize(g8);
  CHECK(bt8.cond_estimate > 1e4);
  for (int u = 0; u < g8.g.rows(); ++u)
    for (int j = 0; j < g8.g.cols(); ++j)
      CHECK(std::isfinite(bt8.t(u, j)));

  // the explicit-entry fallback handles well-conditioned sizes too
  auto gsmall = polybasis::gram(cubic, {}, 3, spec);
  gsmall.factor.reset();
  auto bt2 = polybasis::orthonormalize(gsmall);
  CHECK(bt2.cond_estimate >= 1.0);
  CHECK(ortho_residual(gsmall, bt2) < 1e-8);

  // an impossible condition cap triggers the conditioning error
  CHECK(thrown_code([&] { polybasis::orthonormalize(g8, 1.5); }) ==
        ErrorCode::Conditioning);
}
