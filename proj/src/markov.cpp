#include "markov.hpp"

#include <atomic>
#include <cmath>
#include <cstdlib>
#include <functional>
#include <optional>
#include <random>
#include <thread>

#include "errors.hpp"
#include "numeric.hpp"

namespace mlab::markov {

namespace {

constexpr double kConditionCap = 1e12;

// Orthonormalizing frame of the degree-n space over K_{x >= x_lo}: with
// column scales S and the triangular factor R of the scaled, weighted
// evaluation matrix, T = S R^{-1} satisfies T^T G T = I.
struct OrthoFrame {
  polybasis::TensorBasis basis;
  numeric::Matrix r;
  std::vector<double> scale;
  double cond_estimate = 0.0;
  int s_order = 1;
};

OrthoFrame make_frame(const domain::CuspidalDomain& d, double x_lo, int n,
                      const quad::QuadSpec& spec) {
  OrthoFrame frame{polybasis::TensorBasis(n, d.y_max()), {}, {}, 0.0, 1};
  const int nb = frame.basis.size();
  frame.s_order = quad::exact_s_order(spec, d.k(), 2 * n);

  // pass 1: column norms (the diagonal of the Gram matrix)
  std::vector<numeric::KahanSum> diag(nb);
  std::vector<double> b(nb);
  quad::visit_panels(d, x_lo, spec, frame.s_order, 1,
                     [&](const std::vector<quad::QuadNode>& nodes) {
                       for (const auto& nd : nodes) {
                         frame.basis.eval_into(nd.x, nd.y, b);
                         for (int t = 0; t < nb; ++t)
                           diag[t].add(nd.w * b[t] * b[t]);
                       }
                     });
  frame.scale.resize(nb);
  for (int t = 0; t < nb; ++t) {
    double v = diag[t].value();
    require(v > 0.0, ErrorCode::Conditioning,
            "markov: degenerate basis column at degree " + std::to_string(n));
    frame.scale[t] = 1.0 / std::sqrt(v);
  }

  // pass 2: triangular factor of the scaled evaluation matrix
  numeric::StreamingQR qr(nb);
  quad::visit_panels(d, x_lo, spec, frame.s_order, 1,
                     [&](const std::vector<quad::QuadNode>& nodes) {
                       if (nodes.empty()) return;
                       numeric::Matrix block(int(nodes.size()), nb);
                       for (size_t row = 0; row < nodes.size(); ++row) {
                         frame.basis.eval_into(nodes[row].x, nodes[row].y, b);
                         double sw = std::sqrt(nodes[row].w);
                         for (int t = 0; t < nb; ++t)
                           block(int(row), t) = sw * b[t] * frame.scale[t];
                       }
                       qr.absorb(block);
                     });
  frame.r = qr.r();
  double ratio = qr.diag_ratio();
  frame.cond_estimate = ratio * ratio;
  require(frame.cond_estimate <= kConditionCap, ErrorCode::Conditioning,
          "markov: basis condition estimate " +
              std::to_string(frame.cond_estimate) + " at degree " +
              std::to_string(n) + " exceeds the cap");
  return frame;
}

// A = T^T M T accumulated nodewise over K_{x >= x_lo}, where the form M is
// sum of w * g g^T with g = column_map(basis values at the node).
numeric::Matrix accumulate_form(
    const domain::CuspidalDomain& d, double x_lo, const quad::QuadSpec& spec,
    const OrthoFrame& frame,
    const std::function<void(std::span<const double>, std::span<double>)>&
        column_map) {
  const int nb = frame.basis.size();
  numeric::Matrix a(nb, nb);
  std::vector<double> b(nb), g(nb), z(nb);
  quad::visit_panels(
      d, x_lo, spec, frame.s_order, 1,
      [&](const std::vector<quad::QuadNode>& nodes) {
        for (const auto& nd : nodes) {
          frame.basis.eval_into(nd.x, nd.y, b);
          column_map(b, g);
          for (int t = 0; t < nb; ++t) g[t] *= frame.scale[t];
          numeric::solve_rt(frame.r, g, z);
          for (int u = 0; u < nb; ++u) {
            if (z[u] == 0.0) continue;
            double wz = nd.w * z[u];
            for (int v = u; v < nb; ++v) a(u, v) += wz * z[v];
          }
        }
      });
  for (int u = 0; u < nb; ++u)
    for (int v = u + 1; v < nb; ++v) a(v, u) = a(u, v);
  return a;
}

numeric::Matrix markov_form(const domain::CuspidalDomain& d, int n, Axis axis,
                            const quad::QuadSpec& spec,
                            const OrthoFrame& frame) {
  polybasis::DiffOperator diff(frame.basis, axis);
  return accumulate_form(
      d, 0.0, spec, frame,
      [&diff](std::span<const double> b, std::span<double> g) {
        diff.apply_transpose(b, g);
      });
}

double top_eigenvalue(const numeric::Matrix& a) {
  auto ev = numeric::jacobi_eigenvalues(a);
  return ev.empty() ? 0.0 : std::max(ev.back(), 0.0);
}

}  // namespace

double markov_factor_p2(const domain::CuspidalDomain& d, int n, Axis axis,
                        const quad::QuadSpec& spec) {
  spec.validate();
  OrthoFrame frame = make_frame(d, 0.0, n, spec);
  return std::sqrt(top_eigenvalue(markov_form(d, n, axis, spec, frame)));
}

double remez_ratio_p2(const domain::CuspidalDomain& d, int n, double x_lo,
                      const quad::QuadSpec& spec) {
  spec.validate();
  require(x_lo >= 0.0 && x_lo < 1.0, ErrorCode::ParameterDomain,
          "remez: x_lo must lie in [0,1)");
  require(n >= 0 && n <= polybasis::kDegreeCap, ErrorCode::DegreeCap,
          "remez: degree " + std::to_string(n) + " exceeds the cap");
  if (x_lo == 0.0) return 1.0;  // no truncation: the regions coincide
  OrthoFrame frame = make_frame(d, x_lo, n, spec);
  numeric::Matrix a = accumulate_form(
      d, 0.0, spec, frame,
      [](std::span<const double> b, std::span<double> g) {
        for (size_t i = 0; i < b.size(); ++i) g[i] = b[i];
      });
  return std::sqrt(top_eigenvalue(a));
}

namespace {

struct SearchContext {
  const OrthoFrame& frame;
  // ratio evaluation in orthonormal coordinates
  std::function<double(std::span<const double>)> ratio;
};

// coefficients = S (R^{-1} c)
std::vector<double> coords_to_coeffs(const OrthoFrame& frame,
                                     std::span<const double> c) {
  const int nb = frame.basis.size();
  std::vector<double> z(nb), out(nb);
  numeric::solve_r(frame.r, c, z);
  for (int t = 0; t < nb; ++t) out[t] = frame.scale[t] * z[t];
  return out;
}

// c = R (S^{-1} coefficients)
std::vector<double> coeffs_to_coords(const OrthoFrame& frame,
                                     std::span<const double> coeffs) {
  const int nb = frame.basis.size();
  std::vector<double> s(nb), c(nb, 0.0);
  for (int t = 0; t < nb; ++t) s[t] = coeffs[t] / frame.scale[t];
  for (int i = 0; i < nb; ++i) {
    double acc = 0.0;
    for (int j = i; j < nb; ++j) acc += frame.r(i, j) * s[j];
    c[i] = acc;
  }
  return c;
}

void normalize(std::vector<double>& c) {
  double nrm = 0.0;
  for (double v : c) nrm += v * v;
  nrm = std::sqrt(nrm);
  if (nrm > 0.0)
    for (double& v : c) v /= nrm;
}

}  // namespace

double markov_factor_search(const domain::CuspidalDomain& d, int n, double p,
                            Axis axis, const quad::QuadSpec& spec,
                            long long budget, uint64_t seed,
                            std::span<const polybasis::Poly2> seeds) {
  spec.validate();
  require(p >= 1.0 && std::isfinite(p), ErrorCode::ParameterDomain,
          "search: p must lie in [1, inf)");
  require(budget >= 1, ErrorCode::ParameterDomain,
          "search: budget must be >= 1");
  OrthoFrame frame = make_frame(d, 0.0, n, spec);
  const int nb = frame.basis.size();

  std::function<double(std::span<const double>)> ratio;
  std::optional<numeric::Matrix> form;
  if (p == 2.0) {
    form = markov_form(d, n, axis, spec, frame);
    ratio = [&form](std::span<const double> c) {
      const auto& a = *form;
      const int m = a.rows();
      double num = 0.0, den = 0.0;
      for (int u = 0; u < m; ++u) {
        double au = 0.0;
        for (int v = 0; v < m; ++v) au += a(u, v) * c[v];
        num += c[u] * au;
        den += c[u] * c[u];
      }
      return den > 0.0 ? std::sqrt(std::max(num, 0.0) / den) : 0.0;
    };
  } else {
    ratio = [&](std::span<const double> c) {
      auto coeffs = coords_to_coeffs(frame, c);
      polybasis::Poly2 poly(frame.basis, std::move(coeffs));
      double den = quad::lp_norm(poly, d, {}, p, spec);
      if (!(den > 0.0)) return 0.0;
      double num =
          quad::lp_norm(polybasis::differentiate(poly, axis), d, {}, p, spec);
      return num / den;
    };
  }

  // start list: supplied seeds first, then reproducible random directions
  std::vector<std::vector<double>> starts;
  for (const auto& sp : seeds) {
    require(sp.basis().y_max() == frame.basis.y_max(),
            ErrorCode::ParameterDomain, "search: seed uses a different box");
    require(sp.basis().degree() <= n, ErrorCode::ParameterDomain,
            "search: seed degree exceeds the search degree");
    std::vector<double> embedded(nb, 0.0);
    const auto& sb = sp.basis();
    for (int t = 0; t < sb.size(); ++t) {
      auto [i, j] = sb.powers(t);
      embedded[frame.basis.index_of(i, j)] = sp.coeffs()[t];
    }
    auto c = coeffs_to_coords(frame, embedded);
    normalize(c);
    starts.push_back(std::move(c));
  }

  std::mt19937_64 rng(seed);
  auto uniform = [&rng]() { return double(rng() >> 11) * 0x1.0p-53; };
  auto normal = [&uniform]() {
    double u1 = std::max(uniform(), 1e-300), u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
  };

  const double steps[] = {0.5, 0.25, 0.1, 0.05, 0.02, 0.01, 0.005, 0.002, 0.001};
  long long evals = 0;
  double best = 0.0;
  size_t next_start = 0;

  while (evals < budget) {
    std::vector<double> c;
    if (next_start < starts.size()) {
      c = starts[next_start++];
    } else {
      c.resize(nb);
      for (int t = 0; t < nb; ++t) c[t] = normal();
      normalize(c);
    }
    double value = ratio(c);
    ++evals;
    for (double step : steps) {
      bool improved = true;
      while (improved && evals < budget) {
        improved = false;
        for (int t = 0; t < nb && evals < budget; ++t) {
          for (double sgn : {1.0, -1.0}) {
            if (evals >= budget) break;
            std::vector<double> cand = c;
            cand[t] += sgn * step;
            normalize(cand);
            double v = ratio(cand);
            ++evals;
            if (v > value * (1.0 + 1e-12)) {
              c = std::move(cand);
              value = v;
              improved = true;
              break;  // keep the sign that worked, move to the next axis
            }
          }
        }
      }
      if (evals >= budget) break;
    }
    best = std::max(best, value);
  }
  return best;
}

FactorSeries factor_series(const domain::CuspidalDomain& d, FactorKind kind,
                           double p, int n_min, int n_max,
                           const quad::QuadSpec& spec,
                           const SeriesOptions& opts) {
  spec.validate();
  require(n_min >= 0 && n_max >= n_min, ErrorCode::ParameterDomain,
          "series: need 0 <= n_min <= n_max");
  // degrees beyond the basis cap are not rejected here: they fail inside the
  // per-degree loop, so the leading complete entries survive in the result
  if (kind == FactorKind::Remez) {
    require(p == 2.0, ErrorCode::ParameterDomain,
            "series: the Remez ratio is computed at p = 2");
    require(opts.x_lo_override >= 0.0 || n_min >= 1,
            ErrorCode::ParameterDomain,
            "series: Remez with x_lo = 1/n^2 needs n_min >= 1");
    if (opts.x_lo_override >= 0.0)
      require(opts.x_lo_override < 1.0, ErrorCode::ParameterDomain,
              "series: x_lo_override must lie in [0,1)");
  }
  if (opts.method == Method::ExactEigen)
    require(p == 2.0, ErrorCode::ParameterDomain,
            "series: the exact-eigen method requires p = 2; use the search "
            "method for other p");
  const int threads = std::max(1, opts.threads);

  FactorSeries series;
  series.kind = kind;
  series.p = p;
  series.method = opts.method;
  series.domain = d.describe();

  const int count = n_max - n_min + 1;
  std::vector<std::optional<double>> values(count);
  std::vector<std::string> errors(count);
  std::vector<std::optional<ErrorCode>> codes(count);

  auto compute = [&](int idx) {
    const int n = n_min + idx;
    try {
      double v = 0.0;
      switch (kind) {
        case FactorKind::MarkovX:
        case FactorKind::MarkovY: {
          Axis axis = kind == FactorKind::MarkovX ? Axis::X : Axis::Y;
          v = opts.method == Method::ExactEigen
                  ? markov_factor_p2(d, n, axis, spec)
                  : markov_factor_search(d, n, p, axis, spec, opts.budget,
                                         opts.seed + uint64_t(n));
          break;
        }
        case FactorKind::Remez: {
          double x_lo = opts.x_lo_override >= 0.0
                            ? opts.x_lo_override
                            : 1.0 / (double(n) * double(n));
          v = remez_ratio_p2(d, n, x_lo, spec);
          break;
        }
      }
      values[idx] = v;
    } catch (const Error& e) {
      errors[idx] = e.what();
      codes[idx] = e.code();
    } catch (const std::exception& e) {
      errors[idx] = std::string("internal: ") + e.what();
      codes[idx] = ErrorCode::Internal;
    }
  };

  if (threads == 1 || count == 1) {
    for (int idx = 0; idx < count; ++idx) {
      compute(idx);
      if (!values[idx]) break;  // no point computing past the first failure
    }
  } else {
    std::atomic<int> cursor{0};
    std::vector<std::thread> pool;
    int workers = std::min(threads, count);
    pool.reserve(workers);
    for (int w = 0; w < workers; ++w)
      pool.emplace_back([&]() {
        for (;;) {
          int idx = cursor.fetch_add(1);
          if (idx >= count) return;
          compute(idx);
        }
      });
    for (auto& th : pool) th.join();
  }

  for (int idx = 0; idx < count; ++idx) {
    if (values[idx]) {
      series.entries.emplace_back(n_min + idx, *values[idx]);
    } else {
      series.complete = false;
      series.error = errors[idx].empty()
                         ? "degree " + std::to_string(n_min + idx) + " failed"
                         : errors[idx];
      series.error_code = codes[idx] ? codes[idx] : ErrorCode::Internal;
      break;
    }
  }
  return series;
}

ExponentFit fit_exponent(std::span<const int> ns,
                         std::span<const double> values, int n_lo, int n_hi) {
  require(ns.size() == values.size(), ErrorCode::ParameterDomain,
          "fit: mismatched array lengths");
  std::vector<double> lx, ly;
  for (size_t i = 0; i < ns.size(); ++i) {
    int n = ns[i];
    double v = values[i];
    if (n < 1 || n < n_lo || (n_hi > 0 && n > n_hi)) continue;
    if (!(v > 0.0) || !std::isfinite(v)) continue;
    lx.push_back(std::log(double(n)));
    ly.push_back(std::log(v));
  }
  require(lx.size() >= 2, ErrorCode::InsufficientData,
          "fit: need at least two usable points in the window");

  numeric::Matrix a(int(lx.size()), 2);
  std::vector<double> b(lx.size());
  for (size_t i = 0; i < lx.size(); ++i) {
    a(int(i), 0) = 1.0;
    a(int(i), 1) = lx[i];
    b[i] = ly[i];
  }
  auto coef = numeric::least_squares(a, b);

  ExponentFit fit;
  fit.intercept = coef[0];
  fit.slope = coef[1];
  fit.points_used = int(lx.size());
  numeric::KahanSum ss;
  for (size_t i = 0; i < lx.size(); ++i) {
    double r = ly[i] - (coef[0] + coef[1] * lx[i]);
    ss.add(r * r);
  }
  fit.residual_rms = std::sqrt(ss.value() / double(lx.size()));
  return fit;
}

ExponentFit fit_exponent(const FactorSeries& series, int n_lo, int n_hi) {
  std::vector<int> ns;
  std::vector<double> vals;
  for (const auto& [n, v] : series.entries) {
    ns.push_back(n);
    vals.push_back(v);
  }
  return fit_exponent(ns, vals, n_lo, n_hi);
}

}  // namespace mlab::markov
