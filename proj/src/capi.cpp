// C surface of the library: opaque handles, status codes, thread-local
// error text. Every entry point catches everything; exceptions never cross
// the boundary.

#include "mlab/mlab.h"

#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <string>

#include "domain.hpp"
#include "errors.hpp"
#include "markov.hpp"
#include "quad.hpp"
#include "specfun.hpp"

struct mlab_domain {
  mlab::domain::CuspidalDomain d;
};

namespace {

thread_local std::string g_last_error;

mlab_status status_of(mlab::ErrorCode code) {
  using EC = mlab::ErrorCode;
  switch (code) {
    case EC::ParameterDomain:
    case EC::Range:
      return MLAB_ERR_PARAM;
    case EC::DomainHypothesis:
      return MLAB_ERR_HYPOTHESIS;
    case EC::DegreeCap:
    case EC::Conditioning:
      return MLAB_ERR_CONDITIONING;
    case EC::QuadratureBudget:
      return MLAB_ERR_QUADRATURE;
    case EC::InsufficientData:
      return MLAB_ERR_INSUFFICIENT_DATA;
    case EC::Internal:
      return MLAB_ERR_INTERNAL;
  }
  return MLAB_ERR_INTERNAL;
}

template <class Fn>
mlab_status guarded(Fn&& fn) {
  try {
    fn();
    g_last_error.clear();
    return MLAB_OK;
  } catch (const mlab::Error& e) {
    g_last_error = e.what();
    return status_of(e.code());
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return MLAB_ERR_INTERNAL;
  } catch (...) {
    g_last_error = "unknown error";
    return MLAB_ERR_INTERNAL;
  }
}

mlab_status param_error(const std::string& msg) {
  g_last_error = msg;
  return MLAB_ERR_PARAM;
}

mlab::quad::QuadSpec to_spec(const mlab_quad_opts* opts) {
  mlab::quad::QuadSpec spec;
  if (opts) {
    spec.grading_ratio = opts->grading_ratio;
    spec.num_graded_panels = opts->graded_panels;
    spec.base_gauss_order = opts->base_gauss_order;
    spec.rel_tol = opts->rel_tol;
    spec.p_adaptive = opts->p_adaptive != 0;
  }
  return spec;
}

int resolve_threads(int32_t threads) {
  if (threads > 0) return threads;
  if (const char* env = std::getenv("MLAB_THREADS")) {
    int v = std::atoi(env);
    if (v >= 1) return v;
  }
  return 1;
}

}  // namespace

extern "C" {

void mlab_quad_opts_default(mlab_quad_opts* opts) {
  if (!opts) return;
  mlab::quad::QuadSpec spec;
  opts->grading_ratio = spec.grading_ratio;
  opts->graded_panels = spec.num_graded_panels;
  opts->base_gauss_order = spec.base_gauss_order;
  opts->rel_tol = spec.rel_tol;
  opts->p_adaptive = spec.p_adaptive ? 1 : 0;
}

const char* mlab_version(void) { return "1.0.0"; }

const char* mlab_last_error(void) { return g_last_error.c_str(); }

mlab_status mlab_domain_create(double a, int32_t k, mlab_family family,
                               double r, double b, double c,
                               mlab_domain** out) {
  if (!out) return param_error("domain_create: out must not be NULL");
  *out = nullptr;
  return guarded([&]() {
    using mlab::domain::CuspFunction;
    CuspFunction f = [&]() {
      switch (family) {
        case MLAB_FAMILY_POWER:
          return CuspFunction::power(r, b);
        case MLAB_FAMILY_LOGLOG:
          return CuspFunction::log_log(r, b);
        case MLAB_FAMILY_NEGLOG:
          return CuspFunction::neg_log(r, b);
        case MLAB_FAMILY_LOGPOWER:
          return CuspFunction::log_power(r, b, c);
      }
      mlab::fail(mlab::ErrorCode::ParameterDomain,
                 "domain_create: unknown family");
    }();
    *out = new mlab_domain{mlab::domain::CuspidalDomain(a, int(k), f)};
  });
}

mlab_status mlab_domain_create_custom(double a, int32_t k,
                                      double (*value)(double, void*),
                                      double (*deriv)(double, void*),
                                      void* ctx, mlab_domain** out) {
  if (!out) return param_error("domain_create_custom: out must not be NULL");
  *out = nullptr;
  if (!value) return param_error("domain_create_custom: value must not be NULL");
  return guarded([&]() {
    std::function<double(double)> fv = [value, ctx](double x) {
      return value(x, ctx);
    };
    std::function<double(double)> fd;
    if (deriv)
      fd = [deriv, ctx](double x) { return deriv(x, ctx); };
    auto f = mlab::domain::CuspFunction::custom(std::move(fv), std::move(fd));
    *out = new mlab_domain{mlab::domain::CuspidalDomain(a, int(k), f)};
  });
}

void mlab_domain_free(mlab_domain* d) { delete d; }

mlab_status mlab_domain_boundaries(const mlab_domain* d, double x, double* lo,
                                   double* hi) {
  if (!d || !lo || !hi) return param_error("boundaries: NULL argument");
  return guarded([&]() {
    auto [l, h] = d->d.boundaries(x);
    *lo = l;
    *hi = h;
  });
}

mlab_status mlab_domain_f_prime(const mlab_domain* d, double x, double* value,
                                int32_t* is_limit) {
  if (!d || !value || !is_limit) return param_error("f_prime: NULL argument");
  return guarded([&]() {
    auto fp = d->d.f_prime(x);
    *value = fp.value;
    *is_limit = fp.limit_at_zero ? 1 : 0;
  });
}

mlab_status mlab_domain_contains(const mlab_domain* d, double x, double y,
                                 int32_t* inside) {
  if (!d || !inside) return param_error("contains: NULL argument");
  return guarded([&]() { *inside = d->d.contains(x, y) ? 1 : 0; });
}

mlab_status mlab_domain_validate(const mlab_domain* d, int32_t grid_points,
                                 mlab_validity_report* report) {
  if (!d || !report) return param_error("validate: NULL argument");
  return guarded([&]() {
    auto rep = mlab::domain::validate(d->d, grid_points > 0 ? grid_points : 1024);
    std::memset(report, 0, sizeof(*report));
    report->valid = rep.valid ? 1 : 0;
    report->num_checks = int32_t(rep.checks.size());
    for (size_t i = 0; i < rep.checks.size() && i < MLAB_MAX_CHECKS; ++i) {
      const auto& c = rep.checks[i];
      std::snprintf(report->checks[i].name, sizeof(report->checks[i].name),
                    "%s", c.name.c_str());
      report->checks[i].pass = c.pass ? 1 : 0;
      report->checks[i].worst_x = c.worst_x;
      report->checks[i].violation = c.violation;
    }
  });
}

mlab_status mlab_domain_predicted_exponent(const mlab_domain* d,
                                           int64_t n_max,
                                           mlab_exponent_model model,
                                           int64_t* ns, double* taus,
                                           int32_t cap, int32_t* count,
                                           double* extrapolated,
                                           double* residual_rms) {
  if (!d || !ns || !taus || !count || !extrapolated || !residual_rms)
    return param_error("predicted_exponent: NULL argument");
  return guarded([&]() {
    using mlab::domain::ExponentModel;
    ExponentModel m = model == MLAB_MODEL_PLAIN    ? ExponentModel::PlainLimit
                      : model == MLAB_MODEL_INVLOG ? ExponentModel::InverseLog
                          : ExponentModel::InverseLogPlusLogLog;
    auto est = mlab::domain::predicted_exponent(d->d, n_max, m);
    *count = int32_t(est.raw.size());
    mlab::require(cap >= *count, mlab::ErrorCode::ParameterDomain,
                  "predicted_exponent: capacity " + std::to_string(cap) +
                      " below required " + std::to_string(*count));
    for (size_t i = 0; i < est.raw.size(); ++i) {
      ns[i] = est.raw[i].first;
      taus[i] = est.raw[i].second;
    }
    *extrapolated = est.extrapolated;
    *residual_rms = est.residual_rms;
  });
}

mlab_status mlab_factor_series(const mlab_domain* d, mlab_series_kind kind,
                               double p, int32_t n_min, int32_t n_max,
                               mlab_method method, int64_t budget,
                               uint64_t seed, const mlab_quad_opts* quad,
                               double x_lo_override, int32_t threads,
                               int32_t* ns, double* values, int32_t cap,
                               int32_t* count) {
  if (!d || !ns || !values || !count)
    return param_error("factor_series: NULL argument");
  *count = 0;
  using mlab::markov::FactorKind;
  using mlab::markov::Method;
  FactorKind fk = kind == MLAB_KIND_MARKOV_X   ? FactorKind::MarkovX
                  : kind == MLAB_KIND_MARKOV_Y ? FactorKind::MarkovY
                                               : FactorKind::Remez;
  mlab::markov::SeriesOptions opts;
  opts.method =
      method == MLAB_METHOD_SEARCH ? Method::Search : Method::ExactEigen;
  opts.budget = budget > 0 ? budget : 100000;
  opts.seed = seed;
  opts.x_lo_override =
      (x_lo_override >= 0.0 && x_lo_override < 1.0) ? x_lo_override : -1.0;
  opts.threads = resolve_threads(threads);

  mlab::markov::FactorSeries series;
  mlab_status st = guarded([&]() {
    series = mlab::markov::factor_series(d->d, fk, p, n_min, n_max,
                                         to_spec(quad), opts);
    mlab::require(cap >= int32_t(series.entries.size()),
                  mlab::ErrorCode::ParameterDomain,
                  "factor_series: capacity too small");
  });
  if (st != MLAB_OK) return st;
  for (size_t i = 0; i < series.entries.size(); ++i) {
    ns[i] = series.entries[i].first;
    values[i] = series.entries[i].second;
  }
  *count = int32_t(series.entries.size());
  if (!series.complete) {
    g_last_error = series.error;
    return status_of(series.error_code.value_or(mlab::ErrorCode::Internal));
  }
  return MLAB_OK;
}

mlab_status mlab_fit_exponent(const int32_t* ns, const double* values,
                              int32_t count, int32_t n_lo, int32_t n_hi,
                              double* slope, double* intercept,
                              double* residual_rms) {
  if (!ns || !values || !slope || !intercept || !residual_rms)
    return param_error("fit_exponent: NULL argument");
  if (count < 0) return param_error("fit_exponent: negative count");
  return guarded([&]() {
    std::vector<int> vn(ns, ns + count);
    auto fit = mlab::markov::fit_exponent(
        vn, std::span<const double>(values, size_t(count)), n_lo, n_hi);
    *slope = fit.slope;
    *intercept = fit.intercept;
    *residual_rms = fit.residual_rms;
  });
}

mlab_status mlab_admissible(double omega, double p, int32_t k, int32_t* ok) {
  if (!ok) return param_error("admissible: NULL argument");
  return guarded(
      [&]() { *ok = mlab::specfun::admissible(omega, p, int(k)) ? 1 : 0; });
}

mlab_status mlab_auto_omega(double p, int32_t k, double* omega) {
  if (!omega) return param_error("auto_omega: NULL argument");
  return guarded([&]() { *omega = mlab::specfun::auto_omega(p, int(k)); });
}

mlab_status mlab_witness_series(const mlab_domain* d, double omega,
                                double sigma, double p, int32_t n_min,
                                int32_t n_max, const mlab_quad_opts* quad,
                                int32_t* ns, double* rho, double* eta_prime,
                                double* normalized, int32_t cap,
                                int32_t* count) {
  if (!d || !ns || !rho || !eta_prime || !normalized || !count)
    return param_error("witness_series: NULL argument");
  *count = 0;
  if (n_min < 1 || n_max < n_min || n_max > 64)
    return param_error("witness_series: need 1 <= n_min <= n_max <= 64");
  if (cap < n_max - n_min + 1)
    return param_error("witness_series: capacity too small");
  auto spec = to_spec(quad);
  for (int32_t n = n_min; n <= n_max; ++n) {
    mlab::specfun::WitnessSpec ws{omega, sigma, int(n), p};
    mlab_status st = guarded([&]() {
      auto wr = mlab::specfun::witness_ratio(ws, d->d, spec);
      int32_t i = *count;
      ns[i] = n;
      rho[i] = wr.rho;
      eta_prime[i] = wr.eta_prime;
      normalized[i] = wr.normalized;
      ++*count;
    });
    if (st != MLAB_OK) return st;
  }
  return MLAB_OK;
}

}  // extern "C"
