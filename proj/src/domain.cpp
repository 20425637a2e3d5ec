#include "domain.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include "errors.hpp"
#include "numeric.hpp"

namespace mlab::domain {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kGridFloor = 1e-12;  // smallest abscissa of the check grid
constexpr double kSlopeFloor = 1e-3;  // minimal log-log decay rate for f(x)/x

double checked_pow(double x, double e) { return std::pow(x, e); }

}  // namespace

CuspFunction CuspFunction::power(double r, double b) {
  require(std::isfinite(r) && std::isfinite(b), ErrorCode::ParameterDomain,
          "power profile: r and b must be finite");
  CuspFunction f;
  f.family_ = Family::Power;
  f.r_ = r;
  f.b_ = b;
  return f;
}

CuspFunction CuspFunction::log_log(double r, double b) {
  require(std::isfinite(r), ErrorCode::ParameterDomain,
          "log-log profile: r must be finite");
  // -ln(b*x) must stay > 1 on (0,1] so the outer log is defined and positive.
  require(b > 0.0 && b < std::exp(-1.0), ErrorCode::ParameterDomain,
          "log-log profile: requires 0 < b < 1/e");
  CuspFunction f;
  f.family_ = Family::LogLog;
  f.r_ = r;
  f.b_ = b;
  return f;
}

CuspFunction CuspFunction::neg_log(double r, double b) {
  require(std::isfinite(r), ErrorCode::ParameterDomain,
          "neg-log profile: r must be finite");
  require(b > 0.0 && b <= std::exp(-1.0), ErrorCode::ParameterDomain,
          "neg-log profile: requires 0 < b <= 1/e");
  CuspFunction f;
  f.family_ = Family::NegLog;
  f.r_ = r;
  f.b_ = b;
  return f;
}

CuspFunction CuspFunction::log_power(double r, double b, double c) {
  require(std::isfinite(r) && std::isfinite(c), ErrorCode::ParameterDomain,
          "log-power profile: r and c must be finite");
  require(b > 0.0 && b < 1.0, ErrorCode::ParameterDomain,
          "log-power profile: requires 0 < b < 1");
  CuspFunction f;
  f.family_ = Family::LogPower;
  f.r_ = r;
  f.b_ = b;
  f.c_ = c;
  return f;
}

CuspFunction CuspFunction::custom(std::function<double(double)> value,
                                  std::function<double(double)> derivative) {
  require(static_cast<bool>(value), ErrorCode::ParameterDomain,
          "custom profile: value function is required");
  CuspFunction f;
  f.family_ = Family::Custom;
  f.fn_ = std::move(value);
  f.dfn_ = std::move(derivative);
  return f;
}

double CuspFunction::value(double x) const {
  require(x >= 0.0 && x <= 1.0, ErrorCode::Range,
          "cusp profile: x must lie in [0,1]");
  if (x == 0.0) {
    switch (family_) {
      case Family::Power:
        if (r_ > 0.0) return 0.0;
        return r_ == 0.0 ? b_ : kInf;
      case Family::LogLog:
      case Family::NegLog:
      case Family::LogPower:
        return r_ > 0.0 ? 0.0 : kInf;
      case Family::Custom:
        return fn_(0.0);
    }
  }
  switch (family_) {
    case Family::Power:
      return b_ * checked_pow(x, r_);
    case Family::LogLog:
      return checked_pow(x, r_) * std::log(-std::log(b_ * x));
    case Family::NegLog:
      return -checked_pow(x, r_) * std::log(b_ * x);
    case Family::LogPower:
      return checked_pow(x, r_) * checked_pow(-std::log(b_ * x), c_);
    case Family::Custom:
      return fn_(x);
  }
  fail(ErrorCode::Internal, "cusp profile: unreachable family");
}

double CuspFunction::derivative(double x) const {
  require(x > 0.0 && x <= 1.0, ErrorCode::Range,
          "cusp profile derivative: x must lie in (0,1]");
  switch (family_) {
    case Family::Power:
      return b_ * r_ * checked_pow(x, r_ - 1.0);
    case Family::LogLog: {
      double u = -std::log(b_ * x);
      return checked_pow(x, r_ - 1.0) * (r_ * std::log(u) - 1.0 / u);
    }
    case Family::NegLog:
      return -checked_pow(x, r_ - 1.0) * (r_ * std::log(b_ * x) + 1.0);
    case Family::LogPower: {
      double u = -std::log(b_ * x);
      return checked_pow(x, r_ - 1.0) *
             (r_ * checked_pow(u, c_) - c_ * checked_pow(u, c_ - 1.0));
    }
    case Family::Custom:
      require(static_cast<bool>(dfn_), ErrorCode::ParameterDomain,
              "custom profile: no derivative function supplied");
      return dfn_(x);
  }
  fail(ErrorCode::Internal, "cusp profile: unreachable family");
}

bool CuspFunction::has_derivative() const {
  return family_ != Family::Custom || static_cast<bool>(dfn_);
}

std::string CuspFunction::describe() const {
  std::ostringstream os;
  os.precision(10);
  switch (family_) {
    case Family::Power:
      os << b_ << "*x^" << r_;
      break;
    case Family::LogLog:
      os << "x^" << r_ << "*ln(-ln(" << b_ << "*x))";
      break;
    case Family::NegLog:
      os << "-x^" << r_ << "*ln(" << b_ << "*x)";
      break;
    case Family::LogPower:
      os << "x^" << r_ << "*(-ln(" << b_ << "*x))^" << c_;
      break;
    case Family::Custom:
      os << "custom";
      break;
  }
  return os.str();
}

CuspidalDomain::CuspidalDomain(double a, int k, CuspFunction f)
    : a_(a), k_(k), f_(std::move(f)) {
  require(std::isfinite(a) && a > 0.0, ErrorCode::ParameterDomain,
          "domain: lower-boundary coefficient a must be positive");
  require(k >= 2 && k <= 64, ErrorCode::ParameterDomain,
          "domain: cusp order k must be an integer in [2, 64]");
}

double CuspidalDomain::lower(double x) const {
  double p = 1.0;
  for (int i = 0; i < k_; ++i) p *= x;
  return a_ * p;
}

double CuspidalDomain::upper(double x) const { return f_.value(x); }

std::pair<double, double> CuspidalDomain::boundaries(double x) const {
  require(x >= 0.0 && x <= 1.0, ErrorCode::Range,
          "boundaries: x must lie in [0,1]");
  return {lower(x), upper(x)};
}

FPrimeValue CuspidalDomain::f_prime(double x) const {
  require(x >= 0.0 && x <= 1.0, ErrorCode::Range,
          "f_prime: x must lie in [0,1]");
  if (x == 0.0) {
    if (f_.family() == Family::Custom)
      return {f_.derivative(0.0), false};  // caller-defined at 0
    // closed-form limit of f' at 0+: vanishes exactly when r > 1
    double lim;
    if (f_.r() > 1.0)
      lim = 0.0;
    else if (f_.family() == Family::Power && f_.r() == 1.0)
      lim = f_.b();
    else
      lim = kInf;
    return {lim, true};
  }
  return {f_.derivative(x), false};
}

bool CuspidalDomain::contains(double x, double y) const {
  if (!(x >= 0.0 && x <= 1.0)) return false;
  return y >= lower(x) && y <= upper(x);
}

double CuspidalDomain::y_max() const { return f_.value(1.0); }

std::string CuspidalDomain::describe() const {
  std::ostringstream os;
  os.precision(10);
  os << "K(a=" << a_ << ", k=" << k_ << ", f=" << f_.describe() << ")";
  return os.str();
}

namespace {

// Geometric grid on (0,1], ascending, spanning twelve decades.
std::vector<double> check_grid(int m) {
  std::vector<double> xs(m);
  for (int j = 0; j < m; ++j)
    xs[j] = std::pow(10.0, std::log10(kGridFloor) * double(m - 1 - j) / (m - 1));
  xs[m - 1] = 1.0;
  return xs;
}

// Second divided difference f[x0,x1,x2]; sign certifies local convexity.
double second_dd(double x0, double f0, double x1, double f1, double x2,
                 double f2) {
  double s01 = (f1 - f0) / (x1 - x0);
  double s12 = (f2 - f1) / (x2 - x1);
  return (s12 - s01) / (x2 - x0);
}

}  // namespace

ValidityReport validate(const CuspidalDomain& d, int grid_points, double tol) {
  require(grid_points >= 16, ErrorCode::ParameterDomain,
          "validate: grid needs at least 16 points");
  require(tol > 0.0, ErrorCode::ParameterDomain, "validate: tol must be > 0");

  const auto xs = check_grid(grid_points);
  const int m = grid_points;
  std::vector<double> fx(m);
  for (int j = 0; j < m; ++j) fx[j] = d.upper(xs[j]);
  const double f1 = fx[m - 1];
  const double fscale = std::max(1.0, std::abs(f1));

  ValidityReport rep;
  auto push = [&rep](std::string name, double violation, double worst_x,
                     bool strict = false) {
    HypothesisCheck c;
    c.name = std::move(name);
    c.violation = violation;
    c.worst_x = worst_x;
    c.pass = strict ? violation < 0.0 : violation <= 0.0;
    rep.checks.push_back(std::move(c));
  };

  // f(0) = 0
  {
    double f0 = d.upper(0.0);
    double v = std::isfinite(f0) ? std::abs(f0) - tol * fscale : kInf;
    push("f(0)=0", v, 0.0);
  }

  // f'(0) = 0, certified from the decay of q = f(x)/x near 0: either q is
  // already below tolerance at the smallest abscissa, or ln q has a positive
  // least-squares slope against ln x over the smallest quarter of the grid.
  {
    const int quarter = std::max(4, m / 4);
    double q0 = fx[0] / xs[0];
    bool defined = true;
    double bad_x = xs[0];
    for (int j = 0; j < quarter; ++j) {
      if (!(fx[j] > 0.0) || !std::isfinite(fx[j])) {
        defined = false;
        bad_x = xs[j];
        break;
      }
    }
    if (!defined) {
      push("f'(0)=0", kInf, bad_x);
    } else {
      numeric::Matrix a(quarter, 2);
      std::vector<double> b(quarter);
      for (int j = 0; j < quarter; ++j) {
        a(j, 0) = 1.0;
        a(j, 1) = std::log(xs[j]);
        b[j] = std::log(fx[j] / xs[j]);
      }
      double slope = numeric::least_squares(a, b)[1];
      push("f'(0)=0", std::min(q0 - tol, kSlopeFloor - slope), xs[0]);
    }
  }

  // f'(1) finite
  {
    double v;
    if (d.f().has_derivative()) {
      double d1 = d.f().derivative(1.0);
      v = std::isfinite(d1) ? -1.0 : kInf;
    } else {
      // difference quotients at shrinking steps must stay bounded
      double worst = 0.0;
      for (double h : {1e-4, 1e-6, 1e-8})
        worst = std::max(worst,
                         std::abs((d.upper(1.0) - d.upper(1.0 - h)) / h));
      v = (std::isfinite(worst) && worst < 1e8) ? -1.0 : kInf;
    }
    push("f'(1)<inf", v, 1.0);
  }

  // f(1) > a, strict: equality pinches the domain shut at x = 1
  push("f(1)>a", d.a() - f1, 1.0, true);

  // convexity of f: nonnegative second divided differences
  {
    double worst = -kInf, worst_x = xs[0];
    double scale = 0.0;
    std::vector<double> dd(m - 2);
    for (int j = 0; j + 2 < m; ++j) {
      dd[j] = second_dd(xs[j], fx[j], xs[j + 1], fx[j + 1], xs[j + 2],
                        fx[j + 2]);
      scale = std::max(scale, std::abs(dd[j]));
    }
    for (int j = 0; j + 2 < m; ++j) {
      double v = -dd[j];
      if (v > worst) {
        worst = v;
        worst_x = xs[j + 1];
      }
    }
    push("convexity of f", worst - tol * std::max(1.0, scale), worst_x);
  }

  // concavity of f^{1/k}: nonpositive second divided differences
  {
    bool defined = true;
    double bad_x = xs[0];
    std::vector<double> gx(m);
    for (int j = 0; j < m; ++j) {
      if (fx[j] < 0.0 || !std::isfinite(fx[j])) {
        defined = false;
        bad_x = xs[j];
        break;
      }
      gx[j] = std::pow(fx[j], 1.0 / d.k());
    }
    if (!defined) {
      push("concavity of f^(1/k)", kInf, bad_x);
    } else {
      double worst = -kInf, worst_x = xs[0];
      double scale = 0.0;
      std::vector<double> dd(m - 2);
      for (int j = 0; j + 2 < m; ++j) {
        dd[j] = second_dd(xs[j], gx[j], xs[j + 1], gx[j + 1], xs[j + 2],
                          gx[j + 2]);
        scale = std::max(scale, std::abs(dd[j]));
      }
      for (int j = 0; j + 2 < m; ++j) {
        if (dd[j] > worst) {
          worst = dd[j];
          worst_x = xs[j + 1];
        }
      }
      push("concavity of f^(1/k)", worst - tol * std::max(1.0, scale),
           worst_x);
    }
  }

  // k*f(x) >= x*f'(x) on the grid
  {
    double worst = -kInf, worst_x = xs[0];
    double scale = 1.0;
    if (d.f().has_derivative()) {
      for (int j = 0; j < m; ++j) {
        double lhs = d.k() * fx[j];
        double rhs = xs[j] * d.f().derivative(xs[j]);
        scale = std::max(scale, std::abs(lhs));
        double v = rhs - lhs;
        if (v > worst) {
          worst = v;
          worst_x = xs[j];
        }
      }
      push("k*f>=x*f'", worst - tol * scale, worst_x);
    } else {
      // centred differences on interior grid points
      for (int j = 1; j + 1 < m; ++j) {
        double df = (fx[j + 1] - fx[j - 1]) / (xs[j + 1] - xs[j - 1]);
        double lhs = d.k() * fx[j];
        double rhs = xs[j] * df;
        scale = std::max(scale, std::abs(lhs));
        double v = rhs - lhs;
        if (v > worst) {
          worst = v;
          worst_x = xs[j];
        }
      }
      // differenced derivative estimates deserve a looser band
      push("k*f>=x*f'", worst - std::sqrt(tol) * scale, worst_x);
    }
  }

  rep.valid = true;
  for (const auto& c : rep.checks) rep.valid = rep.valid && c.pass;
  return rep;
}

ExponentEstimate predicted_exponent(const CuspidalDomain& d, long long n_max,
                                    ExponentModel model) {
  require(n_max >= 16, ErrorCode::ParameterDomain,
          "predicted_exponent: n_max must be >= 16");
  require(d.f().has_derivative(), ErrorCode::ParameterDomain,
          "predicted_exponent: closed-form derivative required");

  ExponentEstimate est;
  est.model = model;
  for (long long n = 2; n <= n_max; n *= 2) {
    double x = 1.0 / (double(n) * double(n));
    double fp = d.f().derivative(x);
    if (!(fp > 0.0) || !std::isfinite(fp))
      fail(ErrorCode::DomainHypothesis,
           "predicted_exponent: f'(1/n^2) not positive at n = " +
               std::to_string(n));
    double tau = 2.0 - std::log(fp) / std::log(double(n));
    est.raw.emplace_back(n, tau);
  }

  const int rows = int(est.raw.size());
  const int cols = model == ExponentModel::PlainLimit      ? 1
                   : model == ExponentModel::InverseLog    ? 2
                                                           : 3;
  numeric::Matrix a(rows, cols);
  std::vector<double> b(rows);
  for (int i = 0; i < rows; ++i) {
    double ln_n = std::log(double(est.raw[i].first));
    a(i, 0) = 1.0;
    if (cols > 1) a(i, 1) = 1.0 / ln_n;
    if (cols > 2) a(i, 2) = std::log(ln_n) / ln_n;
    b[i] = est.raw[i].second;
  }
  auto coef = numeric::least_squares(a, b);
  est.extrapolated = coef[0];

  numeric::KahanSum ss;
  for (int i = 0; i < rows; ++i) {
    double fit = 0.0;
    for (int j = 0; j < cols; ++j) fit += a(i, j) * coef[j];
    double r = b[i] - fit;
    ss.add(r * r);
  }
  est.residual_rms = std::sqrt(ss.value() / rows);
  return est;
}

}  // namespace mlab::domain
