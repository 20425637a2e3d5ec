#pragma once

// Cuspidal planar domains K = { 0 <= x <= 1, a*x^k <= y <= f(x) } with an
// upper boundary f drawn from four closed-form cusp families (or supplied by
// the caller), hypothesis certification, and the predicted Markov exponent
// sequence tau_n = 2 - ln f'(1/n^2) / ln n.

#include <functional>
#include <string>
#include <utility>
#include <vector>

namespace mlab::domain {

enum class Family { Power, LogLog, NegLog, LogPower, Custom };

// Upper boundary profile. The four named families carry closed-form
// derivatives; Custom takes caller-supplied evaluators (derivative optional).
class CuspFunction {
public:
  static CuspFunction power(double r, double b);      // b * x^r
  static CuspFunction log_log(double r, double b);    // x^r * ln(-ln(b x)), 0 < b < 1/e
  static CuspFunction neg_log(double r, double b);    // -x^r * ln(b x),     0 < b <= 1/e
  static CuspFunction log_power(double r, double b, double c);  // x^r (-ln(b x))^c, 0 < b < 1
  static CuspFunction custom(std::function<double(double)> value,
                             std::function<double(double)> derivative);

  double value(double x) const;       // f(x), x in [0,1]; f(0) taken as limit 0
  double derivative(double x) const;  // f'(x), x in (0,1]
  bool has_derivative() const;
  Family family() const { return family_; }
  double r() const { return r_; }
  double b() const { return b_; }
  double c() const { return c_; }
  std::string describe() const;

private:
  CuspFunction() = default;
  Family family_ = Family::Custom;
  double r_ = 0.0, b_ = 0.0, c_ = 0.0;
  std::function<double(double)> fn_, dfn_;
};

struct Subdomain {
  double x_lo = 0.0;  // K truncated to x >= x_lo; in [0,1)
};

struct FPrimeValue {
  double value = 0.0;
  bool limit_at_zero = false;  // set when x == 0 and the value is the limit
};

class CuspidalDomain {
public:
  // Requires a > 0 and k >= 2. Family parameter errors surface from the
  // CuspFunction factories; geometric hypotheses are certified by validate().
  CuspidalDomain(double a, int k, CuspFunction f);

  double a() const { return a_; }
  int k() const { return k_; }
  const CuspFunction& f() const { return f_; }

  double lower(double x) const;  // a * x^k
  double upper(double x) const;  // f(x)
  // (lower, upper) at x; throws Error(Range) outside [0,1].
  std::pair<double, double> boundaries(double x) const;
  FPrimeValue f_prime(double x) const;
  bool contains(double x, double y) const;
  // Height of the bounding box [0,1] x [0, f(1)] the polynomial basis lives on.
  double y_max() const;
  std::string describe() const;

private:
  double a_;
  int k_;
  CuspFunction f_;
};

struct HypothesisCheck {
  std::string name;
  bool pass = false;
  double worst_x = 0.0;    // grid point with the largest violation
  double violation = 0.0;  // signed worst violation (<= 0 means satisfied)
};

struct ValidityReport {
  bool valid = false;
  std::vector<HypothesisCheck> checks;
};

// Certify the cusp-geometry hypotheses on a geometrically graded grid:
// f(0)=0, f'(0)=0, f'(1) finite, f(1) > a, convexity of f, concavity of
// f^{1/k}, and k*f(x) >= x*f'(x). Tolerances are relative (default 1e-9).
ValidityReport validate(const CuspidalDomain& d, int grid_points = 1024,
                        double tol = 1e-9);

enum class ExponentModel { PlainLimit, InverseLog, InverseLogPlusLogLog };

struct ExponentEstimate {
  std::vector<std::pair<long long, double>> raw;  // (n, tau_n)
  double extrapolated = 0.0;  // constant term of the fitted model
  ExponentModel model = ExponentModel::PlainLimit;
  double residual_rms = 0.0;
};

// tau_n on the geometric grid n = 2, 4, 8, ..., n_max (n_max >= 16), using
// the closed-form derivative, plus the least-squares extrapolation under the
// chosen model. Throws Error(DomainHypothesis) if f'(1/n^2) <= 0 somewhere.
ExponentEstimate predicted_exponent(const CuspidalDomain& d, long long n_max,
                                    ExponentModel model);

}  // namespace mlab::domain
