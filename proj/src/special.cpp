#include "bk/special.hpp"

#include "bk/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace bk::special {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kEps = 1e-16;
constexpr double kTiny = 1e-300;
constexpr int kMaxIter = 20000;

// Lentz evaluation of the incomplete beta continued fraction.
bool beta_cf(double a, double b, double x, double& out) {
  const double qab = a + b;
  const double qap = a + 1.0;
  const double qam = a - 1.0;
  double c = 1.0;
  double d = 1.0 - qab * x / qap;
  if (std::fabs(d) < kTiny) d = kTiny;
  d = 1.0 / d;
  double h = d;
  for (int m = 1; m <= kMaxIter; ++m) {
    const double m2 = 2.0 * m;
    double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
    d = 1.0 + aa * d;
    if (std::fabs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::fabs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    h *= d * c;
    aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
    d = 1.0 + aa * d;
    if (std::fabs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::fabs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::fabs(del - 1.0) < kEps) {
      out = h;
      return true;
    }
  }
  return false;
}

// Hypergeometric series x^a (1-x)^b / (a B(a,b)) * 2F1(a+b, 1; a+1; x), without the prefactor.
bool beta_series(double a, double b, double x, double& out) {
  double term = 1.0;
  double sum = 1.0;
  for (int n = 0; n < 10 * kMaxIter; ++n) {
    term *= (a + b + n) * x / (a + 1.0 + n);
    sum += term;
    if (std::fabs(term) < kEps * std::fabs(sum)) {
      out = sum;
      return true;
    }
  }
  return false;
}

constexpr double kHalfLog2Pi = 0.91893853320467274178;

// log Gamma(x) - ((x - 1/2) log x - x + log sqrt(2 pi)).
double stirling_error(double x) {
  if (x >= 10.0) {
    const double r = 1.0 / x;
    const double r2 = r * r;
    return r * (1.0 / 12.0 - r2 * (1.0 / 360.0 - r2 * (1.0 / 1260.0 - r2 * (1.0 / 1680.0 - r2 * (1.0 / 1188.0 - r2 * 691.0 / 360360.0)))));
  }
  return log_gamma(x) - ((x - 0.5) * std::log(x) - x + kHalfLog2Pi);
}

// a log1p(t) - a t, accurate when t is small.
double log1pmx_scaled(double a, double t) {
  if (std::fabs(t) > 0.1) return a * (std::log1p(t) - t);
  // Series -t^2/2 + t^3/3 - ...
  double term = t;
  double sum = 0.0;
  for (int k = 2; k < 60; ++k) {
    term *= -t;
    const double add = term / k;
    sum += add;
    if (std::fabs(add) < 1e-17 * std::fabs(sum)) break;
  }
  return a * sum;
}

// log of x^a (1 - x)^b / B(a, b). For large parameters the direct form cancels terms of size
// a log a; the Stirling form keeps only the deviations of x from a / (a + b).
double log_beta_prefactor(double a, double b, double x) {
  if (std::min(a, b) < 10.0) return a * std::log(x) + b * std::log1p(-x) - log_beta(a, b);
  const double c = a + b;
  const double y = 1.0 - x;
  const double ta = (x * b - y * a) / a; // x c / a - 1
  const double tb = (y * a - x * b) / b; // y c / b - 1
  return a * std::log1p(ta) + b * std::log1p(tb) + 0.5 * std::log(a / c * b) - kHalfLog2Pi - stirling_error(a) -
         stirling_error(b) + stirling_error(c);
}

// log of x^a e^-x / Gamma(a).
double log_gamma_prefactor(double a, double x) {
  if (a < 10.0) return -x + a * std::log(x) - log_gamma(a);
  return log1pmx_scaled(a, (x - a) / a) + 0.5 * std::log(a) - kHalfLog2Pi - stirling_error(a);
}

// I_x(a, b) for x on the side where the continued fraction converges quickly.
double inc_beta_lower(double a, double b, double x) {
  const double pre = log_beta_prefactor(a, b, x);
  double frac = 0.0;
  if (beta_cf(a, b, x, frac)) return std::exp(pre) * frac / a;
  if (beta_series(a, b, x, frac)) return std::exp(pre) * frac / a;
  throw NumericError("incomplete beta did not converge");
}

double gamma_series(double a, double x) {
  double ap = a;
  double del = 1.0 / a;
  double sum = del;
  for (int n = 0; n < kMaxIter; ++n) {
    ap += 1.0;
    del *= x / ap;
    sum += del;
    if (std::fabs(del) < std::fabs(sum) * kEps) {
      return sum * std::exp(log_gamma_prefactor(a, x));
    }
  }
  throw NumericError("incomplete gamma series did not converge");
}

double gamma_cf(double a, double x) {
  double b = x + 1.0 - a;
  double c = 1.0 / kTiny;
  double d = 1.0 / b;
  double h = d;
  for (int i = 1; i <= kMaxIter; ++i) {
    const double an = -i * (i - a);
    b += 2.0;
    d = an * d + b;
    if (std::fabs(d) < kTiny) d = kTiny;
    c = b + an / c;
    if (std::fabs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::fabs(del - 1.0) < kEps) {
      return std::exp(log_gamma_prefactor(a, x)) * h;
    }
  }
  throw NumericError("incomplete gamma continued fraction did not converge");
}

// log Q(t) / phi(t) for t > 0 via the Laplace continued fraction of the Mills ratio.
double log_mills_ratio(double t) {
  double f = t;
  double c = t;
  double d = 0.0;
  for (int k = 1; k <= kMaxIter; ++k) {
    d = t + k * d;
    if (std::fabs(d) < kTiny) d = kTiny;
    c = t + k / c;
    if (std::fabs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    const double delta = c * d;
    f *= delta;
    if (std::fabs(delta - 1.0) < kEps) return -std::log(f);
  }
  throw NumericError("Mills ratio continued fraction did not converge");
}

double acklam(double p) {
  static constexpr double a[] = {-3.969683028665376e+01, 2.209460984245205e+02,
                                 -2.759285104469687e+02, 1.383577518672690e+02,
                                 -3.066479806614716e+01, 2.506628277459239e+00};
  static constexpr double b[] = {-5.447609879822406e+01, 1.615858368580409e+02,
                                 -1.556989798598866e+02, 6.680131188771972e+01,
                                 -1.328068155288572e+01};
  static constexpr double c[] = {-7.784894002430293e-03, -3.223964580411365e-01,
                                 -2.400758277161838e+00, -2.549732539343734e+00,
                                 4.374664141464968e+00,  2.938163982698783e+00};
  static constexpr double d[] = {7.784695709041462e-03, 3.224671290700398e-01,
                                 2.445134137142996e+00, 3.754408661907416e+00};
  constexpr double p_low = 0.02425;
  if (p < p_low) {
    const double q = std::sqrt(-2.0 * std::log(p));
    return (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
           ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  }
  const double q = p - 0.5;
  const double r = q * q;
  return (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
         (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
}

} // namespace

double log_gamma(double x) {
#if defined(__GLIBC__)
  int sign = 0;
  return ::lgamma_r(x, &sign);
#else
  return std::lgamma(x);
#endif
}

double log_beta(double a, double b) {
  const double small = std::min(a, b);
  const double large = std::max(a, b);
  if (large < 10.0) return log_gamma(a) + log_gamma(b) - log_gamma(a + b);
  // log Gamma(large) - log Gamma(large + small) without cancelling terms of size large log large.
  const double c = large + small;
  return log_gamma(small) - (large - 0.5) * std::log1p(small / large) - small * std::log(c) + small +
         stirling_error(large) - stirling_error(c);
}

double log_choose(double n, double k) {
  if (k < 0.0 || k > n) return -kInf;
  if (k == 0.0 || k == n) return 0.0;
  return log_gamma(n + 1.0) - log_gamma(k + 1.0) - log_gamma(n - k + 1.0);
}

double normal_pdf(double x) { return std::exp(-0.5 * x * x - kLogSqrt2Pi); }

double normal_cdf(double x) { return 0.5 * std::erfc(-x * M_SQRT1_2); }

double log_normal_cdf(double x) {
  if (x == -kInf) return -kInf;
  if (x < -8.0) return -0.5 * x * x - kLogSqrt2Pi + log_mills_ratio(-x);
  if (x > 0.0) return std::log1p(-normal_cdf(-x));
  return std::log(normal_cdf(x));
}

double normal_quantile(double p) {
  if (!(p > 0.0 && p < 1.0)) {
    if (p == 0.0) return -kInf;
    if (p == 1.0) return kInf;
    throw DomainError("normal_quantile: p must lie in (0, 1)");
  }
  if (p > 0.5) return -normal_quantile(1.0 - p);
  double x = acklam(p);
  const double e = normal_cdf(x) - p;
  x -= e / normal_pdf(x);
  return x;
}

double inc_beta(double a, double b, double x) {
  if (!(a > 0.0) || !(b > 0.0)) throw DomainError("inc_beta: a and b must be positive");
  if (std::isnan(x)) throw DomainError("inc_beta: x is NaN");
  if (x <= 0.0) return 0.0;
  if (x >= 1.0) return 1.0;
  if (x < (a + 1.0) / (a + b + 2.0)) return inc_beta_lower(a, b, x);
  return 1.0 - inc_beta_lower(b, a, 1.0 - x);
}

double inc_gamma_p(double a, double x) {
  if (!(a > 0.0)) throw DomainError("inc_gamma_p: a must be positive");
  if (std::isnan(x)) throw DomainError("inc_gamma_p: x is NaN");
  if (x <= 0.0) return 0.0;
  if (x == kInf) return 1.0;
  if (x < a + 1.0) return gamma_series(a, x);
  return 1.0 - gamma_cf(a, x);
}

double inc_gamma_q(double a, double x) {
  if (!(a > 0.0)) throw DomainError("inc_gamma_q: a must be positive");
  if (std::isnan(x)) throw DomainError("inc_gamma_q: x is NaN");
  if (x <= 0.0) return 1.0;
  if (x == kInf) return 0.0;
  if (x < a + 1.0) return 1.0 - gamma_series(a, x);
  return gamma_cf(a, x);
}

double log_add_exp(double a, double b) {
  if (a == -kInf) return b;
  if (b == -kInf) return a;
  const double m = std::max(a, b);
  return m + std::log1p(std::exp(-std::fabs(a - b)));
}

double log_sub_exp(double a, double b) {
  if (b == -kInf) return a;
  if (b > a) throw DomainError("log_sub_exp: second argument exceeds the first");
  if (a == b) return -kInf;
  return a + std::log(-std::expm1(b - a));
}

double log_sum_exp(std::span<const double> v) {
  double m = -kInf;
  for (double x : v) m = std::max(m, x);
  if (m == -kInf) return -kInf;
  if (m == kInf) return kInf;
  double s = 0.0;
  for (double x : v) s += std::exp(x - m);
  return m + std::log(s);
}

double log_normal_interval(double lo, double hi) {
  if (!(lo < hi)) return -kInf;
  if (lo >= 0.0) return log_sub_exp(log_normal_cdf(-lo), log_normal_cdf(-hi));
  if (hi <= 0.0) return log_sub_exp(log_normal_cdf(hi), log_normal_cdf(lo));
  return std::log1p(-(normal_cdf(lo) + normal_cdf(-hi)));
}

} // namespace bk::special
