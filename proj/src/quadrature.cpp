#include "bk/quadrature.hpp"

#include "bk/errors.hpp"

#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/quadrature/sinh_sinh.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>

#include <cmath>
#include <limits>

namespace bk::numeric {

namespace {

constexpr double kAccept = 1e-6;

void check(const Integral& r, const char* what) {
  if (!std::isfinite(r.value) || !std::isfinite(r.error) ||
      r.error > kAccept * std::fabs(r.value) + 1e-300) {
    throw NumericError(std::string(what) + ": quadrature did not converge");
  }
}

} // namespace

Integral integrate(const std::function<double(double)>& f, double a, double b, double rel_tol) {
  if (a == b) return {};
  if (a > b) {
    Integral r = integrate(f, b, a, rel_tol);
    r.value = -r.value;
    return r;
  }
  Integral r;
  r.value = boost::math::quadrature::gauss_kronrod<double, 31>::integrate(f, a, b, 20, rel_tol,
                                                                          &r.error);
  check(r, "integrate");
  return r;
}

Integral integrate(const std::function<double(double)>& f, double a, double b,
                   const std::vector<double>& breakpoints, double rel_tol) {
  Integral total;
  double lo = a;
  for (double p : breakpoints) {
    if (!(p > lo && p < b)) continue;
    const Integral part = integrate(f, lo, p, rel_tol);
    total.value += part.value;
    total.error += part.error;
    lo = p;
  }
  const Integral last = integrate(f, lo, b, rel_tol);
  total.value += last.value;
  total.error += last.error;
  return total;
}

Integral integrate_singular(const std::function<double(double)>& f, double a, double b,
                            double rel_tol) {
  constexpr double inf = std::numeric_limits<double>::infinity();
  Integral r;
  double l1 = 0.0;
  if (std::isfinite(a) && std::isfinite(b)) {
    boost::math::quadrature::tanh_sinh<double> rule;
    r.value = rule.integrate(f, a, b, rel_tol, &r.error, &l1);
  } else if (a == -inf && b == inf) {
    boost::math::quadrature::sinh_sinh<double> rule;
    r.value = rule.integrate(f, rel_tol, &r.error, &l1);
  } else if (std::isfinite(a)) {
    boost::math::quadrature::exp_sinh<double> rule;
    r.value = rule.integrate([&](double t) { return f(a + t); }, 0.0, inf, rel_tol, &r.error, &l1);
  } else {
    boost::math::quadrature::exp_sinh<double> rule;
    r.value = rule.integrate([&](double t) { return f(b - t); }, 0.0, inf, rel_tol, &r.error, &l1);
  }
  check(r, "integrate_singular");
  return r;
}

double bisect(const std::function<double(double)>& f, double lo, double hi, int iterations) {
  double flo = f(lo);
  const double fhi = f(hi);
  if (flo == 0.0) return lo;
  if (fhi == 0.0) return hi;
  if ((flo > 0.0) == (fhi > 0.0)) throw NumericError("bisect: root is not bracketed");
  for (int i = 0; i < iterations; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    const double fm = f(mid);
    if (fm == 0.0) return mid;
    if ((fm > 0.0) == (flo > 0.0)) {
      lo = mid;
      flo = fm;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

} // namespace bk::numeric
