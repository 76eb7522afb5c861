#pragma once

#include <functional>
#include <vector>

namespace bk::numeric {

struct Integral {
  double value = 0.0;
  double error = 0.0;
};

//! Adaptive Gauss-Kronrod quadrature over [a, b]; either end may be infinite.
//! Throws NumericError when the estimate is not finite or its error exceeds 1e-6 relative.
Integral integrate(const std::function<double(double)>& f, double a, double b,
                   double rel_tol = 1e-12);

//! Same, split at the interior breakpoints (sorted, inside (a, b)). Use to expose peaks.
Integral integrate(const std::function<double(double)>& f, double a, double b,
                   const std::vector<double>& breakpoints, double rel_tol = 1e-12);

//! Double-exponential rule; tolerant of integrable endpoint singularities.
Integral integrate_singular(const std::function<double(double)>& f, double a, double b,
                            double rel_tol = 1e-12);

//! Bisection root of a sign-changing function on [lo, hi].
double bisect(const std::function<double(double)>& f, double lo, double hi, int iterations = 200);

} // namespace bk::numeric
