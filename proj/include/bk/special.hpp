#pragma once

#include <cstdint>
#include <span>

namespace bk::special {

inline constexpr double kLogSqrt2Pi = 0.91893853320467274178;
inline constexpr double kLogPi = 1.14472988584940017414;

double log_gamma(double x);
double log_beta(double a, double b);

//! log of the binomial coefficient C(n, k); -inf when k is outside [0, n].
double log_choose(double n, double k);

//! Standard normal density, distribution function and log variants.
double normal_pdf(double x);
double normal_cdf(double x);
double log_normal_cdf(double x);

//! Inverse of the standard normal distribution function, p in (0, 1).
double normal_quantile(double p);

//! Regularized incomplete beta I_x(a, b).
double inc_beta(double a, double b, double x);

//! Regularized lower and upper incomplete gamma P(a, x), Q(a, x).
double inc_gamma_p(double a, double x);
double inc_gamma_q(double a, double x);

//! log(exp(a) + exp(b)) without overflow.
double log_add_exp(double a, double b);

//! log(exp(a) - exp(b)) for a >= b.
double log_sub_exp(double a, double b);

//! log(sum exp(v_i)); -inf for an empty or all -inf input.
double log_sum_exp(std::span<const double> v);

//! log of the standard normal mass on (lo, hi), accurate in both tails.
double log_normal_interval(double lo, double hi);

} // namespace bk::special
