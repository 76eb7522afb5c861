#pragma once

#include "bk/random.hpp"

#include <array>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace bk {

enum class Family {
  Normal,
  Beta,
  Gamma,
  Binomial,
  NegBinomial,
  Poisson,
  Pareto,
  Uniform,
  Laplace,
  TruncatedNormal
};

std::string to_string(Family f);

struct Support {
  double lower;
  double upper;
  bool discrete;
};

//! Tagged univariate distribution. Parameter order per family:
//!   Normal(mean, variance)
//!   Beta(a, b)
//!   Gamma(shape, rate)
//!   Binomial(n, theta)
//!   NegBinomial(r, theta)      number of trials needed for r successes; support r, r+1, ...
//!   Poisson(rate)
//!   Pareto(a, b)               density a b^a / x^(a+1) on x >= b
//!   Uniform(lower, upper)
//!   Laplace(location, scale)   density exp(-|x - location| / scale) / (2 scale)
//!   TruncatedNormal(mean, variance, lower, upper); bounds may be infinite
class Distribution {
public:
  static Distribution normal(double mean, double variance);
  static Distribution beta(double a, double b);
  static Distribution gamma(double shape, double rate);
  static Distribution binomial(double n, double theta);
  static Distribution neg_binomial(double r, double theta);
  static Distribution poisson(double rate);
  static Distribution pareto(double a, double b);
  static Distribution uniform(double lower, double upper);
  static Distribution laplace(double location, double scale);
  static Distribution truncated_normal(double mean, double variance, double lower, double upper);

  //! Generic constructor; validates the parameter vector for the family.
  Distribution(Family family, std::span<const double> params);

  Family family() const { return family_; }
  std::span<const double> params() const { return {p_.data(), count_}; }
  double param(std::size_t i) const { return p_.at(i); }
  Support support() const;
  bool is_discrete() const;

  double log_pdf(double x) const;
  double pdf(double x) const;
  double cdf(double x) const;
  //! Smallest x with cdf(x) >= p.
  double quantile(double p) const;
  std::vector<double> sample(RandomStream& stream, std::size_t count) const;

  double mean() const;
  double variance() const;
  double mode() const;
  double median() const { return quantile(0.5); }

  std::string describe() const;

  bool operator==(const Distribution& o) const;

private:
  Distribution(Family family, std::initializer_list<double> params);
  void validate() const;

  double continuous_quantile(double p) const;
  double discrete_quantile(double p) const;
  // TruncatedNormal helpers
  double tn_log_mass() const;

  Family family_;
  std::array<double, 4> p_{};
  std::size_t count_ = 0;
};

//! Free-function spellings.
inline double log_pdf(const Distribution& d, double x) { return d.log_pdf(x); }
inline double cdf(const Distribution& d, double x) { return d.cdf(x); }
inline double quantile(const Distribution& d, double p) { return d.quantile(p); }
inline std::vector<double> sample(const Distribution& d, RandomStream& s, std::size_t n) {
  return d.sample(s, n);
}

} // namespace bk
