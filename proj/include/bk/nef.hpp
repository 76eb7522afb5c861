#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string>

namespace bk {

//! One-parameter natural exponential family h(y) exp(theta t(y) - psi(theta)).
struct NefFamily {
  std::string name;
  std::function<double(double)> psi;
  std::function<double(double)> grad_psi; //!< mean map, strictly increasing
  std::function<double(double)> statistic;
  std::function<bool(double)> in_support;
  double theta_lower; //!< natural-parameter domain
  double theta_upper;
  double mean_lower; //!< interior of the convex hull of t(y)
  double mean_upper;

  static NefFamily bernoulli();
  static NefFamily poisson();
  static NefFamily normal_unit();
};

//! Diaconis-Ylvisaker prior p(theta | n0, x0) proportional to exp(n0 (x0 theta - psi(theta))),
//! together with the data absorbed so far.
class NefModel {
public:
  NefModel(NefFamily family, double n0, double x0);

  const NefFamily& family() const { return family_; }
  double prior_precision() const { return n0_; }
  double prior_location() const { return x0_; }
  std::int64_t observations() const { return n_; }
  double statistic_sum() const { return sum_t_; }

  //! n0 + n and x_n.
  double precision() const;
  double location() const;

  //! Unnormalised log density of theta under the current state.
  double log_kernel(double theta) const;

  NefModel absorb(std::span<const double> data) const;

private:
  NefFamily family_;
  double n0_;
  double x0_;
  std::int64_t n_ = 0;
  double sum_t_ = 0.0;
};

NefModel dy_update(const NefModel& model, std::span<const double> data);

//! (n0 x0 + n ybar_t) / (n0 + n).
double dy_posterior_mean_map(const NefModel& posterior);

//! E[grad_psi(theta)] under the current state by adaptive quadrature. Throws NumericError.
double dy_mean_map_quadrature(const NefModel& posterior);

} // namespace bk
