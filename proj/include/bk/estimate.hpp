#pragma once

#include "bk/distribution.hpp"
#include "bk/grid.hpp"

#include <string>

namespace bk {

enum class LossKind { Squared, Absolute, ZeroOne, AsymmetricLinear };

//! L(a, theta). ZeroOne(delta) is 0 inside the window |a - theta| <= delta / 2 and 1 outside.
//! AsymmetricLinear charges w_under per unit when a < theta and w_over per unit when a > theta.
struct LossFunction {
  LossKind kind = LossKind::Squared;
  double delta = 0.0;
  double w_under = 1.0;
  double w_over = 1.0;

  static LossFunction squared() { return {}; }
  static LossFunction absolute() { return {LossKind::Absolute}; }
  static LossFunction zero_one(double delta);
  static LossFunction asymmetric_linear(double w_under, double w_over);

  double operator()(double action, double theta) const;
  std::string describe() const;
};

double posterior_mean(const GridPosterior& p);
double posterior_mean(const Distribution& d);

//! Smallest support point whose cumulative mass reaches 1/2.
double posterior_median(const GridPosterior& p);
//! Linear interpolation of the cumulative mass between support points.
double posterior_median_interpolated(const GridPosterior& p);
double posterior_median(const Distribution& d);

//! Argmax of density (continuous grid) or mass; ties go to the lowest index.
double posterior_mode(const GridPosterior& p);
double posterior_mode(const Distribution& d);

//! Smallest support point whose cumulative mass reaches q.
double grid_quantile(const GridPosterior& p, double q);

double bayes_estimate(const GridPosterior& p, const LossFunction& loss);

double posterior_expected_loss(const GridPosterior& p, const LossFunction& loss, double action);

} // namespace bk
