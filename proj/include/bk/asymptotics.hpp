#pragma once

#include "bk/distribution.hpp"
#include "bk/grid.hpp"
#include "bk/random.hpp"

#include <Eigen/Dense>

#include <cstddef>
#include <functional>
#include <limits>
#include <span>
#include <vector>

namespace bk {

//! Log-density (or any smooth log-objective) of a parameter of small dimension p, with optional
//! analytic derivatives and a box domain. Points on the box boundary are outside the domain.
struct SmoothTarget {
  std::size_t dimension = 1;
  std::function<double(std::span<const double>)> log_density;
  std::function<Eigen::VectorXd(std::span<const double>)> gradient = {}; //!< optional
  std::function<Eigen::MatrixXd(std::span<const double>)> hessian = {};  //!< optional
  std::vector<double> lower = {}; //!< empty: unbounded below
  std::vector<double> upper = {}; //!< empty: unbounded above

  //! One-dimensional convenience constructor.
  static SmoothTarget scalar(std::function<double(double)> f,
                             double lower = -std::numeric_limits<double>::infinity(),
                             double upper = std::numeric_limits<double>::infinity(),
                             std::function<double(double)> derivative = {},
                             std::function<double(double)> second_derivative = {});

  //! Log-density of a univariate continuous distribution on its support.
  static SmoothTarget from_distribution(const Distribution& d);

  bool in_domain(std::span<const double> x) const;
  double lower_bound(std::size_t i) const;
  double upper_bound(std::size_t i) const;
};

//! Central-difference gradient (analytic when supplied).
Eigen::VectorXd target_gradient(const SmoothTarget& t, std::span<const double> x);
//! Hessian: analytic, central differences of the analytic gradient, or second differences.
Eigen::MatrixXd target_hessian(const SmoothTarget& t, std::span<const double> x);

struct ModeResult {
  Eigen::VectorXd mode;
  Eigen::MatrixXd information; //!< negative Hessian at the mode
  double gradient_norm = 0.0;
  int iterations = 0;
};

//! Damped Newton ascent with backtracking; falls back to gradient steps where the Hessian is not
//! negative definite. Throws DomainError for an init outside the domain and NumericError on
//! non-convergence within 100 iterations or an indefinite Hessian at the returned point.
ModeResult find_mode(const SmoothTarget& target, std::span<const double> init, double tol = 1e-6);
ModeResult find_mode(const SmoothTarget& target, double init, double tol = 1e-6);

//! Normal(mode, 1 / information) for a one-dimensional target.
Distribution laplace_normal_approx(const SmoothTarget& target, double init);

struct GaussianApprox {
  Eigen::VectorXd mean;
  Eigen::MatrixXd covariance;
};

//! Multivariate version, p <= 3.
GaussianApprox laplace_gaussian_approx(const SmoothTarget& target, std::span<const double> init);

struct LaplaceIntegral {
  double value = 0.0;
  double log_value = 0.0;
  Eigen::VectorXd mode;
  double log_det_neg_hessian = 0.0;
};

//! Approximates the integral of q(x) exp(n h(x)) by
//! q(x*) exp(n h(x*)) (2 pi / n)^(p/2) det(-H_h(x*))^(-1/2), x* the maximiser of h.
//! q must be positive at x*. Throws BoundaryMaximum when the maximum lies on the domain edge and
//! NumericError for a singular Hessian.
LaplaceIntegral laplace_integral(const std::function<double(std::span<const double>)>& q,
                                 const SmoothTarget& h, double n,
                                 std::span<const double> mode_hint);
LaplaceIntegral laplace_integral(const std::function<double(double)>& q, const SmoothTarget& h,
                                 double n, double mode_hint);

//! n! by the Laplace approximation of n^(n+1) * integral of exp(n (log t - t)) over t > 0.
double stirling_factorial(double n);

//! Total variation between a grid posterior and a continuous approximation, by summing
//! |p_i - q_i| / 2 over the grid cells, q_i the approximation's mass on cell i. Mass of the
//! approximation outside the grid lies where the posterior has none and counts in full.
//! Throws SupportMismatch if the approximation puts less than 1e-8 of its mass on the grid.
double bvm_tv_distance(const GridPosterior& posterior, const Distribution& approx);
//! Two grids on the same support.
double bvm_tv_distance(const GridPosterior& p, const GridPosterior& q);

//! Kullback-Leibler divergence KL(p || q) in nats, by summation (discrete) or quadrature.
//! Throws SupportMismatch when it is infinite.
double kl_divergence(const Distribution& p, const Distribution& q);

struct DiscreteCandidateSet {
  std::vector<Distribution> models;
  std::vector<double> prior; //!< positive, sums to 1
};

struct ConcentrationResult {
  std::vector<double> kl;              //!< KL(truth || candidate k)
  std::size_t projection_index = 0;    //!< argmin of kl, lowest index on ties
  std::vector<std::size_t> batch_sizes; //!< cumulative sample sizes
  std::vector<std::vector<double>> posterior; //!< masses after each batch size
  double final_mass = 0.0;             //!< posterior mass at the projection index
};

//! Draws one growing sample from `truth` and records the posterior over candidates at every
//! cumulative size in `batch_sizes` (sorted ascending).
ConcentrationResult discrete_concentration(const DiscreteCandidateSet& candidates,
                                           const Distribution& truth,
                                           const std::vector<std::size_t>& batch_sizes,
                                           RandomStream& stream);

//! Two-parameter grid model: prior masses prior[i][j] on (theta1[i], theta2[j]) and a
//! likelihood evaluated at data points y.
struct TwoParameterGrid {
  std::vector<double> theta1;
  std::vector<double> theta2;
  std::vector<std::vector<double>> prior;
  std::vector<double> y;
  std::function<double(double y, double theta1, double theta2)> likelihood;
};

struct IdentifiabilityResult {
  //! max over (theta1, theta2, y) of |p(theta2 | theta1, y) - p(theta2 | theta1)|
  double max_discrepancy = 0.0;
  bool identifiable = true; //!< false when the discrepancy is at most 1e-12
  //! max over (theta2, y) of |p(theta2 | y) - p(theta2)|: learning about theta2 through theta1
  double marginal_shift = 0.0;
};

IdentifiabilityResult identifiability_check(const TwoParameterGrid& model);

} // namespace bk
