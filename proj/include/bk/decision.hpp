#pragma once

#include "bk/distribution.hpp"
#include "bk/estimate.hpp"
#include "bk/random.hpp"

#include <Eigen/Dense>

#include <cstddef>
#include <functional>
#include <string>

namespace bk {

//! A deterministic rule from a data vector to an estimate vector.
struct Estimator {
  std::string name;
  std::function<Eigen::VectorXd(const Eigen::VectorXd&)> rule;
};

//! Draws one data vector given the parameter vector.
using DataSampler = std::function<Eigen::VectorXd(const Eigen::VectorXd& theta, RandomStream&)>;
//! Draws one parameter vector from a prior.
using PriorSampler = std::function<Eigen::VectorXd(RandomStream&)>;

//! y_i ~ Normal(theta_i, 1), one draw per coordinate.
DataSampler isotropic_normal_sampler();
//! n draws from Normal(theta_0, sigma2).
DataSampler iid_normal_sampler(std::size_t n, double sigma2);

Estimator identity_estimator();
//! Mean of the data, as a one-vector.
Estimator sample_mean_estimator();
//! Normal(mu, tau2) prior, Normal(theta, sigma2) data: posterior mean of theta, as a one-vector.
Estimator normal_posterior_mean_estimator(double mu, double tau2, double sigma2);

struct RiskEstimate {
  double risk = 0.0;
  double mc_stderr = 0.0;
  std::size_t reps = 0;
};

//! Loss applied coordinate-wise and summed.
double vector_loss(const LossFunction& loss, const Eigen::VectorXd& estimate,
                   const Eigen::VectorXd& theta);

//! Monte Carlo E[L(est(y), theta)] over y ~ sampler(theta). reps >= 1000.
RiskEstimate frequentist_risk(const Estimator& est, const Eigen::VectorXd& theta,
                              const LossFunction& loss, const DataSampler& sampler,
                              std::size_t reps, RandomStream& stream);

//! Monte Carlo average over theta ~ prior, then y ~ sampler(theta). reps >= 1000.
RiskEstimate bayes_risk(const Estimator& est, const PriorSampler& prior, const LossFunction& loss,
                        const DataSampler& sampler, std::size_t reps, RandomStream& stream);
//! Scalar prior given as a distribution.
RiskEstimate bayes_risk(const Estimator& est, const Distribution& prior, const LossFunction& loss,
                        const DataSampler& sampler, std::size_t reps, RandomStream& stream);

//! (1 - (d - 2) / y'y) y, d >= 3; the zero vector maps to itself.
Eigen::VectorXd james_stein(const Eigen::VectorXd& y);

struct DominanceResult {
  double risk_js = 0.0;
  double risk_mle = 0.0;
  double js_stderr = 0.0;
  double mle_stderr = 0.0;
  double gap = 0.0; //!< risk_mle - risk_js
  double gap_stderr = 0.0;
  std::size_t reps = 0;
};

//! Paired squared-error risks of James-Stein and the MLE under y ~ N_d(theta, I) with common
//! random numbers. d >= 3, reps >= 1e4.
DominanceResult js_dominance(const Eigen::VectorXd& theta, std::size_t reps, RandomStream& stream);

struct CoxVarianceResult {
  double var_unconditional = 0.0;
  double var_given_n2 = 0.0;
  double var_given_n1000 = 0.0;
  double stderr_unconditional = 0.0;
  double stderr_given_n2 = 0.0;
  double stderr_given_n1000 = 0.0;
  double mean_given_n2 = 0.0;
  double mean_given_n1000 = 0.0;
  double mean_stderr_n2 = 0.0;
  double mean_stderr_n1000 = 0.0;
  std::size_t count_n2 = 0;
  std::size_t count_n1000 = 0;
  double target_unconditional = 0.0; //!< sigma2 / 4 + sigma2 / 2000
};

//! A fair coin picks n = 2 or n = 1000; the estimate is the mean of n Normal(mu, sigma2) draws.
//! reps >= 1e4.
CoxVarianceResult cox_variance_demo(double sigma2, std::size_t reps, RandomStream& stream,
                                    double mu = 0.0);

struct WelchResult {
  double d_star = 0.0;
  double cov_unconditional = 0.0;
  double stderr_unconditional = 0.0;
  double cov_given_large_ancillary = 0.0;
  std::size_t count_large_ancillary = 0;
  double threshold = 0.0;
};

//! (4 - sqrt(0.8)) / 8: half-width giving 0.95 coverage for the mean of two Uniform(theta -
//! 1/2, theta + 1/2) draws.
double welch_d_star();

//! X1, X2 ~ Uniform(theta - 1/2, theta + 1/2); interval mean +- d_star; coverage overall and
//! given |X1 - X2| > threshold. reps >= 1e5.
WelchResult welch_conditional_coverage(std::size_t reps, RandomStream& stream,
                                       double threshold = 0.9, double theta = 0.0);

} // namespace bk
