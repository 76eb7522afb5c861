#pragma once

#include "bk/random.hpp"

#include <cstddef>
#include <vector>

namespace bk {

//! y_i ~ Normal(theta_i, sigma2), theta_i ~ Normal(mu, tau2), (mu, tau2) on a grid with masses
//! hyper_prior[m * tau2_grid.size() + t]. tau2 = 0 is allowed and means complete pooling.
struct HierNormalModel {
  std::vector<double> y;
  double sigma2 = 1.0;
  std::vector<double> mu_grid;
  std::vector<double> tau2_grid;
  std::vector<double> hyper_prior; //!< empty: uniform

  static HierNormalModel uniform(std::vector<double> y, double sigma2, std::vector<double> mu_grid,
                                 std::vector<double> tau2_grid);

  std::size_t grid_size() const { return mu_grid.size() * tau2_grid.size(); }
  double prior_mass(std::size_t m, std::size_t t) const;
  //! Checks sizes, ordering and normalisation; throws DomainError.
  void validate() const;
};

enum class MarginalRoute { Analytic, Quadrature };

//! log prod_i Normal(y_i | mu, tau2 + sigma2). The quadrature route integrates each theta_i out
//! numerically instead.
double hier_log_likelihood(const HierNormalModel& model, double mu, double tau2,
                           MarginalRoute route = MarginalRoute::Analytic);

struct HierFit {
  std::vector<double> hyper_posterior; //!< same layout as the hyperprior
  std::vector<double> mu_marginal;
  std::vector<double> tau2_marginal;
  std::vector<double> theta_mean;
  std::vector<double> theta_var;
  double log_evidence = 0.0; //!< log sum of prior mass times likelihood
};

//! Throws GridCoverageError when more than 1e-3 of the hyperposterior sits on the first or last
//! mu row or the last tau2 column (dimensions with a single point are exempt).
HierFit fit_grid(const HierNormalModel& model);

struct KlStageOrdering {
  double kl_hyper = 0.0; //!< K(p(lambda | y), psi)
  double kl_theta = 0.0; //!< K(p(theta | y), p(theta)), full theta vector
  bool holds = false;    //!< kl_hyper < kl_theta
};

//! Because y is independent of lambda given theta, the joint (theta, lambda) divergence equals
//! the theta-marginal one, so
//!   K_theta = K_lambda + E_{lambda | y} sum_i KL(N(w y_i + (1 - w) mu, w sigma2) || N(mu, tau2)).
KlStageOrdering kl_stage_ordering(const HierNormalModel& model);

struct EmpiricalBayes {
  double mu_hat = 0.0;
  double tau2_hat = 0.0;
  bool truncated = false; //!< s^2 <= sigma2, so tau2_hat was set to 0
  double shrinkage_weight = 0.0; //!< tau2_hat / (tau2_hat + sigma2)
  std::vector<double> estimates;
};

//! Type II maximum likelihood: mu_hat = mean, tau2_hat = max(0, s^2 - sigma2) with s^2 the mean
//! squared deviation. n >= 3.
EmpiricalBayes empirical_bayes(const std::vector<double>& y, double sigma2);

double grand_mean(const std::vector<double>& y);

struct EbRiskComparison {
  double sse_raw = 0.0;
  double sse_eb = 0.0;
  double gap = 0.0; //!< sse_raw - sse_eb, averaged
  double gap_stderr = 0.0;
  std::size_t reps = 0;
};

//! theta_i ~ N(0, tau2), y_i ~ N(theta_i, sigma2), i = 1..units; paired summed squared errors
//! of the raw data and the empirical Bayes estimates.
EbRiskComparison eb_risk_comparison(std::size_t units, double tau2, double sigma2, std::size_t reps,
                                    RandomStream& stream);

} // namespace bk
