#pragma once

#include "bk/conjugate.hpp"
#include "bk/distribution.hpp"
#include "bk/random.hpp"

#include <cstdint>
#include <functional>
#include <string>
#include <string_view>
#include <vector>

namespace bk {

//! A model in a comparison: its log marginal likelihood as a function of the data summary.
struct ModelSpec {
  std::string name;
  std::function<double(const DataSummary&)> log_marginal;
  double prior_probability = 0.0;
  std::function<double(const DataSummary&)> predictive_mean; //!< optional

  //! Conjugate model; the predictive mean is the posterior mean of the next observation.
  static ModelSpec conjugate(std::string name, const ConjugateModel& model, double prior);
  //! Binomial likelihood (with the binomial coefficient) at a fixed theta.
  static ModelSpec binomial_point(std::string name, double theta, double prior);
  //! Poisson total at a fixed rate: total ~ Poisson(n rate).
  static ModelSpec poisson_point(std::string name, double rate, double prior);
  //! Normal sample with known variance at a fixed mean.
  static ModelSpec normal_point(std::string name, double mean, double prior, double sigma2 = 1.0);
};

struct ModelResult {
  std::string name;
  double log_marginal = 0.0;
  double prior_probability = 0.0;
  double posterior_probability = 0.0;
};

enum class EvidenceLabel { BareMention, Positive, Strong, VeryStrong };

std::string_view to_string(EvidenceLabel label);

//! Odds of 1-3 BareMention, 3-20 Positive, 20-150 Strong, above 150 VeryStrong. A value on a
//! band edge goes to the lower band. Odds below 1 are inverted first.
EvidenceLabel kass_raftery_label(double posterior_odds);

struct ComparisonReport {
  std::vector<ModelResult> models;
  std::size_t best = 0; //!< highest posterior probability, lowest index on ties

  //! Natural-log Bayes factor of model l against model k.
  double log_bayes_factor(std::size_t l, std::size_t k) const;
  double log10_bayes_factor(std::size_t l, std::size_t k) const;
  double log_prior_odds(std::size_t l, std::size_t k) const;
  //! log prior odds + log Bayes factor.
  double log_posterior_odds(std::size_t l, std::size_t k) const;
  EvidenceLabel label(std::size_t l, std::size_t k) const;
};

ComparisonReport compare(const std::vector<ModelSpec>& models, const DataSummary& data);

//! Sum over models of predictive mean times posterior probability.
double bma_predict(const std::vector<ModelSpec>& models, const DataSummary& data);

struct LindleyReport {
  double z = 0.0;
  double p_value_two_sided = 0.0;
  double p_value_one_sided = 0.0; //!< Pr(Z >= z)
  double log_m_h0 = 0.0;          //!< log C(n, y) - n log 2
  double log_m_h1 = 0.0;          //!< -log(n + 1)
  double log_bf01 = 0.0;
  double posterior_h0 = 0.0; //!< equal model priors
};

LindleyReport lindley_report(std::int64_t n, std::int64_t y);

//! Power of the two-sided z test of theta = 1/2 when theta = theta_alt: the statistic
//! (Y - n/2) / sqrt(n/4) with Y approximately Normal(n theta_alt, n theta_alt (1 - theta_alt)).
double binomial_test_power(std::int64_t n, double theta_alt, double z_crit);

struct RejectionRate {
  double pr_reject = 0.0;
  double mc_stderr = 0.0;
  std::size_t reps = 0;
};

//! Pr(BF01 < 1 | theta) by simulating y ~ Binomial(n, theta).
RejectionRate bayes_test_operating_characteristics(std::int64_t n, double theta, std::size_t reps,
                                                   RandomStream& stream);

struct OneSidedOdds {
  double posterior_odds = 0.0; //!< O01
  double post_prob_h0 = 0.0;
  double posterior_mean = 0.0;
  double posterior_variance = 0.0;
};

//! H0: theta <= theta0 vs H1: theta > theta0 with prior mass eps on H0, each hypothesis carrying
//! the Normal(mu, tau^2) prior truncated to its half-line; unit-variance data.
OneSidedOdds one_sided_normal_odds(double theta0, double mu, double tau, double eps,
                                   std::int64_t n, double ybar);

//! log BF10 for N(0, tau2) against the point null 0 with unit-variance data.
double bartlett_log_bf10(std::int64_t n, double ybar, double tau2);
double bartlett_bf10(std::int64_t n, double ybar, double tau2);

struct LikelihoodPrincipleDemo {
  double p_binomial = 0.0;    //!< Pr(Y1 <= s | theta = 1/2), Y1 ~ Binomial(t)
  double p_negbinomial = 0.0; //!< Pr(Y2 >= t | theta = 1/2), Y2 ~ NegBinomial(s)
  double mle = 0.0;
  Distribution posterior_binomial = Distribution::beta(1.0, 1.0);
  Distribution posterior_negbinomial = Distribution::beta(1.0, 1.0);
};

LikelihoodPrincipleDemo likelihood_principle_demo(std::int64_t successes, std::int64_t trials);

} // namespace bk
