#pragma once

#include "bk/distribution.hpp"

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

namespace bk {

//! Sufficient-statistic summaries. Combining two summaries with `combine` and updating once is
//! identical, bit for bit, to updating twice.
struct BinomialData {
  std::int64_t n = 0; //!< trials
  std::int64_t y = 0; //!< successes
};

struct PoissonData {
  std::int64_t n = 0;     //!< observations
  std::int64_t total = 0; //!< sum of counts
};

struct NormalData {
  std::int64_t n = 0;
  double sum = 0.0;
  double ss = 0.0; //!< sum of squared deviations from the sample mean

  static NormalData from_mean(std::int64_t n, double mean, double ss = 0.0);
  double mean() const { return n > 0 ? sum / static_cast<double>(n) : 0.0; }
};

struct UniformData {
  std::int64_t n = 0;
  double max = 0.0;
};

using DataSummary = std::variant<BinomialData, PoissonData, NormalData, UniformData>;

BinomialData summarize_bernoulli(std::span<const double> ys);
PoissonData summarize_counts(std::span<const double> ys);
NormalData summarize_normal(std::span<const double> ys);
UniformData summarize_uniform(std::span<const double> ys);

BinomialData combine(const BinomialData& a, const BinomialData& b);
PoissonData combine(const PoissonData& a, const PoissonData& b);
NormalData combine(const NormalData& a, const NormalData& b);
UniformData combine(const UniformData& a, const UniformData& b);

enum class ConjugateKind { BetaBinomial, GammaPoisson, NormalKnownVar, ParetoUniform };

std::string to_string(ConjugateKind k);

//! Prior hyperparameters plus the data absorbed so far. Hyperparameters:
//!   BetaBinomial(a, b), GammaPoisson(shape a, rate b), NormalKnownVar(mu, tau2; sigma2 = 1),
//!   ParetoUniform(a, b).
class ConjugateModel {
public:
  static ConjugateModel beta_binomial(double a, double b);
  static ConjugateModel gamma_poisson(double a, double b);
  static ConjugateModel normal_known_var(double mu, double tau2, double sigma2 = 1.0);
  //! Improper flat prior on the normal mean. Marginal likelihoods are unavailable.
  static ConjugateModel normal_flat(double sigma2 = 1.0);
  static ConjugateModel pareto_uniform(double a, double b);

  ConjugateKind kind() const { return kind_; }
  //! Current (posterior) hyperparameters in the order above.
  std::vector<double> hyperparameters() const;
  std::vector<double> prior_hyperparameters() const { return {h0_, h1_}; }
  double sigma2() const { return sigma2_; }
  bool is_flat() const { return flat_; }
  //! Number of observations absorbed so far.
  std::int64_t observations() const;

  ConjugateModel update(const DataSummary& data) const;

  //! Current distribution of the parameter.
  Distribution distribution() const;

  //! log p(data | current state), integrating the parameter out. Count families use the
  //! law of the summary statistic (Binomial for y, Poisson(n theta) for the total); Normal and
  //! Pareto-Uniform use the joint density of the raw sample, which the summary determines.
  double log_marginal_likelihood(const DataSummary& data) const;

  bool accepts(const DataSummary& data) const;

  bool operator==(const ConjugateModel& o) const;

private:
  ConjugateModel(ConjugateKind kind, double h0, double h1, double sigma2, bool flat);

  ConjugateKind kind_;
  double h0_, h1_;
  double sigma2_ = 1.0;
  bool flat_ = false;
  // Absorbed statistics.
  std::int64_t n_ = 0;
  std::int64_t count_sum_ = 0; // successes or Poisson total
  double real_sum_ = 0.0;      // normal sum
  double max_ = 0.0;           // uniform maximum
};

inline ConjugateModel update(const ConjugateModel& m, const DataSummary& d) { return m.update(d); }
inline double marginal_likelihood(const ConjugateModel& m, const DataSummary& d) {
  return m.log_marginal_likelihood(d);
}

//! Normal(theta_n, tau_n^2 + sigma2) for a NormalKnownVar state.
Distribution posterior_predictive_normal(const ConjugateModel& model);

struct LinearBayes {
  double prior_weight = 1.0;
  double data_weight = 0.0;
  double prior_mean = 0.0;
  std::optional<double> mle; //!< empty when there is no data
  double posterior_mean = 0.0;
};

//! Posterior mean as a precision-weighted average of the prior mean and the MLE.
LinearBayes linear_bayes_decomposition(const ConjugateModel& prior, const DataSummary& data);

//! Finite mixture of conjugate priors of one kind.
class MixturePrior {
public:
  MixturePrior(std::vector<ConjugateModel> components, std::vector<double> weights);

  const std::vector<ConjugateModel>& components() const { return components_; }
  const std::vector<double>& weights() const { return weights_; }

  double log_pdf(double theta) const;
  double mean() const;

private:
  std::vector<ConjugateModel> components_;
  std::vector<double> weights_;
};

MixturePrior update_mixture(const MixturePrior& prior, const DataSummary& data);

//! Posterior for a normal mean (unit data variance) under a Laplace(mu, tau) prior: a
//! two-piece truncated-normal mixture.
struct LaplacePosterior {
  Distribution lower;  //!< N(lambda1, 1/n) restricted to (-inf, mu)
  Distribution upper;  //!< N(lambda2, 1/n) restricted to (mu, inf)
  double weight_lower; //!< a / (a + b)
  double weight_upper; //!< b / (a + b)
  double lambda1;
  double lambda2;

  double log_pdf(double theta) const;
  double pdf(double theta) const;
  double cdf(double theta) const;
  double mean() const;
};

LaplacePosterior laplace_prior_posterior(double mu, double tau, std::int64_t n, double ybar);

} // namespace bk
