#include "bk/hypothesis.hpp"

#include "bk/errors.hpp"
#include "bk/special.hpp"

#include <cmath>
#include <limits>

namespace bk {

namespace sp = special;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

template <class T> const T& expect(const DataSummary& d, const char* who) {
  if (const auto* p = std::get_if<T>(&d)) return *p;
  throw DataMismatch(std::string(who) + ": wrong data summary kind");
}

} // namespace

ModelSpec ModelSpec::conjugate(std::string name, const ConjugateModel& model, double prior) {
  ModelSpec m;
  m.name = std::move(name);
  m.prior_probability = prior;
  m.log_marginal = [model](const DataSummary& d) { return model.log_marginal_likelihood(d); };
  m.predictive_mean = [model](const DataSummary& d) {
    const auto post = model.update(d);
    const double theta_mean = post.distribution().mean();
    // Uniform(0, theta) observations have mean theta / 2.
    return post.kind() == ConjugateKind::ParetoUniform ? 0.5 * theta_mean : theta_mean;
  };
  return m;
}

ModelSpec ModelSpec::binomial_point(std::string name, double theta, double prior) {
  if (!(theta >= 0.0 && theta <= 1.0)) throw DomainError("binomial_point: theta in [0, 1]");
  ModelSpec m;
  m.name = std::move(name);
  m.prior_probability = prior;
  m.log_marginal = [theta](const DataSummary& d) {
    const auto& b = expect<BinomialData>(d, "binomial_point");
    if (b.n == 0) return 0.0;
    return Distribution::binomial(static_cast<double>(b.n), theta).log_pdf(static_cast<double>(b.y));
  };
  m.predictive_mean = [theta](const DataSummary&) { return theta; };
  return m;
}

ModelSpec ModelSpec::poisson_point(std::string name, double rate, double prior) {
  if (!(rate > 0.0)) throw DomainError("poisson_point: rate > 0");
  ModelSpec m;
  m.name = std::move(name);
  m.prior_probability = prior;
  m.log_marginal = [rate](const DataSummary& d) {
    const auto& p = expect<PoissonData>(d, "poisson_point");
    if (p.n == 0) return 0.0;
    return Distribution::poisson(rate * static_cast<double>(p.n)).log_pdf(static_cast<double>(p.total));
  };
  m.predictive_mean = [rate](const DataSummary&) { return rate; };
  return m;
}

ModelSpec ModelSpec::normal_point(std::string name, double mean, double prior, double sigma2) {
  if (!(sigma2 > 0.0)) throw DomainError("normal_point: sigma2 > 0");
  ModelSpec m;
  m.name = std::move(name);
  m.prior_probability = prior;
  m.log_marginal = [mean, sigma2](const DataSummary& d) {
    const auto& nd = expect<NormalData>(d, "normal_point");
    if (nd.n == 0) return 0.0;
    const double n = static_cast<double>(nd.n);
    const double z = nd.mean() - mean;
    return -0.5 * n * std::log(2.0 * M_PI * sigma2) - (nd.ss + n * z * z) / (2.0 * sigma2);
  };
  m.predictive_mean = [mean](const DataSummary&) { return mean; };
  return m;
}

std::string_view to_string(EvidenceLabel label) {
  switch (label) {
  case EvidenceLabel::BareMention:
    return "BareMention";
  case EvidenceLabel::Positive:
    return "Positive";
  case EvidenceLabel::Strong:
    return "Strong";
  case EvidenceLabel::VeryStrong:
    return "VeryStrong";
  }
  return "?";
}

EvidenceLabel kass_raftery_label(double odds) {
  if (!(odds > 0.0)) throw DomainError("kass_raftery_label: odds must be positive");
  if (odds < 1.0) odds = 1.0 / odds;
  if (odds <= 3.0) return EvidenceLabel::BareMention;
  if (odds <= 20.0) return EvidenceLabel::Positive;
  if (odds <= 150.0) return EvidenceLabel::Strong;
  return EvidenceLabel::VeryStrong;
}

double ComparisonReport::log_bayes_factor(std::size_t l, std::size_t k) const {
  return models.at(l).log_marginal - models.at(k).log_marginal;
}

double ComparisonReport::log10_bayes_factor(std::size_t l, std::size_t k) const {
  return log_bayes_factor(l, k) / std::log(10.0);
}

double ComparisonReport::log_prior_odds(std::size_t l, std::size_t k) const {
  return std::log(models.at(l).prior_probability) - std::log(models.at(k).prior_probability);
}

double ComparisonReport::log_posterior_odds(std::size_t l, std::size_t k) const {
  return log_prior_odds(l, k) + log_bayes_factor(l, k);
}

EvidenceLabel ComparisonReport::label(std::size_t l, std::size_t k) const {
  const double lo = std::fabs(log_posterior_odds(l, k));
  return kass_raftery_label(lo > 700.0 ? kInf : std::exp(lo));
}

ComparisonReport compare(const std::vector<ModelSpec>& models, const DataSummary& data) {
  if (models.size() < 2) throw DomainError("compare: need at least two models");
  double total_prior = 0.0;
  for (const auto& m : models) {
    if (!(m.prior_probability > 0.0 && m.prior_probability <= 1.0)) {
      throw DomainError("compare: prior probabilities must lie in (0, 1]");
    }
    if (!m.log_marginal) throw DomainError("compare: model without a marginal likelihood");
    total_prior += m.prior_probability;
  }
  if (std::fabs(total_prior - 1.0) > 1e-12) throw DomainError("compare: priors must sum to 1");
  ComparisonReport r;
  std::vector<double> lp(models.size());
  for (std::size_t k = 0; k < models.size(); ++k) {
    ModelResult mr;
    mr.name = models[k].name;
    mr.prior_probability = models[k].prior_probability;
    mr.log_marginal = models[k].log_marginal(data);
    if (std::isnan(mr.log_marginal)) throw NumericError("compare: NaN log marginal");
    lp[k] = mr.log_marginal + std::log(mr.prior_probability);
    r.models.push_back(std::move(mr));
  }
  const double total = sp::log_sum_exp(lp);
  if (!std::isfinite(total)) throw DegenerateEvidence("compare: every model has zero evidence");
  for (std::size_t k = 0; k < models.size(); ++k) {
    r.models[k].posterior_probability = std::exp(lp[k] - total);
    if (r.models[k].posterior_probability > r.models[r.best].posterior_probability) r.best = k;
  }
  return r;
}

double bma_predict(const std::vector<ModelSpec>& models, const DataSummary& data) {
  for (const auto& m : models) {
    if (!m.predictive_mean) throw DomainError("bma_predict: model " + m.name + " has no predictive mean");
  }
  if (models.size() == 1) return models[0].predictive_mean(data);
  const auto rep = compare(models, data);
  double s = 0.0;
  for (std::size_t k = 0; k < models.size(); ++k) {
    s += rep.models[k].posterior_probability * models[k].predictive_mean(data);
  }
  return s;
}

LindleyReport lindley_report(std::int64_t n, std::int64_t y) {
  if (n < 1 || y < 0 || y > n) throw DomainError("lindley_report: need 0 <= y <= n, n >= 1");
  const double nn = static_cast<double>(n);
  const double yy = static_cast<double>(y);
  LindleyReport r;
  r.z = (yy - 0.5 * nn) / std::sqrt(0.25 * nn);
  r.p_value_two_sided = std::erfc(std::fabs(r.z) * M_SQRT1_2);
  r.p_value_one_sided = sp::normal_cdf(-r.z);
  r.log_m_h0 = sp::log_choose(nn, yy) - nn * std::log(2.0);
  r.log_m_h1 = -std::log(nn + 1.0);
  r.log_bf01 = r.log_m_h0 - r.log_m_h1;
  r.posterior_h0 = 1.0 / (1.0 + std::exp(-r.log_bf01));
  return r;
}

double binomial_test_power(std::int64_t n, double theta_alt, double z_crit) {
  if (n < 1) throw DomainError("binomial_test_power: n >= 1");
  if (!(theta_alt > 0.0 && theta_alt < 1.0)) throw DomainError("binomial_test_power: theta in (0, 1)");
  if (!(z_crit > 0.0)) throw DomainError("binomial_test_power: z_crit > 0");
  const double nn = static_cast<double>(n);
  const double shift = (nn * theta_alt - 0.5 * nn) / std::sqrt(0.25 * nn);
  const double sd = std::sqrt(4.0 * theta_alt * (1.0 - theta_alt));
  return sp::normal_cdf((-z_crit - shift) / sd) + sp::normal_cdf((shift - z_crit) / sd);
}

RejectionRate bayes_test_operating_characteristics(std::int64_t n, double theta, std::size_t reps,
                                                   RandomStream& stream) {
  if (reps < 10000) throw DomainError("bayes_test_operating_characteristics: reps >= 1e4");
  const auto law = Distribution::binomial(static_cast<double>(n), theta);
  const auto counts = simulate_blocks<std::size_t>(
      reps, stream, [&](RandomStream& s, std::size_t b, std::size_t e) {
        std::size_t rejected = 0;
        for (double y : law.sample(s, e - b)) {
          if (lindley_report(n, static_cast<std::int64_t>(y)).log_bf01 < 0.0) ++rejected;
        }
        return rejected;
      });
  std::size_t total = 0;
  for (auto c : counts) total += c;
  RejectionRate r;
  r.reps = reps;
  r.pr_reject = static_cast<double>(total) / static_cast<double>(reps);
  r.mc_stderr = std::sqrt(r.pr_reject * (1.0 - r.pr_reject) / static_cast<double>(reps));
  return r;
}

OneSidedOdds one_sided_normal_odds(double theta0, double mu, double tau, double eps,
                                   std::int64_t n, double ybar) {
  if (!(tau > 0.0) || !std::isfinite(tau)) throw DomainError("one_sided_normal_odds: tau > 0");
  if (!(eps > 0.0 && eps < 1.0)) throw DomainError("one_sided_normal_odds: eps in (0, 1)");
  if (n < 0) throw DomainError("one_sided_normal_odds: n >= 0");
  const double nn = static_cast<double>(n);
  const double prec = 1.0 / (tau * tau) + nn;
  OneSidedOdds r;
  r.posterior_mean = (mu / (tau * tau) + nn * ybar) / prec;
  r.posterior_variance = 1.0 / prec;
  const double a = (theta0 - r.posterior_mean) / std::sqrt(r.posterior_variance);
  const double b = (theta0 - mu) / tau;
  // Each truncated prior is renormalised on its half-line, hence the prior-mass terms.
  const double log_odds = std::log(eps) - std::log1p(-eps) + sp::log_normal_cdf(a) -
                          sp::log_normal_cdf(-a) - sp::log_normal_cdf(b) + sp::log_normal_cdf(-b);
  r.posterior_odds = std::exp(log_odds);
  r.post_prob_h0 = 1.0 / (1.0 + std::exp(-log_odds));
  return r;
}

double bartlett_log_bf10(std::int64_t n, double ybar, double tau2) {
  if (!(tau2 > 0.0)) throw DomainError("bartlett: tau2 > 0");
  if (n < 1) throw DomainError("bartlett: n >= 1");
  const double nn = static_cast<double>(n);
  return -0.5 * std::log1p(nn * tau2) + nn * nn * ybar * ybar / (2.0 * (1.0 / tau2 + nn));
}

double bartlett_bf10(std::int64_t n, double ybar, double tau2) {
  return std::exp(bartlett_log_bf10(n, ybar, tau2));
}

LikelihoodPrincipleDemo likelihood_principle_demo(std::int64_t s, std::int64_t t) {
  if (s < 1 || t < 1 || s > t) throw DomainError("likelihood_principle_demo: need 1 <= s <= t");
  const double ss = static_cast<double>(s);
  const double tt = static_cast<double>(t);
  LikelihoodPrincipleDemo r;
  r.p_binomial = Distribution::binomial(tt, 0.5).cdf(ss);
  r.p_negbinomial = 1.0 - Distribution::neg_binomial(ss, 0.5).cdf(tt - 1.0);
  r.mle = ss / tt;
  const auto prior = ConjugateModel::beta_binomial(1.0, 1.0);
  r.posterior_binomial = prior.update(BinomialData{t, s}).distribution();
  // Negative binomial sampling: r = s successes within y = t trials gives Beta(a + r, b + y - r).
  const auto h = prior.prior_hyperparameters();
  r.posterior_negbinomial = Distribution::beta(h[0] + ss, h[1] + (tt - ss));
  return r;
}

} // namespace bk
