#include "bk/conjugate.hpp"

#include "bk/errors.hpp"
#include "bk/special.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace bk {

namespace sp = special;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

const char* data_name(const DataSummary& d) {
  switch (d.index()) {
  case 0:
    return "binomial summary";
  case 1:
    return "Poisson summary";
  case 2:
    return "normal summary";
  default:
    return "uniform summary";
  }
}

std::size_t expected_index(ConjugateKind k) {
  switch (k) {
  case ConjugateKind::BetaBinomial:
    return 0;
  case ConjugateKind::GammaPoisson:
    return 1;
  case ConjugateKind::NormalKnownVar:
    return 2;
  case ConjugateKind::ParetoUniform:
    return 3;
  }
  return 0;
}

void check_summary(const DataSummary& d) {
  if (const auto* b = std::get_if<BinomialData>(&d)) {
    if (b->n < 0 || b->y < 0 || b->y > b->n) throw DataMismatch("binomial summary needs 0 <= y <= n");
  } else if (const auto* p = std::get_if<PoissonData>(&d)) {
    if (p->n < 0 || p->total < 0) throw DataMismatch("Poisson summary needs n >= 0, total >= 0");
    if (p->n == 0 && p->total != 0) throw DataMismatch("Poisson summary: total without data");
  } else if (const auto* nd = std::get_if<NormalData>(&d)) {
    if (nd->n < 0 || !std::isfinite(nd->sum) || !(nd->ss >= 0.0)) {
      throw DataMismatch("normal summary needs n >= 0, finite sum, ss >= 0");
    }
  } else if (const auto* u = std::get_if<UniformData>(&d)) {
    if (u->n < 0) throw DataMismatch("uniform summary needs n >= 0");
    if (u->n > 0 && !(u->max > 0.0 && std::isfinite(u->max))) {
      throw DataMismatch("uniform data must be positive");
    }
  }
}

} // namespace

NormalData NormalData::from_mean(std::int64_t n, double mean, double ss) {
  return {n, static_cast<double>(n) * mean, ss};
}

BinomialData summarize_bernoulli(std::span<const double> ys) {
  BinomialData d;
  for (double y : ys) {
    if (y != 0.0 && y != 1.0) throw DataMismatch("Bernoulli observations must be 0 or 1");
    ++d.n;
    d.y += static_cast<std::int64_t>(y);
  }
  return d;
}

PoissonData summarize_counts(std::span<const double> ys) {
  PoissonData d;
  for (double y : ys) {
    if (!(y >= 0.0) || std::floor(y) != y || y > 9.0e15) {
      throw DataMismatch("counts must be nonnegative integers");
    }
    ++d.n;
    d.total += static_cast<std::int64_t>(y);
  }
  return d;
}

NormalData summarize_normal(std::span<const double> ys) {
  NormalData d;
  for (double y : ys) {
    if (!std::isfinite(y)) throw DataMismatch("normal observations must be finite");
    ++d.n;
    d.sum += y;
  }
  const double m = d.mean();
  for (double y : ys) d.ss += (y - m) * (y - m);
  return d;
}

UniformData summarize_uniform(std::span<const double> ys) {
  UniformData d;
  for (double y : ys) {
    if (!(y > 0.0) || !std::isfinite(y)) throw DataMismatch("uniform observations must be positive");
    ++d.n;
    d.max = std::max(d.max, y);
  }
  return d;
}

BinomialData combine(const BinomialData& a, const BinomialData& b) {
  return {a.n + b.n, a.y + b.y};
}
PoissonData combine(const PoissonData& a, const PoissonData& b) {
  return {a.n + b.n, a.total + b.total};
}
NormalData combine(const NormalData& a, const NormalData& b) {
  NormalData r{a.n + b.n, a.sum + b.sum, a.ss + b.ss};
  if (a.n > 0 && b.n > 0) {
    const double diff = a.mean() - b.mean();
    r.ss += static_cast<double>(a.n) * static_cast<double>(b.n) / static_cast<double>(r.n) * diff *
            diff;
  }
  return r;
}
UniformData combine(const UniformData& a, const UniformData& b) {
  return {a.n + b.n, std::max(a.max, b.max)};
}

std::string to_string(ConjugateKind k) {
  switch (k) {
  case ConjugateKind::BetaBinomial:
    return "BetaBinomial";
  case ConjugateKind::GammaPoisson:
    return "GammaPoisson";
  case ConjugateKind::NormalKnownVar:
    return "NormalKnownVar";
  case ConjugateKind::ParetoUniform:
    return "ParetoUniform";
  }
  return "?";
}

ConjugateModel::ConjugateModel(ConjugateKind kind, double h0, double h1, double sigma2, bool flat)
    : kind_(kind), h0_(h0), h1_(h1), sigma2_(sigma2), flat_(flat) {
  auto positive = [](double v) { return v > 0.0 && std::isfinite(v); };
  if (kind == ConjugateKind::NormalKnownVar) {
    if (!positive(sigma2)) throw DomainError("NormalKnownVar: sigma2 must be positive");
    if (!flat && (!std::isfinite(h0) || !positive(h1))) {
      throw DomainError("NormalKnownVar: need finite mu and tau2 > 0");
    }
  } else if (!positive(h0) || !positive(h1)) {
    throw DomainError(to_string(kind) + ": hyperparameters must be positive");
  }
}

ConjugateModel ConjugateModel::beta_binomial(double a, double b) {
  return {ConjugateKind::BetaBinomial, a, b, 1.0, false};
}
ConjugateModel ConjugateModel::gamma_poisson(double a, double b) {
  return {ConjugateKind::GammaPoisson, a, b, 1.0, false};
}
ConjugateModel ConjugateModel::normal_known_var(double mu, double tau2, double sigma2) {
  return {ConjugateKind::NormalKnownVar, mu, tau2, sigma2, false};
}
ConjugateModel ConjugateModel::normal_flat(double sigma2) {
  return {ConjugateKind::NormalKnownVar, 0.0, kInf, sigma2, true};
}
ConjugateModel ConjugateModel::pareto_uniform(double a, double b) {
  return {ConjugateKind::ParetoUniform, a, b, 1.0, false};
}

std::int64_t ConjugateModel::observations() const { return n_; }

std::vector<double> ConjugateModel::hyperparameters() const {
  const double n = static_cast<double>(n_);
  const double s = static_cast<double>(count_sum_);
  switch (kind_) {
  case ConjugateKind::BetaBinomial:
    return {h0_ + s, h1_ + (n - s)};
  case ConjugateKind::GammaPoisson:
    return {h0_ + s, h1_ + n};
  case ConjugateKind::NormalKnownVar: {
    const double prior_prec = flat_ ? 0.0 : 1.0 / h1_;
    const double prior_lin = flat_ ? 0.0 : h0_ / h1_;
    const double prec = prior_prec + n / sigma2_;
    if (prec == 0.0) return {std::numeric_limits<double>::quiet_NaN(), kInf};
    return {(prior_lin + real_sum_ / sigma2_) / prec, 1.0 / prec};
  }
  case ConjugateKind::ParetoUniform:
    return {h0_ + n, std::max(h1_, max_)};
  }
  return {};
}

bool ConjugateModel::accepts(const DataSummary& data) const {
  return data.index() == expected_index(kind_);
}

ConjugateModel ConjugateModel::update(const DataSummary& data) const {
  if (!accepts(data)) {
    throw DataMismatch(to_string(kind_) + " cannot absorb a " + data_name(data));
  }
  check_summary(data);
  ConjugateModel r = *this;
  std::visit(
      [&](const auto& d) {
        using T = std::decay_t<decltype(d)>;
        r.n_ += d.n;
        if constexpr (std::is_same_v<T, BinomialData>) {
          r.count_sum_ += d.y;
        } else if constexpr (std::is_same_v<T, PoissonData>) {
          r.count_sum_ += d.total;
        } else if constexpr (std::is_same_v<T, NormalData>) {
          r.real_sum_ += d.sum;
        } else {
          if (d.n > 0) r.max_ = std::max(r.max_, d.max);
        }
      },
      data);
  return r;
}

Distribution ConjugateModel::distribution() const {
  const auto h = hyperparameters();
  switch (kind_) {
  case ConjugateKind::BetaBinomial:
    return Distribution::beta(h[0], h[1]);
  case ConjugateKind::GammaPoisson:
    return Distribution::gamma(h[0], h[1]);
  case ConjugateKind::NormalKnownVar:
    if (!std::isfinite(h[1])) throw ImproperPrior("flat normal prior has no distribution");
    return Distribution::normal(h[0], h[1]);
  case ConjugateKind::ParetoUniform:
    return Distribution::pareto(h[0], h[1]);
  }
  throw UnsupportedOperation("unknown conjugate kind");
}

double ConjugateModel::log_marginal_likelihood(const DataSummary& data) const {
  if (!accepts(data)) {
    throw DataMismatch(to_string(kind_) + " cannot score a " + data_name(data));
  }
  check_summary(data);
  const auto h = hyperparameters();
  switch (kind_) {
  case ConjugateKind::BetaBinomial: {
    const auto& d = std::get<BinomialData>(data);
    const double n = static_cast<double>(d.n);
    const double y = static_cast<double>(d.y);
    return sp::log_choose(n, y) + sp::log_beta(h[0] + y, h[1] + n - y) - sp::log_beta(h[0], h[1]);
  }
  case ConjugateKind::GammaPoisson: {
    const auto& d = std::get<PoissonData>(data);
    if (d.n == 0) return 0.0;
    const double n = static_cast<double>(d.n);
    const double s = static_cast<double>(d.total);
    const double a = h[0];
    const double b = h[1];
    return sp::log_gamma(a + s) - sp::log_gamma(a) - sp::log_gamma(s + 1.0) + a * std::log(b) +
           s * std::log(n) - (a + s) * std::log(b + n);
  }
  case ConjugateKind::NormalKnownVar: {
    if (flat_ && n_ == 0) throw ImproperPrior("marginal likelihood under a flat prior");
    const auto& d = std::get<NormalData>(data);
    if (d.n == 0) return 0.0;
    const double n = static_cast<double>(d.n);
    const double s2 = sigma2_;
    const double ybar = d.mean();
    const double v = h[1] + s2 / n;
    const double z = ybar - h[0];
    return -0.5 * n * std::log(2.0 * M_PI * s2) - d.ss / (2.0 * s2) +
           0.5 * std::log(2.0 * M_PI * s2 / n) - 0.5 * std::log(2.0 * M_PI * v) - 0.5 * z * z / v;
  }
  case ConjugateKind::ParetoUniform: {
    const auto& d = std::get<UniformData>(data);
    if (d.n == 0) return 0.0;
    const double n = static_cast<double>(d.n);
    const double a = h[0];
    const double b = h[1];
    const double m = std::max(b, d.max);
    return std::log(a) + a * std::log(b) - std::log(a + n) - (a + n) * std::log(m);
  }
  }
  return -kInf;
}

bool ConjugateModel::operator==(const ConjugateModel& o) const {
  return kind_ == o.kind_ && flat_ == o.flat_ && sigma2_ == o.sigma2_ &&
         hyperparameters() == o.hyperparameters();
}

Distribution posterior_predictive_normal(const ConjugateModel& model) {
  if (model.kind() != ConjugateKind::NormalKnownVar) {
    throw UnsupportedOperation("predictive is defined for NormalKnownVar states");
  }
  const auto h = model.hyperparameters();
  if (!std::isfinite(h[1])) throw ImproperPrior("flat prior has no predictive distribution");
  return Distribution::normal(h[0], h[1] + model.sigma2());
}

LinearBayes linear_bayes_decomposition(const ConjugateModel& prior, const DataSummary& data) {
  if (!prior.accepts(data)) throw DataMismatch("data summary does not match the model kind");
  check_summary(data);
  const auto h = prior.hyperparameters();
  LinearBayes r;
  double n = 0.0;
  double mle = 0.0;
  double prior_precision = 0.0;
  double data_precision = 0.0;
  switch (prior.kind()) {
  case ConjugateKind::BetaBinomial: {
    const auto& d = std::get<BinomialData>(data);
    n = static_cast<double>(d.n);
    r.prior_mean = h[0] / (h[0] + h[1]);
    prior_precision = h[0] + h[1];
    data_precision = n;
    if (d.n > 0) mle = static_cast<double>(d.y) / n;
    break;
  }
  case ConjugateKind::GammaPoisson: {
    const auto& d = std::get<PoissonData>(data);
    n = static_cast<double>(d.n);
    r.prior_mean = h[0] / h[1];
    prior_precision = h[1];
    data_precision = n;
    if (d.n > 0) mle = static_cast<double>(d.total) / n;
    break;
  }
  case ConjugateKind::NormalKnownVar: {
    const auto& d = std::get<NormalData>(data);
    n = static_cast<double>(d.n);
    if (prior.is_flat() && prior.observations() == 0) {
      if (d.n == 0) throw ImproperPrior("flat prior without data has no mean");
      r.prior_mean = 0.0;
      prior_precision = 0.0;
    } else {
      r.prior_mean = h[0];
      prior_precision = 1.0 / h[1];
    }
    data_precision = n / prior.sigma2();
    if (d.n > 0) mle = d.mean();
    break;
  }
  case ConjugateKind::ParetoUniform:
    throw UnsupportedOperation("no linear Bayes decomposition for Pareto-Uniform");
  }
  if (n == 0.0) {
    r.prior_weight = 1.0;
    r.data_weight = 0.0;
    r.posterior_mean = r.prior_mean;
    return r;
  }
  const double total = prior_precision + data_precision;
  r.prior_weight = prior_precision / total;
  r.data_weight = data_precision / total;
  r.mle = mle;
  r.posterior_mean = r.prior_weight * r.prior_mean + r.data_weight * mle;
  return r;
}

MixturePrior::MixturePrior(std::vector<ConjugateModel> components, std::vector<double> weights)
    : components_(std::move(components)), weights_(std::move(weights)) {
  if (components_.empty()) throw DomainError("mixture needs at least one component");
  if (components_.size() != weights_.size()) throw DomainError("mixture weight count mismatch");
  double total = 0.0;
  for (std::size_t k = 0; k < weights_.size(); ++k) {
    if (!(weights_[k] > 0.0)) throw DomainError("mixture weights must be positive");
    if (components_[k].kind() != components_[0].kind()) {
      throw DomainError("mixture components must share one kind");
    }
    total += weights_[k];
  }
  if (std::fabs(total - 1.0) > 1e-12) throw DomainError("mixture weights must sum to 1");
}

double MixturePrior::log_pdf(double theta) const {
  std::vector<double> terms;
  terms.reserve(weights_.size());
  for (std::size_t k = 0; k < weights_.size(); ++k) {
    terms.push_back(std::log(weights_[k]) + components_[k].distribution().log_pdf(theta));
  }
  return sp::log_sum_exp(terms);
}

double MixturePrior::mean() const {
  double m = 0.0;
  for (std::size_t k = 0; k < weights_.size(); ++k) {
    m += weights_[k] * components_[k].distribution().mean();
  }
  return m;
}

MixturePrior update_mixture(const MixturePrior& prior, const DataSummary& data) {
  const auto& comps = prior.components();
  std::vector<double> logw(comps.size());
  std::vector<ConjugateModel> post;
  post.reserve(comps.size());
  for (std::size_t k = 0; k < comps.size(); ++k) {
    logw[k] = std::log(prior.weights()[k]) + comps[k].log_marginal_likelihood(data);
    post.push_back(comps[k].update(data));
  }
  const double total = sp::log_sum_exp(logw);
  if (!std::isfinite(total)) throw DegenerateEvidence("all mixture components have zero evidence");
  std::vector<double> w(comps.size());
  double sum = 0.0;
  for (std::size_t k = 0; k < comps.size(); ++k) {
    w[k] = std::exp(logw[k] - total);
    sum += w[k];
  }
  for (double& x : w) x /= sum;
  return MixturePrior(std::move(post), std::move(w));
}

double LaplacePosterior::log_pdf(double theta) const {
  // The pieces meet at mu; the density is continuous there, so count only one of them.
  if (theta < upper.param(2)) return std::log(weight_lower) + lower.log_pdf(theta);
  return std::log(weight_upper) + upper.log_pdf(theta);
}

double LaplacePosterior::pdf(double theta) const { return std::exp(log_pdf(theta)); }

double LaplacePosterior::cdf(double theta) const {
  return weight_lower * lower.cdf(theta) + weight_upper * upper.cdf(theta);
}

double LaplacePosterior::mean() const {
  return weight_lower * lower.mean() + weight_upper * upper.mean();
}

LaplacePosterior laplace_prior_posterior(double mu, double tau, std::int64_t n, double ybar) {
  if (n < 1) throw DomainError("laplace_prior_posterior: n must be >= 1");
  if (!(tau > 0.0) || !std::isfinite(tau)) throw DomainError("laplace_prior_posterior: tau > 0");
  if (!std::isfinite(mu) || !std::isfinite(ybar)) throw DomainError("laplace_prior_posterior: finite inputs");
  const double nn = static_cast<double>(n);
  const double shift = 1.0 / (nn * tau);
  const double l1 = ybar + shift;
  const double l2 = ybar - shift;
  const double rn = std::sqrt(nn);
  // Unnormalised piece masses; the common sqrt(2 pi / n) factor cancels.
  const double log_a =
      0.5 * nn * (l1 * l1 - ybar * ybar) - mu / tau + sp::log_normal_cdf(rn * (mu - l1));
  const double log_b =
      0.5 * nn * (l2 * l2 - ybar * ybar) + mu / tau + sp::log_normal_cdf(-rn * (mu - l2));
  const double total = sp::log_add_exp(log_a, log_b);
  if (!std::isfinite(total)) throw DegenerateEvidence("both Laplace-prior pieces vanish");
  const double wa = std::exp(log_a - total);
  const double wb = std::exp(log_b - total);
  return LaplacePosterior{Distribution::truncated_normal(l1, 1.0 / nn, -kInf, mu),
                          Distribution::truncated_normal(l2, 1.0 / nn, mu, kInf),
                          wa,
                          wb,
                          l1,
                          l2};
}

} // namespace bk
