#include "bk/decision.hpp"

#include "bk/errors.hpp"

#include <cmath>
#include <vector>

namespace bk {

namespace {

struct Moments {
  double mean = 0.0;
  double variance = 0.0;
  double mean_stderr = 0.0;
  double variance_stderr = 0.0;
};

// Two-pass sample moments; the variance standard error uses the fourth central moment.
Moments moments(const std::vector<double>& v) {
  Moments m;
  const double n = static_cast<double>(v.size());
  if (v.size() < 2) return m;
  for (double x : v) m.mean += x;
  m.mean /= n;
  double m2 = 0.0;
  double m4 = 0.0;
  for (double x : v) {
    const double d = (x - m.mean) * (x - m.mean);
    m2 += d;
    m4 += d * d;
  }
  m.variance = m2 / (n - 1.0);
  m4 /= n;
  const double pop = m2 / n;
  m.mean_stderr = std::sqrt(m.variance / n);
  m.variance_stderr = std::sqrt(std::max(0.0, m4 - pop * pop) / n);
  return m;
}

RiskEstimate finish(const std::vector<MonteCarloSum>& blocks, std::size_t reps) {
  MonteCarloSum total;
  for (const auto& b : blocks) total.merge(b);
  RiskEstimate r;
  r.reps = reps;
  r.risk = total.mean();
  r.mc_stderr = total.stderr_of_mean();
  return r;
}

Eigen::VectorXd scalar_vector(double x) {
  Eigen::VectorXd v(1);
  v[0] = x;
  return v;
}

} // namespace

DataSampler isotropic_normal_sampler() {
  return [](const Eigen::VectorXd& theta, RandomStream& s) {
    Eigen::VectorXd y(theta.size());
    for (Eigen::Index i = 0; i < theta.size(); ++i) y[i] = theta[i] + s.normal();
    return y;
  };
}

DataSampler iid_normal_sampler(std::size_t n, double sigma2) {
  if (n == 0 || !(sigma2 > 0.0)) throw DomainError("iid_normal_sampler: n >= 1, sigma2 > 0");
  const double sd = std::sqrt(sigma2);
  return [n, sd](const Eigen::VectorXd& theta, RandomStream& s) {
    Eigen::VectorXd y(static_cast<Eigen::Index>(n));
    for (Eigen::Index i = 0; i < y.size(); ++i) y[i] = theta[0] + sd * s.normal();
    return y;
  };
}

Estimator identity_estimator() {
  return {"mle", [](const Eigen::VectorXd& y) { return Eigen::VectorXd(y); }};
}

Estimator sample_mean_estimator() {
  return {"sample-mean", [](const Eigen::VectorXd& y) { return scalar_vector(y.mean()); }};
}

Estimator normal_posterior_mean_estimator(double mu, double tau2, double sigma2) {
  if (!(tau2 > 0.0) || !(sigma2 > 0.0)) throw DomainError("posterior mean rule: tau2, sigma2 > 0");
  return {"posterior-mean", [mu, tau2, sigma2](const Eigen::VectorXd& y) {
            const double n = static_cast<double>(y.size());
            const double prec = 1.0 / tau2 + n / sigma2;
            return scalar_vector((mu / tau2 + y.sum() / sigma2) / prec);
          }};
}

double vector_loss(const LossFunction& loss, const Eigen::VectorXd& estimate,
                   const Eigen::VectorXd& theta) {
  if (estimate.size() != theta.size()) throw DomainError("loss: estimate and theta differ in size");
  double s = 0.0;
  for (Eigen::Index i = 0; i < theta.size(); ++i) s += loss(estimate[i], theta[i]);
  return s;
}

RiskEstimate frequentist_risk(const Estimator& est, const Eigen::VectorXd& theta,
                              const LossFunction& loss, const DataSampler& sampler,
                              std::size_t reps, RandomStream& stream) {
  if (reps < 1000) throw DomainError("frequentist_risk: reps >= 1000");
  const auto blocks = simulate_blocks<MonteCarloSum>(
      reps, stream, [&](RandomStream& s, std::size_t b, std::size_t e) {
        MonteCarloSum acc;
        for (std::size_t i = b; i < e; ++i) acc.add(vector_loss(loss, est.rule(sampler(theta, s)), theta));
        return acc;
      });
  return finish(blocks, reps);
}

RiskEstimate bayes_risk(const Estimator& est, const PriorSampler& prior, const LossFunction& loss,
                        const DataSampler& sampler, std::size_t reps, RandomStream& stream) {
  if (reps < 1000) throw DomainError("bayes_risk: reps >= 1000");
  const auto blocks = simulate_blocks<MonteCarloSum>(
      reps, stream, [&](RandomStream& s, std::size_t b, std::size_t e) {
        MonteCarloSum acc;
        for (std::size_t i = b; i < e; ++i) {
          const Eigen::VectorXd theta = prior(s);
          acc.add(vector_loss(loss, est.rule(sampler(theta, s)), theta));
        }
        return acc;
      });
  return finish(blocks, reps);
}

RiskEstimate bayes_risk(const Estimator& est, const Distribution& prior, const LossFunction& loss,
                        const DataSampler& sampler, std::size_t reps, RandomStream& stream) {
  return bayes_risk(
      est, [&prior](RandomStream& s) { return scalar_vector(prior.sample(s, 1)[0]); }, loss, sampler,
      reps, stream);
}

Eigen::VectorXd james_stein(const Eigen::VectorXd& y) {
  const auto d = y.size();
  if (d < 3) throw DomainError("james_stein: dimension must be at least 3");
  const double ss = y.squaredNorm();
  if (ss == 0.0) return Eigen::VectorXd::Zero(d);
  return (1.0 - static_cast<double>(d - 2) / ss) * y;
}

DominanceResult js_dominance(const Eigen::VectorXd& theta, std::size_t reps, RandomStream& stream) {
  if (theta.size() < 3) throw DomainError("js_dominance: dimension must be at least 3");
  if (reps < 10000) throw DomainError("js_dominance: reps >= 1e4");
  struct Acc {
    MonteCarloSum js, mle, gap;
  };
  const auto blocks = simulate_blocks<Acc>(reps, stream, [&](RandomStream& s, std::size_t b, std::size_t e) {
    Acc a;
    Eigen::VectorXd y(theta.size());
    for (std::size_t i = b; i < e; ++i) {
      for (Eigen::Index k = 0; k < y.size(); ++k) y[k] = theta[k] + s.normal();
      const double lj = (james_stein(y) - theta).squaredNorm();
      const double lm = (y - theta).squaredNorm();
      a.js.add(lj);
      a.mle.add(lm);
      a.gap.add(lm - lj);
    }
    return a;
  });
  Acc t;
  for (const auto& a : blocks) {
    t.js.merge(a.js);
    t.mle.merge(a.mle);
    t.gap.merge(a.gap);
  }
  DominanceResult r;
  r.reps = reps;
  r.risk_js = t.js.mean();
  r.risk_mle = t.mle.mean();
  r.js_stderr = t.js.stderr_of_mean();
  r.mle_stderr = t.mle.stderr_of_mean();
  r.gap = t.gap.mean();
  r.gap_stderr = t.gap.stderr_of_mean();
  return r;
}

CoxVarianceResult cox_variance_demo(double sigma2, std::size_t reps, RandomStream& stream, double mu) {
  if (!(sigma2 > 0.0)) throw DomainError("cox_variance_demo: sigma2 > 0");
  if (reps < 10000) throw DomainError("cox_variance_demo: reps >= 1e4");
  const double sd = std::sqrt(sigma2);
  struct Draw {
    std::vector<double> all, small, large;
  };
  const auto blocks = simulate_blocks<Draw>(reps, stream, [&](RandomStream& s, std::size_t b, std::size_t e) {
    Draw d;
    for (std::size_t i = b; i < e; ++i) {
      const bool small = s.uniform() < 0.5;
      const int n = small ? 2 : 1000;
      double sum = 0.0;
      for (int k = 0; k < n; ++k) sum += mu + sd * s.normal();
      const double est = sum / n;
      d.all.push_back(est);
      (small ? d.small : d.large).push_back(est);
    }
    return d;
  });
  Draw t;
  for (const auto& d : blocks) {
    t.all.insert(t.all.end(), d.all.begin(), d.all.end());
    t.small.insert(t.small.end(), d.small.begin(), d.small.end());
    t.large.insert(t.large.end(), d.large.begin(), d.large.end());
  }
  const Moments a = moments(t.all);
  const Moments s2 = moments(t.small);
  const Moments s1000 = moments(t.large);
  CoxVarianceResult r;
  r.var_unconditional = a.variance;
  r.stderr_unconditional = a.variance_stderr;
  r.var_given_n2 = s2.variance;
  r.stderr_given_n2 = s2.variance_stderr;
  r.var_given_n1000 = s1000.variance;
  r.stderr_given_n1000 = s1000.variance_stderr;
  r.mean_given_n2 = s2.mean;
  r.mean_stderr_n2 = s2.mean_stderr;
  r.mean_given_n1000 = s1000.mean;
  r.mean_stderr_n1000 = s1000.mean_stderr;
  r.count_n2 = t.small.size();
  r.count_n1000 = t.large.size();
  r.target_unconditional = sigma2 / 4.0 + sigma2 / 2000.0;
  return r;
}

double welch_d_star() { return (4.0 - std::sqrt(0.8)) / 8.0; }

WelchResult welch_conditional_coverage(std::size_t reps, RandomStream& stream, double threshold,
                                       double theta) {
  if (reps < 100000) throw DomainError("welch_conditional_coverage: reps >= 1e5");
  if (!(threshold >= 0.0 && threshold < 1.0)) throw DomainError("welch: threshold in [0, 1)");
  const double d = welch_d_star();
  struct Count {
    std::size_t covered = 0, large = 0, large_covered = 0;
  };
  const auto blocks = simulate_blocks<Count>(reps, stream, [&](RandomStream& s, std::size_t b, std::size_t e) {
    Count c;
    for (std::size_t i = b; i < e; ++i) {
      const double x1 = theta - 0.5 + s.uniform();
      const double x2 = theta - 0.5 + s.uniform();
      const bool hit = std::fabs(0.5 * (x1 + x2) - theta) <= d;
      c.covered += hit;
      if (std::fabs(x1 - x2) > threshold) {
        ++c.large;
        c.large_covered += hit;
      }
    }
    return c;
  });
  Count t;
  for (const auto& c : blocks) {
    t.covered += c.covered;
    t.large += c.large;
    t.large_covered += c.large_covered;
  }
  WelchResult r;
  r.d_star = d;
  r.threshold = threshold;
  r.cov_unconditional = static_cast<double>(t.covered) / static_cast<double>(reps);
  r.stderr_unconditional =
      std::sqrt(r.cov_unconditional * (1.0 - r.cov_unconditional) / static_cast<double>(reps));
  r.count_large_ancillary = t.large;
  r.cov_given_large_ancillary =
      t.large ? static_cast<double>(t.large_covered) / static_cast<double>(t.large) : 0.0;
  return r;
}

} // namespace bk
