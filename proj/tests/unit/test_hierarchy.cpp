#include "bk/errors.hpp"
#include "bk/hierarchy.hpp"

#include <boost/math/distributions/normal.hpp>
#include <gtest/gtest.h>

#include <cmath>
#include <numeric>
#include <vector>

using namespace bk;

namespace {

double draw(RandomStream& rs, double lo, double hi) { return lo + (hi - lo) * rs.uniform(); }

std::vector<double> linspace(double lo, double hi, int n) {
  std::vector<double> g;
  for (int i = 0; i < n; ++i) g.push_back(lo + (hi - lo) * i / (n - 1));
  return g;
}

double normal_logpdf(double y, double m, double v) {
  return std::log(boost::math::pdf(boost::math::normal_distribution<>(m, std::sqrt(v)), y));
}

// Hyperposterior from scratch: prior mass times prod_i N(y_i | mu, tau2 + sigma2), normalised.
std::vector<double> oracle_hyper(const HierNormalModel& m) {
  std::vector<double> lp;
  for (std::size_t a = 0; a < m.mu_grid.size(); ++a) {
    for (std::size_t t = 0; t < m.tau2_grid.size(); ++t) {
      double l = std::log(m.prior_mass(a, t));
      for (double y : m.y) l += normal_logpdf(y, m.mu_grid[a], m.tau2_grid[t] + m.sigma2);
      lp.push_back(l);
    }
  }
  const double peak = *std::max_element(lp.begin(), lp.end());
  double z = 0;
  for (double& v : lp) z += (v = std::exp(v - peak));
  for (double& v : lp) v /= z;
  return lp;
}

double kl_normal(double m1, double v1, double m2, double v2) {
  return 0.5 * (std::log(v2 / v1) + (v1 + (m1 - m2) * (m1 - m2)) / v2 - 1);
}

std::vector<double> geomspace(double lo, double hi, int n) {
  std::vector<double> g;
  for (int i = 0; i < n; ++i) g.push_back(lo * std::pow(hi / lo, static_cast<double>(i) / (n - 1)));
  return g;
}

std::vector<double> synthetic(RandomStream& rs, std::size_t n, double mu, double tau2, double sigma2) {
  std::vector<double> y;
  for (std::size_t i = 0; i < n; ++i) y.push_back(mu + std::sqrt(tau2) * rs.normal() + std::sqrt(sigma2) * rs.normal());
  return y;
}

HierNormalModel eight_units() {
  return HierNormalModel::uniform({-1.2, 0.4, 2.9, 1.1, -0.3, 3.6, 0.8, 1.7}, 1.0, linspace(-6, 8, 141),
                                  linspace(0.01, 20, 200));
}

} // namespace

TEST(Hierarchy, FitMatchesDirectGrid) {
  const auto m = eight_units();
  const auto fit = fit_grid(m);
  const auto ref = oracle_hyper(m);
  ASSERT_EQ(fit.hyper_posterior.size(), ref.size());
  for (std::size_t k = 0; k < ref.size(); ++k) EXPECT_NEAR(fit.hyper_posterior[k], ref[k], 1e-12);

  for (std::size_t i = 0; i < m.y.size(); ++i) {
    double mean = 0, second = 0;
    for (std::size_t a = 0; a < m.mu_grid.size(); ++a) {
      for (std::size_t t = 0; t < m.tau2_grid.size(); ++t) {
        const double p = ref[a * m.tau2_grid.size() + t];
        const double w = m.tau2_grid[t] / (m.tau2_grid[t] + m.sigma2);
        const double cm = w * m.y[i] + (1 - w) * m.mu_grid[a];
        mean += p * cm;
        second += p * (w * m.sigma2 + cm * cm);
      }
    }
    EXPECT_NEAR(fit.theta_mean[i], mean, 1e-12);
    EXPECT_NEAR(fit.theta_var[i], second - mean * mean, 1e-10);
  }
  EXPECT_NEAR(std::accumulate(fit.mu_marginal.begin(), fit.mu_marginal.end(), 0.0), 1, 1e-12);
  EXPECT_NEAR(std::accumulate(fit.tau2_marginal.begin(), fit.tau2_marginal.end(), 0.0), 1, 1e-12);
}

TEST(Hierarchy, PoolingLimits) {
  const std::vector<double> y{0.3, -1.0, 2.2, 0.9, 1.4};
  const auto pooled = fit_grid(HierNormalModel::uniform(y, 1.0, linspace(-8, 10, 181), {0.0}));
  double mu_mean = 0;
  for (std::size_t a = 0; a < pooled.mu_marginal.size(); ++a) mu_mean += pooled.mu_marginal[a] * (-8 + 0.1 * a);
  for (double th : pooled.theta_mean) EXPECT_NEAR(th, mu_mean, 1e-12);
  for (double v : pooled.theta_var) EXPECT_GE(v, 0);

  // mu is unidentified here, so a single mu point stands in for the flat prior.
  const auto none = fit_grid(HierNormalModel::uniform(y, 1.0, {0.0}, {1e12}));
  for (std::size_t i = 0; i < y.size(); ++i) EXPECT_NEAR(none.theta_mean[i], y[i], 1e-9);
}

TEST(Hierarchy, ShrinkageBetweenDataAndGrandMean) {
  const auto m = eight_units();
  const auto fit = fit_grid(m);
  const double ybar = grand_mean(m.y);
  for (std::size_t i = 0; i < m.y.size(); ++i) {
    const double lo = std::min(m.y[i], ybar), hi = std::max(m.y[i], ybar);
    EXPECT_GT(fit.theta_mean[i], lo) << i;
    EXPECT_LT(fit.theta_mean[i], hi) << i;
  }

  RandomStream rs(31);
  for (int k = 0; k < 10; ++k) {
    const auto y = synthetic(rs, 8, draw(rs, -3, 3), draw(rs, 0.2, 3), 1.0);
    const double yb = grand_mean(y);
    const auto f = fit_grid(HierNormalModel::uniform(y, 1.0, linspace(yb - 12, yb + 12, 121), geomspace(1e-3, 1e3, 150)));
    for (std::size_t i = 0; i < y.size(); ++i) {
      EXPECT_GT(f.theta_mean[i], std::min(y[i], yb)) << k << " " << i;
      EXPECT_LT(f.theta_mean[i], std::max(y[i], yb)) << k << " " << i;
    }
  }
}

TEST(Hierarchy, NoisierDataShrinksMore) {
  auto m = eight_units();
  const double ybar = grand_mean(m.y);
  std::vector<double> prev(m.y.size(), INFINITY);
  for (double s2 : {0.25, 0.5, 1.0, 2.0, 4.0}) {
    m.sigma2 = s2;
    const auto fit = fit_grid(m);
    for (std::size_t i = 0; i < m.y.size(); ++i) {
      const double d = std::fabs(fit.theta_mean[i] - ybar);
      EXPECT_LT(d, prev[i]) << s2 << " " << i;
      prev[i] = d;
    }
  }
}

TEST(Hierarchy, AnalyticMatchesQuadrature) {
  const auto m = eight_units();
  for (double mu : {-2.0, 0.0, 1.3, 5.0}) {
    for (double t2 : {0.01, 0.5, 3.0, 19.0}) {
      const double a = hier_log_likelihood(m, mu, t2, MarginalRoute::Analytic);
      const double q = hier_log_likelihood(m, mu, t2, MarginalRoute::Quadrature);
      EXPECT_NEAR(std::exp(q - a) - 1, 0, 1e-10) << mu << " " << t2;
      double direct = 0;
      for (double y : m.y) direct += normal_logpdf(y, mu, t2 + m.sigma2);
      EXPECT_NEAR(a, direct, 1e-12 * std::fabs(direct));
    }
  }
}

TEST(Hierarchy, GridCoverage) {
  const auto bad = HierNormalModel::uniform({10, 11, 12}, 1.0, linspace(-3, 3, 61), linspace(0.1, 5, 50));
  EXPECT_THROW(fit_grid(bad), GridCoverageError);
  const auto narrow_tau = HierNormalModel::uniform({-20, 0, 20}, 1.0, linspace(-40, 40, 161), linspace(0.1, 2, 20));
  EXPECT_THROW(fit_grid(narrow_tau), GridCoverageError);
  EXPECT_THROW(fit_grid(HierNormalModel::uniform({1.0}, 1.0, linspace(-3, 3, 61), {1.0})), DomainError);
  EXPECT_THROW(fit_grid(HierNormalModel::uniform({1.0, 2.0}, 0.0, linspace(-3, 3, 61), {1.0})), DomainError);
  EXPECT_THROW(fit_grid(HierNormalModel::uniform({1.0, 2.0}, 1.0, linspace(-3, 3, 61), {-1.0})), DomainError);
}

TEST(Hierarchy, KlStageOrderingMatchesFormula) {
  const auto m = eight_units();
  const auto fit = fit_grid(m);
  const auto r = kl_stage_ordering(m);
  double kl_h = 0, extra = 0;
  for (std::size_t a = 0; a < m.mu_grid.size(); ++a) {
    for (std::size_t t = 0; t < m.tau2_grid.size(); ++t) {
      const std::size_t k = a * m.tau2_grid.size() + t;
      const double p = fit.hyper_posterior[k];
      if (p > 0) kl_h += p * std::log(p / m.prior_mass(a, t));
      const double t2 = m.tau2_grid[t], w = t2 / (t2 + m.sigma2);
      for (double y : m.y) extra += p * kl_normal(w * y + (1 - w) * m.mu_grid[a], w * m.sigma2, m.mu_grid[a], t2);
    }
  }
  EXPECT_NEAR(r.kl_hyper, kl_h, 1e-10);
  EXPECT_NEAR(r.kl_theta, kl_h + extra, 1e-9);
  EXPECT_TRUE(r.holds);
}

TEST(Hierarchy, KlStageOrderingSuite) {
  for (std::uint64_t seed = 1000; seed < 1020; ++seed) {
    RandomStream rs(seed);
    const std::size_t n = 6 + rs.next_u64() % 10;
    const double s2 = draw(rs, 0.3, 3);
    const auto y = synthetic(rs, n, draw(rs, -5, 5), draw(rs, 0.1, 4), s2);
    const double yb = grand_mean(y);
    const auto m = HierNormalModel::uniform(y, s2, linspace(yb - 15, yb + 15, 121), geomspace(1e-3, 1e3, 150));
    const auto r = kl_stage_ordering(m);
    EXPECT_TRUE(r.holds) << seed;
    EXPECT_LT(r.kl_hyper, r.kl_theta) << seed;
    EXPECT_GE(r.kl_hyper, 0) << seed;
  }
}

TEST(Hierarchy, KlStageOrderingExamples) {
  RandomStream rs(50);
  const auto y = synthetic(rs, 50, 1.0, 0.05, 1.0);
  const auto strong = kl_stage_ordering(HierNormalModel::uniform(y, 1.0, linspace(-4, 6, 201), linspace(0.001, 3, 120)));
  EXPECT_GT(strong.kl_theta - strong.kl_hyper, 0.1);

  // The hyperposterior stays at the prior, so the prior itself must keep the grid edges light.
  auto vague = HierNormalModel::uniform({0.3, -0.2, 0.5}, 1e8, {0.0}, linspace(0.1, 3, 30));
  double z = 0;
  for (double t2 : vague.tau2_grid) z += std::exp(-(t2 - 1.55) * (t2 - 1.55) / 0.32);
  for (double t2 : vague.tau2_grid) vague.hyper_prior.push_back(std::exp(-(t2 - 1.55) * (t2 - 1.55) / 0.32) / z);
  const auto flat = kl_stage_ordering(vague);
  EXPECT_LT(flat.kl_hyper, 1e-6);
  EXPECT_LT(flat.kl_theta, 1e-3);
  EXPECT_LE(flat.kl_hyper, flat.kl_theta);

  const auto point = kl_stage_ordering(HierNormalModel::uniform({0.3, -0.2, 1.5}, 1.0, {0.0}, {1.0}));
  EXPECT_EQ(point.kl_hyper, 0.0);
  EXPECT_GT(point.kl_theta, 0.0);
  EXPECT_TRUE(point.holds);
}

TEST(Hierarchy, EmpiricalBayes) {
  const std::vector<double> y{0.1, 0.7, -1.3, 2.2, 0.4, 3.3};
  const auto eb = empirical_bayes(y, 0.5);
  EXPECT_EQ(eb.mu_hat, grand_mean(y));
  EXPECT_NEAR(eb.mu_hat, 5.4 / 6, 1e-15);
  double s2 = 0;
  for (double v : y) s2 += (v - eb.mu_hat) * (v - eb.mu_hat);
  s2 /= y.size();
  EXPECT_NEAR(eb.tau2_hat, s2 - 0.5, 1e-14);
  EXPECT_FALSE(eb.truncated);
  const double w = eb.tau2_hat / (eb.tau2_hat + 0.5);
  EXPECT_NEAR(eb.shrinkage_weight, w, 1e-15);
  for (std::size_t i = 0; i < y.size(); ++i) EXPECT_NEAR(eb.estimates[i], w * y[i] + (1 - w) * eb.mu_hat, 1e-14);

  // (mu_hat, tau2_hat) maximises the analytic marginal likelihood.
  const auto m = HierNormalModel::uniform(y, 0.5, {0.0}, {1.0});
  const double best = hier_log_likelihood(m, eb.mu_hat, eb.tau2_hat);
  for (double dm : {-0.05, 0.0, 0.05}) {
    for (double dt : {-0.05, 0.0, 0.05}) {
      EXPECT_LE(hier_log_likelihood(m, eb.mu_hat + dm, eb.tau2_hat + dt), best + 1e-12);
    }
  }

  const auto same = empirical_bayes({2.5, 2.5, 2.5, 2.5}, 1.0);
  EXPECT_EQ(same.tau2_hat, 0.0);
  EXPECT_TRUE(same.truncated);
  for (double e : same.estimates) EXPECT_EQ(e, 2.5);

  const auto spread = empirical_bayes({-1e4, 3e3, 1e4, 7.5e3}, 1.0);
  EXPECT_GT(spread.shrinkage_weight, 1 - 1e-7);
  EXPECT_NEAR(spread.estimates[0], -1e4, 1e-2);

  EXPECT_THROW(empirical_bayes({1.0, 2.0}, 1.0), DomainError);
  EXPECT_THROW(empirical_bayes({1.0, 2.0, 3.0}, 0.0), DomainError);
}

TEST(Hierarchy, EmpiricalBayesBeatsRaw) {
  RandomStream rs(20240101);
  const auto r = eb_risk_comparison(8, 1.0, 1.0, 10000, rs);
  EXPECT_EQ(r.reps, 10000u);
  EXPECT_GT(r.gap, 3 * r.gap_stderr);
  EXPECT_NEAR(r.sse_raw, 8.0, 0.2);
  EXPECT_LT(r.sse_eb, r.sse_raw);
  EXPECT_NEAR(r.gap, r.sse_raw - r.sse_eb, 1e-9);

  RandomStream a(77), b(77);
  EXPECT_EQ(eb_risk_comparison(5, 2, 1, 2000, a).gap, eb_risk_comparison(5, 2, 1, 2000, b).gap);
}
