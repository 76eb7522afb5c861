#include "bk/conjugate.hpp"
#include "bk/errors.hpp"
#include "bk/random.hpp"

#include "../support/oracles.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <vector>

using namespace bk;

namespace {

constexpr int kInstances = 500;
constexpr std::size_t kGrid = 2001;

// Largest pointwise gap between the library density and the grid posterior, relative to the
// grid posterior's peak.
double scaled_gap(const std::vector<double>& lib, const std::vector<double>& ref, std::size_t from = 0) {
  double top = 0.0, gap = 0.0;
  for (std::size_t i = from; i < ref.size(); ++i) {
    top = std::max(top, ref[i]);
    gap = std::max(gap, std::fabs(lib[i] - ref[i]));
  }
  return gap / top;
}

double draw(RandomStream& rs, double lo, double hi) { return lo + (hi - lo) * rs.uniform(); }

} // namespace

TEST(Conjugate, SpecUpdates) {
  auto bb = ConjugateModel::beta_binomial(1, 1).update(BinomialData{12, 3});
  EXPECT_EQ(bb.distribution(), Distribution::beta(4, 10));

  auto nk = ConjugateModel::normal_known_var(0, 1).update(NormalData::from_mean(1, 2.0));
  EXPECT_DOUBLE_EQ(nk.distribution().mean(), 1.0);
  EXPECT_DOUBLE_EQ(nk.distribution().variance(), 0.5);

  auto pu = ConjugateModel::pareto_uniform(2, 1).update(UniformData{5, 3.0});
  EXPECT_EQ(pu.distribution(), Distribution::pareto(7, 3));

  auto gp = ConjugateModel::gamma_poisson(2, 1).update(PoissonData{4, 9});
  EXPECT_EQ(gp.distribution(), Distribution::gamma(11, 5));
}

TEST(Conjugate, BetaBinomialMatchesGridBayes) {
  // The grid lives on u = logit(theta), where the posterior is smooth with exponential tails.
  RandomStream rs(101);
  double worst = 0.0;
  for (int k = 0; k < kInstances; ++k) {
    const double a = draw(rs, 1.0, 20.0), b = draw(rs, 1.0, 20.0);
    const auto n = static_cast<std::int64_t>(draw(rs, 0.0, 201.0));
    const auto y = static_cast<std::int64_t>(draw(rs, 0.0, static_cast<double>(n) + 1.0));
    const auto post = ConjugateModel::beta_binomial(a, b).update(BinomialData{n, y}).distribution();
    const double pa = a + static_cast<double>(y), pb = b + static_cast<double>(n - y);
    const double c = std::log(pa / pb), sd = std::sqrt(1 / pa + 1 / pb);
    const auto u = oracle::grid(c - 40 / pa - 10 * sd, c + 40 / pb + 10 * sd, kGrid);
    auto log_t = [](double s) { return -std::log1p(std::exp(-s)); };
    auto log_1mt = [](double s) { return -std::log1p(std::exp(s)); };
    const auto ref_u = oracle::grid_posterior_density(
        // prior in u includes the Jacobian t (1 - t)
        [&](double s) { return a * log_t(s) + b * log_1mt(s); },
        [&](double s) { return static_cast<double>(y) * log_t(s) + static_cast<double>(n - y) * log_1mt(s); },
        u);
    std::vector<double> lib(u.size()), ref(u.size());
    for (std::size_t i = 0; i < u.size(); ++i) {
      const double t = std::exp(log_t(u[i]));
      ref[i] = ref_u[i] / std::exp(log_t(u[i]) + log_1mt(u[i]));
      lib[i] = post.pdf(t);
    }
    worst = std::max(worst, scaled_gap(lib, ref));
  }
  EXPECT_LT(worst, 1e-9);
}

TEST(Conjugate, GammaPoissonMatchesGridBayes) {
  // The grid lives on u = log(theta).
  RandomStream rs(102);
  double worst = 0.0;
  for (int k = 0; k < kInstances; ++k) {
    const double a = draw(rs, 1.0, 20.0), b = draw(rs, 0.1, 5.0);
    const auto n = static_cast<std::int64_t>(draw(rs, 0.0, 101.0));
    const double rate = draw(rs, 0.1, 10.0);
    std::vector<double> ys;
    for (std::int64_t i = 0; i < n; ++i) ys.push_back(Distribution::poisson(rate).sample(rs, 1)[0]);
    const auto data = summarize_counts(ys);
    const auto post = ConjugateModel::gamma_poisson(a, b).update(data).distribution();
    const double pa = a + static_cast<double>(data.total), pb = b + static_cast<double>(n);
    const double c = std::log(pa / pb), sd = 1 / std::sqrt(pa);
    const auto u = oracle::grid(c - 40 / pa - 10 * sd, c + 10 * sd + 4, kGrid);
    const auto ref_u = oracle::grid_posterior_density(
        [&](double s) { return a * s - b * std::exp(s); },
        [&](double s) { return static_cast<double>(data.total) * s - static_cast<double>(n) * std::exp(s); }, u);
    std::vector<double> lib(u.size()), ref(u.size());
    for (std::size_t i = 0; i < u.size(); ++i) {
      const double t = std::exp(u[i]);
      ref[i] = ref_u[i] / t;
      lib[i] = post.pdf(t);
    }
    worst = std::max(worst, scaled_gap(lib, ref));
  }
  EXPECT_LT(worst, 1e-9);
}

TEST(Conjugate, NormalKnownVarMatchesGridBayes) {
  RandomStream rs(103);
  double worst = 0.0;
  for (int k = 0; k < kInstances; ++k) {
    const double mu = draw(rs, -5, 5), tau2 = draw(rs, 0.1, 10), sigma2 = draw(rs, 0.2, 4);
    const auto n = static_cast<std::int64_t>(draw(rs, 0.0, 101.0));
    const double truth = draw(rs, -5, 5);
    std::vector<double> ys;
    for (std::int64_t i = 0; i < n; ++i) ys.push_back(truth + std::sqrt(sigma2) * rs.normal());
    const auto data = summarize_normal(ys);
    const auto post = ConjugateModel::normal_known_var(mu, tau2, sigma2).update(data).distribution();
    const double nn = static_cast<double>(n);
    const double prec = 1 / tau2 + nn / sigma2;
    const double m = (mu / tau2 + data.sum / sigma2) / prec, sd = std::sqrt(1 / prec);
    const auto x = oracle::grid(m - 12 * sd, m + 12 * sd, kGrid);
    const auto ref = oracle::grid_posterior_density(
        [&](double t) { return -0.5 * (t - mu) * (t - mu) / tau2; },
        [&](double t) {
          double s = 0;
          for (double v : ys) s -= 0.5 * (v - t) * (v - t) / sigma2;
          return s;
        },
        x);
    std::vector<double> lib(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) lib[i] = post.pdf(x[i]);
    worst = std::max(worst, scaled_gap(lib, ref));
  }
  EXPECT_LT(worst, 1e-9);
}

TEST(Conjugate, ParetoUniformMatchesGridBayes) {
  // The grid lives on u = log(theta), where the posterior has an exponential tail.
  RandomStream rs(104);
  double worst = 0.0;
  for (int k = 0; k < kInstances; ++k) {
    const double a = draw(rs, 0.5, 10), b = draw(rs, 0.5, 3);
    const auto n = static_cast<std::int64_t>(draw(rs, 0.0, 51.0));
    const double width = draw(rs, 0.5, 6);
    std::vector<double> ys;
    for (std::int64_t i = 0; i < n; ++i) ys.push_back(draw(rs, 0.0, width));
    const auto data = summarize_uniform(ys);
    const auto post = ConjugateModel::pareto_uniform(a, b).update(data).distribution();
    double lower = b;
    for (double v : ys) lower = std::max(lower, v);
    const double shape = a + static_cast<double>(n);
    const auto u = oracle::grid(std::log(lower), std::log(lower) + 40 / shape, kGrid);
    const auto ref_u = oracle::grid_posterior_density(
        [&](double s) { return -(a + 1) * s + s; }, // prior in u includes the Jacobian e^u
        [&](double s) { return -static_cast<double>(n) * s; }, u);
    std::vector<double> lib(u.size()), ref(u.size());
    for (std::size_t i = 0; i < u.size(); ++i) {
      const double t = std::exp(u[i]);
      ref[i] = ref_u[i] / t;
      lib[i] = post.pdf(t);
    }
    worst = std::max(worst, scaled_gap(lib, ref, 1));
  }
  EXPECT_LT(worst, 1e-9);
}

TEST(Conjugate, BatchEqualsSequential) {
  RandomStream rs(7);
  for (int k = 0; k < 200; ++k) {
    std::vector<double> y1, y2;
    const int n1 = static_cast<int>(draw(rs, 0, 30)), n2 = static_cast<int>(draw(rs, 0, 30));
    for (int i = 0; i < n1; ++i) y1.push_back(rs.normal() * 2 + 1);
    for (int i = 0; i < n2; ++i) y2.push_back(rs.normal() * 2 + 1);
    const auto nk = ConjugateModel::normal_known_var(0.3, 2.0, 1.5);
    const auto d1 = summarize_normal(y1), d2 = summarize_normal(y2);
    EXPECT_EQ(nk.update(d1).update(d2), nk.update(combine(d1, d2)));
    EXPECT_EQ(nk.update(d1).update(d2).distribution(), nk.update(combine(d1, d2)).distribution());

    const BinomialData b1{n1, n1 / 3}, b2{n2, n2 / 2};
    const auto bb = ConjugateModel::beta_binomial(0.7, 2.5);
    EXPECT_EQ(bb.update(b1).update(b2), bb.update(combine(b1, b2)));

    const PoissonData p1{n1, 3 * n1}, p2{n2, n2};
    const auto gp = ConjugateModel::gamma_poisson(1.5, 0.5);
    EXPECT_EQ(gp.update(p1).update(p2), gp.update(combine(p1, p2)));

    std::vector<double> u1, u2;
    for (int i = 0; i < n1; ++i) u1.push_back(draw(rs, 0.01, 4));
    for (int i = 0; i < n2; ++i) u2.push_back(draw(rs, 0.01, 4));
    const auto pu = ConjugateModel::pareto_uniform(1.2, 0.8);
    const auto ud1 = summarize_uniform(u1), ud2 = summarize_uniform(u2);
    EXPECT_EQ(pu.update(ud1).update(ud2), pu.update(combine(ud1, ud2)));
  }
}

TEST(Conjugate, UpdateOrderInvariant) {
  const auto bb = ConjugateModel::beta_binomial(2, 3);
  const BinomialData d1{10, 4}, d2{7, 7};
  EXPECT_EQ(bb.update(d1).update(d2), bb.update(d2).update(d1));
}

TEST(Conjugate, DataValidation) {
  const auto bb = ConjugateModel::beta_binomial(1, 1);
  EXPECT_THROW(bb.update(BinomialData{3, 4}), DataMismatch);
  EXPECT_THROW(bb.update(PoissonData{3, 4}), DataMismatch);
  EXPECT_THROW(ConjugateModel::pareto_uniform(1, 1).update(UniformData{2, -1.0}), DataMismatch);
  const std::vector<double> neg{1.0, -2.0};
  EXPECT_THROW(summarize_uniform(neg), DataMismatch);
  EXPECT_THROW(summarize_counts(std::vector<double>{1.5}), DataMismatch);
  EXPECT_THROW(summarize_bernoulli(std::vector<double>{0.5}), DataMismatch);
  EXPECT_THROW(ConjugateModel::beta_binomial(0, 1), DomainError);
  EXPECT_THROW(ConjugateModel::gamma_poisson(1, -1), DomainError);
  EXPECT_THROW(ConjugateModel::normal_known_var(0, 0), DomainError);
  EXPECT_THROW(ConjugateModel::pareto_uniform(1, 0), DomainError);
}

TEST(Conjugate, PredictiveNormal) {
  const auto post = ConjugateModel::normal_known_var(0, 1).update(NormalData::from_mean(1, 2.0));
  const auto pred = posterior_predictive_normal(post);
  EXPECT_DOUBLE_EQ(pred.mean(), 1.0);
  EXPECT_DOUBLE_EQ(pred.variance(), 1.5);

  const auto prior_pred = posterior_predictive_normal(ConjugateModel::normal_known_var(0.4, 2.5));
  EXPECT_DOUBLE_EQ(prior_pred.mean(), 0.4);
  EXPECT_DOUBLE_EQ(prior_pred.variance(), 3.5);

  const auto big = ConjugateModel::normal_known_var(0, 1).update(NormalData::from_mean(1000000, 0.1));
  EXPECT_NEAR(posterior_predictive_normal(big).variance(), 1.0, 2e-6);

  EXPECT_THROW(posterior_predictive_normal(ConjugateModel::beta_binomial(1, 1)), UnsupportedOperation);
}

TEST(Conjugate, LinearBayes) {
  const double a = 2.5, b = 4, n = 30, y = 11;
  auto lb = linear_bayes_decomposition(ConjugateModel::beta_binomial(a, b), BinomialData{30, 11});
  EXPECT_NEAR(lb.prior_weight, (a + b) / (a + b + n), 1e-15);
  EXPECT_NEAR(lb.data_weight, n / (a + b + n), 1e-15);
  EXPECT_NEAR(lb.prior_weight + lb.data_weight, 1.0, 1e-15);
  ASSERT_TRUE(lb.mle.has_value());
  EXPECT_DOUBLE_EQ(*lb.mle, y / n);
  EXPECT_NEAR(lb.posterior_mean, (a + y) / (a + b + n), 1e-15);
  EXPECT_NEAR(lb.prior_weight * lb.prior_mean + lb.data_weight * *lb.mle, lb.posterior_mean, 1e-15);

  auto gp = linear_bayes_decomposition(ConjugateModel::gamma_poisson(3, 2), PoissonData{8, 20});
  EXPECT_NEAR(gp.prior_weight, 2.0 / 10.0, 1e-15);
  EXPECT_NEAR(gp.posterior_mean, 23.0 / 10.0, 1e-15);
  EXPECT_NEAR(gp.prior_weight * gp.prior_mean + gp.data_weight * *gp.mle, gp.posterior_mean, 1e-15);

  auto nk = linear_bayes_decomposition(ConjugateModel::normal_known_var(1, 0.5), NormalData::from_mean(4, 3.0));
  const double post_mean = ConjugateModel::normal_known_var(1, 0.5).update(NormalData::from_mean(4, 3.0)).distribution().mean();
  EXPECT_NEAR(nk.posterior_mean, post_mean, 1e-15 * std::fabs(post_mean));
  EXPECT_NEAR(nk.prior_weight, 2.0 / 6.0, 1e-15);

  auto none = linear_bayes_decomposition(ConjugateModel::beta_binomial(2, 3), BinomialData{0, 0});
  EXPECT_EQ(none.prior_weight, 1.0);
  EXPECT_FALSE(none.mle.has_value());
  EXPECT_DOUBLE_EQ(none.posterior_mean, 0.4);

  EXPECT_THROW(linear_bayes_decomposition(ConjugateModel::pareto_uniform(1, 1), UniformData{1, 2.0}),
               UnsupportedOperation);
}

TEST(Conjugate, MarginalLikelihoodIdentities) {
  const auto flat = ConjugateModel::beta_binomial(1, 1);
  EXPECT_NEAR(flat.log_marginal_likelihood(BinomialData{1, 1}), std::log(0.5), 1e-15);
  for (std::int64_t n : {1, 5, 17, 400, 98451}) {
    for (std::int64_t y : {std::int64_t{0}, n / 3, n / 2, n}) {
      EXPECT_NEAR(flat.log_marginal_likelihood(BinomialData{n, y}), -std::log(static_cast<double>(n) + 1),
                  1e-9 * std::log(static_cast<double>(n) + 1))
          << n << " " << y;
    }
  }
  EXPECT_NEAR(std::exp(flat.log_marginal_likelihood(BinomialData{98451, 49581})), 1.0157e-5, 1e-9);
  EXPECT_THROW(ConjugateModel::normal_flat().log_marginal_likelihood(NormalData::from_mean(2, 1.0)),
               ImproperPrior);
}

TEST(Conjugate, MarginalLikelihoodMatchesQuadrature) {
  const std::size_t pts = 20001;
  auto integrate = [&](double lo, double hi, const std::function<double(double)>& f) {
    const auto x = oracle::grid(lo, hi, pts);
    std::vector<double> v(pts);
    for (std::size_t i = 0; i < pts; ++i) v[i] = f(x[i]);
    return oracle::uniform_grid_integral(x, v);
  };

  {
    const double a = 2, b = 3;
    const int n = 20, y = 7;
    const double ref = integrate(0, 1, [&](double t) {
      return std::exp(oracle::lgamma(n + 1) - oracle::lgamma(y + 1) - oracle::lgamma(n - y + 1) + y * std::log(t) +
                      (n - y) * std::log1p(-t)) *
             oracle::beta_pdf(a, b, t);
    });
    const double got = std::exp(ConjugateModel::beta_binomial(a, b).log_marginal_likelihood(BinomialData{n, y}));
    EXPECT_NEAR(got / ref - 1, 0, 1e-8);
  }
  {
    const double a = 2, b = 1;
    const int n = 5, total = 12;
    const double ref = integrate(0, 30, [&](double t) {
      const double m = n * t;
      return std::exp(total * std::log(m) - m - oracle::lgamma(total + 1)) * oracle::gamma_pdf(a, b, t);
    });
    const double got = std::exp(ConjugateModel::gamma_poisson(a, b).log_marginal_likelihood(PoissonData{n, total}));
    EXPECT_NEAR(got / ref - 1, 0, 1e-8);
  }
  {
    const std::vector<double> ys{0.3, 1.7, -0.4, 2.2, 0.9};
    const double mu = 0.5, tau2 = 2.0, sigma2 = 1.3;
    const double ref = integrate(-15, 15, [&](double t) {
      double l = -0.5 * (t - mu) * (t - mu) / tau2 - 0.5 * std::log(2 * M_PI * tau2);
      for (double v : ys) l += -0.5 * (v - t) * (v - t) / sigma2 - 0.5 * std::log(2 * M_PI * sigma2);
      return std::exp(l);
    });
    const double got =
        std::exp(ConjugateModel::normal_known_var(mu, tau2, sigma2).log_marginal_likelihood(summarize_normal(ys)));
    EXPECT_NEAR(got / ref - 1, 0, 1e-8);
  }
  {
    // Pareto(3, 1) prior, five uniform draws with maximum 2.5; integrate in log theta.
    const double a = 3, b = 1, m = 2.5;
    const int n = 5;
    const double ref = integrate(std::log(m), std::log(m) + 40.0 / (a + n), [&](double u) {
      const double t = std::exp(u);
      return a * std::pow(b, a) * std::pow(t, -(a + 1)) * std::pow(t, -n) * t;
    });
    const double got = std::exp(ConjugateModel::pareto_uniform(a, b).log_marginal_likelihood(UniformData{n, m}));
    EXPECT_NEAR(got / ref - 1, 0, 1e-8);
  }
}

TEST(Conjugate, MixtureWeights) {
  MixturePrior prior({ConjugateModel::beta_binomial(1, 1), ConjugateModel::beta_binomial(3, 1)}, {0.5, 0.5});
  const auto post = update_mixture(prior, BinomialData{1, 1});
  EXPECT_NEAR(post.weights()[0], 0.4, 1e-12);
  EXPECT_NEAR(post.weights()[1], 0.6, 1e-12);
  EXPECT_EQ(post.components()[1].distribution(), Distribution::beta(4, 1));

  MixturePrior twin({ConjugateModel::beta_binomial(1, 1), ConjugateModel::beta_binomial(1, 1)}, {0.5, 0.5});
  for (std::int64_t y : {0, 3, 9}) {
    const auto p = update_mixture(twin, BinomialData{9, y});
    EXPECT_EQ(p.weights()[0], p.weights()[1]);
  }

  RandomStream rs(5);
  for (int k = 0; k < 200; ++k) {
    std::vector<ConjugateModel> comps;
    std::vector<double> w;
    const int m = 1 + static_cast<int>(draw(rs, 0, 5));
    double tot = 0;
    for (int j = 0; j < m; ++j) {
      comps.push_back(ConjugateModel::gamma_poisson(draw(rs, 0.5, 30), draw(rs, 0.1, 5)));
      w.push_back(draw(rs, 0.1, 1));
      tot += w.back();
    }
    for (auto& v : w) v /= tot;
    w.back() = 1.0;
    for (int j = 0; j + 1 < m; ++j) w.back() -= w[static_cast<std::size_t>(j)];
    const auto p = update_mixture(MixturePrior(comps, w), PoissonData{1 + static_cast<std::int64_t>(draw(rs, 0, 50)), 40});
    double s = 0;
    for (double v : p.weights()) {
      EXPECT_GT(v, 0.0);
      s += v;
    }
    EXPECT_NEAR(s, 1.0, 1e-12);
  }

  EXPECT_THROW(MixturePrior({ConjugateModel::beta_binomial(1, 1)}, {0.9}), DomainError);
  EXPECT_THROW(MixturePrior({ConjugateModel::beta_binomial(1, 1), ConjugateModel::gamma_poisson(1, 1)}, {0.5, 0.5}),
               DomainError);
}

TEST(Conjugate, MixtureMatchesGridBayes) {
  MixturePrior prior({ConjugateModel::beta_binomial(1, 1), ConjugateModel::beta_binomial(3, 1),
                      ConjugateModel::beta_binomial(2, 5)},
                     {0.3, 0.5, 0.2});
  const BinomialData data{4, 3};
  const auto post = update_mixture(prior, data);
  const auto x = oracle::grid(0, 1, 1001);
  const auto ref = oracle::grid_posterior_density(
      [&](double t) {
        return std::log(0.3 * oracle::beta_pdf(1, 1, t) + 0.5 * oracle::beta_pdf(3, 1, t) +
                        0.2 * oracle::beta_pdf(2, 5, t));
      },
      [&](double t) { return 3 * std::log(t) + std::log1p(-t); }, x);
  double gap = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    gap = std::max(gap, std::fabs(std::exp(post.log_pdf(x[i])) - ref[i]));
  }
  EXPECT_LT(gap, 1e-10);
}

TEST(Conjugate, LaplacePriorSpecExamples) {
  const auto lp = laplace_prior_posterior(0, 1, 4, 0.5);
  EXPECT_DOUBLE_EQ(lp.lambda1, 0.75);
  EXPECT_DOUBLE_EQ(lp.lambda2, 0.25);
  EXPECT_NEAR(lp.weight_lower + lp.weight_upper, 1.0, 1e-15);

  for (double mu : {-1e6, 1e6}) {
    const double m = laplace_prior_posterior(mu, 1, 4, 0.5).mean();
    EXPECT_GE(m, 0.25);
    EXPECT_LE(m, 0.75);
  }
  EXPECT_THROW(laplace_prior_posterior(0, 1, 0, 0.5), DomainError);
  EXPECT_THROW(laplace_prior_posterior(0, 0, 3, 0.5), DomainError);
}

TEST(Conjugate, LaplacePriorMatchesGridBayes) {
  struct Case {
    double mu, tau;
    std::int64_t n;
    double ybar;
  };
  for (const auto& c : {Case{0, 1, 4, 0.5}, Case{0.5, 1, 4, 0.5}, Case{1.3, 0.4, 9, -0.2}, Case{-0.7, 2.5, 2, 1.1},
                        Case{3, 0.2, 25, 2.9}}) {
    const auto lp = laplace_prior_posterior(c.mu, c.tau, c.n, c.ybar);
    const double nn = static_cast<double>(c.n);
    // Grid centred on mu so the kink sits on a node that starts a Richardson panel.
    const double half = 12.0 + std::fabs(c.ybar - c.mu);
    const auto x = oracle::grid(c.mu - half, c.mu + half, 5001);
    auto lprior = [&](double t) { return -std::fabs(t - c.mu) / c.tau; };
    auto llik = [&](double t) { return -0.5 * nn * (t - c.ybar) * (t - c.ybar); };
    const auto ref = oracle::grid_posterior_density(lprior, llik, x);
    double gap = 0;
    for (std::size_t i = 0; i < x.size(); ++i) gap = std::max(gap, std::fabs(lp.pdf(x[i]) - ref[i]));
    EXPECT_LT(gap, 1e-8) << c.mu << " " << c.ybar;

    // Posterior mass below mu from the left half of the grid.
    const std::vector<double> xl(x.begin(), x.begin() + 2501), fl(ref.begin(), ref.begin() + 2501);
    EXPECT_NEAR(lp.weight_lower, oracle::uniform_grid_integral(xl, fl), 1e-10);
    if (c.mu == c.ybar) {
      EXPECT_NEAR(lp.weight_lower, 0.5, 1e-10);
    }
  }
}
