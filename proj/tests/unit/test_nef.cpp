#include "bk/conjugate.hpp"
#include "bk/errors.hpp"
#include "bk/nef.hpp"

#include "../support/oracles.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <vector>

using namespace bk;

namespace {

// E[grad_psi(theta)] under exp(log_kernel) by Simpson on a wide natural-parameter window.
double simpson_mean_map(const NefModel& m, double lo, double hi) {
  const auto& f = m.family();
  double peak = -INFINITY;
  for (double t = lo; t <= hi; t += (hi - lo) / 1000) peak = std::max(peak, m.log_kernel(t));
  auto k = [&](double t) { return std::exp(m.log_kernel(t) - peak); };
  const double z = oracle::simpson(k, lo, hi, 200000);
  const double num = oracle::simpson([&](double t) { return f.grad_psi(t) * k(t); }, lo, hi, 200000);
  return num / z;
}

} // namespace

TEST(Nef, PoissonLocationArithmetic) {
  const NefModel prior(NefFamily::poisson(), 2, 3);
  const std::vector<double> ys{5, 5, 4, 6, 5, 3, 7, 5};
  const auto post = dy_update(prior, ys);
  EXPECT_EQ(post.observations(), 8);
  EXPECT_DOUBLE_EQ(post.precision(), 10);
  EXPECT_DOUBLE_EQ(dy_posterior_mean_map(post), 4.6);
  EXPECT_NEAR(dy_mean_map_quadrature(post), 4.6, 4.6e-6);
}

TEST(Nef, EmptyUpdateLeavesModel) {
  const NefModel prior(NefFamily::bernoulli(), 3, 0.25);
  const auto post = dy_update(prior, std::vector<double>{});
  EXPECT_EQ(post.observations(), 0);
  EXPECT_EQ(post.precision(), prior.precision());
  EXPECT_EQ(post.location(), prior.location());
}

TEST(Nef, LargeSampleWeightGoesToData) {
  const NefModel prior(NefFamily::poisson(), 2, 3);
  std::vector<double> ys(100000, 5.0);
  const auto post = dy_update(prior, ys);
  EXPECT_NEAR(post.location(), 5.0, 1e-4);
  EXPECT_GT(post.location(), dy_update(prior, std::vector<double>(100, 5.0)).location());
}

TEST(Nef, PoissonQuadratureExample) {
  const auto post = dy_update(NefModel(NefFamily::poisson(), 1, 2), std::vector<double>{1, 0, 2});
  EXPECT_DOUBLE_EQ(dy_posterior_mean_map(post), 1.25);
  EXPECT_NEAR(dy_mean_map_quadrature(post) / 1.25 - 1, 0, 1e-6);
  EXPECT_NEAR(simpson_mean_map(post, -30, 8) / 1.25 - 1, 0, 1e-6);
}

TEST(Nef, LinearityGridBernoulli) {
  const std::vector<double> data{1, 0, 1, 1, 0};
  for (double n0 : {1.0, 2.0, 4.0, 8.0, 16.0}) {
    for (double x0 : {0.1, 0.3, 0.5, 0.7, 0.9}) {
      const auto post = dy_update(NefModel(NefFamily::bernoulli(), n0, x0), data);
      const double exact = dy_posterior_mean_map(post);
      EXPECT_NEAR(exact, (n0 * x0 + 3) / (n0 + 5), 1e-15);
      EXPECT_NEAR(dy_mean_map_quadrature(post) / exact - 1, 0, 1e-6) << n0 << " " << x0;
      EXPECT_NEAR(simpson_mean_map(post, -60, 60) / exact - 1, 0, 1e-6) << n0 << " " << x0;
    }
  }
}

TEST(Nef, LinearityGridPoisson) {
  const std::vector<double> data{0, 3, 1, 4};
  for (double n0 : {1.0, 2.0, 4.0, 8.0, 16.0}) {
    for (double x0 : {0.5, 1.0, 2.0, 4.0, 8.0}) {
      const auto post = dy_update(NefModel(NefFamily::poisson(), n0, x0), data);
      const double exact = dy_posterior_mean_map(post);
      EXPECT_NEAR(exact, (n0 * x0 + 8) / (n0 + 4), 1e-14);
      EXPECT_NEAR(dy_mean_map_quadrature(post) / exact - 1, 0, 1e-6) << n0 << " " << x0;
      EXPECT_NEAR(simpson_mean_map(post, -40, 6) / exact - 1, 0, 1e-6) << n0 << " " << x0;
    }
  }
}

TEST(Nef, BernoulliMapsToBeta) {
  for (double n0 : {2.0, 5.0}) {
    for (double x0 : {0.2, 0.5, 0.8}) {
      const NefModel prior(NefFamily::bernoulli(), n0, x0);
      // Normalised DY density in theta against Beta(n0 x0, n0 (1 - x0)) pushed through the logit.
      const double lo = -50, hi = 50;
      const double z = oracle::simpson([&](double t) { return std::exp(prior.log_kernel(t)); }, lo, hi, 200000);
      for (double t : {-3.0, -0.5, 0.0, 1.2, 4.0}) {
        const double p = 1 / (1 + std::exp(-t));
        const double beta_side = oracle::beta_pdf(n0 * x0, n0 * (1 - x0), p) * p * (1 - p);
        EXPECT_NEAR(std::exp(prior.log_kernel(t)) / z, beta_side, 1e-8 * beta_side + 1e-14);
      }

      const std::vector<double> data{1, 1, 0, 1, 0, 0, 1};
      const auto post = dy_update(prior, data);
      const auto bb = ConjugateModel::beta_binomial(n0 * x0, n0 * (1 - x0)).update(summarize_bernoulli(data));
      const auto h = bb.hyperparameters();
      EXPECT_NEAR(post.precision() * post.location(), h[0], 1e-13);
      EXPECT_NEAR(post.precision() * (1 - post.location()), h[1], 1e-13);
      EXPECT_NEAR(post.location(), bb.distribution().mean(), 1e-15);
    }
  }
}

TEST(Nef, NormalUnitIsConjugateNormal) {
  const auto post = dy_update(NefModel(NefFamily::normal_unit(), 2, 1.5), std::vector<double>{0.4, 2.2, 1.0});
  EXPECT_NEAR(post.location(), (3.0 + 3.6) / 5.0, 1e-15);
  EXPECT_NEAR(dy_mean_map_quadrature(post) / post.location() - 1, 0, 1e-6);
}

TEST(Nef, Validation) {
  EXPECT_THROW(NefModel(NefFamily::bernoulli(), 0, 0.5), DomainError);
  EXPECT_THROW(NefModel(NefFamily::bernoulli(), 1, 1.0), DomainError);
  EXPECT_THROW(NefModel(NefFamily::poisson(), 1, -0.5), DomainError);
  const NefModel b(NefFamily::bernoulli(), 1, 0.5);
  EXPECT_THROW(dy_update(b, std::vector<double>{2}), DataMismatch);
  const NefModel p(NefFamily::poisson(), 1, 1);
  EXPECT_THROW(dy_update(p, std::vector<double>{1.5}), DataMismatch);
  EXPECT_THROW(dy_update(p, std::vector<double>{-1}), DataMismatch);
}
