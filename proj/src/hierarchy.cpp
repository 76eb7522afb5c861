#include "bk/hierarchy.hpp"

#include "bk/errors.hpp"
#include "bk/quadrature.hpp"
#include "bk/special.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace bk {

namespace {

constexpr double kEdgeMass = 1e-3;

void check_increasing(const std::vector<double>& v, const char* what) {
  if (v.empty()) throw DomainError(std::string("hierarchy: empty ") + what);
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (!std::isfinite(v[i])) throw DomainError(std::string("hierarchy: non-finite ") + what);
    if (i > 0 && !(v[i] > v[i - 1])) throw DomainError(std::string("hierarchy: unsorted ") + what);
  }
}

double normal_log_pdf(double x, double mean, double var) {
  const double z = x - mean;
  return -special::kLogSqrt2Pi - 0.5 * std::log(var) - z * z / (2.0 * var);
}

// KL(N(m1, v1) || N(m0, v0)).
double normal_kl(double m1, double v1, double m0, double v0) {
  const double d = m1 - m0;
  return 0.5 * (v1 / v0 + d * d / v0 - 1.0 + std::log(v0 / v1));
}

} // namespace

HierNormalModel HierNormalModel::uniform(std::vector<double> y, double sigma2,
                                         std::vector<double> mu_grid,
                                         std::vector<double> tau2_grid) {
  HierNormalModel m;
  m.y = std::move(y);
  m.sigma2 = sigma2;
  m.mu_grid = std::move(mu_grid);
  m.tau2_grid = std::move(tau2_grid);
  return m;
}

double HierNormalModel::prior_mass(std::size_t m, std::size_t t) const {
  if (hyper_prior.empty()) return 1.0 / static_cast<double>(grid_size());
  return hyper_prior[m * tau2_grid.size() + t];
}

void HierNormalModel::validate() const {
  if (y.size() < 2) throw DomainError("hierarchy: need at least two observations");
  for (double v : y) {
    if (!std::isfinite(v)) throw DomainError("hierarchy: non-finite observation");
  }
  if (!(sigma2 > 0.0) || !std::isfinite(sigma2)) throw DomainError("hierarchy: sigma2 > 0");
  check_increasing(mu_grid, "mu grid");
  check_increasing(tau2_grid, "tau2 grid");
  if (tau2_grid.front() < 0.0) throw DomainError("hierarchy: tau2 grid must be >= 0");
  if (!hyper_prior.empty()) {
    if (hyper_prior.size() != grid_size()) throw DomainError("hierarchy: hyperprior size");
    double s = 0.0;
    for (double w : hyper_prior) {
      if (!(w >= 0.0)) throw DomainError("hierarchy: hyperprior masses must be >= 0");
      s += w;
    }
    if (std::fabs(s - 1.0) > 1e-12) throw DomainError("hierarchy: hyperprior must sum to 1");
  }
}

double hier_log_likelihood(const HierNormalModel& model, double mu, double tau2,
                           MarginalRoute route) {
  double ll = 0.0;
  if (route == MarginalRoute::Analytic || tau2 == 0.0) {
    for (double yi : model.y) ll += normal_log_pdf(yi, mu, tau2 + model.sigma2);
    return ll;
  }
  const double sd = std::sqrt(tau2);
  for (double yi : model.y) {
    // Integrate theta against its N(mu, tau2) prior, centred on the conditional posterior.
    const double w = tau2 / (tau2 + model.sigma2);
    const double centre = w * yi + (1.0 - w) * mu;
    const double spread = std::sqrt(w * model.sigma2);
    const double shift = normal_log_pdf(yi, mu, tau2 + model.sigma2);
    auto f = [&](double theta) {
      return std::exp(normal_log_pdf(yi, theta, model.sigma2) + normal_log_pdf(theta, mu, tau2) - shift);
    };
    std::vector<double> br;
    for (double k : {-8.0, -3.0, -1.0, 0.0, 1.0, 3.0, 8.0}) br.push_back(centre + k * spread);
    const double inner = numeric::integrate(f, centre - 40.0 * std::max(spread, sd), centre + 40.0 * std::max(spread, sd), br, 1e-14).value;
    ll += shift + std::log(inner);
  }
  return ll;
}

HierFit fit_grid(const HierNormalModel& model) {
  model.validate();
  const std::size_t nm = model.mu_grid.size();
  const std::size_t nt = model.tau2_grid.size();
  std::vector<double> lw(nm * nt);
  for (std::size_t m = 0; m < nm; ++m) {
    for (std::size_t t = 0; t < nt; ++t) {
      const double p = model.prior_mass(m, t);
      lw[m * nt + t] = p > 0.0 ? std::log(p) + hier_log_likelihood(model, model.mu_grid[m], model.tau2_grid[t])
                               : -std::numeric_limits<double>::infinity();
    }
  }
  HierFit fit;
  fit.log_evidence = special::log_sum_exp(lw);
  if (!std::isfinite(fit.log_evidence)) throw DegenerateEvidence("fit_grid: no hyperprior mass with positive likelihood");
  fit.hyper_posterior.resize(lw.size());
  fit.mu_marginal.assign(nm, 0.0);
  fit.tau2_marginal.assign(nt, 0.0);
  for (std::size_t m = 0; m < nm; ++m) {
    for (std::size_t t = 0; t < nt; ++t) {
      const double p = std::exp(lw[m * nt + t] - fit.log_evidence);
      fit.hyper_posterior[m * nt + t] = p;
      fit.mu_marginal[m] += p;
      fit.tau2_marginal[t] += p;
    }
  }
  if (nm > 1 && (fit.mu_marginal.front() > kEdgeMass || fit.mu_marginal.back() > kEdgeMass)) {
    throw GridCoverageError("fit_grid: hyperposterior mass on the edge of the mu grid");
  }
  if (nt > 1 && fit.tau2_marginal.back() > kEdgeMass) {
    throw GridCoverageError("fit_grid: hyperposterior mass on the upper edge of the tau2 grid");
  }
  const std::size_t n = model.y.size();
  fit.theta_mean.assign(n, 0.0);
  std::vector<double> second(n, 0.0);
  for (std::size_t m = 0; m < nm; ++m) {
    for (std::size_t t = 0; t < nt; ++t) {
      const double p = fit.hyper_posterior[m * nt + t];
      if (p == 0.0) continue;
      const double tau2 = model.tau2_grid[t];
      const double w = tau2 / (tau2 + model.sigma2);
      for (std::size_t i = 0; i < n; ++i) {
        const double c = w * model.y[i] + (1.0 - w) * model.mu_grid[m];
        fit.theta_mean[i] += p * c;
        second[i] += p * (w * model.sigma2 + c * c);
      }
    }
  }
  fit.theta_var.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    fit.theta_var[i] = std::max(0.0, second[i] - fit.theta_mean[i] * fit.theta_mean[i]);
  }
  return fit;
}

KlStageOrdering kl_stage_ordering(const HierNormalModel& model) {
  const HierFit fit = fit_grid(model);
  const std::size_t nt = model.tau2_grid.size();
  KlStageOrdering r;
  double conditional = 0.0;
  for (std::size_t m = 0; m < model.mu_grid.size(); ++m) {
    for (std::size_t t = 0; t < nt; ++t) {
      const double p = fit.hyper_posterior[m * nt + t];
      if (p == 0.0) continue;
      r.kl_hyper += p * (std::log(p) - std::log(model.prior_mass(m, t)));
      const double tau2 = model.tau2_grid[t];
      // tau2 = 0: theta is pinned at mu under prior and posterior alike.
      if (tau2 == 0.0) continue;
      const double w = tau2 / (tau2 + model.sigma2);
      double s = 0.0;
      for (double yi : model.y) {
        s += normal_kl(w * yi + (1.0 - w) * model.mu_grid[m], w * model.sigma2, model.mu_grid[m], tau2);
      }
      conditional += p * s;
    }
  }
  r.kl_hyper = std::max(0.0, r.kl_hyper);
  r.kl_theta = r.kl_hyper + conditional;
  r.holds = r.kl_hyper < r.kl_theta;
  return r;
}

double grand_mean(const std::vector<double>& y) {
  if (y.empty()) throw DomainError("grand_mean: empty data");
  double s = 0.0;
  for (double v : y) s += v;
  return s / static_cast<double>(y.size());
}

EmpiricalBayes empirical_bayes(const std::vector<double>& y, double sigma2) {
  if (y.size() < 3) throw DomainError("empirical_bayes: n >= 3");
  if (!(sigma2 > 0.0)) throw DomainError("empirical_bayes: sigma2 > 0");
  EmpiricalBayes eb;
  eb.mu_hat = grand_mean(y);
  double ss = 0.0;
  for (double v : y) ss += (v - eb.mu_hat) * (v - eb.mu_hat);
  const double s2 = ss / static_cast<double>(y.size());
  eb.truncated = s2 <= sigma2;
  eb.tau2_hat = eb.truncated ? 0.0 : s2 - sigma2;
  eb.shrinkage_weight = eb.tau2_hat / (eb.tau2_hat + sigma2);
  eb.estimates.reserve(y.size());
  for (double v : y) eb.estimates.push_back(eb.shrinkage_weight * v + (1.0 - eb.shrinkage_weight) * eb.mu_hat);
  return eb;
}

EbRiskComparison eb_risk_comparison(std::size_t units, double tau2, double sigma2, std::size_t reps,
                                    RandomStream& stream) {
  if (units < 3) throw DomainError("eb_risk_comparison: units >= 3");
  if (!(tau2 > 0.0) || !(sigma2 > 0.0)) throw DomainError("eb_risk_comparison: tau2, sigma2 > 0");
  if (reps < 1000) throw DomainError("eb_risk_comparison: reps >= 1000");
  struct Acc {
    MonteCarloSum raw, eb, gap;
  };
  const double st = std::sqrt(tau2);
  const double ss = std::sqrt(sigma2);
  const auto blocks = simulate_blocks<Acc>(reps, stream, [&](RandomStream& s, std::size_t b, std::size_t e) {
    Acc a;
    std::vector<double> theta(units);
    std::vector<double> y(units);
    for (std::size_t r = b; r < e; ++r) {
      for (std::size_t i = 0; i < units; ++i) {
        theta[i] = st * s.normal();
        y[i] = theta[i] + ss * s.normal();
      }
      const EmpiricalBayes eb = empirical_bayes(y, sigma2);
      double lr = 0.0;
      double le = 0.0;
      for (std::size_t i = 0; i < units; ++i) {
        lr += (y[i] - theta[i]) * (y[i] - theta[i]);
        le += (eb.estimates[i] - theta[i]) * (eb.estimates[i] - theta[i]);
      }
      a.raw.add(lr);
      a.eb.add(le);
      a.gap.add(lr - le);
    }
    return a;
  });
  Acc t;
  for (const auto& a : blocks) {
    t.raw.merge(a.raw);
    t.eb.merge(a.eb);
    t.gap.merge(a.gap);
  }
  EbRiskComparison r;
  r.reps = reps;
  r.sse_raw = t.raw.mean();
  r.sse_eb = t.eb.mean();
  r.gap = t.gap.mean();
  r.gap_stderr = t.gap.stderr_of_mean();
  return r;
}

} // namespace bk
