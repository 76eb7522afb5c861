#include "bk/nef.hpp"

#include "bk/errors.hpp"
#include "bk/quadrature.hpp"

#include <cmath>
#include <limits>
#include <vector>

namespace bk {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double softplus(double t) { return t > 0.0 ? t + std::log1p(std::exp(-t)) : std::log1p(std::exp(t)); }

double logistic(double t) {
  if (t >= 0.0) return 1.0 / (1.0 + std::exp(-t));
  const double e = std::exp(t);
  return e / (1.0 + e);
}

// Solve grad_psi(theta) = x by bisection after bracketing.
double natural_point(const NefFamily& f, double x) {
  double lo = std::max(f.theta_lower, -1.0);
  double hi = std::min(f.theta_upper, 1.0);
  for (int i = 0; i < 200 && f.grad_psi(lo) > x; ++i) {
    lo = std::isfinite(f.theta_lower) ? 0.5 * (lo + f.theta_lower) : 2.0 * lo - 1.0;
  }
  for (int i = 0; i < 200 && f.grad_psi(hi) < x; ++i) {
    hi = std::isfinite(f.theta_upper) ? 0.5 * (hi + f.theta_upper) : 2.0 * hi + 1.0;
  }
  return numeric::bisect([&](double t) { return f.grad_psi(t) - x; }, lo, hi);
}

} // namespace

NefFamily NefFamily::bernoulli() {
  return {"Bernoulli",
          softplus,
          logistic,
          [](double y) { return y; },
          [](double y) { return y == 0.0 || y == 1.0; },
          -kInf,
          kInf,
          0.0,
          1.0};
}

NefFamily NefFamily::poisson() {
  return {"Poisson",
          [](double t) { return std::exp(t); },
          [](double t) { return std::exp(t); },
          [](double y) { return y; },
          [](double y) { return y >= 0.0 && std::floor(y) == y; },
          -kInf,
          kInf,
          0.0,
          kInf};
}

NefFamily NefFamily::normal_unit() {
  return {"Normal",
          [](double t) { return 0.5 * t * t; },
          [](double t) { return t; },
          [](double y) { return y; },
          [](double y) { return std::isfinite(y); },
          -kInf,
          kInf,
          -kInf,
          kInf};
}

NefModel::NefModel(NefFamily family, double n0, double x0)
    : family_(std::move(family)), n0_(n0), x0_(x0) {
  if (!(n0 > 0.0) || !std::isfinite(n0)) throw DomainError("NefModel: n0 must be positive");
  if (!(x0 > family_.mean_lower && x0 < family_.mean_upper)) {
    throw DomainError("NefModel: x0 must lie inside the mean space");
  }
}

double NefModel::precision() const { return n0_ + static_cast<double>(n_); }

double NefModel::location() const { return (n0_ * x0_ + sum_t_) / precision(); }

double NefModel::log_kernel(double theta) const {
  return precision() * (theta * location() - family_.psi(theta));
}

NefModel NefModel::absorb(std::span<const double> data) const {
  NefModel r = *this;
  for (double y : data) {
    if (!family_.in_support(y)) throw DataMismatch(family_.name + ": observation outside support");
    r.sum_t_ += family_.statistic(y);
    ++r.n_;
  }
  return r;
}

NefModel dy_update(const NefModel& model, std::span<const double> data) {
  return model.absorb(data);
}

double dy_posterior_mean_map(const NefModel& posterior) { return posterior.location(); }

double dy_mean_map_quadrature(const NefModel& posterior) {
  const NefFamily& f = posterior.family();
  const double big_n = posterior.precision();
  const double x = posterior.location();
  const double t_star = natural_point(f, x);
  const double h = 1e-4 * std::max(1.0, std::fabs(t_star));
  const double curv = (f.grad_psi(t_star + h) - f.grad_psi(t_star - h)) / (2.0 * h);
  if (!(curv > 0.0)) throw NumericError("mean map is not increasing at the mode");
  const double sd = 1.0 / std::sqrt(big_n * curv);
  const double peak = posterior.log_kernel(t_star);
  std::vector<double> cuts;
  for (double k : {-8.0, -3.0, -1.0, 0.0, 1.0, 3.0, 8.0}) cuts.push_back(t_star + k * sd);
  auto kernel = [&](double t) {
    const double v = posterior.log_kernel(t) - peak;
    return std::isfinite(v) ? std::exp(v) : 0.0;
  };
  const auto z = numeric::integrate(kernel, f.theta_lower, f.theta_upper, cuts);
  const auto m = numeric::integrate(
      [&](double t) {
        const double k = kernel(t);
        return k == 0.0 ? 0.0 : f.grad_psi(t) * k;
      },
                                    f.theta_lower, f.theta_upper, cuts);
  if (!(z.value > 0.0)) throw NumericError("posterior kernel integrates to zero");
  return m.value / z.value;
}

} // namespace bk
