#include "bk/asymptotics.hpp"

#include "bk/errors.hpp"
#include "bk/quadrature.hpp"
#include "bk/special.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace bk {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kEps = std::numeric_limits<double>::epsilon();
constexpr int kMaxNewton = 100;

std::span<const double> as_span(const Eigen::VectorXd& v) { return {v.data(), static_cast<std::size_t>(v.size())}; }

double eval(const SmoothTarget& t, const Eigen::VectorXd& x) { return t.log_density(as_span(x)); }

bool inside(const SmoothTarget& t, const Eigen::VectorXd& x) { return t.in_domain(as_span(x)); }

// Finite-difference step for coordinate i, shrunk so the stencil stays inside the box.
double step(const SmoothTarget& t, std::span<const double> x, std::size_t i, double base) {
  double h = base * std::max(1.0, std::fabs(x[i]));
  const double room = std::min(x[i] - t.lower_bound(i), t.upper_bound(i) - x[i]);
  if (std::isfinite(room)) h = std::min(h, 0.45 * room);
  return h;
}

enum class NewtonStatus { Converged, NotConverged, Stalled };

struct NewtonRun {
  NewtonStatus status = NewtonStatus::NotConverged;
  Eigen::VectorXd x;
  Eigen::VectorXd g;
  int iterations = 0;
};

NewtonRun newton(const SmoothTarget& t, const Eigen::VectorXd& init, double tol) {
  NewtonRun run;
  run.x = init;
  for (int it = 0; it < kMaxNewton; ++it) {
    run.iterations = it;
    const double f = eval(t, run.x);
    if (!std::isfinite(f)) throw NumericError("find_mode: log density not finite at iterate");
    run.g = target_gradient(t, as_span(run.x));
    const Eigen::MatrixXd a = -target_hessian(t, as_span(run.x));
    Eigen::LLT<Eigen::MatrixXd> llt(a);
    if (run.g.norm() <= tol) {
      // One last full Newton step, kept only if it does not lose height.
      if (llt.info() == Eigen::Success && a.allFinite()) {
        const Eigen::VectorXd xn = run.x + llt.solve(run.g);
        if (inside(t, xn)) {
          const double fn = eval(t, xn);
          if (std::isfinite(fn) && fn >= f) {
            const Eigen::VectorXd gn = target_gradient(t, as_span(xn));
            if (gn.norm() <= run.g.norm()) {
              run.x = xn;
              run.g = gn;
            }
          }
        }
      }
      run.status = NewtonStatus::Converged;
      return run;
    }
    Eigen::VectorXd d;
    if (llt.info() == Eigen::Success && a.allFinite()) {
      d = llt.solve(run.g);
    } else {
      d = run.g;
    }
    const double slope = run.g.dot(d);
    const double slack = 8.0 * kEps * std::max(1.0, std::fabs(f));
    double alpha = 1.0;
    bool moved = false;
    for (int k = 0; k < 60; ++k, alpha *= 0.5) {
      const Eigen::VectorXd xn = run.x + alpha * d;
      if (!inside(t, xn)) continue;
      const double fn = eval(t, xn);
      if (std::isfinite(fn) && fn >= f + 1e-4 * alpha * slope - slack) {
        moved = (xn - run.x).norm() > 0.0;
        run.x = xn;
        break;
      }
    }
    if (!moved) {
      run.status = NewtonStatus::Stalled;
      return run;
    }
  }
  run.g = target_gradient(t, as_span(run.x));
  run.iterations = kMaxNewton;
  run.status = run.g.norm() <= tol ? NewtonStatus::Converged : NewtonStatus::NotConverged;
  return run;
}

Eigen::VectorXd to_vector(std::span<const double> x) {
  Eigen::VectorXd v(static_cast<Eigen::Index>(x.size()));
  for (std::size_t i = 0; i < x.size(); ++i) v[static_cast<Eigen::Index>(i)] = x[i];
  return v;
}

bool near_boundary(const SmoothTarget& t, const Eigen::VectorXd& x) {
  for (std::size_t i = 0; i < t.dimension; ++i) {
    const double xi = x[static_cast<Eigen::Index>(i)];
    const double lo = t.lower_bound(i);
    const double hi = t.upper_bound(i);
    if (std::isfinite(lo) && xi - lo <= 1e-6 * std::max(1.0, std::fabs(lo))) return true;
    if (std::isfinite(hi) && hi - xi <= 1e-6 * std::max(1.0, std::fabs(hi))) return true;
  }
  return false;
}

} // namespace

SmoothTarget SmoothTarget::scalar(std::function<double(double)> f, double lower, double upper,
                                  std::function<double(double)> derivative,
                                  std::function<double(double)> second_derivative) {
  SmoothTarget t;
  t.dimension = 1;
  t.log_density = [f](std::span<const double> x) { return f(x[0]); };
  if (derivative) {
    t.gradient = [derivative](std::span<const double> x) {
      Eigen::VectorXd g(1);
      g[0] = derivative(x[0]);
      return g;
    };
  }
  if (second_derivative) {
    t.hessian = [second_derivative](std::span<const double> x) {
      Eigen::MatrixXd h(1, 1);
      h(0, 0) = second_derivative(x[0]);
      return h;
    };
  }
  t.lower = {lower};
  t.upper = {upper};
  return t;
}

SmoothTarget SmoothTarget::from_distribution(const Distribution& d) {
  if (d.is_discrete()) throw DomainError("SmoothTarget: distribution must be continuous");
  const Support s = d.support();
  return scalar([d](double x) { return d.log_pdf(x); }, s.lower, s.upper);
}

double SmoothTarget::lower_bound(std::size_t i) const { return lower.empty() ? -kInf : lower.at(i); }

double SmoothTarget::upper_bound(std::size_t i) const { return upper.empty() ? kInf : upper.at(i); }

bool SmoothTarget::in_domain(std::span<const double> x) const {
  if (x.size() != dimension) return false;
  for (std::size_t i = 0; i < dimension; ++i) {
    if (!std::isfinite(x[i]) || !(x[i] > lower_bound(i)) || !(x[i] < upper_bound(i))) return false;
  }
  return true;
}

Eigen::VectorXd target_gradient(const SmoothTarget& t, std::span<const double> x) {
  if (t.gradient) return t.gradient(x);
  const std::size_t p = t.dimension;
  Eigen::VectorXd g(static_cast<Eigen::Index>(p));
  std::vector<double> xp(x.begin(), x.end());
  for (std::size_t i = 0; i < p; ++i) {
    const double h = step(t, x, i, std::cbrt(kEps));
    xp[i] = x[i] + h;
    const double fp = t.log_density(xp);
    xp[i] = x[i] - h;
    const double fm = t.log_density(xp);
    xp[i] = x[i];
    g[static_cast<Eigen::Index>(i)] = (fp - fm) / (2.0 * h);
  }
  return g;
}

Eigen::MatrixXd target_hessian(const SmoothTarget& t, std::span<const double> x) {
  if (t.hessian) return t.hessian(x);
  const std::size_t p = t.dimension;
  const auto P = static_cast<Eigen::Index>(p);
  Eigen::MatrixXd h(P, P);
  std::vector<double> xp(x.begin(), x.end());
  if (t.gradient) {
    for (std::size_t i = 0; i < p; ++i) {
      const double hi = step(t, x, i, std::cbrt(kEps));
      xp[i] = x[i] + hi;
      const Eigen::VectorXd gp = t.gradient(xp);
      xp[i] = x[i] - hi;
      const Eigen::VectorXd gm = t.gradient(xp);
      xp[i] = x[i];
      h.col(static_cast<Eigen::Index>(i)) = (gp - gm) / (2.0 * hi);
    }
    return 0.5 * (h + h.transpose());
  }
  const double base = std::pow(kEps, 0.25);
  const double f0 = t.log_density(x);
  for (std::size_t i = 0; i < p; ++i) {
    const double hi = step(t, x, i, base);
    xp[i] = x[i] + hi;
    const double fp = t.log_density(xp);
    xp[i] = x[i] - hi;
    const double fm = t.log_density(xp);
    xp[i] = x[i];
    h(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i)) = (fp - 2.0 * f0 + fm) / (hi * hi);
    for (std::size_t j = 0; j < i; ++j) {
      const double hj = step(t, x, j, base);
      double acc = 0.0;
      for (int si : {1, -1}) {
        for (int sj : {1, -1}) {
          xp[i] = x[i] + si * hi;
          xp[j] = x[j] + sj * hj;
          acc += si * sj * t.log_density(xp);
        }
      }
      xp[i] = x[i];
      xp[j] = x[j];
      const double v = acc / (4.0 * hi * hj);
      h(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = v;
      h(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(i)) = v;
    }
  }
  return h;
}

ModeResult find_mode(const SmoothTarget& target, std::span<const double> init, double tol) {
  if (!target.log_density) throw DomainError("find_mode: target without a log density");
  if (!target.in_domain(init)) throw DomainError("find_mode: init outside the domain");
  if (!(tol > 0.0)) throw DomainError("find_mode: tol > 0");
  const NewtonRun run = newton(target, to_vector(init), tol);
  if (run.status != NewtonStatus::Converged) {
    throw NumericError("find_mode: no convergence (gradient norm " + std::to_string(run.g.norm()) + ")");
  }
  ModeResult r;
  r.mode = run.x;
  r.gradient_norm = run.g.norm();
  r.iterations = run.iterations;
  r.information = -target_hessian(target, as_span(run.x));
  r.information = 0.5 * (r.information + r.information.transpose());
  Eigen::LLT<Eigen::MatrixXd> llt(r.information);
  if (llt.info() != Eigen::Success || !r.information.allFinite()) {
    throw NumericError("find_mode: Hessian at the mode is not negative definite");
  }
  return r;
}

ModeResult find_mode(const SmoothTarget& target, double init, double tol) {
  return find_mode(target, std::span<const double>(&init, 1), tol);
}

Distribution laplace_normal_approx(const SmoothTarget& target, double init) {
  if (target.dimension != 1) throw DomainError("laplace_normal_approx: one-dimensional target");
  const ModeResult m = find_mode(target, init);
  return Distribution::normal(m.mode[0], 1.0 / m.information(0, 0));
}

GaussianApprox laplace_gaussian_approx(const SmoothTarget& target, std::span<const double> init) {
  if (target.dimension < 1 || target.dimension > 3) {
    throw DomainError("laplace_gaussian_approx: dimension must be 1, 2 or 3");
  }
  const ModeResult m = find_mode(target, init);
  GaussianApprox g;
  g.mean = m.mode;
  g.covariance = m.information.inverse();
  return g;
}

LaplaceIntegral laplace_integral(const std::function<double(std::span<const double>)>& q,
                                 const SmoothTarget& h, double n,
                                 std::span<const double> mode_hint) {
  if (!(n > 0.0)) throw DomainError("laplace_integral: n > 0");
  if (!h.in_domain(mode_hint)) throw DomainError("laplace_integral: mode hint outside the domain");
  const NewtonRun run = newton(h, to_vector(mode_hint), 1e-9);
  if (near_boundary(h, run.x)) throw BoundaryMaximum("laplace_integral: maximum on the boundary");
  if (run.status != NewtonStatus::Converged) {
    throw NumericError("laplace_integral: mode search did not converge");
  }
  Eigen::MatrixXd a = -target_hessian(h, as_span(run.x));
  a = 0.5 * (a + a.transpose());
  Eigen::LLT<Eigen::MatrixXd> llt(a);
  if (llt.info() != Eigen::Success || !a.allFinite()) {
    throw NumericError("laplace_integral: singular or indefinite Hessian at the maximum");
  }
  double log_det = 0.0;
  const Eigen::MatrixXd l = llt.matrixL();
  for (Eigen::Index i = 0; i < l.rows(); ++i) log_det += 2.0 * std::log(l(i, i));
  const double qv = q(as_span(run.x));
  if (!(qv > 0.0)) throw DomainError("laplace_integral: q must be positive at the maximum");
  const double p = static_cast<double>(h.dimension);
  LaplaceIntegral r;
  r.mode = run.x;
  r.log_det_neg_hessian = log_det;
  r.log_value = std::log(qv) + n * eval(h, run.x) + 0.5 * p * std::log(2.0 * M_PI / n) - 0.5 * log_det;
  r.value = std::exp(r.log_value);
  return r;
}

LaplaceIntegral laplace_integral(const std::function<double(double)>& q, const SmoothTarget& h,
                                 double n, double mode_hint) {
  return laplace_integral([&q](std::span<const double> x) { return q(x[0]); }, h, n,
                          std::span<const double>(&mode_hint, 1));
}

double stirling_factorial(double n) {
  if (!(n > 0.0)) throw DomainError("stirling_factorial: n > 0");
  const auto h = SmoothTarget::scalar([](double t) { return std::log(t) - t; }, 0.0, kInf,
                                      [](double t) { return 1.0 / t - 1.0; },
                                      [](double t) { return -1.0 / (t * t); });
  const auto li = laplace_integral([](double) { return 1.0; }, h, n, 1.0);
  return std::exp((n + 1.0) * std::log(n) + li.log_value);
}

double bvm_tv_distance(const GridPosterior& posterior, const Distribution& approx) {
  if (posterior.continuous() == approx.is_discrete()) {
    throw SupportMismatch("bvm_tv_distance: one input is discrete and the other continuous");
  }
  double covered = 0.0;
  double diff = 0.0;
  for (std::size_t i = 0; i < posterior.size(); ++i) {
    const double q = posterior.continuous()
                         ? std::max(0.0, approx.cdf(posterior.cell_upper(i)) -
                                             approx.cdf(posterior.cell_lower(i)))
                         : approx.pdf(posterior.support()[i]);
    covered += q;
    diff += std::fabs(posterior.masses()[i] - q);
  }
  if (!(covered >= 1e-8)) throw SupportMismatch("bvm_tv_distance: no common support");
  const double tv = 0.5 * (diff + std::max(0.0, 1.0 - covered));
  return std::clamp(tv, 0.0, 1.0);
}

double bvm_tv_distance(const GridPosterior& p, const GridPosterior& q) {
  if (p.support() != q.support() || p.continuous() != q.continuous()) {
    throw SupportMismatch("bvm_tv_distance: grids must share their support");
  }
  double diff = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) diff += std::fabs(p.masses()[i] - q.masses()[i]);
  return std::clamp(0.5 * diff, 0.0, 1.0);
}

double kl_divergence(const Distribution& p, const Distribution& q) {
  if (p.is_discrete() != q.is_discrete()) throw SupportMismatch("kl_divergence: mixed kinds");
  const Support s = p.support();
  if (p.is_discrete()) {
    const double hi = std::isfinite(s.upper) ? s.upper : p.quantile(1.0 - 1e-15) + 50.0;
    double kl = 0.0;
    for (double x = s.lower; x <= hi; x += 1.0) {
      const double lp = p.log_pdf(x);
      if (lp == -kInf) continue;
      const double lq = q.log_pdf(x);
      if (lq == -kInf) throw SupportMismatch("kl_divergence: infinite divergence");
      kl += std::exp(lp) * (lp - lq);
    }
    return std::max(0.0, kl);
  }
  const Support sq = q.support();
  if (sq.lower > s.lower || sq.upper < s.upper) {
    throw SupportMismatch("kl_divergence: infinite divergence");
  }
  auto f = [&](double x) {
    const double lp = p.log_pdf(x);
    if (lp == -kInf) return 0.0;
    const double lq = q.log_pdf(x);
    if (lq == -kInf) throw SupportMismatch("kl_divergence: infinite divergence");
    return std::exp(lp) * (lp - lq);
  };
  std::vector<double> br;
  for (double u : {1e-6, 0.5, 1.0 - 1e-6}) {
    const double x = p.quantile(u);
    if (x > s.lower && x < s.upper && (br.empty() || x > br.back())) br.push_back(x);
  }
  return std::max(0.0, numeric::integrate(f, s.lower, s.upper, br).value);
}

ConcentrationResult discrete_concentration(const DiscreteCandidateSet& candidates,
                                           const Distribution& truth,
                                           const std::vector<std::size_t>& batch_sizes,
                                           RandomStream& stream) {
  const std::size_t k = candidates.models.size();
  if (k == 0 || candidates.prior.size() != k) {
    throw DomainError("discrete_concentration: one prior mass per candidate");
  }
  double total = 0.0;
  for (double w : candidates.prior) {
    if (!(w > 0.0)) throw DomainError("discrete_concentration: prior masses must be positive");
    total += w;
  }
  if (std::fabs(total - 1.0) > 1e-12) throw DomainError("discrete_concentration: prior must sum to 1");
  if (batch_sizes.empty() || !std::is_sorted(batch_sizes.begin(), batch_sizes.end())) {
    throw DomainError("discrete_concentration: batch sizes must be sorted ascending");
  }
  ConcentrationResult r;
  for (const auto& m : candidates.models) r.kl.push_back(kl_divergence(truth, m));
  r.projection_index = static_cast<std::size_t>(
      std::min_element(r.kl.begin(), r.kl.end()) - r.kl.begin());
  r.batch_sizes = batch_sizes;

  std::vector<double> lp(k);
  for (std::size_t j = 0; j < k; ++j) lp[j] = std::log(candidates.prior[j]);
  std::size_t drawn = 0;
  for (std::size_t target : batch_sizes) {
    for (double x : truth.sample(stream, target - drawn)) {
      for (std::size_t j = 0; j < k; ++j) lp[j] += candidates.models[j].log_pdf(x);
    }
    drawn = target;
    const double norm = special::log_sum_exp(lp);
    if (!std::isfinite(norm)) throw DegenerateEvidence("discrete_concentration: all candidates excluded");
    std::vector<double> post(k);
    for (std::size_t j = 0; j < k; ++j) post[j] = std::exp(lp[j] - norm);
    r.posterior.push_back(std::move(post));
  }
  r.final_mass = r.posterior.back()[r.projection_index];
  return r;
}

IdentifiabilityResult identifiability_check(const TwoParameterGrid& model) {
  const std::size_t n1 = model.theta1.size();
  const std::size_t n2 = model.theta2.size();
  if (n1 == 0 || n2 == 0 || model.prior.size() != n1) {
    throw DomainError("identifiability_check: prior table must be theta1 x theta2");
  }
  double total = 0.0;
  for (const auto& row : model.prior) {
    if (row.size() != n2) throw DomainError("identifiability_check: ragged prior table");
    for (double w : row) {
      if (!(w >= 0.0)) throw DomainError("identifiability_check: prior masses must be >= 0");
      total += w;
    }
  }
  if (!(total > 0.0)) throw DomainError("identifiability_check: prior has no mass");

  std::vector<double> prior2(n2, 0.0);
  for (std::size_t i = 0; i < n1; ++i) {
    for (std::size_t j = 0; j < n2; ++j) prior2[j] += model.prior[i][j] / total;
  }
  IdentifiabilityResult r;
  std::vector<std::vector<double>> joint(n1, std::vector<double>(n2));
  for (double y : model.y) {
    double all = 0.0;
    for (std::size_t i = 0; i < n1; ++i) {
      for (std::size_t j = 0; j < n2; ++j) {
        joint[i][j] = model.prior[i][j] * model.likelihood(y, model.theta1[i], model.theta2[j]);
        all += joint[i][j];
      }
    }
    for (std::size_t i = 0; i < n1; ++i) {
      const double row_post = std::accumulate(joint[i].begin(), joint[i].end(), 0.0);
      const double row_prior = std::accumulate(model.prior[i].begin(), model.prior[i].end(), 0.0);
      if (!(row_post > 0.0) || !(row_prior > 0.0)) continue;
      for (std::size_t j = 0; j < n2; ++j) {
        const double d = std::fabs(joint[i][j] / row_post - model.prior[i][j] / row_prior);
        r.max_discrepancy = std::max(r.max_discrepancy, d);
      }
    }
    if (all > 0.0) {
      for (std::size_t j = 0; j < n2; ++j) {
        double m = 0.0;
        for (std::size_t i = 0; i < n1; ++i) m += joint[i][j];
        r.marginal_shift = std::max(r.marginal_shift, std::fabs(m / all - prior2[j]));
      }
    }
  }
  r.identifiable = r.max_discrepancy > 1e-12;
  return r;
}

} // namespace bk
