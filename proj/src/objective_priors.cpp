#include "bk/objective_priors.hpp"

#include "bk/errors.hpp"
#include "bk/quadrature.hpp"
#include "bk/special.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <sstream>

namespace bk {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

PriorSpec make_prior(std::string name, std::function<double(double)> k, double lo, double hi,
                     Propriety p, PriorProvenance prov, std::optional<double> log_norm = std::nullopt) {
  PriorSpec s;
  s.name = std::move(name);
  s.log_kernel = std::move(k);
  s.lower = lo;
  s.upper = hi;
  s.propriety = p;
  s.provenance = prov;
  s.log_normalizer = log_norm;
  return s;
}

// Probe points spread across (lower, upper), geometric towards infinite ends.
std::vector<double> probe_points(double lower, double upper) {
  std::vector<double> pts;
  if (std::isfinite(lower) && std::isfinite(upper)) {
    for (int i = 1; i < 200; ++i) pts.push_back(lower + (upper - lower) * i / 200.0);
    return pts;
  }
  const double centre = std::isfinite(lower) ? lower : (std::isfinite(upper) ? upper : 0.0);
  if (!std::isfinite(lower) && !std::isfinite(upper)) pts.push_back(0.0);
  for (int k = -8; k <= 12; ++k) {
    const double d = std::pow(10.0, k);
    for (double m : {1.0, 2.0, 5.0}) {
      if (std::isfinite(lower) || !std::isfinite(upper)) pts.push_back(centre + m * d);
      if (!std::isfinite(lower)) pts.push_back(centre - m * d);
    }
  }
  std::sort(pts.begin(), pts.end());
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
  return pts;
}

double richardson_mixed(const std::function<double(double, double)>& f, double x, double y,
                        double hx, double hy) {
  auto m = [&](double a, double b) {
    return (f(x + a, y + b) - f(x + a, y - b) - f(x - a, y + b) + f(x - a, y - b)) / (4.0 * a * b);
  };
  return (4.0 * m(0.5 * hx, 0.5 * hy) - m(hx, hy)) / 3.0;
}

} // namespace

std::string_view to_string(Propriety p) {
  switch (p) {
  case Propriety::Proper:
    return "proper";
  case Propriety::Improper:
    return "improper";
  case Propriety::Unknown:
    return "unknown";
  }
  return "?";
}

std::string_view to_string(PriorProvenance p) {
  switch (p) {
  case PriorProvenance::Jeffreys:
    return "Jeffreys";
  case PriorProvenance::IndependenceJeffreys:
    return "IndependenceJeffreys";
  case PriorProvenance::Flat:
    return "Flat";
  case PriorProvenance::UserSupplied:
    return "UserSupplied";
  }
  return "?";
}

std::string_view to_string(ProprietyVerdict v) {
  switch (v) {
  case ProprietyVerdict::Proper:
    return "proper";
  case ProprietyVerdict::Improper:
    return "improper";
  case ProprietyVerdict::Inconclusive:
    return "inconclusive";
  }
  return "?";
}

double PriorSpec::kernel(double x) const {
  if (!(x > lower && x < upper)) return 0.0;
  return std::exp(log_kernel(x));
}

double PriorSpec::log_density(double x) const {
  if (propriety != Propriety::Proper || !log_normalizer) {
    throw ImproperPrior("prior " + name + " has no normalising constant");
  }
  if (!(x > lower && x < upper)) return -kInf;
  return log_kernel(x) - *log_normalizer;
}

double PriorSpec::density(double x) const { return std::exp(log_density(x)); }

PriorSpec jeffreys(JeffreysFamily family) {
  switch (family) {
  case JeffreysFamily::Binomial:
    return make_prior(
        "Jeffreys Binomial Beta(1/2, 1/2)",
        [](double t) { return -0.5 * std::log(t) - 0.5 * std::log1p(-t); }, 0.0, 1.0,
        Propriety::Proper, PriorProvenance::Jeffreys, special::kLogPi);
  case JeffreysFamily::NegBinomial:
    return make_prior(
        "Jeffreys NegBinomial theta^-1 (1 - theta)^-1/2",
        [](double t) { return -std::log(t) - 0.5 * std::log1p(-t); }, 0.0, 1.0,
        Propriety::Improper, PriorProvenance::Jeffreys);
  case JeffreysFamily::NormalMeanVar:
    return make_prior(
        "Jeffreys Normal(mu, phi) phi^-3/2", [](double phi) { return -1.5 * std::log(phi); }, 0.0,
        kInf, Propriety::Improper, PriorProvenance::Jeffreys);
  case JeffreysFamily::Location:
    return make_prior(
        "Jeffreys location constant", [](double) { return 0.0; }, -kInf, kInf, Propriety::Improper,
        PriorProvenance::Jeffreys);
  case JeffreysFamily::Scale:
    return make_prior(
        "Jeffreys scale 1/theta", [](double t) { return -std::log(t); }, 0.0, kInf,
        Propriety::Improper, PriorProvenance::Jeffreys);
  }
  throw DomainError("jeffreys: unknown family");
}

PriorSpec independence_jeffreys(JeffreysFamily family) {
  if (family == JeffreysFamily::NormalMeanVar) {
    return make_prior(
        "independence Jeffreys Normal(mu, phi) 1/phi", [](double phi) { return -std::log(phi); },
        0.0, kInf, Propriety::Improper, PriorProvenance::IndependenceJeffreys);
  }
  return jeffreys(family);
}

PriorSpec flat_prior(double lower, double upper) {
  if (!(lower < upper)) throw DomainError("flat_prior: lower < upper");
  const bool proper = std::isfinite(lower) && std::isfinite(upper);
  return make_prior(
      "flat", [](double) { return 0.0; }, lower, upper,
      proper ? Propriety::Proper : Propriety::Improper, PriorProvenance::Flat,
      proper ? std::optional<double>(std::log(upper - lower)) : std::nullopt);
}

double second_derivative(const std::function<double(double)>& f, double x, double lower,
                         double upper) {
  double h = 1e-3 * std::max(1.0, std::fabs(x));
  const double room = std::min(x - lower, upper - x);
  if (!(room > 0.0)) throw DomainError("second_derivative: point outside the domain");
  if (std::isfinite(room)) h = std::min(h, 0.02 * room);
  const double f0 = f(x);
  auto d = [&](double s) { return (f(x + s) - 2.0 * f0 + f(x - s)) / (s * s); };
  return (4.0 * d(0.5 * h) - d(h)) / 3.0;
}

PriorSpec JeffreysTable::prior() const {
  if (theta.size() < 2) throw DomainError("JeffreysTable: need at least two grid points");
  std::vector<double> lx = theta;
  std::vector<double> ly;
  for (double s : sqrt_information) ly.push_back(std::log(s));
  auto k = [lx, ly](double t) {
    if (t <= lx.front()) return ly.front();
    if (t >= lx.back()) return ly.back();
    const auto it = std::upper_bound(lx.begin(), lx.end(), t);
    const std::size_t j = static_cast<std::size_t>(it - lx.begin());
    const double w = (t - lx[j - 1]) / (lx[j] - lx[j - 1]);
    return (1.0 - w) * ly[j - 1] + w * ly[j];
  };
  return make_prior("numeric Jeffreys", k, theta.front(), theta.back(), Propriety::Unknown,
                    PriorProvenance::Jeffreys);
}

JeffreysTable jeffreys_numeric(const FisherModel& model, const std::vector<double>& theta_grid,
                               RandomStream* stream) {
  if (!model.log_likelihood) throw DomainError("jeffreys_numeric: no log likelihood");
  if (!model.enumerate && !model.sampler) {
    throw DomainError("jeffreys_numeric: need an enumeration or a sampler");
  }
  if (!model.enumerate && stream == nullptr) {
    throw DomainError("jeffreys_numeric: Monte Carlo expectation needs a random stream");
  }
  JeffreysTable t;
  for (double theta : theta_grid) {
    if (!(theta > model.lower && theta < model.upper)) {
      throw DomainError("jeffreys_numeric: grid point outside the parameter space");
    }
    auto curvature = [&](double y) {
      return -second_derivative([&](double th) { return model.log_likelihood(y, th); }, theta,
                                model.lower, model.upper);
    };
    double info = 0.0;
    double se = 0.0;
    if (model.enumerate) {
      for (const auto& [y, p] : model.enumerate(theta)) {
        if (p > 0.0) info += p * curvature(y);
      }
    } else {
      MonteCarloSum acc;
      for (std::size_t r = 0; r < model.mc_reps; ++r) acc.add(curvature(model.sampler(theta, *stream)));
      info = acc.mean();
      se = acc.stderr_of_mean();
    }
    if (!(info > 0.0)) {
      throw NumericError("jeffreys_numeric: non-positive information estimate");
    }
    t.theta.push_back(theta);
    t.information.push_back(info);
    t.sqrt_information.push_back(std::sqrt(info));
    t.stderr_information.push_back(se);
  }
  return t;
}

MonotoneMap logit_map() {
  return {[](double t) { return std::log(t) - std::log1p(-t); },
          [](double p) { return 1.0 / (1.0 + std::exp(-p)); },
          [](double t) { return 1.0 / (t * (1.0 - t)); }};
}

MonotoneMap expit_map() {
  return {[](double p) { return 1.0 / (1.0 + std::exp(-p)); },
          [](double t) { return std::log(t) - std::log1p(-t); },
          [](double p) {
            const double e = std::exp(-std::fabs(p));
            return e / ((1.0 + e) * (1.0 + e));
          }};
}

PriorSpec transform_prior(const PriorSpec& prior, const MonotoneMap& map) {
  if (!map.forward || !map.inverse || !map.derivative) {
    throw DomainError("transform_prior: map needs forward, inverse and derivative");
  }
  const auto pts = probe_points(prior.lower, prior.upper);
  // Far probes may saturate (equal values, zero derivative) in floating point; only a reversal
  // counts against monotonicity.
  int direction = 0;
  double prev = std::numeric_limits<double>::quiet_NaN();
  for (double x : pts) {
    const double v = map.forward(x);
    const double d = map.derivative(x);
    if (std::isnan(v) || std::isnan(d)) throw DomainError("transform_prior: map not defined on the support");
    const int sd = d > 0.0 ? 1 : (d < 0.0 ? -1 : 0);
    if (sd != 0) {
      if (direction == 0) direction = sd;
      if (sd != direction) throw DomainError("transform_prior: map not strictly monotone");
    }
    if (!std::isnan(prev) && direction != 0 && (v - prev) * direction < 0.0) {
      throw DomainError("transform_prior: map not strictly monotone");
    }
    prev = v;
  }
  if (direction == 0) throw DomainError("transform_prior: map not strictly monotone");
  const double a = map.forward(prior.lower);
  const double b = map.forward(prior.upper);
  PriorSpec out = prior;
  out.name = prior.name + " (transformed)";
  out.lower = std::min(a, b);
  out.upper = std::max(a, b);
  const auto k = prior.log_kernel;
  out.log_kernel = [k, map](double phi) {
    const double t = map.inverse(phi);
    return k(t) - std::log(std::fabs(map.derivative(t)));
  };
  return out;
}

ProprietyReport propriety_check(const std::function<double(double)>& log_density, double lower,
                                double upper) {
  if (!(lower < upper)) throw DomainError("propriety_check: lower < upper");
  ProprietyReport r;
  std::ostringstream diag;

  // Reference point: the highest probe, so quadrature can be split at the peak.
  double ref = std::numeric_limits<double>::quiet_NaN();
  double lref = -kInf;
  for (double x : probe_points(lower, upper)) {
    if (!(x > lower && x < upper)) continue;
    const double v = log_density(x);
    if (std::isnan(v)) throw NumericError("propriety_check: log density is NaN");
    if (v > lref) {
      lref = v;
      ref = x;
    }
  }
  if (!std::isfinite(lref)) throw NumericError("propriety_check: log density not finite anywhere");

  const double width = std::isfinite(lower) && std::isfinite(upper) ? 0.5 * (upper - lower) : 1.0;
  auto endpoint_exponent = [&](double end, double sign) {
    const double d1 = width * 1e-8;
    const double d2 = width * 1e-10;
    const double l1 = log_density(end + sign * d1);
    const double l2 = log_density(end + sign * d2);
    if (std::isnan(l1) || std::isnan(l2) || l2 == kInf) return -kInf;
    if (l2 == -kInf) return kInf;
    return (l1 - l2) / (std::log(d1) - std::log(d2));
  };
  auto tail_slope = [&](double sign) {
    const double scale = std::max(1.0, std::fabs(ref));
    double last = std::numeric_limits<double>::quiet_NaN();
    double prev_l = std::numeric_limits<double>::quiet_NaN();
    double prev_d = 0.0;
    for (int k = 1; k <= 12; ++k) {
      const double d = scale * std::pow(10.0, k);
      const double l = log_density(ref + sign * d);
      if (std::isnan(l) || l == kInf) return kInf;
      if (l == -kInf) return -kInf;
      if (k > 1) last = (l - prev_l) / (std::log(d) - std::log(prev_d));
      prev_l = l;
      prev_d = d;
    }
    return last;
  };

  bool diverges = false;
  constexpr double kPowerEdge = -1.0 + 1e-4;
  if (std::isfinite(lower)) {
    r.lower_exponent = endpoint_exponent(lower, 1.0);
    diag << "lower endpoint exponent " << r.lower_exponent << "; ";
    if (r.lower_exponent <= kPowerEdge) diverges = true;
  } else {
    r.lower_tail_slope = tail_slope(-1.0);
    diag << "lower tail log-log slope " << r.lower_tail_slope << "; ";
    if (r.lower_tail_slope >= -1.0 - 1e-4) diverges = true;
  }
  if (std::isfinite(upper)) {
    r.upper_exponent = endpoint_exponent(upper, -1.0);
    diag << "upper endpoint exponent " << r.upper_exponent << "; ";
    if (r.upper_exponent <= kPowerEdge) diverges = true;
  } else {
    r.upper_tail_slope = tail_slope(1.0);
    diag << "upper tail log-log slope " << r.upper_tail_slope << "; ";
    if (r.upper_tail_slope >= -1.0 - 1e-4) diverges = true;
  }
  if (diverges) {
    r.verdict = ProprietyVerdict::Improper;
    r.integral = kInf;
    r.log_integral = kInf;
    diag << "divergent";
    r.diagnostic = diag.str();
    return r;
  }
  auto f = [&](double x) {
    if (!(x > lower && x < upper)) return 0.0;
    return std::exp(log_density(x) - lref);
  };
  // A peak hugging an end is left to the endpoint handling of the rules instead of a sliver.
  auto near_end = [&](double end) {
    return std::isfinite(end) && std::fabs(ref - end) <= 1e-6 * std::max(1.0, std::fabs(end));
  };
  try {
    double left = 0.0;
    double right = 0.0;
    if (near_end(lower) || near_end(upper)) {
      right = numeric::integrate_singular(f, lower, upper).value;
    } else {
      left = numeric::integrate_singular(f, lower, ref).value;
      right = numeric::integrate_singular(f, ref, upper).value;
    }
    const double total = left + right;
    if (!(total > 0.0) || !std::isfinite(total)) throw NumericError("non-finite integral");
    r.verdict = ProprietyVerdict::Proper;
    r.log_integral = lref + std::log(total);
    r.integral = std::exp(r.log_integral);
    diag << "integral certified by quadrature";
  } catch (const NumericError& e) {
    r.verdict = ProprietyVerdict::Inconclusive;
    diag << "quadrature failed: " << e.what();
  }
  r.diagnostic = diag.str();
  return r;
}

ProprietyReport propriety_check(const PriorSpec& prior) {
  return propriety_check(prior.log_kernel, prior.lower, prior.upper);
}

std::pair<std::vector<double>, std::vector<double>> gauss_hermite(std::size_t order) {
  if (order < 1) throw DomainError("gauss_hermite: order >= 1");
  const auto n = static_cast<Eigen::Index>(order);
  Eigen::MatrixXd j = Eigen::MatrixXd::Zero(n, n);
  for (Eigen::Index k = 1; k < n; ++k) {
    j(k, k - 1) = j(k - 1, k) = std::sqrt(static_cast<double>(k) / 2.0);
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(j);
  std::vector<double> x(order);
  std::vector<double> w(order);
  for (Eigen::Index k = 0; k < n; ++k) {
    x[static_cast<std::size_t>(k)] = es.eigenvalues()[k];
    const double v = es.eigenvectors()(0, k);
    w[static_cast<std::size_t>(k)] = std::sqrt(M_PI) * v * v;
  }
  return {x, w};
}

FisherDeterminantCheck normal_fisher_determinant_numeric(double n, double mu, double phi) {
  if (!(n > 0.0) || !(phi > 0.0)) throw DomainError("fisher determinant: n > 0, phi > 0");
  const auto [x, w] = gauss_hermite(20);
  double i11 = 0.0;
  double i12 = 0.0;
  double i22 = 0.0;
  const double hm = 1e-3 * std::max(1.0, std::fabs(mu));
  const double hp = 0.02 * phi;
  for (std::size_t k = 0; k < x.size(); ++k) {
    const double y = mu + std::sqrt(2.0 * phi) * x[k];
    const double wk = w[k] / std::sqrt(M_PI);
    auto ll = [y](double m, double p) {
      return -0.5 * std::log(2.0 * M_PI * p) - (y - m) * (y - m) / (2.0 * p);
    };
    i11 -= wk * second_derivative([&](double m) { return ll(m, phi); }, mu);
    i22 -= wk * second_derivative([&](double p) { return ll(mu, p); }, phi, 0.0, kInf);
    i12 -= wk * richardson_mixed(ll, mu, phi, hm, hp);
  }
  FisherDeterminantCheck c;
  c.numeric = n * n * (i11 * i22 - i12 * i12);
  c.closed_form = n * n / (2.0 * phi * phi * phi);
  c.relative_error = std::fabs(c.numeric - c.closed_form) / c.closed_form;
  return c;
}

} // namespace bk
