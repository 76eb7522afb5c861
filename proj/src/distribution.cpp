#include "bk/distribution.hpp"

#include "bk/errors.hpp"
#include "bk/special.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace bk {

namespace sp = special;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

bool is_integer(double x) { return std::isfinite(x) && std::floor(x) == x; }

// x * log(y) with the 0 * log 0 = 0 convention.
double xlogy(double x, double y) { return x == 0.0 ? 0.0 : x * std::log(y); }
double xlog1py(double x, double y) { return x == 0.0 ? 0.0 : x * std::log1p(y); }

std::size_t expected_count(Family f) {
  switch (f) {
  case Family::Poisson:
    return 1;
  case Family::TruncatedNormal:
    return 4;
  default:
    return 2;
  }
}

double gamma_draw(double shape, RandomStream& s) {
  if (shape < 1.0) {
    const double u = s.uniform_pos();
    return gamma_draw(shape + 1.0, s) * std::pow(u, 1.0 / shape);
  }
  const double d = shape - 1.0 / 3.0;
  const double c = 1.0 / std::sqrt(9.0 * d);
  for (;;) {
    double x, v;
    do {
      x = s.normal();
      v = 1.0 + c * x;
    } while (v <= 0.0);
    v = v * v * v;
    const double u = s.uniform_pos();
    const double x2 = x * x;
    if (u < 1.0 - 0.0331 * x2 * x2) return d * v;
    if (std::log(u) < 0.5 * x2 + d * (1.0 - v + std::log(v))) return d * v;
  }
}

// Inversion from the mode for unimodal integer laws with a pmf ratio recurrence.
// ratio_up(k) = pmf(k+1)/pmf(k), ratio_down(k) = pmf(k-1)/pmf(k).
template <class Up, class Down>
double invert_from_mode(double u, double mode, double pmf_mode, double cdf_mode, double lo,
                        double hi, Up ratio_up, Down ratio_down) {
  double k = mode;
  double c = cdf_mode;
  double pk = pmf_mode;
  if (u <= c) {
    while (k > lo) {
      const double below = c - pk;
      if (below < u) return k;
      pk *= ratio_down(k);
      c = below;
      k -= 1.0;
      if (pk <= 0.0) return k;
    }
    return k;
  }
  while (c < u && k < hi) {
    const double next = pk * ratio_up(k);
    if (next <= 0.0 && c < u) return k + 1.0 > hi ? hi : k + 1.0;
    pk = next;
    k += 1.0;
    c += pk;
  }
  return k;
}

} // namespace

std::string to_string(Family f) {
  switch (f) {
  case Family::Normal:
    return "Normal";
  case Family::Beta:
    return "Beta";
  case Family::Gamma:
    return "Gamma";
  case Family::Binomial:
    return "Binomial";
  case Family::NegBinomial:
    return "NegBinomial";
  case Family::Poisson:
    return "Poisson";
  case Family::Pareto:
    return "Pareto";
  case Family::Uniform:
    return "Uniform";
  case Family::Laplace:
    return "Laplace";
  case Family::TruncatedNormal:
    return "TruncatedNormal";
  }
  return "?";
}

Distribution::Distribution(Family family, std::initializer_list<double> params)
    : family_(family), count_(params.size()) {
  std::copy(params.begin(), params.end(), p_.begin());
  validate();
}

Distribution::Distribution(Family family, std::span<const double> params)
    : family_(family), count_(params.size()) {
  if (params.size() != expected_count(family)) {
    throw DomainError(to_string(family) + ": wrong number of parameters");
  }
  std::copy(params.begin(), params.end(), p_.begin());
  validate();
}

Distribution Distribution::normal(double mean, double variance) {
  return {Family::Normal, {mean, variance}};
}
Distribution Distribution::beta(double a, double b) { return {Family::Beta, {a, b}}; }
Distribution Distribution::gamma(double shape, double rate) {
  return {Family::Gamma, {shape, rate}};
}
Distribution Distribution::binomial(double n, double theta) {
  return {Family::Binomial, {n, theta}};
}
Distribution Distribution::neg_binomial(double r, double theta) {
  return {Family::NegBinomial, {r, theta}};
}
Distribution Distribution::poisson(double rate) { return {Family::Poisson, {rate}}; }
Distribution Distribution::pareto(double a, double b) { return {Family::Pareto, {a, b}}; }
Distribution Distribution::uniform(double lower, double upper) {
  return {Family::Uniform, {lower, upper}};
}
Distribution Distribution::laplace(double location, double scale) {
  return {Family::Laplace, {location, scale}};
}
Distribution Distribution::truncated_normal(double mean, double variance, double lower,
                                            double upper) {
  return {Family::TruncatedNormal, {mean, variance, lower, upper}};
}

void Distribution::validate() const {
  const double a = p_[0];
  const double b = p_[1];
  auto fail = [&](const char* why) { throw DomainError(to_string(family_) + ": " + why); };
  auto positive = [](double v) { return v > 0.0 && std::isfinite(v); };
  switch (family_) {
  case Family::Normal:
    if (!std::isfinite(a)) fail("mean must be finite");
    if (!positive(b)) fail("variance must be positive");
    break;
  case Family::Beta:
  case Family::Gamma:
  case Family::Pareto:
    if (!positive(a) || !positive(b)) fail("parameters must be positive");
    break;
  case Family::Binomial:
    if (!is_integer(a) || a < 1.0) fail("n must be an integer >= 1");
    if (!(b >= 0.0 && b <= 1.0)) fail("theta must lie in [0, 1]");
    break;
  case Family::NegBinomial:
    if (!is_integer(a) || a < 1.0) fail("r must be an integer >= 1");
    if (!(b > 0.0 && b <= 1.0)) fail("theta must lie in (0, 1]");
    break;
  case Family::Poisson:
    if (!positive(a)) fail("rate must be positive");
    break;
  case Family::Uniform:
    if (!std::isfinite(a) || !std::isfinite(b) || !(a < b)) fail("need finite lower < upper");
    break;
  case Family::Laplace:
    if (!std::isfinite(a)) fail("location must be finite");
    if (!positive(b)) fail("scale must be positive");
    break;
  case Family::TruncatedNormal:
    if (!std::isfinite(a)) fail("mean must be finite");
    if (!positive(b)) fail("variance must be positive");
    if (std::isnan(p_[2]) || std::isnan(p_[3]) || !(p_[2] < p_[3])) fail("need lower < upper");
    if (tn_log_mass() == -kInf) fail("truncation interval carries no mass");
    break;
  }
}

Support Distribution::support() const {
  switch (family_) {
  case Family::Normal:
  case Family::Laplace:
    return {-kInf, kInf, false};
  case Family::Beta:
    return {0.0, 1.0, false};
  case Family::Gamma:
    return {0.0, kInf, false};
  case Family::Binomial:
    return {0.0, p_[0], true};
  case Family::NegBinomial:
    return {p_[0], kInf, true};
  case Family::Poisson:
    return {0.0, kInf, true};
  case Family::Pareto:
    return {p_[1], kInf, false};
  case Family::Uniform:
    return {p_[0], p_[1], false};
  case Family::TruncatedNormal:
    return {p_[2], p_[3], false};
  }
  return {-kInf, kInf, false};
}

bool Distribution::is_discrete() const {
  return family_ == Family::Binomial || family_ == Family::NegBinomial ||
         family_ == Family::Poisson;
}

double Distribution::tn_log_mass() const {
  const double sd = std::sqrt(p_[1]);
  return sp::log_normal_interval((p_[2] - p_[0]) / sd, (p_[3] - p_[0]) / sd);
}

double Distribution::log_pdf(double x) const {
  if (std::isnan(x)) return std::numeric_limits<double>::quiet_NaN();
  const double a = p_[0];
  const double b = p_[1];
  switch (family_) {
  case Family::Normal: {
    const double z = x - a;
    return -0.5 * std::log(2.0 * M_PI * b) - 0.5 * z * z / b;
  }
  case Family::Beta: {
    if (x < 0.0 || x > 1.0) return -kInf;
    if ((x == 0.0 && a < 1.0) || (x == 1.0 && b < 1.0)) return kInf;
    return xlogy(a - 1.0, x) + xlog1py(b - 1.0, -x) - sp::log_beta(a, b);
  }
  case Family::Gamma: {
    if (x < 0.0) return -kInf;
    if (x == 0.0) {
      if (a < 1.0) return kInf;
      if (a == 1.0) return std::log(b);
      return -kInf;
    }
    return a * std::log(b) - sp::log_gamma(a) + (a - 1.0) * std::log(x) - b * x;
  }
  case Family::Binomial: {
    if (!is_integer(x) || x < 0.0 || x > a) return -kInf;
    if (b == 0.0) return x == 0.0 ? 0.0 : -kInf;
    if (b == 1.0) return x == a ? 0.0 : -kInf;
    return sp::log_choose(a, x) + x * std::log(b) + (a - x) * std::log1p(-b);
  }
  case Family::NegBinomial: {
    if (!is_integer(x) || x < a) return -kInf;
    if (b == 1.0) return x == a ? 0.0 : -kInf;
    return sp::log_choose(x - 1.0, a - 1.0) + a * std::log(b) + (x - a) * std::log1p(-b);
  }
  case Family::Poisson: {
    if (!is_integer(x) || x < 0.0) return -kInf;
    return x * std::log(a) - a - sp::log_gamma(x + 1.0);
  }
  case Family::Pareto:
    if (x < b) return -kInf;
    return std::log(a) + a * std::log(b) - (a + 1.0) * std::log(x);
  case Family::Uniform:
    if (x < a || x > b) return -kInf;
    return -std::log(b - a);
  case Family::Laplace:
    return -std::log(2.0 * b) - std::fabs(x - a) / b;
  case Family::TruncatedNormal: {
    if (x < p_[2] || x > p_[3]) return -kInf;
    const double z = x - a;
    return -0.5 * std::log(2.0 * M_PI * b) - 0.5 * z * z / b - tn_log_mass();
  }
  }
  return -kInf;
}

double Distribution::pdf(double x) const { return std::exp(log_pdf(x)); }

double Distribution::cdf(double x) const {
  if (std::isnan(x)) return std::numeric_limits<double>::quiet_NaN();
  const double a = p_[0];
  const double b = p_[1];
  switch (family_) {
  case Family::Normal:
    return sp::normal_cdf((x - a) / std::sqrt(b));
  case Family::Beta:
    return sp::inc_beta(a, b, x);
  case Family::Gamma:
    return sp::inc_gamma_p(a, b * x);
  case Family::Binomial: {
    const double k = std::floor(x);
    if (k < 0.0) return 0.0;
    if (k >= a) return 1.0;
    if (b == 0.0) return 1.0;
    if (b == 1.0) return 0.0;
    return sp::inc_beta(a - k, k + 1.0, 1.0 - b);
  }
  case Family::NegBinomial: {
    const double k = std::floor(x);
    if (k < a) return 0.0;
    if (k == kInf || b == 1.0) return 1.0;
    return sp::inc_beta(a, k - a + 1.0, b);
  }
  case Family::Poisson: {
    const double k = std::floor(x);
    if (k < 0.0) return 0.0;
    return sp::inc_gamma_q(k + 1.0, a);
  }
  case Family::Pareto:
    if (x <= b) return 0.0;
    return -std::expm1(a * std::log(b / x));
  case Family::Uniform:
    if (x <= a) return 0.0;
    if (x >= b) return 1.0;
    return (x - a) / (b - a);
  case Family::Laplace:
    if (x < a) return 0.5 * std::exp((x - a) / b);
    return 1.0 - 0.5 * std::exp(-(x - a) / b);
  case Family::TruncatedNormal: {
    if (x <= p_[2]) return 0.0;
    if (x >= p_[3]) return 1.0;
    const double sd = std::sqrt(b);
    const double lo = (p_[2] - a) / sd;
    return std::exp(sp::log_normal_interval(lo, (x - a) / sd) - tn_log_mass());
  }
  }
  return 0.0;
}

double Distribution::quantile(double p) const {
  if (!(p > 0.0 && p < 1.0)) throw DomainError("quantile: p must lie in (0, 1)");
  const double a = p_[0];
  const double b = p_[1];
  switch (family_) {
  case Family::Normal:
    return a + std::sqrt(b) * sp::normal_quantile(p);
  case Family::Pareto:
    return b * std::exp(-std::log1p(-p) / a);
  case Family::Uniform:
    return a + p * (b - a);
  case Family::Laplace:
    if (p < 0.5) return a + b * std::log(2.0 * p);
    return a - b * std::log(2.0 * (1.0 - p));
  case Family::Binomial:
  case Family::NegBinomial:
  case Family::Poisson:
    return discrete_quantile(p);
  default:
    return continuous_quantile(p);
  }
}

double Distribution::continuous_quantile(double p) const {
  Support s = support();
  double lo = s.lower;
  double hi = s.upper;
  if (family_ == Family::TruncatedNormal) {
    const double sd = std::sqrt(p_[1]);
    lo = std::max(lo, p_[0] - 40.0 * sd);
    hi = std::min(hi, p_[0] + 40.0 * sd);
  }
  if (!std::isfinite(hi)) {
    hi = std::max(1.0, mean() + 10.0 * std::sqrt(variance()));
    while (cdf(hi) < p) hi *= 2.0;
  }
  double x = 0.5 * (lo + hi);
  for (int it = 0; it < 400; ++it) {
    const double f = cdf(x) - p;
    if (f == 0.0) return x;
    if (f < 0.0) {
      lo = x;
    } else {
      hi = x;
    }
    if (hi - lo <= 4.0 * std::numeric_limits<double>::epsilon() * std::max(std::fabs(lo), std::fabs(hi))) {
      break;
    }
    const double dens = pdf(x);
    double next = (dens > 0.0 && std::isfinite(dens)) ? x - f / dens : 0.5 * (lo + hi);
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    if (next == x) break;
    x = next;
  }
  // Keep the bracket endpoint whose cdf is closest to p.
  double best = x;
  double best_err = std::fabs(cdf(x) - p);
  for (double c : {lo, hi}) {
    const double e = std::fabs(cdf(c) - p);
    if (e < best_err) {
      best = c;
      best_err = e;
    }
  }
  return best;
}

double Distribution::discrete_quantile(double p) const {
  const Support s = support();
  double lo = s.lower;
  double hi;
  if (std::isfinite(s.upper)) {
    hi = s.upper;
  } else {
    hi = std::max(lo + 1.0, std::ceil(mean() + 10.0 * std::sqrt(variance())));
    while (cdf(hi) < p) hi = lo + 2.0 * (hi - lo);
  }
  if (cdf(lo) >= p) return lo;
  // Invariant: cdf(lo) < p <= cdf(hi).
  while (hi - lo > 1.0) {
    const double mid = std::floor(0.5 * (lo + hi));
    if (cdf(mid) >= p) {
      hi = mid;
    } else {
      lo = mid;
    }
  }
  return hi;
}

std::vector<double> Distribution::sample(RandomStream& s, std::size_t count) const {
  std::vector<double> out;
  out.reserve(count);
  if (count == 0) return out;
  const double a = p_[0];
  const double b = p_[1];
  switch (family_) {
  case Family::Normal: {
    const double sd = std::sqrt(b);
    for (std::size_t i = 0; i < count; ++i) out.push_back(a + sd * s.normal());
    break;
  }
  case Family::Beta:
    for (std::size_t i = 0; i < count; ++i) {
      const double x = gamma_draw(a, s);
      const double y = gamma_draw(b, s);
      out.push_back(x / (x + y));
    }
    break;
  case Family::Gamma:
    for (std::size_t i = 0; i < count; ++i) out.push_back(gamma_draw(a, s) / b);
    break;
  case Family::Binomial: {
    if (b == 0.0 || b == 1.0) {
      out.assign(count, b == 0.0 ? 0.0 : a);
      break;
    }
    const double m = mode();
    const double pm = pdf(m);
    const double cm = cdf(m);
    const double odds = b / (1.0 - b);
    auto up = [&](double k) { return (a - k) / (k + 1.0) * odds; };
    auto down = [&](double k) { return k / (a - k + 1.0) / odds; };
    for (std::size_t i = 0; i < count; ++i) {
      out.push_back(invert_from_mode(s.uniform_pos(), m, pm, cm, 0.0, a, up, down));
    }
    break;
  }
  case Family::Poisson: {
    const double m = mode();
    const double pm = pdf(m);
    const double cm = cdf(m);
    const double cap = m + 60.0 * std::sqrt(a) + 100.0;
    auto up = [&](double k) { return a / (k + 1.0); };
    auto down = [&](double k) { return k / a; };
    for (std::size_t i = 0; i < count; ++i) {
      out.push_back(invert_from_mode(s.uniform_pos(), m, pm, cm, 0.0, cap, up, down));
    }
    break;
  }
  case Family::NegBinomial: {
    // Sum of r geometric trial counts, each drawn by inversion.
    const double log_fail = std::log1p(-b);
    for (std::size_t i = 0; i < count; ++i) {
      double total = 0.0;
      for (double j = 0; j < a; j += 1.0) {
        total += b == 1.0 ? 1.0 : std::max(1.0, std::ceil(std::log(s.uniform_pos()) / log_fail));
      }
      out.push_back(total);
    }
    break;
  }
  case Family::Pareto:
    for (std::size_t i = 0; i < count; ++i) {
      out.push_back(b * std::exp(-std::log(s.uniform_pos()) / a));
    }
    break;
  case Family::Uniform:
    for (std::size_t i = 0; i < count; ++i) out.push_back(a + (b - a) * s.uniform());
    break;
  case Family::Laplace:
    for (std::size_t i = 0; i < count; ++i) {
      const double u = s.uniform_pos() - 0.5;
      const double mag = -b * std::log1p(-2.0 * std::fabs(u));
      out.push_back(u < 0.0 ? a - mag : a + mag);
    }
    break;
  case Family::TruncatedNormal: {
    const double sd = std::sqrt(b);
    const double alpha = (p_[2] - a) / sd;
    const double beta = (p_[3] - a) / sd;
    // Work in whichever tail keeps the truncation probabilities away from 1.
    const bool mirror = alpha > 0.0;
    const double lo = mirror ? -beta : alpha;
    const double hi = mirror ? -alpha : beta;
    const double flo = sp::normal_cdf(lo);
    const double fhi = sp::normal_cdf(hi);
    for (std::size_t i = 0; i < count; ++i) {
      const double u = flo + s.uniform_pos() * (fhi - flo);
      double z = sp::normal_quantile(std::clamp(u, 1e-300, 1.0 - 1e-16));
      z = std::clamp(z, lo, hi);
      if (mirror) z = -z;
      out.push_back(a + sd * z);
    }
    break;
  }
  }
  return out;
}

double Distribution::mean() const {
  const double a = p_[0];
  const double b = p_[1];
  switch (family_) {
  case Family::Normal:
  case Family::Laplace:
    return a;
  case Family::Beta:
    return a / (a + b);
  case Family::Gamma:
    return a / b;
  case Family::Binomial:
    return a * b;
  case Family::NegBinomial:
    return a / b;
  case Family::Poisson:
    return a;
  case Family::Pareto:
    if (a <= 1.0) throw MomentUndefined("Pareto mean requires a > 1");
    return a * b / (a - 1.0);
  case Family::Uniform:
    return 0.5 * (a + b);
  case Family::TruncatedNormal: {
    const double sd = std::sqrt(b);
    const double al = (p_[2] - a) / sd;
    const double be = (p_[3] - a) / sd;
    const double lz = tn_log_mass();
    const double fa = std::isfinite(al) ? std::exp(-0.5 * al * al - sp::kLogSqrt2Pi - lz) : 0.0;
    const double fb = std::isfinite(be) ? std::exp(-0.5 * be * be - sp::kLogSqrt2Pi - lz) : 0.0;
    return std::clamp(a + sd * (fa - fb), p_[2], p_[3]);
  }
  }
  return 0.0;
}

double Distribution::variance() const {
  const double a = p_[0];
  const double b = p_[1];
  switch (family_) {
  case Family::Normal:
    return b;
  case Family::Laplace:
    return 2.0 * b * b;
  case Family::Beta:
    return a * b / ((a + b) * (a + b) * (a + b + 1.0));
  case Family::Gamma:
    return a / (b * b);
  case Family::Binomial:
    return a * b * (1.0 - b);
  case Family::NegBinomial:
    return a * (1.0 - b) / (b * b);
  case Family::Poisson:
    return a;
  case Family::Pareto:
    if (a <= 2.0) throw MomentUndefined("Pareto variance requires a > 2");
    return a * b * b / ((a - 1.0) * (a - 1.0) * (a - 2.0));
  case Family::Uniform:
    return (b - a) * (b - a) / 12.0;
  case Family::TruncatedNormal: {
    const double sd = std::sqrt(b);
    const double al = (p_[2] - a) / sd;
    const double be = (p_[3] - a) / sd;
    const double lz = tn_log_mass();
    const double fa = std::isfinite(al) ? std::exp(-0.5 * al * al - sp::kLogSqrt2Pi - lz) : 0.0;
    const double fb = std::isfinite(be) ? std::exp(-0.5 * be * be - sp::kLogSqrt2Pi - lz) : 0.0;
    const double ta = std::isfinite(al) ? al * fa : 0.0;
    const double tb = std::isfinite(be) ? be * fb : 0.0;
    const double r = fa - fb;
    return std::max(0.0, b * (1.0 + ta - tb - r * r));
  }
  }
  return 0.0;
}

double Distribution::mode() const {
  const double a = p_[0];
  const double b = p_[1];
  switch (family_) {
  case Family::Normal:
  case Family::Laplace:
    return a;
  case Family::Beta:
    if (a > 1.0 && b > 1.0) return (a - 1.0) / (a + b - 2.0);
    if (a <= 1.0 && b > 1.0) return 0.0;
    if (a > 1.0 && b <= 1.0) return 1.0;
    if (a == 1.0 && b == 1.0) return 0.0;
    return a <= b ? 0.0 : 1.0;
  case Family::Gamma:
    return std::max(0.0, (a - 1.0) / b);
  case Family::Binomial: {
    const double t = (a + 1.0) * b;
    double m = std::floor(t);
    if (m == t && m > 0.0) m -= 1.0;
    return std::clamp(m, 0.0, a);
  }
  case Family::NegBinomial: {
    if (a <= 1.0 || b == 1.0) return a;
    const double t = (a - 1.0) * (1.0 - b) / b;
    double m = std::floor(t);
    if (m == t && m > 0.0) m -= 1.0;
    return a + m;
  }
  case Family::Poisson: {
    double m = std::floor(a);
    if (m == a && m > 0.0) m -= 1.0;
    return m;
  }
  case Family::Pareto:
    return b;
  case Family::Uniform:
    return a;
  case Family::TruncatedNormal:
    return std::clamp(a, p_[2], p_[3]);
  }
  return 0.0;
}

std::string Distribution::describe() const {
  std::ostringstream os;
  os.precision(10);
  os << to_string(family_) << '(';
  for (std::size_t i = 0; i < count_; ++i) os << (i ? ", " : "") << p_[i];
  os << ')';
  return os.str();
}

bool Distribution::operator==(const Distribution& o) const {
  return family_ == o.family_ && count_ == o.count_ && p_ == o.p_;
}

} // namespace bk
