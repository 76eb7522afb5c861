#include "bk/credible.hpp"

#include "bk/errors.hpp"
#include "bk/estimate.hpp"
#include "bk/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <optional>

namespace bk {

namespace {

constexpr std::size_t kScanPoints = 4000;
constexpr int kMaxWaterlineIter = 200;
constexpr double kMassTol = 1e-10;

void check_alpha(double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw DomainError("alpha must lie in (0, 1)");
}

struct Scan {
  std::vector<double> x;
  std::vector<double> d;
};

// pdf(below) < c <= pdf(above); the two points may come in either order.
double refine_crossing(const std::function<double(double)>& pdf, double c, double below,
                       double above) {
  for (int i = 0; i < 80; ++i) {
    const double mid = 0.5 * (below + above);
    if (mid == below || mid == above) break;
    if (pdf(mid) >= c) {
      above = mid;
    } else {
      below = mid;
    }
  }
  return above;
}

std::vector<Interval> superlevel(const DensityFunction& f, const Scan& s, double c) {
  std::vector<Interval> out;
  bool open = false;
  double start = 0.0;
  for (std::size_t j = 0; j < s.x.size(); ++j) {
    const bool above = s.d[j] >= c;
    if (above && !open) {
      start = j == 0 ? s.x[0] : refine_crossing(f.pdf, c, s.x[j - 1], s.x[j]);
      open = true;
    } else if (!above && open) {
      out.push_back({start, refine_crossing(f.pdf, c, s.x[j], s.x[j - 1])});
      open = false;
    }
  }
  if (open) out.push_back({start, s.x.back()});
  return out;
}

double mass_of(const DensityFunction& f, const std::vector<Interval>& iv) {
  double m = 0.0;
  for (const auto& i : iv) m += f.cdf(i.upper) - f.cdf(i.lower);
  return m;
}

// Plateau tie-break: keep the leftmost part of the set until it holds `target` mass.
std::vector<Interval> trim_from_left(const DensityFunction& f, const std::vector<Interval>& iv,
                                     double target) {
  std::vector<Interval> out;
  double acc = 0.0;
  for (const auto& i : iv) {
    const double base = f.cdf(i.lower);
    const double m = f.cdf(i.upper) - base;
    if (acc + m < target) {
      out.push_back(i);
      acc += m;
      continue;
    }
    const double goal = base + (target - acc);
    const double upper = numeric::bisect([&](double x) { return f.cdf(x) - goal; }, i.lower, i.upper);
    out.push_back({i.lower, upper});
    break;
  }
  return out;
}

Interval hull(const CredibleSet& s) {
  return {s.intervals.front().lower, s.intervals.back().upper};
}

} // namespace

double CredibleSet::total_length() const {
  double t = 0.0;
  for (const auto& i : intervals) t += i.length();
  return t;
}

bool CredibleSet::contains(double x) const {
  return std::any_of(intervals.begin(), intervals.end(),
                     [&](const Interval& i) { return i.contains(x); });
}

CredibleSet equal_tailed(const Distribution& d, double alpha) {
  check_alpha(alpha);
  CredibleSet s;
  s.kind = CredibleKind::EqualTailed;
  s.level = 1.0 - alpha;
  const double lo = d.quantile(0.5 * alpha);
  const double hi = d.quantile(1.0 - 0.5 * alpha);
  s.intervals.push_back({lo, hi});
  s.achieved_mass = d.cdf(hi) - (d.is_discrete() ? d.cdf(lo - 1.0) : d.cdf(lo));
  s.threshold = std::numeric_limits<double>::quiet_NaN();
  return s;
}

CredibleSet equal_tailed(const GridPosterior& p, double alpha) {
  check_alpha(alpha);
  CredibleSet s;
  s.kind = CredibleKind::EqualTailed;
  s.level = 1.0 - alpha;
  const double lo = grid_quantile(p, 0.5 * alpha);
  const double hi = grid_quantile(p, 1.0 - 0.5 * alpha);
  s.intervals.push_back({lo, hi});
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (p.support()[i] >= lo && p.support()[i] <= hi) s.achieved_mass += p.masses()[i];
  }
  s.threshold = std::numeric_limits<double>::quiet_NaN();
  return s;
}

CredibleSet hpd(const DensityFunction& f, double alpha) {
  check_alpha(alpha);
  if (!(f.lower < f.upper)) throw DomainError("hpd: empty scan range");
  const double target = 1.0 - alpha;
  Scan scan;
  scan.x = linspace(f.lower, f.upper, kScanPoints);
  for (double x : f.extra_scan_points) {
    if (x > f.lower && x < f.upper) scan.x.push_back(x);
  }
  std::sort(scan.x.begin(), scan.x.end());
  scan.x.erase(std::unique(scan.x.begin(), scan.x.end()), scan.x.end());
  double dmax = 0.0;
  for (double x : scan.x) {
    const double v = f.pdf(x);
    scan.d.push_back(v);
    if (std::isfinite(v)) dmax = std::max(dmax, v);
  }
  if (!(dmax > 0.0)) throw NumericError("hpd: density vanishes on the scan range");

  double c_lo = 0.0;
  double c_hi = dmax;
  std::vector<Interval> best_set = superlevel(f, scan, c_lo);
  double best_mass = mass_of(f, best_set);
  double best_c = c_lo;
  for (int it = 0; it < kMaxWaterlineIter; ++it) {
    const double c = 0.5 * (c_lo + c_hi);
    const auto set = superlevel(f, scan, c);
    const double m = mass_of(f, set);
    if (m >= target) {
      c_lo = c;
      best_set = set;
      best_mass = m;
      best_c = c;
      if (m - target < kMassTol) break;
    } else {
      c_hi = c;
    }
    if (c_hi - c_lo <= 1e-15 * dmax) break;
  }

  CredibleSet s;
  s.kind = CredibleKind::HPD;
  s.level = target;
  s.threshold = best_c;
  if (best_mass - target > 1e-8) {
    // The mass jumps across the threshold: a density plateau.
    best_set = trim_from_left(f, best_set, target);
    best_mass = mass_of(f, best_set);
  }
  s.intervals = std::move(best_set);
  s.achieved_mass = best_mass;
  return s;
}

CredibleSet hpd(const Distribution& d, double alpha) {
  check_alpha(alpha);
  if (d.is_discrete()) {
    const double lo = d.quantile(1e-14);
    const double hi = d.quantile(1.0 - 1e-14);
    return hpd(GridPosterior::from_distribution(d, lo, hi, 0), alpha);
  }
  const Support sup = d.support();
  DensityFunction f;
  f.pdf = [&](double x) { return d.pdf(x); };
  f.cdf = [&](double x) { return d.cdf(x); };
  f.lower = std::isfinite(sup.lower) ? sup.lower : d.quantile(1e-14);
  f.upper = std::isfinite(sup.upper) ? sup.upper : d.quantile(1.0 - 1e-14);
  for (double u : linspace(0.001, 0.999, 400)) f.extra_scan_points.push_back(d.quantile(u));
  return hpd(f, alpha);
}

CredibleSet hpd(const GridPosterior& p, double alpha) {
  check_alpha(alpha);
  const double target = 1.0 - alpha;
  std::vector<std::size_t> order(p.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return p.density(a) > p.density(b); });
  std::vector<bool> chosen(p.size(), false);
  double acc = 0.0;
  double c = 0.0;
  for (std::size_t idx : order) {
    chosen[idx] = true;
    acc += p.masses()[idx];
    c = p.density(idx);
    if (acc >= target - 1e-15) break;
  }
  CredibleSet s;
  s.kind = CredibleKind::HPD;
  s.level = target;
  s.achieved_mass = acc;
  s.threshold = c;
  const auto& x = p.support();
  for (std::size_t i = 0; i < p.size();) {
    if (!chosen[i]) {
      ++i;
      continue;
    }
    std::size_t j = i;
    while (j + 1 < p.size() && chosen[j + 1]) ++j;
    s.intervals.push_back({x[i], x[j]});
    i = j + 1;
  }
  return s;
}

CredibleSet hpd_beta_boundary(std::int64_t n, double alpha) {
  check_alpha(alpha);
  if (n < 1) throw DomainError("hpd_beta_boundary: n >= 1");
  CredibleSet s;
  s.kind = CredibleKind::HPD;
  s.level = 1.0 - alpha;
  const double upper = -std::expm1(std::log(alpha) / static_cast<double>(n + 1));
  s.intervals.push_back({0.0, upper});
  s.achieved_mass = 1.0 - alpha;
  s.threshold = static_cast<double>(n + 1) * std::pow(alpha, static_cast<double>(n) /
                                                                 static_cast<double>(n + 1));
  return s;
}

BinomialIntervalRule beta_binomial_rule(double a, double b, CredibleKind kind) {
  if (!(a > 0.0) || !(b > 0.0)) throw DomainError("beta_binomial_rule: a, b > 0");
  return [a, b, kind](std::int64_t n, std::int64_t y, double level) {
    const auto post = Distribution::beta(a + static_cast<double>(y), b + static_cast<double>(n - y));
    const auto set = kind == CredibleKind::HPD ? hpd(post, 1.0 - level) : equal_tailed(post, 1.0 - level);
    return hull(set);
  };
}

CoverageResult coverage_simulation(const BinomialIntervalRule& rule, double theta_true,
                                   std::int64_t n, double level, std::size_t reps,
                                   RandomStream& stream) {
  if (reps < 1000) throw DomainError("coverage_simulation: reps >= 1000");
  if (n < 1) throw DomainError("coverage_simulation: n >= 1");
  if (!(level > 0.0 && level < 1.0)) throw DomainError("coverage_simulation: level in (0, 1)");
  const auto law = Distribution::binomial(static_cast<double>(n), theta_true);
  const auto blocks = simulate_blocks<std::vector<double>>(
      reps, stream, [&](RandomStream& s, std::size_t b, std::size_t e) { return law.sample(s, e - b); });
  // The rule is deterministic in (n, y), so each distinct y is evaluated once.
  std::vector<std::optional<bool>> covers(static_cast<std::size_t>(n) + 1);
  std::size_t hits = 0;
  for (const auto& blk : blocks) {
    for (double yd : blk) {
      const auto y = static_cast<std::size_t>(yd);
      if (!covers[y]) covers[y] = rule(n, static_cast<std::int64_t>(y), level).contains(theta_true);
      if (*covers[y]) ++hits;
    }
  }
  CoverageResult r;
  r.reps = reps;
  r.coverage = static_cast<double>(hits) / static_cast<double>(reps);
  r.mc_stderr = std::sqrt(r.coverage * (1.0 - r.coverage) / static_cast<double>(reps));
  return r;
}

CoverageSweep coverage_sweep(const BinomialIntervalRule& rule, double theta_true,
                             const std::vector<std::int64_t>& ns, double level, std::size_t reps,
                             RandomStream& stream) {
  CoverageSweep sw;
  sw.n = ns;
  std::vector<double> xs;
  std::vector<double> ys;
  for (auto n : ns) {
    sw.results.push_back(coverage_simulation(rule, theta_true, n, level, reps, stream));
    xs.push_back(1.0 / static_cast<double>(n));
    ys.push_back(std::fabs(sw.results.back().coverage - level));
  }
  if (xs.size() >= 2) {
    const double mx = std::accumulate(xs.begin(), xs.end(), 0.0) / static_cast<double>(xs.size());
    const double my = std::accumulate(ys.begin(), ys.end(), 0.0) / static_cast<double>(ys.size());
    double sxy = 0.0;
    double sxx = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
      sxy += (xs[i] - mx) * (ys[i] - my);
      sxx += (xs[i] - mx) * (xs[i] - mx);
    }
    sw.slope_vs_inverse_n = sxx > 0.0 ? sxy / sxx : 0.0;
  }
  return sw;
}

} // namespace bk
