#pragma once

#include "bk/distribution.hpp"
#include "bk/grid.hpp"
#include "bk/random.hpp"

#include <cstdint>
#include <functional>
#include <vector>

namespace bk {

struct Interval {
  double lower;
  double upper;
  double length() const { return upper - lower; }
  bool contains(double x) const { return x >= lower && x <= upper; }
};

enum class CredibleKind { HPD, EqualTailed };

struct CredibleSet {
  std::vector<Interval> intervals; //!< sorted, disjoint
  double level = 0.0;              //!< 1 - alpha
  CredibleKind kind = CredibleKind::EqualTailed;
  double achieved_mass = 0.0;
  double threshold = 0.0; //!< waterline density c_alpha (HPD only)

  double total_length() const;
  bool contains(double x) const;
};

CredibleSet equal_tailed(const Distribution& d, double alpha);
CredibleSet equal_tailed(const GridPosterior& p, double alpha);

//! A univariate density known through its pdf and cdf; [lower, upper] is the range scanned for
//! superlevel crossings and should hold all but a negligible amount of mass.
struct DensityFunction {
  std::function<double(double)> pdf;
  std::function<double(double)> cdf;
  double lower;
  double upper;
  std::vector<double> extra_scan_points = {};
};

//! Waterline construction: bisect the threshold c so that {density >= c} holds mass 1 - alpha.
//! Masses come from cdf differences, crossings from bisection on the pdf.
CredibleSet hpd(const DensityFunction& f, double alpha);
CredibleSet hpd(const Distribution& d, double alpha);
//! Grid version: cells taken in decreasing density order (ties to the lower index), reported
//! as maximal runs of selected support points.
CredibleSet hpd(const GridPosterior& p, double alpha);

//! (0, 1 - alpha^(1/(n+1))): the HPD set of Beta(1, n + 1).
CredibleSet hpd_beta_boundary(std::int64_t n, double alpha);

struct CoverageResult {
  double coverage = 0.0;
  double mc_stderr = 0.0;
  std::size_t reps = 0;
};

//! Interval rule for binomial data: (n, y, level) -> interval.
using BinomialIntervalRule = std::function<Interval(std::int64_t, std::int64_t, double)>;

//! Equal-tailed or HPD interval from the Beta(a + y, b + n - y) posterior.
BinomialIntervalRule beta_binomial_rule(double a, double b, CredibleKind kind);

//! Fraction of y ~ Binomial(n, theta_true) replicates whose interval covers theta_true.
CoverageResult coverage_simulation(const BinomialIntervalRule& rule, double theta_true,
                                   std::int64_t n, double level, std::size_t reps,
                                   RandomStream& stream);

struct CoverageSweep {
  std::vector<std::int64_t> n;
  std::vector<CoverageResult> results;
  //! Least-squares slope of |coverage - level| against 1/n.
  double slope_vs_inverse_n = 0.0;
};

CoverageSweep coverage_sweep(const BinomialIntervalRule& rule, double theta_true,
                             const std::vector<std::int64_t>& ns, double level, std::size_t reps,
                             RandomStream& stream);

} // namespace bk
