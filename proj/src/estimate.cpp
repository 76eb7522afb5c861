#include "bk/estimate.hpp"

#include "bk/errors.hpp"

#include <cmath>
#include <sstream>

namespace bk {

LossFunction LossFunction::zero_one(double delta) {
  if (!(delta > 0.0) || !std::isfinite(delta)) throw DomainError("zero-one loss: delta > 0");
  LossFunction l;
  l.kind = LossKind::ZeroOne;
  l.delta = delta;
  return l;
}

LossFunction LossFunction::asymmetric_linear(double w_under, double w_over) {
  if (!(w_under > 0.0) || !(w_over > 0.0)) throw DomainError("asymmetric loss: weights > 0");
  LossFunction l;
  l.kind = LossKind::AsymmetricLinear;
  l.w_under = w_under;
  l.w_over = w_over;
  return l;
}

double LossFunction::operator()(double action, double theta) const {
  const double e = action - theta;
  switch (kind) {
  case LossKind::Squared:
    return e * e;
  case LossKind::Absolute:
    return std::fabs(e);
  case LossKind::ZeroOne:
    return std::fabs(e) <= 0.5 * delta ? 0.0 : 1.0;
  case LossKind::AsymmetricLinear:
    return e < 0.0 ? -w_under * e : w_over * e;
  }
  return 0.0;
}

std::string LossFunction::describe() const {
  std::ostringstream os;
  switch (kind) {
  case LossKind::Squared:
    return "Squared";
  case LossKind::Absolute:
    return "Absolute";
  case LossKind::ZeroOne:
    os << "ZeroOne(" << delta << ")";
    return os.str();
  case LossKind::AsymmetricLinear:
    os << "AsymmetricLinear(" << w_under << ", " << w_over << ")";
    return os.str();
  }
  return "?";
}

double posterior_mean(const GridPosterior& p) { return p.mean(); }
double posterior_mean(const Distribution& d) { return d.mean(); }

double grid_quantile(const GridPosterior& p, double q) {
  if (!(q >= 0.0 && q <= 1.0)) throw DomainError("grid_quantile: q in [0, 1]");
  const auto& s = p.support();
  const auto& m = p.masses();
  double c = 0.0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    c += m[i];
    // Guard against the last few ulps of rounding in the running sum.
    if (c >= q - 1e-15) return s[i];
  }
  return s.back();
}

double posterior_median(const GridPosterior& p) { return grid_quantile(p, 0.5); }

double posterior_median_interpolated(const GridPosterior& p) {
  const auto& s = p.support();
  const auto c = p.cumulative();
  if (c[0] >= 0.5) return s[0];
  for (std::size_t i = 1; i < s.size(); ++i) {
    if (c[i] >= 0.5) {
      const double t = (0.5 - c[i - 1]) / (c[i] - c[i - 1]);
      return s[i - 1] + t * (s[i] - s[i - 1]);
    }
  }
  return s.back();
}

double posterior_median(const Distribution& d) { return d.median(); }

double posterior_mode(const GridPosterior& p) {
  std::size_t best = 0;
  double best_d = p.density(0);
  for (std::size_t i = 1; i < p.size(); ++i) {
    const double d = p.density(i);
    // Densities that differ only by rounding in the cell widths count as ties.
    if (d > best_d * (1.0 + 1e-12)) {
      best = i;
      best_d = d;
    }
  }
  return p.support()[best];
}

double posterior_mode(const Distribution& d) { return d.mode(); }

double bayes_estimate(const GridPosterior& p, const LossFunction& loss) {
  switch (loss.kind) {
  case LossKind::Squared:
    return p.mean();
  case LossKind::Absolute:
    return posterior_median(p);
  case LossKind::AsymmetricLinear:
    return grid_quantile(p, loss.w_under / (loss.w_under + loss.w_over));
  case LossKind::ZeroOne: {
    // Two pointers over the sorted support: window [a - delta/2, a + delta/2] for a = s[i].
    const auto& s = p.support();
    const auto& m = p.masses();
    const double half = 0.5 * loss.delta;
    std::size_t lo = 0;
    std::size_t hi = 0;
    double window = 0.0;
    double best_mass = -1.0;
    std::size_t best = 0;
    for (std::size_t i = 0; i < s.size(); ++i) {
      while (hi < s.size() && s[hi] <= s[i] + half) window += m[hi++];
      while (s[lo] < s[i] - half) window -= m[lo++];
      // Recompute exactly when the running sum may have drifted below a competitor.
      double mass = window;
      if (std::fabs(mass - best_mass) <= 1e-12) {
        mass = 0.0;
        for (std::size_t k = lo; k < hi; ++k) mass += m[k];
      }
      if (mass > best_mass + 1e-15) {
        best_mass = mass;
        best = i;
      }
    }
    return s[best];
  }
  }
  return p.mean();
}

double posterior_expected_loss(const GridPosterior& p, const LossFunction& loss, double action) {
  double r = 0.0;
  const auto& s = p.support();
  const auto& m = p.masses();
  for (std::size_t i = 0; i < s.size(); ++i) r += loss(action, s[i]) * m[i];
  return r;
}

} // namespace bk
