#include "bk/grid.hpp"

#include "bk/errors.hpp"
#include "bk/special.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace bk {

std::vector<double> linspace(double lo, double hi, std::size_t n) {
  if (n == 0) return {};
  if (n == 1) return {lo};
  std::vector<double> v(n);
  const double step = (hi - lo) / static_cast<double>(n - 1);
  for (std::size_t i = 0; i < n; ++i) v[i] = lo + step * static_cast<double>(i);
  v.back() = hi;
  return v;
}

GridPosterior::GridPosterior(std::vector<double> support, std::vector<double> masses,
                             bool continuous)
    : support_(std::move(support)), masses_(std::move(masses)), continuous_(continuous),
      resolution_(std::numeric_limits<double>::infinity()) {
  if (support_.empty()) throw DomainError("grid: empty support");
  if (support_.size() != masses_.size()) throw DomainError("grid: support/mass size mismatch");
  for (std::size_t i = 0; i < support_.size(); ++i) {
    if (!std::isfinite(support_[i])) throw DomainError("grid: support must be finite");
    if (i > 0) {
      if (!(support_[i] > support_[i - 1])) throw DomainError("grid: support must increase");
      resolution_ = std::min(resolution_, support_[i] - support_[i - 1]);
    }
  }
  double total = 0.0;
  for (double m : masses_) {
    if (!(m >= 0.0) || !std::isfinite(m)) throw DomainError("grid: masses must be finite and >= 0");
    total += m;
  }
  if (!(total > 0.0)) throw DomainError("grid: total mass is zero");
  for (double& m : masses_) m /= total;
}

GridPosterior GridPosterior::from_weights(std::vector<double> support, std::vector<double> weights,
                                          bool continuous) {
  return GridPosterior(std::move(support), std::move(weights), continuous);
}

GridPosterior GridPosterior::from_log_weights(std::vector<double> support,
                                              const std::vector<double>& log_weights,
                                              bool continuous) {
  double m = -std::numeric_limits<double>::infinity();
  for (double x : log_weights) m = std::max(m, x);
  if (!std::isfinite(m)) throw DomainError("grid: no finite log weight");
  std::vector<double> w(log_weights.size());
  for (std::size_t i = 0; i < w.size(); ++i) w[i] = std::exp(log_weights[i] - m);
  return GridPosterior(std::move(support), std::move(w), continuous);
}

GridPosterior GridPosterior::from_log_density(std::vector<double> support,
                                              const std::function<double(double)>& log_density) {
  // Widths first, from a provisional grid with unit masses.
  GridPosterior shape(support, std::vector<double>(support.size(), 1.0), true);
  std::vector<double> lw(support.size());
  for (std::size_t i = 0; i < support.size(); ++i) {
    lw[i] = log_density(support[i]) + std::log(shape.width(i));
  }
  return from_log_weights(std::move(support), lw, true);
}

GridPosterior GridPosterior::from_distribution(const Distribution& d, double lo, double hi,
                                               std::size_t n) {
  if (d.is_discrete()) {
    std::vector<double> s;
    std::vector<double> m;
    const Support sup = d.support();
    const double a = std::max(std::ceil(lo), sup.lower);
    const double b = std::min(std::floor(hi), sup.upper);
    for (double k = a; k <= b; k += 1.0) {
      s.push_back(k);
      m.push_back(d.pdf(k));
    }
    return GridPosterior(std::move(s), std::move(m), false);
  }
  std::vector<double> s = linspace(lo, hi, n);
  GridPosterior shape(s, std::vector<double>(s.size(), 1.0), true);
  std::vector<double> m(s.size());
  for (std::size_t i = 0; i < s.size(); ++i) {
    m[i] = std::max(0.0, d.cdf(shape.cell_upper(i)) - d.cdf(shape.cell_lower(i)));
  }
  return GridPosterior(std::move(s), std::move(m), true);
}

double GridPosterior::cell_lower(std::size_t i) const {
  if (support_.size() == 1) return support_[0] - 0.5;
  if (i == 0) return support_[0] - 0.5 * (support_[1] - support_[0]);
  return 0.5 * (support_[i - 1] + support_[i]);
}

double GridPosterior::cell_upper(std::size_t i) const {
  const std::size_t n = support_.size();
  if (n == 1) return support_[0] + 0.5;
  if (i + 1 == n) return support_[n - 1] + 0.5 * (support_[n - 1] - support_[n - 2]);
  return 0.5 * (support_[i] + support_[i + 1]);
}

double GridPosterior::density(std::size_t i) const {
  return continuous_ ? masses_[i] / width(i) : masses_[i];
}

std::vector<double> GridPosterior::cumulative() const {
  std::vector<double> c(masses_.size());
  double s = 0.0;
  for (std::size_t i = 0; i < masses_.size(); ++i) {
    s += masses_[i];
    c[i] = s;
  }
  return c;
}

double GridPosterior::mean() const {
  double m = 0.0;
  for (std::size_t i = 0; i < size(); ++i) m += support_[i] * masses_[i];
  return m;
}

double GridPosterior::variance() const {
  const double m = mean();
  double v = 0.0;
  for (std::size_t i = 0; i < size(); ++i) v += (support_[i] - m) * (support_[i] - m) * masses_[i];
  return v;
}

GridPosterior GridPosterior::map_support(const std::function<double(double)>& f) const {
  std::vector<double> s(size());
  for (std::size_t i = 0; i < size(); ++i) s[i] = f(support_[i]);
  std::vector<double> m = masses_;
  if (s.size() > 1 && s[1] < s[0]) {
    std::reverse(s.begin(), s.end());
    std::reverse(m.begin(), m.end());
  }
  return GridPosterior(std::move(s), std::move(m), continuous_);
}

} // namespace bk
