#pragma once

#include "bk/distribution.hpp"

#include <cstddef>
#include <functional>
#include <vector>

namespace bk {

//! Finite posterior on a strictly increasing support. For continuous grids each point stands
//! for a cell (bounded by midpoints to its neighbours) and mass = density * cell width.
class GridPosterior {
public:
  //! Normalises `weights` (nonnegative, positive sum).
  static GridPosterior from_weights(std::vector<double> support, std::vector<double> weights,
                                    bool continuous);
  static GridPosterior from_log_weights(std::vector<double> support,
                                        const std::vector<double>& log_weights, bool continuous);
  //! Continuous grid with mass proportional to exp(log_density) * cell width.
  static GridPosterior from_log_density(std::vector<double> support,
                                        const std::function<double(double)>& log_density);
  //! Continuous families: cell masses are cdf differences over the cells. Discrete families:
  //! the pmf at the integers of [lo, hi] (n is ignored).
  static GridPosterior from_distribution(const Distribution& d, double lo, double hi,
                                         std::size_t n);

  std::size_t size() const { return support_.size(); }
  const std::vector<double>& support() const { return support_; }
  const std::vector<double>& masses() const { return masses_; }
  bool continuous() const { return continuous_; }
  double resolution() const { return resolution_; }

  double cell_lower(std::size_t i) const;
  double cell_upper(std::size_t i) const;
  double width(std::size_t i) const { return cell_upper(i) - cell_lower(i); }
  //! mass / width for continuous grids, mass otherwise.
  double density(std::size_t i) const;

  //! Running sums of masses.
  std::vector<double> cumulative() const;

  double mean() const;
  double variance() const;

  //! Push the support through a strictly monotone map; masses travel with their points.
  GridPosterior map_support(const std::function<double(double)>& f) const;

private:
  GridPosterior(std::vector<double> support, std::vector<double> masses, bool continuous);

  std::vector<double> support_;
  std::vector<double> masses_;
  bool continuous_;
  double resolution_;
};

std::vector<double> linspace(double lo, double hi, std::size_t n);

} // namespace bk
