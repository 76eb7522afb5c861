#pragma once

#include "bk/random.hpp"

#include <cstddef>
#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace bk {

enum class Propriety { Proper, Improper, Unknown };
enum class PriorProvenance { Jeffreys, IndependenceJeffreys, Flat, UserSupplied };

std::string_view to_string(Propriety p);
std::string_view to_string(PriorProvenance p);

//! Unnormalised scalar prior. Only a prior flagged Proper carries a normalising constant;
//! asking an improper or unchecked prior for one throws ImproperPrior.
struct PriorSpec {
  std::string name;
  std::function<double(double)> log_kernel;
  double lower = -std::numeric_limits<double>::infinity();
  double upper = std::numeric_limits<double>::infinity();
  Propriety propriety = Propriety::Unknown;
  PriorProvenance provenance = PriorProvenance::UserSupplied;
  std::optional<double> log_normalizer = std::nullopt; //!< log of the kernel's integral

  double kernel(double x) const;
  //! Normalised log density; throws ImproperPrior unless proper.
  double log_density(double x) const;
  double density(double x) const;
};

enum class JeffreysFamily { Binomial, NegBinomial, NormalMeanVar, Location, Scale };

//! Closed-form Jeffreys priors. Binomial: Beta(1/2, 1/2), proper. NegBinomial:
//! theta^-1 (1 - theta)^-1/2, improper. NormalMeanVar: joint prior flat in the mean times
//! phi^-3/2 in the variance, represented by its phi part, improper. Location: constant.
//! Scale: 1 / theta.
PriorSpec jeffreys(JeffreysFamily family);
//! Independence Jeffreys prior; NormalMeanVar gives 1 / phi. Other families fall back to jeffreys.
PriorSpec independence_jeffreys(JeffreysFamily family);
//! Flat prior on (lower, upper); proper exactly when both ends are finite.
PriorSpec flat_prior(double lower, double upper);

//! Fisher information of a scalar parameter. Supply `enumerate` for an exact expectation over a
//! discrete sample space, or `sampler` for a Monte Carlo expectation.
struct FisherModel {
  std::function<double(double y, double theta)> log_likelihood;
  std::function<std::vector<std::pair<double, double>>(double theta)> enumerate = {};
  std::function<double(double theta, RandomStream&)> sampler = {};
  std::size_t mc_reps = 100000;
  double lower = -std::numeric_limits<double>::infinity(); //!< parameter space
  double upper = std::numeric_limits<double>::infinity();
};

//! Second derivative in theta by Richardson-extrapolated central differences.
double second_derivative(const std::function<double(double)>& f, double x, double lower = -std::numeric_limits<double>::infinity(),
                         double upper = std::numeric_limits<double>::infinity());

struct JeffreysTable {
  std::vector<double> theta;
  std::vector<double> information;
  std::vector<double> sqrt_information;
  std::vector<double> stderr_information; //!< zero for exact expectations

  //! Log-linear interpolation of sqrt(I) between grid points; propriety left Unknown.
  PriorSpec prior() const;
};

//! sqrt(I(theta)) on the grid, I(theta) = -E[d^2/dtheta^2 log p(y | theta)]. Throws NumericError
//! for a negative information estimate.
JeffreysTable jeffreys_numeric(const FisherModel& model, const std::vector<double>& theta_grid,
                               RandomStream* stream = nullptr);

struct MonotoneMap {
  std::function<double(double)> forward;
  std::function<double(double)> inverse;
  std::function<double(double)> derivative; //!< of forward
};

MonotoneMap logit_map();
MonotoneMap expit_map();

//! Density of phi = forward(theta): p(inverse(phi)) / |forward'(inverse(phi))|. Throws DomainError
//! when the map is not strictly monotone on the prior's support.
PriorSpec transform_prior(const PriorSpec& prior, const MonotoneMap& map);

enum class ProprietyVerdict { Proper, Improper, Inconclusive };
std::string_view to_string(ProprietyVerdict v);

struct ProprietyReport {
  ProprietyVerdict verdict = ProprietyVerdict::Inconclusive;
  double integral = std::numeric_limits<double>::quiet_NaN();
  double log_integral = std::numeric_limits<double>::quiet_NaN();
  double lower_exponent = std::numeric_limits<double>::quiet_NaN(); //!< local power at a finite lower end
  double upper_exponent = std::numeric_limits<double>::quiet_NaN(); //!< local power at a finite upper end
  double lower_tail_slope = std::numeric_limits<double>::quiet_NaN(); //!< log-log slope for an infinite lower end
  double upper_tail_slope = std::numeric_limits<double>::quiet_NaN();
  std::string diagnostic;
};

//! Finite ends: fit p ~ (distance)^c; c <= -1 diverges. Infinite ends: log-log slope at
//! distances up to 1e12; a slope >= -1 diverges. Otherwise the integral by quadrature certifies
//! propriety, and a quadrature failure leaves the verdict inconclusive.
ProprietyReport propriety_check(const std::function<double(double)>& log_density, double lower,
                                double upper);
ProprietyReport propriety_check(const PriorSpec& prior);

struct FisherDeterminantCheck {
  double numeric = 0.0;
  double closed_form = 0.0; //!< n^2 / (2 phi^3)
  double relative_error = 0.0;
};

//! Determinant of the (mu, phi) Fisher information of n Normal(mu, phi) observations by
//! Gauss-Hermite expectation of numerically differentiated log likelihoods.
FisherDeterminantCheck normal_fisher_determinant_numeric(double n, double mu, double phi);

//! Gauss-Hermite nodes and weights for the weight exp(-x^2), via Golub-Welsch.
std::pair<std::vector<double>, std::vector<double>> gauss_hermite(std::size_t order);

} // namespace bk
