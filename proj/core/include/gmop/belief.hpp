#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace gmop {

/// Scalar Gaussian. `variance` is the variance, not the standard deviation.
struct Gaussian {
  double mean = 0.0;
  double variance = 1.0;
};

double gaussian_pdf(double x, const Gaussian& g);
double gaussian_log_pdf(double x, const Gaussian& g);

struct Mode {
  double mean = 0.0;
  double variance = 1.0;
  double weight = 1.0;

  friend bool operator==(const Mode&, const Mode&) = default;
};

/// Gaussian-mixture belief over a scalar. Always holds at least one mode,
/// strictly positive variances and weights on the simplex.
///
/// The constructor accepts weights whose sum is within 1e-9 of one and
/// renormalizes them, so every stored belief sums to one up to rounding.
class GaussianMixture {
 public:
  explicit GaussianMixture(std::vector<Mode> modes);

  static GaussianMixture single(const Gaussian& g);

  std::size_t size() const noexcept { return modes_.size(); }
  std::span<const Mode> modes() const noexcept { return modes_; }
  const Mode& operator[](std::size_t i) const { return modes_.at(i); }

  friend bool operator==(const GaussianMixture&, const GaussianMixture&) = default;

 private:
  std::vector<Mode> modes_;
};

double mixture_pdf(double x, const GaussianMixture& b);
double mixture_mean(const GaussianMixture& b);

struct ObservationModel {
  double theta = 0.0;
  double sigma_y = 1.0;  // observation variance

  void validate() const;
};

/// Likelihood used to reweight modes after an observation.
///
/// Predictive: N(y | mean, variance + sigma_y), the exact Bayes posterior mass
/// of each component. PriorVariance: N(y | mean, variance), the likelihood
/// written with the mode's prior variance only.
enum class WeightLikelihood { Predictive, PriorVariance };

struct BayesUpdate {
  GaussianMixture posterior;
  bool degenerate = false;  // every likelihood was non-finite; weights reset to uniform
};

BayesUpdate bayes_update(const GaussianMixture& prior, double y, double sigma_y,
                         WeightLikelihood likelihood = WeightLikelihood::Predictive);

/// In-place conjugate update of one agent's modes stored as parallel spans.
/// Returns true when the weights had to fall back to uniform.
bool bayes_update_modes(std::span<double> means, std::span<double> variances,
                        std::span<double> weights, double y, double sigma_y,
                        WeightLikelihood likelihood);

/// Writes exp(log_weights) normalized to the simplex, shifting by the max
/// first. Non-finite entries count as log(0). Returns true (and writes uniform
/// weights) when no entry is finite.
bool normalize_log_weights(std::span<const double> log_weights, std::span<double> out);

// ---------------------------------------------------------------------------
// Quadrature oracle for the observation update.

struct QuadratureGrid {
  double lo = -10.0;
  double hi = 10.0;
  std::size_t points = 100000;
};

struct ComponentMoments {
  double mass = 0.0;      // posterior probability of the component
  double mean = 0.0;      // NaN when mass is exactly zero
  double variance = 0.0;  // NaN when mass is exactly zero
};

struct PosteriorDensity {
  std::vector<double> grid;
  std::vector<double> density;  // normalized on the grid (trapezoidal rule)
  std::vector<ComponentMoments> components;
  double mean = 0.0;
  double variance = 0.0;
};

/// Discretizes prior(theta) * N(y | theta, sigma_y) on a uniform grid and
/// integrates it with the trapezoidal rule. Each mixture component is
/// integrated separately so per-mode moments are available.
///
/// Throws InvalidParameter if the grid has fewer than 1e4 points, and
/// std::runtime_error if any component keeps >= 1e-6 of its mass-scale at the
/// grid boundary (grid too narrow).
PosteriorDensity posterior_oracle(const GaussianMixture& prior, double y, double sigma_y,
                                  const QuadratureGrid& grid);

}  // namespace gmop
