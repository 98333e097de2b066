#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "gmop/belief.hpp"
#include "gmop/network.hpp"
#include "gmop/rng.hpp"

namespace gmop {

enum class WeightPolicy {
  Identity,   // weights change only through the observation update
  Geometric,  // log-linear mixing with in-neighbors
};

enum class GainMode {
  Exact,   // per-step conjugate gains from the current variances
  Steady,  // constant gain sigma_inf / (sigma_inf + sigma_y), variances frozen at sigma_inf
};

enum class ObservationMode {
  Shared,       // one draw per step seen by every agent
  Independent,  // one draw per agent per step
};

/// Exponent scale of the steady-gain weight update exp(-(y - mu)^2 / s).
enum class SteadyWeightExponent {
  Predictive,  // s = 2 (sigma_inf + sigma_y)
  Literal,     // s = 1
};

struct PolicyConfig {
  double delta_mu = 0.6;     // mean mixing rate
  double delta_sigma = 0.1;  // variance mixing rate
  double nu = 0.1;           // variance bias added every social step
  WeightPolicy weight_policy = WeightPolicy::Identity;

  void validate() const;

  friend bool operator==(const PolicyConfig&, const PolicyConfig&) = default;
};

struct EngineOptions {
  GainMode gain = GainMode::Exact;
  ObservationMode observation = ObservationMode::Shared;
  bool noise_free = false;  // y[k] = theta exactly
  WeightLikelihood likelihood = WeightLikelihood::Predictive;
  SteadyWeightExponent steady_exponent = SteadyWeightExponent::Predictive;
  /// Gain variance for GainMode::Steady; defaults to sigma_fixed_point(nu, sigma_y).
  std::optional<double> sigma_inf;
};

struct AgentState {
  GaussianMixture belief;
  bool stubborn = false;
  double stubborn_value = 0.0;  // pinned mode mean when stubborn
};

/// Beliefs of the whole population. Row j is agent j, column i is mode i.
struct PopulationState {
  Eigen::MatrixXd mean;
  Eigen::MatrixXd variance;
  Eigen::MatrixXd weight;
  std::vector<std::optional<double>> pinned;  // stubborn value per agent

  std::size_t agents() const noexcept { return static_cast<std::size_t>(mean.rows()); }
  std::size_t modes() const noexcept { return static_cast<std::size_t>(mean.cols()); }

  static PopulationState from_agents(std::span<const AgentState> agents);
  /// Throws InvalidParameter if a belief is no longer a valid mixture.
  std::vector<AgentState> to_agents() const;

  /// Overwrites every mode mean of each stubborn agent with its pinned value.
  void apply_pins();
};

/// Everything fixed during a run.
struct Model {
  SocialGraph graph;
  PolicyConfig policy;
  ObservationModel observation;
  EngineOptions options;

  void validate() const;
  /// Gain variance used in steady mode.
  double steady_sigma_inf() const;
};

struct StepStats {
  std::size_t variance_clamps = 0;     // social variance updates that went <= 0
  std::size_t bayes_degenerate = 0;    // agents whose likelihoods all failed
  std::size_t weight_degenerate = 0;   // geometric policy hit a zero weight or lost all mass

  StepStats& operator+=(const StepStats& o) {
    variance_clamps += o.variance_clamps;
    bayes_degenerate += o.bayes_degenerate;
    weight_degenerate += o.weight_degenerate;
    return *this;
  }
};

double draw_observation(const ObservationModel& obs, Rng& rng);

/// mu_j <- mu_j + delta_mu * sum_{l -> j} w_lj (mu_l - mu_j), each column independently.
Eigen::MatrixXd social_step_means(const Eigen::MatrixXd& post_means, const SocialGraph& g,
                                  double delta_mu);

struct VarianceStep {
  Eigen::MatrixXd variance;
  std::size_t clamped = 0;
};

inline constexpr double kVarianceFloor = 1e-12;

/// sigma_j <- sigma_j + delta_sigma * sum_{l -> j} w_lj (sigma_l - sigma_j) + nu,
/// raised to kVarianceFloor (and counted) when the result is not positive.
VarianceStep social_step_variances(const Eigen::MatrixXd& post_variances, const SocialGraph& g,
                                   double delta_sigma, double nu);

struct WeightStep {
  Eigen::MatrixXd weight;
  std::size_t degenerate = 0;
};

inline constexpr double kLogWeightFloor = 1e-300;

/// Identity leaves weights as they are. Geometric sets
/// alpha_j ∝ alpha_j * prod_{l -> j} (alpha_l / alpha_j)^{w_lj} per mode, then
/// renormalizes each agent; zero weights are floored at kLogWeightFloor first.
WeightStep social_step_weights(const Eigen::MatrixXd& post_weights, const SocialGraph& g,
                               WeightPolicy policy);

struct StepResult {
  PopulationState next;
  std::vector<double> observations;  // one entry, or one per agent
  StepStats stats;
  std::optional<PopulationState> post_bayes;
};

/// One time step: draw y, observation update for every agent (stubborn ones
/// included), Jacobi-style social update of means, variances and weights from
/// the post-observation values, then re-pin stubborn means.
StepResult step(const PopulationState& current, const Model& model, Rng& rng,
                bool keep_post_bayes = false);

/// Time-indexed history. Index k = 0 .. steps-1 holds the state after step
/// k + 1 and the observation(s) drawn during it.
struct TrajectoryRecord {
  std::size_t steps = 0;
  std::size_t agents = 0;
  std::size_t modes = 0;
  bool per_agent_observations = false;
  std::vector<double> observations;
  std::vector<double> mean;
  std::vector<double> variance;
  std::vector<double> weight;
  std::vector<double> post_mean;  // filled only when post-observation values are kept
  std::vector<double> post_variance;
  std::vector<double> post_weight;
  StepStats stats;

  std::size_t index(std::size_t k, std::size_t j, std::size_t i) const {
    return (k * agents + j) * modes + i;
  }
  double mu(std::size_t k, std::size_t j, std::size_t i) const { return mean[index(k, j, i)]; }
  double sigma(std::size_t k, std::size_t j, std::size_t i) const { return variance[index(k, j, i)]; }
  double alpha(std::size_t k, std::size_t j, std::size_t i) const { return weight[index(k, j, i)]; }
  double y(std::size_t k, std::size_t j) const {
    return per_agent_observations ? observations[k * agents + j] : observations[k];
  }
};

TrajectoryRecord simulate(const Model& model, const PopulationState& initial, std::size_t horizon,
                          Rng& observation_rng, bool keep_post_bayes = false);

}  // namespace gmop
