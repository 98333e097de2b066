#include "gmop/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "gmop/analysis.hpp"
#include "gmop/error.hpp"

namespace gmop {

void PolicyConfig::validate() const {
  if (!(delta_mu > 0.0) || !std::isfinite(delta_mu)) throw InvalidParameter("delta_mu must be > 0");
  if (!(delta_sigma >= 0.0) || !std::isfinite(delta_sigma)) {
    throw InvalidParameter("delta_sigma must be >= 0");
  }
  if (!(nu >= 0.0) || !std::isfinite(nu)) throw InvalidParameter("nu must be >= 0");
}

PopulationState PopulationState::from_agents(std::span<const AgentState> agents) {
  if (agents.empty()) throw InvalidParameter("population needs at least one agent");
  const std::size_t m = agents.front().belief.size();
  const auto n = static_cast<Eigen::Index>(agents.size());
  PopulationState s;
  s.mean.resize(n, static_cast<Eigen::Index>(m));
  s.variance.resize(n, static_cast<Eigen::Index>(m));
  s.weight.resize(n, static_cast<Eigen::Index>(m));
  s.pinned.resize(agents.size());
  for (Eigen::Index j = 0; j < n; ++j) {
    const AgentState& a = agents[static_cast<std::size_t>(j)];
    if (a.belief.size() != m) throw InvalidParameter("all agents must hold the same mode count");
    for (std::size_t i = 0; i < m; ++i) {
      const auto c = static_cast<Eigen::Index>(i);
      s.mean(j, c) = a.belief[i].mean;
      s.variance(j, c) = a.belief[i].variance;
      s.weight(j, c) = a.belief[i].weight;
    }
    if (a.stubborn) s.pinned[static_cast<std::size_t>(j)] = a.stubborn_value;
  }
  return s;
}

std::vector<AgentState> PopulationState::to_agents() const {
  std::vector<AgentState> out;
  out.reserve(agents());
  for (Eigen::Index j = 0; j < mean.rows(); ++j) {
    std::vector<Mode> modes(this->modes());
    for (Eigen::Index i = 0; i < mean.cols(); ++i) {
      modes[static_cast<std::size_t>(i)] = {mean(j, i), variance(j, i), weight(j, i)};
    }
    const auto& pin = pinned[static_cast<std::size_t>(j)];
    out.push_back({GaussianMixture(std::move(modes)), pin.has_value(), pin.value_or(0.0)});
  }
  return out;
}

void PopulationState::apply_pins() {
  for (std::size_t j = 0; j < pinned.size(); ++j) {
    if (pinned[j]) mean.row(static_cast<Eigen::Index>(j)).setConstant(*pinned[j]);
  }
}

void Model::validate() const {
  observation.validate();
  policy.validate();
  if (options.sigma_inf && !(*options.sigma_inf >= 0.0)) {
    throw InvalidParameter("steady-gain sigma_inf must be >= 0");
  }
}

double Model::steady_sigma_inf() const {
  return options.sigma_inf.value_or(sigma_fixed_point(policy.nu, observation.sigma_y));
}

double draw_observation(const ObservationModel& obs, Rng& rng) {
  obs.validate();
  std::normal_distribution<double> z(0.0, 1.0);
  return obs.theta + std::sqrt(obs.sigma_y) * z(rng);
}

Eigen::MatrixXd social_step_means(const Eigen::MatrixXd& post_means, const SocialGraph& g,
                                  double delta_mu) {
  Eigen::MatrixXd out = post_means;
  for (NodeId j = 0; j < g.size(); ++j) {
    const auto r = static_cast<Eigen::Index>(j);
    for (Eigen::Index i = 0; i < post_means.cols(); ++i) {
      double pull = 0.0;
      for (const InEdge& e : g.in_edges(j)) {
        pull += e.weight * (post_means(static_cast<Eigen::Index>(e.from), i) - post_means(r, i));
      }
      out(r, i) += delta_mu * pull;
    }
  }
  return out;
}

VarianceStep social_step_variances(const Eigen::MatrixXd& post_variances, const SocialGraph& g,
                                   double delta_sigma, double nu) {
  VarianceStep out{post_variances, 0};
  for (NodeId j = 0; j < g.size(); ++j) {
    const auto r = static_cast<Eigen::Index>(j);
    for (Eigen::Index i = 0; i < post_variances.cols(); ++i) {
      double pull = 0.0;
      for (const InEdge& e : g.in_edges(j)) {
        pull += e.weight *
                (post_variances(static_cast<Eigen::Index>(e.from), i) - post_variances(r, i));
      }
      double v = post_variances(r, i) + delta_sigma * pull + nu;
      if (!(v > 0.0)) {
        v = kVarianceFloor;
        ++out.clamped;
      }
      out.variance(r, i) = v;
    }
  }
  return out;
}

WeightStep social_step_weights(const Eigen::MatrixXd& post_weights, const SocialGraph& g,
                               WeightPolicy policy) {
  WeightStep out{post_weights, 0};
  if (policy == WeightPolicy::Identity) return out;

  const Eigen::MatrixXd logs = post_weights.cwiseMax(kLogWeightFloor).array().log().matrix();
  const auto m = static_cast<std::size_t>(post_weights.cols());
  std::vector<double> mixed(m), normalized(m);
  for (NodeId j = 0; j < g.size(); ++j) {
    const auto r = static_cast<Eigen::Index>(j);
    bool floored = (post_weights.row(r).array() <= 0.0).any();
    for (std::size_t i = 0; i < m; ++i) {
      const auto c = static_cast<Eigen::Index>(i);
      double lw = logs(r, c);
      for (const InEdge& e : g.in_edges(j)) {
        const auto src = static_cast<Eigen::Index>(e.from);
        floored = floored || post_weights(src, c) <= 0.0;
        lw += e.weight * (logs(src, c) - logs(r, c));
      }
      mixed[i] = lw;
    }
    const bool lost = normalize_log_weights(mixed, normalized);
    if (floored || lost) ++out.degenerate;
    for (std::size_t i = 0; i < m; ++i) out.weight(r, static_cast<Eigen::Index>(i)) = normalized[i];
  }
  return out;
}

namespace {

// Constant-gain observation update with variances held at sigma_inf.
bool steady_update(std::span<double> means, std::span<double> variances, std::span<double> weights,
                   double y, double sigma_y, double sigma_inf, SteadyWeightExponent exponent) {
  const double gain = sigma_inf / (sigma_inf + sigma_y);
  const double scale =
      exponent == SteadyWeightExponent::Predictive ? 2.0 * (sigma_inf + sigma_y) : 1.0;
  std::vector<double> log_w(means.size());
  for (std::size_t i = 0; i < means.size(); ++i) {
    const double d = y - means[i];
    log_w[i] = weights[i] > 0.0 ? std::log(weights[i]) - d * d / scale
                                : -std::numeric_limits<double>::infinity();
  }
  const bool degenerate = normalize_log_weights(log_w, weights);
  for (std::size_t i = 0; i < means.size(); ++i) {
    means[i] += gain * (y - means[i]);
    variances[i] = sigma_inf;
  }
  return degenerate;
}

}  // namespace

StepResult step(const PopulationState& current, const Model& model, Rng& rng,
                bool keep_post_bayes) {
  const std::size_t n = current.agents();
  const std::size_t m = current.modes();
  if (model.graph.size() != n) throw InvalidParameter("graph size does not match the population");
  const ObservationModel& obs = model.observation;
  const EngineOptions& opt = model.options;

  StepResult res;
  const bool per_agent = opt.observation == ObservationMode::Independent;
  res.observations.resize(per_agent ? n : 1);
  for (double& y : res.observations) y = opt.noise_free ? obs.theta : draw_observation(obs, rng);

  const bool steady = opt.gain == GainMode::Steady;
  const double sigma_inf = steady ? model.steady_sigma_inf() : 0.0;

  PopulationState post = current;
  std::vector<double> mu(m), var(m), w(m);
  for (std::size_t j = 0; j < n; ++j) {
    const auto r = static_cast<Eigen::Index>(j);
    for (std::size_t i = 0; i < m; ++i) {
      const auto c = static_cast<Eigen::Index>(i);
      mu[i] = post.mean(r, c);
      var[i] = post.variance(r, c);
      w[i] = post.weight(r, c);
    }
    const double y = res.observations[per_agent ? j : 0];
    const bool degenerate =
        steady ? steady_update(mu, var, w, y, obs.sigma_y, sigma_inf, opt.steady_exponent)
               : bayes_update_modes(mu, var, w, y, obs.sigma_y, opt.likelihood);
    if (degenerate) ++res.stats.bayes_degenerate;
    for (std::size_t i = 0; i < m; ++i) {
      const auto c = static_cast<Eigen::Index>(i);
      post.mean(r, c) = mu[i];
      post.variance(r, c) = var[i];
      post.weight(r, c) = w[i];
    }
  }

  res.next.pinned = current.pinned;
  res.next.mean = social_step_means(post.mean, model.graph, model.policy.delta_mu);
  if (steady) {
    res.next.variance = post.variance;
  } else {
    VarianceStep vs = social_step_variances(post.variance, model.graph, model.policy.delta_sigma,
                                            model.policy.nu);
    res.stats.variance_clamps += vs.clamped;
    res.next.variance = std::move(vs.variance);
  }
  WeightStep ws = social_step_weights(post.weight, model.graph, model.policy.weight_policy);
  res.stats.weight_degenerate += ws.degenerate;
  res.next.weight = std::move(ws.weight);
  res.next.apply_pins();

  if (keep_post_bayes) res.post_bayes = std::move(post);
  return res;
}

TrajectoryRecord simulate(const Model& model, const PopulationState& initial, std::size_t horizon,
                          Rng& observation_rng, bool keep_post_bayes) {
  if (horizon < 1) throw InvalidParameter("horizon must be >= 1");
  model.validate();

  TrajectoryRecord rec;
  rec.steps = horizon;
  rec.agents = initial.agents();
  rec.modes = initial.modes();
  rec.per_agent_observations = model.options.observation == ObservationMode::Independent;
  const std::size_t cells = horizon * rec.agents * rec.modes;
  rec.mean.resize(cells);
  rec.variance.resize(cells);
  rec.weight.resize(cells);
  if (keep_post_bayes) {
    rec.post_mean.resize(cells);
    rec.post_variance.resize(cells);
    rec.post_weight.resize(cells);
  }
  rec.observations.reserve(horizon * (rec.per_agent_observations ? rec.agents : 1));

  PopulationState state = initial;
  state.apply_pins();
  for (std::size_t k = 0; k < horizon; ++k) {
    StepResult r = step(state, model, observation_rng, keep_post_bayes);
    rec.stats += r.stats;
    rec.observations.insert(rec.observations.end(), r.observations.begin(), r.observations.end());
    for (std::size_t j = 0; j < rec.agents; ++j) {
      for (std::size_t i = 0; i < rec.modes; ++i) {
        const auto rj = static_cast<Eigen::Index>(j);
        const auto ci = static_cast<Eigen::Index>(i);
        const std::size_t at = rec.index(k, j, i);
        rec.mean[at] = r.next.mean(rj, ci);
        rec.variance[at] = r.next.variance(rj, ci);
        rec.weight[at] = r.next.weight(rj, ci);
        if (keep_post_bayes) {
          rec.post_mean[at] = r.post_bayes->mean(rj, ci);
          rec.post_variance[at] = r.post_bayes->variance(rj, ci);
          rec.post_weight[at] = r.post_bayes->weight(rj, ci);
        }
      }
    }
    state = std::move(r.next);
  }
  return rec;
}

}  // namespace gmop
