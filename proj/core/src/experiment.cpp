#include "gmop/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>
#include <sstream>

#include "gmop/error.hpp"
#include "gmop/io.hpp"
#include "gmop/parallel.hpp"

namespace gmop {

using nlohmann::json;

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

json optional_number(const std::optional<double>& v) {
  return v && std::isfinite(*v) ? json(*v) : json(nullptr);
}

CentralityRow centrality_row(const SocialGraph& g, const MeanCoupling& coupling, NodeId s,
                             double mu_dagger, double theta) {
  CentralityRow row{s, kNaN, kNaN, kNaN, "ok"};
  try {
    const StubbornEquilibrium eq = stubborn_equilibrium(g, coupling, s, mu_dagger, theta);
    row.score = centrality_from_equilibrium(eq, theta);
    if (eq.gamma.size() > 0) {
      row.gamma_min = eq.gamma.minCoeff();
      row.gamma_max = eq.gamma.maxCoeff();
    }
  } catch (const InstabilityError&) {
    row.flag = "unstable";
  } catch (const NumericalError&) {
    row.flag = "singular";
  }
  return row;
}

}  // namespace

SocialGraph build_network(const NetworkConfig& cfg, std::uint64_t master_seed) {
  const std::uint64_t seed = cfg.seed.value_or(master_seed);
  SocialGraph g;
  if (cfg.graph_file) {
    g = load_edge_list(*cfg.graph_file);
    if (g.size() != cfg.n) {
      throw ValidationError("network.n", "graph file has " + std::to_string(g.size()) + " nodes");
    }
    return g;
  }
  Rng net = substream(seed, "network");
  g = generate_watts_strogatz(cfg.n, cfg.k_ws, cfg.p_ws, net);
  if (cfg.hub_node) g = add_influencer_hub(std::move(g), *cfg.hub_node - 1, cfg.hub_fraction, net);
  Rng weights = substream(seed, "weights");
  return assign_random_weights(std::move(g), weights);
}

PopulationState initial_population(const SimulationConfig& cfg, std::size_t agents, Rng& init_rng) {
  const ModelConfig& m = cfg.model;
  std::vector<AgentState> states;
  states.reserve(agents);
  for (std::size_t j = 0; j < agents; ++j) {
    std::vector<Mode> modes(m.modes);
    for (std::size_t i = 0; i < m.modes; ++i) {
      const auto [lo, hi] = m.init_mean_ranges[i];
      std::uniform_real_distribution<double> u(lo, hi);
      modes[i].mean = lo == hi ? lo : u(init_rng);
      modes[i].variance = m.init_variance[i];
      modes[i].weight = m.init_weights.empty() ? 1.0 / static_cast<double>(m.modes) : m.init_weights[i];
    }
    const bool stubborn = cfg.stubborn.enabled && cfg.stubborn.node == j + 1;
    states.push_back({GaussianMixture(std::move(modes)), stubborn, cfg.stubborn.mu_dagger});
  }
  PopulationState s = PopulationState::from_agents(states);
  s.apply_pins();
  return s;
}

PreparedRun prepare_run(const SimulationConfig& cfg) {
  cfg.validate();
  PreparedRun run;
  run.config = cfg;
  run.model.graph = build_network(cfg.network, cfg.run.seed);
  run.model.policy = cfg.policy;
  run.model.observation = {cfg.model.theta, cfg.model.sigma_y};
  run.model.options.gain = cfg.run.gain_mode;
  run.model.options.observation = cfg.run.observation;
  run.model.options.noise_free = cfg.run.noise_free;
  run.model.options.likelihood = cfg.run.weight_likelihood;
  run.model.options.steady_exponent = cfg.run.steady_weight_exponent;
  run.model.validate();

  Rng init = substream(cfg.run.seed, "init");
  run.initial = initial_population(cfg, run.model.graph.size(), init);
  if (cfg.stubborn.enabled) run.stubborn = cfg.stubborn.node - 1;
  run.sigma_inf = sigma_fixed_point(cfg.policy.nu, cfg.model.sigma_y);
  run.coupling = {cfg.policy.delta_mu, run.sigma_inf, cfg.model.sigma_y};
  run.components = component_count(run.model.graph);
  return run;
}

double TheorySummary::reference(std::size_t j) const {
  return gamma.empty() ? limit_mean.at(j) : gamma.at(j);
}

TheorySummary predict(const PreparedRun& run, std::size_t jobs) {
  const SocialGraph& g = run.model.graph;
  const double theta = run.config.model.theta;
  TheorySummary s;
  s.sigma_inf = run.sigma_inf;
  s.stability = stability_report(g, run.coupling, run.stubborn);
  s.components = run.components;
  const AsymptoticMoments moments =
      asymptotic_mean_cov(theta, run.config.model.sigma_y, run.sigma_inf, g.size());
  s.limit_mean.assign(moments.mean.data(), moments.mean.data() + moments.mean.size());
  s.limit_cov_scalar = moments.cov_scalar;

  if (run.stubborn) {
    try {
      const StubbornEquilibrium eq =
          stubborn_equilibrium(g, run.coupling, *run.stubborn, run.config.stubborn.mu_dagger, theta);
      s.gamma.assign(eq.limit_means.data(), eq.limit_means.data() + eq.limit_means.size());
    } catch (const std::runtime_error& e) {
      s.gamma_error = e.what();
    }
  }

  s.centrality_mu_dagger = run.config.stubborn.mu_dagger;
  s.centrality.resize(g.size());
  parallel_for(g.size(), jobs, [&](std::size_t node) {
    const CentralityRow row = centrality_row(g, run.coupling, node, s.centrality_mu_dagger, theta);
    if (row.flag == "ok") s.centrality[node] = row.score;
  });
  return s;
}

json to_json(const TheorySummary& s) {
  json conditions = {
      {"row_sum_residual", s.stability.row_sum_residual},
      {"row_sum_ok", s.stability.row_sum_ok},
      {"spectral_radius_below_one", s.stability.spectral_radius < 1.0},
      {"mean_convergence_ok", s.stability.mean_convergence_ok},
      {"block_spectral_radius", optional_number(s.stability.block_spectral_radius)},
      {"stubborn_convergence_ok", s.stability.stubborn_convergence_ok
                                      ? json(*s.stability.stubborn_convergence_ok)
                                      : json(nullptr)},
      {"degenerate_gain", s.stability.degenerate_gain},
      {"components", s.components},
  };
  json centrality = json::array();
  for (const auto& c : s.centrality) centrality.push_back(optional_number(c));
  json doc = {
      {"sigma_inf", s.sigma_inf},
      {"spectral_radius", s.stability.spectral_radius},
      {"conditions", conditions},
      {"limit_mean", s.limit_mean},
      {"limit_cov_scalar", s.limit_cov_scalar},
      {"gamma", s.gamma},
      {"centrality", centrality},
      {"centrality_mu_dagger", s.centrality_mu_dagger},
  };
  if (s.gamma_error) doc["gamma_error"] = *s.gamma_error;
  return doc;
}

double monte_carlo_tolerance(double cov_scalar, std::size_t window) {
  return 4.0 * std::sqrt(cov_scalar / static_cast<double>(window)) + 1e-6;
}

std::vector<double> equilibrium_profile(const TrajectoryRecord& rec, std::size_t window) {
  window = std::min(window, rec.steps);
  std::vector<double> out(rec.agents, 0.0);
  for (std::size_t j = 0; j < rec.agents; ++j) {
    double total = 0.0;
    for (std::size_t k = rec.steps - window; k < rec.steps; ++k) {
      for (std::size_t i = 0; i < rec.modes; ++i) total += rec.mu(k, j, i);
    }
    out[j] = total / static_cast<double>(window * rec.modes);
  }
  return out;
}

Empirics compute_empirics(const TrajectoryRecord& rec, const PreparedRun& run,
                          const TheorySummary& theory) {
  Empirics e;
  e.window = std::min(run.config.run.trailing_window, rec.steps);
  e.tolerance = monte_carlo_tolerance(theory.limit_cov_scalar, e.window);
  e.stats = rec.stats;
  e.trailing_mean.assign(rec.agents, std::vector<double>(rec.modes, 0.0));
  e.reference.resize(rec.agents);
  e.max_deviation.resize(rec.agents);

  const double theta = run.config.model.theta;
  const std::vector<double> profile = equilibrium_profile(rec, e.window);
  e.all_within_tolerance = true;
  double displacement = 0.0;
  std::size_t counted = 0;
  for (std::size_t j = 0; j < rec.agents; ++j) {
    for (std::size_t i = 0; i < rec.modes; ++i) {
      double total = 0.0;
      for (std::size_t k = rec.steps - e.window; k < rec.steps; ++k) total += rec.mu(k, j, i);
      e.trailing_mean[j][i] = total / static_cast<double>(e.window);
    }
    e.reference[j] = theory.reference(j);
    double worst = 0.0;
    for (double t : e.trailing_mean[j]) {
      const double d = std::abs(t - e.reference[j]);
      worst = std::isnan(d) ? d : std::max(worst, d);
      if (std::isnan(d)) break;
    }
    e.max_deviation[j] = worst;
    const bool is_stubborn = run.stubborn && *run.stubborn == j;
    if (!is_stubborn) {
      if (!(worst <= e.tolerance)) e.all_within_tolerance = false;
      displacement += std::abs(profile[j] - theta);
      ++counted;
    }
  }
  e.truth_displacement = counted ? displacement / static_cast<double>(counted) : 0.0;
  return e;
}

json to_json(const Empirics& e) {
  json agents = json::array();
  for (std::size_t j = 0; j < e.trailing_mean.size(); ++j) {
    json tm = json::array();
    for (double v : e.trailing_mean[j]) tm.push_back(optional_number(v));
    agents.push_back({{"agent", j + 1},
                      {"trailing_mean", tm},
                      {"reference", optional_number(e.reference[j])},
                      {"max_deviation", optional_number(e.max_deviation[j])}});
  }
  return {{"window", e.window},
          {"tolerance", e.tolerance},
          {"all_within_tolerance", e.all_within_tolerance},
          {"truth_displacement", optional_number(e.truth_displacement)},
          {"agents", agents},
          {"stats",
           {{"variance_clamps", e.stats.variance_clamps},
            {"bayes_degenerate", e.stats.bayes_degenerate},
            {"weight_degenerate", e.stats.weight_degenerate}}}};
}

RunOutcome run_experiment(const SimulationConfig& cfg, const RunOptions& options) {
  RunOutcome out;
  out.prepared = prepare_run(cfg);
  out.theory = predict(out.prepared, options.jobs);

  const StabilityReport& st = out.theory.stability;
  if (!options.force && !st.degenerate_gain) {
    if (out.prepared.stubborn && !st.stubborn_convergence_ok.value_or(false)) {
      throw InstabilityError("rho(A_{-s,-s}) = " + format_double(*st.block_spectral_radius) +
                                 " >= 1; the stubborn equilibrium is not attracting",
                             *st.block_spectral_radius);
    }
    if (!out.prepared.stubborn && !st.mean_convergence_ok) {
      throw InstabilityError("rho(A) = " + format_double(st.spectral_radius) +
                                 " >= 1; mean dynamics diverge",
                             st.spectral_radius);
    }
  }

  Rng observations = substream(cfg.run.seed, "observations");
  out.trajectory = simulate(out.prepared.model, out.prepared.initial, cfg.run.horizon, observations);
  out.empirics = compute_empirics(out.trajectory, out.prepared, out.theory);

  out.output_dir = cfg.run.output_dir;
  if (options.write_files) {
    namespace fs = std::filesystem;
    fs::create_directories(out.output_dir);
    write_text_file(out.output_dir / "config.json", to_json(cfg).dump(2) + "\n");
    save_edge_list(out.output_dir / "graph.txt", out.prepared.model.graph);
    std::ostringstream csv;
    write_trajectory_csv(csv, out.trajectory);
    write_text_file(out.output_dir / "trajectory.csv", csv.str());
    write_text_file(out.output_dir / "summary.json", to_json(out.theory).dump(2) + "\n");
    write_text_file(out.output_dir / "empirics.json", to_json(out.empirics).dump(2) + "\n");
  }
  return out;
}

std::vector<CentralityRow> sweep_centrality(const SocialGraph& g, const MeanCoupling& coupling,
                                            double mu_dagger, double theta, std::size_t jobs) {
  std::vector<CentralityRow> rows(g.size());
  parallel_for(g.size(), jobs, [&](std::size_t s) {
    rows[s] = centrality_row(g, coupling, s, mu_dagger, theta);
  });
  std::stable_sort(rows.begin(), rows.end(), [](const CentralityRow& a, const CentralityRow& b) {
    const bool a_ok = a.flag == "ok", b_ok = b.flag == "ok";
    if (a_ok != b_ok) return a_ok;
    if (!a_ok) return false;
    return a.score > b.score;
  });
  return rows;
}

void write_centrality_csv(std::ostream& os, const std::vector<CentralityRow>& rows) {
  os << "node,score,gamma_min,gamma_max,flag\n";
  for (const CentralityRow& r : rows) {
    os << (r.node + 1) << ',' << format_double(r.score) << ',' << format_double(r.gamma_min) << ','
       << format_double(r.gamma_max) << ',' << r.flag << '\n';
  }
}

std::vector<NodeId> select_agents(std::size_t agents, const PlotSelection& sel,
                                  std::optional<NodeId> stubborn) {
  std::vector<NodeId> out;
  for (NodeId j = 0; j < agents && out.size() < sel.count; ++j) {
    if (sel.kind == PlotSelection::Kind::Malleable && stubborn && *stubborn == j) continue;
    out.push_back(j);
  }
  if (out.size() < sel.count) {
    throw ValidationError("selection", "asks for " + std::to_string(sel.count) + " agents but only " +
                                           std::to_string(out.size()) + " are eligible");
  }
  return out;
}

void emit_plot_data(const TrajectoryRecord& rec, const PlotReferences& refs,
                    const PlotSelection& sel, const std::filesystem::path& dir) {
  if (refs.mean_reference.size() != rec.agents) {
    throw ValidationError("references", "need one mean reference per agent");
  }
  const std::vector<NodeId> chosen = select_agents(rec.agents, sel, refs.stubborn);
  const std::string sigma_ref = format_double(refs.sigma_inf);

  std::ostringstream var, mean, eq;
  var << "k,agent,mode,sigma,sigma_inf\n";
  mean << "k,agent,mode,mu,reference\n";
  for (std::size_t k = 0; k < rec.steps; ++k) {
    for (NodeId j : chosen) {
      const std::string mref = format_double(refs.mean_reference[j]);
      for (std::size_t i = 0; i < rec.modes; ++i) {
        var << (k + 1) << ',' << (j + 1) << ',' << (i + 1) << ',' << format_double(rec.sigma(k, j, i))
            << ',' << sigma_ref << '\n';
        mean << (k + 1) << ',' << (j + 1) << ',' << (i + 1) << ',' << format_double(rec.mu(k, j, i))
             << ',' << mref << '\n';
      }
    }
  }
  eq << "node,value\n";
  const std::vector<double> profile = equilibrium_profile(rec, refs.window);
  for (std::size_t j = 0; j < profile.size(); ++j) eq << (j + 1) << ',' << format_double(profile[j]) << '\n';

  write_text_file(dir / "plot_variance.csv", var.str());
  write_text_file(dir / "plot_mean.csv", mean.str());
  write_text_file(dir / "plot_equilibrium.csv", eq.str());
}

void emit_plots_for_run(const std::filesystem::path& run_dir, const PlotSelection& sel) {
  const SimulationConfig cfg = load_config(run_dir / "config.json");
  json summary;
  try {
    summary = json::parse(read_text_file(run_dir / "summary.json"));
  } catch (const json::parse_error& e) {
    throw ParseError("summary.json: " + std::string(e.what()));
  }
  std::istringstream csv(read_text_file(run_dir / "trajectory.csv"));
  const TrajectoryRecord rec = read_trajectory_csv(csv);

  PlotReferences refs;
  refs.sigma_inf = summary.at("sigma_inf").get<double>();
  const json& gamma = summary.at("gamma");
  const json& limit = summary.at("limit_mean");
  const json& source = gamma.empty() ? limit : gamma;
  for (const json& v : source) refs.mean_reference.push_back(v.is_number() ? v.get<double>() : kNaN);
  if (cfg.stubborn.enabled) refs.stubborn = cfg.stubborn.node - 1;
  refs.window = cfg.run.trailing_window;
  emit_plot_data(rec, refs, sel, run_dir);
}

}  // namespace gmop
