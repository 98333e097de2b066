#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "gmop/analysis.hpp"
#include "gmop/config.hpp"
#include "gmop/dynamics.hpp"

namespace gmop {

/// Deterministic pipeline inputs: network generate -> hub -> weights, then
/// initial beliefs. Seeds come from labeled substreams so changing the horizon
/// or the observation stream never changes the network.
struct PreparedRun {
  SimulationConfig config;
  Model model;
  PopulationState initial;
  std::optional<NodeId> stubborn;  // zero-based
  double sigma_inf = 0.0;
  MeanCoupling coupling;
  std::size_t components = 1;
};

SocialGraph build_network(const NetworkConfig& cfg, std::uint64_t master_seed);
PopulationState initial_population(const SimulationConfig& cfg, std::size_t agents, Rng& init_rng);
PreparedRun prepare_run(const SimulationConfig& cfg);

/// Theory-only predictions for a prepared run.
struct TheorySummary {
  double sigma_inf = 0.0;
  StabilityReport stability;
  std::size_t components = 1;
  std::vector<double> limit_mean;  // theta on every agent
  double limit_cov_scalar = 0.0;
  std::vector<double> gamma;       // stubborn runs: N limits (mu_dagger at the stubborn node)
  std::optional<std::string> gamma_error;
  std::vector<std::optional<double>> centrality;  // per node; empty entry when unstable
  double centrality_mu_dagger = 0.0;

  /// Reference limit for agent j: gamma_j when available, else theta.
  double reference(std::size_t j) const;
};

TheorySummary predict(const PreparedRun& run, std::size_t jobs = 1);
nlohmann::json to_json(const TheorySummary& s);

/// 4 sqrt(c / window) + 1e-6
double monte_carlo_tolerance(double cov_scalar, std::size_t window);

struct Empirics {
  std::size_t window = 0;
  double tolerance = 0.0;
  std::vector<std::vector<double>> trailing_mean;  // [agent][mode]
  std::vector<double> reference;                   // [agent]
  std::vector<double> max_deviation;               // [agent], over modes
  bool all_within_tolerance = false;               // malleable agents only
  /// Mean over non-stubborn agents of |mode-averaged trailing mean - theta|.
  double truth_displacement = 0.0;
  StepStats stats;
};

Empirics compute_empirics(const TrajectoryRecord& rec, const PreparedRun& run,
                          const TheorySummary& theory);
nlohmann::json to_json(const Empirics& e);

/// Mode-averaged trailing-window mean per agent.
std::vector<double> equilibrium_profile(const TrajectoryRecord& rec, std::size_t window);

struct RunOptions {
  bool force = false;   // run even when the mean dynamics are predicted unstable
  std::size_t jobs = 1;
  bool write_files = true;
};

struct RunOutcome {
  PreparedRun prepared;
  TheorySummary theory;
  TrajectoryRecord trajectory;
  Empirics empirics;
  std::filesystem::path output_dir;
};

/// Files written to config.run.output_dir: config.json, graph.txt,
/// trajectory.csv, summary.json, empirics.json.
///
/// Throws InstabilityError before simulating when the relevant spectral
/// condition fails (rho(A) for plain runs, rho(A_{-s,-s}) with a stubborn
/// agent), unless options.force is set. The sigma_inf == 0 regime is not
/// treated as unstable.
RunOutcome run_experiment(const SimulationConfig& cfg, const RunOptions& options = {});

struct CentralityRow {
  NodeId node = 0;  // zero-based
  double score = 0.0;
  double gamma_min = 0.0;
  double gamma_max = 0.0;
  std::string flag = "ok";  // ok | unstable | singular
};

/// Centrality of every node, sorted by descending score (ties by node id,
/// flagged rows last).
std::vector<CentralityRow> sweep_centrality(const SocialGraph& g, const MeanCoupling& coupling,
                                            double mu_dagger, double theta, std::size_t jobs = 1);
/// Header `node,score,gamma_min,gamma_max,flag`, 1-based node ids.
void write_centrality_csv(std::ostream& os, const std::vector<CentralityRow>& rows);

struct PlotSelection {
  enum class Kind { First, Malleable };
  Kind kind = Kind::First;
  std::size_t count = 9;
};

struct PlotReferences {
  double sigma_inf = 0.0;
  std::vector<double> mean_reference;  // per agent
  std::optional<NodeId> stubborn;
  std::size_t window = 1000;
};

/// Selected agents (zero-based). Throws ValidationError when the selection
/// asks for more agents than exist.
std::vector<NodeId> select_agents(std::size_t agents, const PlotSelection& sel,
                                  std::optional<NodeId> stubborn);

/// Writes plot_variance.csv (`k,agent,mode,sigma,sigma_inf`), plot_mean.csv
/// (`k,agent,mode,mu,reference`) and plot_equilibrium.csv (`node,value`).
void emit_plot_data(const TrajectoryRecord& rec, const PlotReferences& refs,
                    const PlotSelection& sel, const std::filesystem::path& dir);

/// Reads config.json, summary.json and trajectory.csv from a run directory
/// and writes the plot files next to them.
void emit_plots_for_run(const std::filesystem::path& run_dir, const PlotSelection& sel);

}  // namespace gmop
