#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "gmop/belief.hpp"
#include "gmop/dynamics.hpp"

namespace gmop {

// Node ids in this file are 1-based, as in config files and the CLI.

struct NetworkConfig {
  std::size_t n = 50;
  std::size_t k_ws = 3;
  double p_ws = 0.2;
  std::optional<std::size_t> hub_node = 1;  // none: plain Watts-Strogatz
  double hub_fraction = 0.5;
  /// Pins the network and weight streams independently of run.seed.
  std::optional<std::uint64_t> seed;
  /// Load this edge list instead of generating a network.
  std::optional<std::string> graph_file;

  friend bool operator==(const NetworkConfig&, const NetworkConfig&) = default;
};

struct ModelConfig {
  double theta = 1.0;
  double sigma_y = 0.1;
  std::size_t modes = 2;
  std::vector<std::pair<double, double>> init_mean_ranges{{0.0, 1.0}, {-1.0, 0.0}};
  std::vector<double> init_variance{1.0, 1.0};
  std::vector<double> init_weights;  // empty: 1/M each

  friend bool operator==(const ModelConfig&, const ModelConfig&) = default;
};

struct StubbornConfig {
  bool enabled = false;
  std::size_t node = 1;
  double mu_dagger = -1.0;

  friend bool operator==(const StubbornConfig&, const StubbornConfig&) = default;
};

struct RunConfig {
  std::size_t horizon = 2000;
  std::size_t trailing_window = 1000;
  GainMode gain_mode = GainMode::Exact;
  ObservationMode observation = ObservationMode::Shared;
  bool noise_free = false;
  WeightLikelihood weight_likelihood = WeightLikelihood::Predictive;
  SteadyWeightExponent steady_weight_exponent = SteadyWeightExponent::Predictive;
  std::uint64_t seed = 20250601;
  std::string output_dir = "runs/out";

  friend bool operator==(const RunConfig&, const RunConfig&) = default;
};

struct SimulationConfig {
  std::string preset;  // informational; empty for fully custom configs
  NetworkConfig network;
  ModelConfig model;
  PolicyConfig policy;
  StubbornConfig stubborn;
  RunConfig run;

  /// Throws ValidationError naming the offending field.
  void validate() const;

  friend bool operator==(const SimulationConfig&, const SimulationConfig&) = default;
};

/// Preset settings. S2-S4 inherit everything from S1 except the listed
/// differences (S2: sigma_y = 1; S3: stubborn node 1 at -1; S4: S3 with sigma_y = 1).
SimulationConfig preset_config(std::string_view name);

/// Strict parse: unknown keys and wrong types are rejected. A top-level
/// "preset" key selects the base values the remaining keys override.
SimulationConfig parse_config(const nlohmann::json& doc);
SimulationConfig load_config(const std::filesystem::path& path);

/// Full document; parse_config(to_json(c)) == c field for field.
nlohmann::json to_json(const SimulationConfig& c);

/// Overlays the keys present in `doc` onto `base`.
SimulationConfig apply_overrides(SimulationConfig base, const nlohmann::json& doc);

}  // namespace gmop
