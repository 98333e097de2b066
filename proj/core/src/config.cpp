#include "gmop/config.hpp"

#include <cmath>
#include <fstream>
#include <set>

#include "gmop/error.hpp"

namespace gmop {

using nlohmann::json;

namespace {

template <class E>
struct EnumName {
  E value;
  const char* name;
};

constexpr EnumName<GainMode> kGainNames[] = {{GainMode::Exact, "exact"}, {GainMode::Steady, "steady"}};
constexpr EnumName<ObservationMode> kObservationNames[] = {
    {ObservationMode::Shared, "shared"}, {ObservationMode::Independent, "independent"}};
constexpr EnumName<WeightPolicy> kWeightPolicyNames[] = {{WeightPolicy::Identity, "identity"},
                                                         {WeightPolicy::Geometric, "geometric"}};
constexpr EnumName<WeightLikelihood> kLikelihoodNames[] = {
    {WeightLikelihood::Predictive, "predictive"}, {WeightLikelihood::PriorVariance, "prior_variance"}};
constexpr EnumName<SteadyWeightExponent> kExponentNames[] = {
    {SteadyWeightExponent::Predictive, "predictive"}, {SteadyWeightExponent::Literal, "literal"}};

template <class E, std::size_t N>
const char* enum_to_string(const EnumName<E> (&names)[N], E v) {
  for (const auto& e : names) {
    if (e.value == v) return e.name;
  }
  return "?";
}

template <class E, std::size_t N>
E enum_from_json(const EnumName<E> (&names)[N], const json& v, const std::string& path) {
  if (!v.is_string()) throw ValidationError(path, "expected a string");
  const auto s = v.get<std::string>();
  for (const auto& e : names) {
    if (s == e.name) return e.value;
  }
  std::string allowed;
  for (const auto& e : names) allowed += std::string(allowed.empty() ? "" : ", ") + e.name;
  throw ValidationError(path, "unknown value '" + s + "' (expected one of " + allowed + ")");
}

double as_number(const json& v, const std::string& path) {
  if (!v.is_number()) throw ValidationError(path, "expected a number");
  return v.get<double>();
}

std::size_t as_count(const json& v, const std::string& path) {
  if (!v.is_number_integer() || v.get<long long>() < 0) {
    throw ValidationError(path, "expected a non-negative integer");
  }
  return v.get<std::size_t>();
}

std::uint64_t as_seed(const json& v, const std::string& path) {
  if (!v.is_number_unsigned()) {
    throw ValidationError(path, "expected a non-negative integer seed");
  }
  return v.get<std::uint64_t>();
}

bool as_bool(const json& v, const std::string& path) {
  if (!v.is_boolean()) throw ValidationError(path, "expected true or false");
  return v.get<bool>();
}

std::string as_string(const json& v, const std::string& path) {
  if (!v.is_string()) throw ValidationError(path, "expected a string");
  return v.get<std::string>();
}

std::vector<double> as_number_list(const json& v, const std::string& path) {
  if (!v.is_array()) throw ValidationError(path, "expected an array of numbers");
  std::vector<double> out;
  for (std::size_t i = 0; i < v.size(); ++i) out.push_back(as_number(v[i], path + "[" + std::to_string(i) + "]"));
  return out;
}

const json& as_section(const json& v, const std::string& path) {
  if (!v.is_object()) throw ValidationError(path, "expected an object");
  return v;
}

[[noreturn]] void unknown_key(const std::string& path) { throw ValidationError(path, "unknown key"); }

void apply_network(NetworkConfig& c, const json& sec) {
  for (const auto& [key, v] : as_section(sec, "network").items()) {
    const std::string path = "network." + key;
    if (key == "n") c.n = as_count(v, path);
    else if (key == "k_ws") c.k_ws = as_count(v, path);
    else if (key == "p_ws") c.p_ws = as_number(v, path);
    else if (key == "hub_node") c.hub_node = v.is_null() ? std::nullopt : std::optional(as_count(v, path));
    else if (key == "hub_fraction") c.hub_fraction = as_number(v, path);
    else if (key == "seed") c.seed = v.is_null() ? std::nullopt : std::optional(as_seed(v, path));
    else if (key == "graph_file") c.graph_file = v.is_null() ? std::nullopt : std::optional(as_string(v, path));
    else unknown_key(path);
  }
}

void apply_model(ModelConfig& c, const json& sec) {
  for (const auto& [key, v] : as_section(sec, "model").items()) {
    const std::string path = "model." + key;
    if (key == "theta") c.theta = as_number(v, path);
    else if (key == "sigma_y") c.sigma_y = as_number(v, path);
    else if (key == "modes") c.modes = as_count(v, path);
    else if (key == "init_mean_ranges") {
      if (!v.is_array()) throw ValidationError(path, "expected an array of [lo, hi] pairs");
      c.init_mean_ranges.clear();
      for (std::size_t i = 0; i < v.size(); ++i) {
        const auto pair = as_number_list(v[i], path + "[" + std::to_string(i) + "]");
        if (pair.size() != 2) throw ValidationError(path + "[" + std::to_string(i) + "]", "expected [lo, hi]");
        c.init_mean_ranges.emplace_back(pair[0], pair[1]);
      }
    } else if (key == "init_variance") c.init_variance = as_number_list(v, path);
    else if (key == "init_weights") c.init_weights = v.is_null() ? std::vector<double>{} : as_number_list(v, path);
    else unknown_key(path);
  }
}

void apply_policy(PolicyConfig& c, const json& sec) {
  for (const auto& [key, v] : as_section(sec, "policy").items()) {
    const std::string path = "policy." + key;
    if (key == "delta_mu") c.delta_mu = as_number(v, path);
    else if (key == "delta_sigma") c.delta_sigma = as_number(v, path);
    else if (key == "nu") c.nu = as_number(v, path);
    else if (key == "weight_policy") c.weight_policy = enum_from_json(kWeightPolicyNames, v, path);
    else unknown_key(path);
  }
}

void apply_stubborn(StubbornConfig& c, const json& sec) {
  for (const auto& [key, v] : as_section(sec, "stubborn").items()) {
    const std::string path = "stubborn." + key;
    if (key == "enabled") c.enabled = as_bool(v, path);
    else if (key == "node") c.node = as_count(v, path);
    else if (key == "mu_dagger") c.mu_dagger = as_number(v, path);
    else unknown_key(path);
  }
}

void apply_run(RunConfig& c, const json& sec) {
  for (const auto& [key, v] : as_section(sec, "run").items()) {
    const std::string path = "run." + key;
    if (key == "horizon") c.horizon = as_count(v, path);
    else if (key == "trailing_window") c.trailing_window = as_count(v, path);
    else if (key == "gain_mode") c.gain_mode = enum_from_json(kGainNames, v, path);
    else if (key == "observation") c.observation = enum_from_json(kObservationNames, v, path);
    else if (key == "noise_free") c.noise_free = as_bool(v, path);
    else if (key == "weight_likelihood") c.weight_likelihood = enum_from_json(kLikelihoodNames, v, path);
    else if (key == "steady_weight_exponent") c.steady_weight_exponent = enum_from_json(kExponentNames, v, path);
    else if (key == "seed") c.seed = as_seed(v, path);
    else if (key == "output_dir") c.output_dir = as_string(v, path);
    else unknown_key(path);
  }
}

void require(bool ok, const std::string& field, const std::string& reason) {
  if (!ok) throw ValidationError(field, reason);
}

}  // namespace

void SimulationConfig::validate() const {
  const auto& nw = network;
  if (!nw.graph_file) {
    require(nw.n >= 3, "network.n", "must be >= 3");
    require(nw.k_ws >= 1, "network.k_ws", "must be >= 1");
    require(nw.k_ws < nw.n, "network.k_ws", "must be < n");
    require(nw.p_ws >= 0.0 && nw.p_ws <= 1.0, "network.p_ws", "must lie in [0, 1]");
  } else {
    require(nw.n >= 1, "network.n", "must be >= 1");
  }
  if (nw.hub_node) {
    require(*nw.hub_node >= 1 && *nw.hub_node <= nw.n, "network.hub_node", "must lie in [1, n]");
    require(nw.hub_fraction > 0.0 && nw.hub_fraction <= 1.0, "network.hub_fraction", "must lie in (0, 1]");
  }

  const auto& m = model;
  require(std::isfinite(m.theta), "model.theta", "must be finite");
  require(m.sigma_y > 0.0 && std::isfinite(m.sigma_y), "model.sigma_y", "must be > 0");
  require(m.modes >= 1, "model.modes", "must be >= 1");
  require(m.init_mean_ranges.size() == m.modes, "model.init_mean_ranges", "need one [lo, hi] per mode");
  for (std::size_t i = 0; i < m.init_mean_ranges.size(); ++i) {
    const auto [lo, hi] = m.init_mean_ranges[i];
    require(std::isfinite(lo) && std::isfinite(hi) && lo <= hi, "model.init_mean_ranges[" + std::to_string(i) + "]",
            "need finite lo <= hi");
  }
  require(m.init_variance.size() == m.modes, "model.init_variance", "need one variance per mode");
  for (std::size_t i = 0; i < m.init_variance.size(); ++i) {
    require(m.init_variance[i] > 0.0 && std::isfinite(m.init_variance[i]),
            "model.init_variance[" + std::to_string(i) + "]", "must be > 0");
  }
  if (!m.init_weights.empty()) {
    require(m.init_weights.size() == m.modes, "model.init_weights", "need one weight per mode");
    double total = 0.0;
    for (std::size_t i = 0; i < m.init_weights.size(); ++i) {
      require(m.init_weights[i] >= 0.0 && m.init_weights[i] <= 1.0, "model.init_weights[" + std::to_string(i) + "]",
              "must lie in [0, 1]");
      total += m.init_weights[i];
    }
    require(std::abs(total - 1.0) <= 1e-9, "model.init_weights", "must sum to 1");
  }

  require(policy.delta_mu > 0.0 && std::isfinite(policy.delta_mu), "policy.delta_mu", "must be > 0");
  require(policy.delta_sigma >= 0.0 && std::isfinite(policy.delta_sigma), "policy.delta_sigma", "must be >= 0");
  require(policy.nu >= 0.0 && std::isfinite(policy.nu), "policy.nu", "must be >= 0");

  if (stubborn.enabled) {
    require(stubborn.node >= 1 && stubborn.node <= nw.n, "stubborn.node", "must lie in [1, n]");
    require(std::isfinite(stubborn.mu_dagger), "stubborn.mu_dagger", "must be finite");
  }

  require(run.horizon >= 1, "run.horizon", "must be >= 1");
  require(run.trailing_window >= 1, "run.trailing_window", "must be >= 1");
  require(run.trailing_window <= run.horizon, "run.trailing_window", "must be <= horizon");
}

SimulationConfig preset_config(std::string_view name) {
  SimulationConfig c;  // struct defaults are the S1 column
  c.preset = std::string(name);
  if (name == "S1") return c;
  if (name == "S2") {
    c.model.sigma_y = 1.0;
    return c;
  }
  if (name == "S3" || name == "S4") {
    c.stubborn = {true, 1, -1.0};
    if (name == "S4") c.model.sigma_y = 1.0;
    return c;
  }
  throw ValidationError("preset", "unknown preset '" + std::string(name) + "' (expected S1, S2, S3 or S4)");
}

SimulationConfig apply_overrides(SimulationConfig c, const json& doc) {
  if (!doc.is_object()) throw ValidationError("<root>", "expected a JSON object");
  for (const auto& [key, v] : doc.items()) {
    if (key == "preset") continue;
    else if (key == "network") apply_network(c.network, v);
    else if (key == "model") apply_model(c.model, v);
    else if (key == "policy") apply_policy(c.policy, v);
    else if (key == "stubborn") apply_stubborn(c.stubborn, v);
    else if (key == "run") apply_run(c.run, v);
    else unknown_key(key);
  }
  return c;
}

SimulationConfig parse_config(const json& doc) {
  if (!doc.is_object()) throw ValidationError("<root>", "expected a JSON object");
  SimulationConfig base;
  if (auto it = doc.find("preset"); it != doc.end() && !it->is_null()) {
    base = preset_config(as_string(*it, "preset"));
  }
  SimulationConfig c = apply_overrides(std::move(base), doc);
  c.validate();
  return c;
}

SimulationConfig load_config(const std::filesystem::path& path) {
  std::ifstream is(path);
  if (!is) throw ParseError("cannot open config " + path.string());
  json doc;
  try {
    doc = json::parse(is);
  } catch (const json::parse_error& e) {
    throw ParseError("config " + path.string() + ": " + e.what());
  }
  return parse_config(doc);
}

json to_json(const SimulationConfig& c) {
  json doc;
  if (!c.preset.empty()) doc["preset"] = c.preset;

  json nw;
  nw["n"] = c.network.n;
  nw["k_ws"] = c.network.k_ws;
  nw["p_ws"] = c.network.p_ws;
  nw["hub_node"] = c.network.hub_node ? json(*c.network.hub_node) : json(nullptr);
  nw["hub_fraction"] = c.network.hub_fraction;
  nw["seed"] = c.network.seed ? json(*c.network.seed) : json(nullptr);
  nw["graph_file"] = c.network.graph_file ? json(*c.network.graph_file) : json(nullptr);
  doc["network"] = nw;

  json md;
  md["theta"] = c.model.theta;
  md["sigma_y"] = c.model.sigma_y;
  md["modes"] = c.model.modes;
  json ranges = json::array();
  for (const auto& [lo, hi] : c.model.init_mean_ranges) ranges.push_back({lo, hi});
  md["init_mean_ranges"] = ranges;
  md["init_variance"] = c.model.init_variance;
  md["init_weights"] = c.model.init_weights.empty() ? json(nullptr) : json(c.model.init_weights);
  doc["model"] = md;

  doc["policy"] = {{"delta_mu", c.policy.delta_mu},
                   {"delta_sigma", c.policy.delta_sigma},
                   {"nu", c.policy.nu},
                   {"weight_policy", enum_to_string(kWeightPolicyNames, c.policy.weight_policy)}};
  doc["stubborn"] = {{"enabled", c.stubborn.enabled}, {"node", c.stubborn.node}, {"mu_dagger", c.stubborn.mu_dagger}};
  doc["run"] = {{"horizon", c.run.horizon},
                {"trailing_window", c.run.trailing_window},
                {"gain_mode", enum_to_string(kGainNames, c.run.gain_mode)},
                {"observation", enum_to_string(kObservationNames, c.run.observation)},
                {"noise_free", c.run.noise_free},
                {"weight_likelihood", enum_to_string(kLikelihoodNames, c.run.weight_likelihood)},
                {"steady_weight_exponent", enum_to_string(kExponentNames, c.run.steady_weight_exponent)},
                {"seed", c.run.seed},
                {"output_dir", c.run.output_dir}};
  return doc;
}

}  // namespace gmop
