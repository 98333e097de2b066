#include <charconv>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "gmop/config.hpp"
#include "gmop/error.hpp"
#include "gmop/experiment.hpp"
#include "gmop/io.hpp"

namespace {

enum ExitCode { kOk = 0, kFailure = 1, kBadInput = 2, kUnstable = 3 };

struct ConfigArgs {
  std::string path;
  std::string preset;
  std::optional<std::uint64_t> seed;
  std::string out;
};

std::optional<std::uint64_t> env_seed() {
  const char* raw = std::getenv("GMOP_SEED");
  if (!raw || !*raw) return std::nullopt;
  const std::string s(raw);
  std::uint64_t v = 0;
  auto [end, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || end != s.data() + s.size()) {
    throw gmop::ValidationError("GMOP_SEED", "expected an unsigned integer, got '" + s + "'");
  }
  return v;
}

// Preset (when given) is the base; the file overlays it. Seed precedence: --seed, GMOP_SEED, file.
gmop::SimulationConfig resolve_config(const ConfigArgs& a) {
  gmop::SimulationConfig c;
  if (a.path.empty()) {
    if (a.preset.empty()) throw gmop::ValidationError("--config", "required unless --preset is given");
    c = gmop::preset_config(a.preset);
  } else if (a.preset.empty()) {
    c = gmop::load_config(a.path);
  } else {
    nlohmann::json doc;
    try {
      doc = nlohmann::json::parse(gmop::read_text_file(a.path));
    } catch (const nlohmann::json::parse_error& e) {
      throw gmop::ParseError(a.path + ": " + e.what());
    }
    c = gmop::apply_overrides(gmop::preset_config(a.preset), doc);
  }
  if (auto s = env_seed()) c.run.seed = *s;
  if (a.seed) c.run.seed = *a.seed;
  if (!a.out.empty()) c.run.output_dir = a.out;
  c.validate();
  return c;
}

void add_config_options(CLI::App& cmd, ConfigArgs& a, bool with_preset) {
  cmd.add_option("--config", a.path, "Configuration JSON")->check(CLI::ExistingFile);
  if (with_preset) cmd.add_option("--preset", a.preset, "Base preset")->check(CLI::IsMember({"S1", "S2", "S3", "S4"}));
  cmd.add_option("--seed", a.seed, "Master seed (overrides GMOP_SEED and the config)");
}

void write_output(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
  } else {
    gmop::write_text_file(path, text);
  }
}

int cmd_run(const ConfigArgs& a, std::size_t jobs, bool force) {
  const gmop::SimulationConfig cfg = resolve_config(a);
  gmop::RunOptions opts;
  opts.force = force;
  opts.jobs = jobs;
  const gmop::RunOutcome out = gmop::run_experiment(cfg, opts);
  const gmop::Empirics& e = out.empirics;
  std::cout << "wrote " << out.output_dir.string() << "\n"
            << "sigma_inf " << gmop::format_double(out.theory.sigma_inf) << "\n"
            << "spectral_radius " << gmop::format_double(out.theory.stability.spectral_radius) << "\n"
            << "tolerance " << gmop::format_double(e.tolerance) << "\n"
            << "within_tolerance " << (e.all_within_tolerance ? "yes" : "no") << "\n"
            << "truth_displacement " << gmop::format_double(e.truth_displacement) << "\n";
  if (e.stats.variance_clamps || e.stats.bayes_degenerate || e.stats.weight_degenerate) {
    std::cerr << "warning: " << e.stats.variance_clamps << " variance clamps, " << e.stats.bayes_degenerate
              << " degenerate Bayes weights, " << e.stats.weight_degenerate << " degenerate social weights\n";
  }
  return kOk;
}

int cmd_predict(const ConfigArgs& a, std::size_t jobs, const std::string& out) {
  const gmop::PreparedRun run = gmop::prepare_run(resolve_config(a));
  write_output(out, gmop::to_json(gmop::predict(run, jobs)).dump(2) + "\n");
  return kOk;
}

int cmd_sweep(const ConfigArgs& a, double mu_dagger, std::size_t jobs, const std::string& out) {
  const gmop::PreparedRun run = gmop::prepare_run(resolve_config(a));
  const auto rows =
      gmop::sweep_centrality(run.model.graph, run.coupling, mu_dagger, run.config.model.theta, jobs);
  std::ostringstream os;
  gmop::write_centrality_csv(os, rows);
  write_output(out, os.str());
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Gaussian-mixture opinion dynamics simulator"};
  app.require_subcommand(1);

  ConfigArgs cfg;
  std::size_t jobs = 1;
  bool force = false;
  double mu_dagger = 0.0;
  std::string out_file;
  std::string run_dir;
  std::string selection = "first";
  std::size_t count = 9;

  CLI::App* run = app.add_subcommand("run", "Simulate and write trajectory, summary and empirics");
  add_config_options(*run, cfg, true);
  run->add_option("--out", cfg.out, "Output directory");
  run->add_option("--jobs", jobs, "Worker threads")->check(CLI::PositiveNumber);
  run->add_flag("--force", force, "Run even when the mean dynamics are predicted unstable");

  CLI::App* predict = app.add_subcommand("predict", "Theory only, no simulation");
  add_config_options(*predict, cfg, true);
  predict->add_option("--jobs", jobs, "Worker threads")->check(CLI::PositiveNumber);
  predict->add_option("--out", out_file, "Summary JSON path (default stdout)");

  CLI::App* sweep = app.add_subcommand("sweep-centrality", "Rank nodes by stubborn-agent influence");
  add_config_options(*sweep, cfg, true);
  sweep->add_option("--mu-dagger", mu_dagger, "Stubborn value")->required();
  sweep->add_option("--jobs", jobs, "Worker threads")->check(CLI::PositiveNumber);
  sweep->add_option("--out", out_file, "CSV path (default stdout)");

  CLI::App* plots = app.add_subcommand("emit-plots", "Write plot CSVs for a finished run");
  plots->add_option("--run", run_dir, "Run directory")->required()->check(CLI::ExistingDirectory);
  plots->add_option("--selection", selection, "first | malleable")->check(CLI::IsMember({"first", "malleable"}));
  plots->add_option("--count", count, "Number of agents")->check(CLI::PositiveNumber);

  CLI11_PARSE(app, argc, argv);

  try {
    if (run->parsed()) return cmd_run(cfg, jobs, force);
    if (predict->parsed()) return cmd_predict(cfg, jobs, out_file);
    if (sweep->parsed()) return cmd_sweep(cfg, mu_dagger, jobs, out_file);
    if (plots->parsed()) {
      gmop::PlotSelection sel;
      sel.kind = selection == "malleable" ? gmop::PlotSelection::Kind::Malleable : gmop::PlotSelection::Kind::First;
      sel.count = count;
      gmop::emit_plots_for_run(run_dir, sel);
      return kOk;
    }
  } catch (const gmop::InstabilityError& e) {
    std::cerr << "unstable: " << e.what() << "\nrerun with --force to simulate anyway\n";
    return kUnstable;
  } catch (const gmop::ValidationError& e) {
    std::cerr << "invalid config: " << e.what() << "\n";
    return kBadInput;
  } catch (const gmop::ParseError& e) {
    std::cerr << "parse error: " << e.what() << "\n";
    return kBadInput;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kFailure;
  }
  return kFailure;
}
