// Acceptance criteria 1-11. One PASS/FAIL line per criterion; lines tagged
// "info" are supplemental and never change the exit status.
//
//   gmop_acceptance            run everything
//   gmop_acceptance --only N   run criterion N

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <filesystem>
#include <functional>
#include <limits>
#include <map>
#include <random>
#include <string>
#include <vector>

#include "gmop/analysis.hpp"
#include "gmop/belief.hpp"
#include "gmop/config.hpp"
#include "gmop/dynamics.hpp"
#include "gmop/experiment.hpp"
#include "gmop/io.hpp"
#include "gmop/linalg.hpp"
#include "oracles.hpp"

using namespace gmop;
namespace fs = std::filesystem;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

bool report(int id, bool ok, const std::string& what) {
  std::printf("C%-2d %s  %s\n", id, ok ? "PASS" : "FAIL", what.c_str());
  std::fflush(stdout);
  return ok;
}

void info(int id, const std::string& what) {
  std::printf("C%-2d info  %s\n", id, what.c_str());
  std::fflush(stdout);
}

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

RunOutcome simulate_config(const SimulationConfig& cfg) {
  RunOptions o;
  o.force = true;
  o.write_files = false;
  return run_experiment(cfg, o);
}

SimulationConfig hub_free(SimulationConfig c) {
  c.network.hub_node.reset();
  return c;
}

// ---------------------------------------------------------------------------

bool criterion1() {
  const SimulationConfig cfg = preset_config("S1");
  const double target = sigma_fixed_point(cfg.policy.nu, cfg.model.sigma_y);
  const double iterated = oracle::iterate_variance(1.0, cfg.policy.nu, cfg.model.sigma_y, 100000);
  const auto t0 = std::chrono::steady_clock::now();
  const RunOutcome r = simulate_config(cfg);
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  const TrajectoryRecord& rec = r.trajectory;
  double worst = 0.0;
  for (std::size_t k = 499; k < rec.steps; ++k)
    for (std::size_t j = 0; j < rec.agents; ++j)
      for (std::size_t i = 0; i < rec.modes; ++i) worst = std::max(worst, std::abs(rec.sigma(k, j, i) - target));
  const bool oracle_ok = std::abs(iterated - target) <= 1e-10;
  const bool ok = worst <= 1e-6 && secs < 5.0 && oracle_ok;
  return report(1, ok,
                fmt("variance fixed point: sigma_inf=%.12f, |iterated-closed|=%.1e, max|sigma-sigma_inf| over "
                    "steps 500..%zu = %.2e (tol 1e-6), runtime %.2fs (limit 5s)",
                    target, std::abs(iterated - target), rec.steps, worst, secs));
}

bool criterion2() {
  SimulationConfig cfg = preset_config("S1");
  cfg.policy.nu = 0.0;
  const PreparedRun run = prepare_run(cfg);
  Model model = run.model;
  Rng obs = substream(cfg.run.seed, "observations");
  PopulationState state = run.initial;
  const std::size_t steps = 10000;
  bool common = true, decreasing = true;
  double prev = state.variance(0, 0);
  double oracle_gap = 0.0;
  std::size_t first_below = 0;
  for (std::size_t k = 1; k <= steps; ++k) {
    state = step(state, model, obs).next;
    const double v = state.variance(0, 0);
    common = common && (state.variance.array() == v).all();
    decreasing = decreasing && v < prev;
    prev = v;
    const double closed = 1.0 / (1.0 / 1.0 + static_cast<double>(k) / cfg.model.sigma_y);
    oracle_gap = std::max(oracle_gap, std::abs(v - closed) / closed);
    if (!first_below && v < 1e-6) first_below = k;
  }
  const bool below = prev < 1e-6;
  report(2, common && decreasing && below,
         fmt("nu=0: common=%s strictly_decreasing=%s, variance at step %zu = %.4e (need < 1e-6)",
             common ? "yes" : "no", decreasing ? "yes" : "no", steps, prev));
  const double needed = std::ceil(cfg.model.sigma_y * (1.0 / 1e-6 - 1.0));
  info(2, fmt("sequence equals 1/(1/sigma0 + k/sigma_y) to rel %.1e; it first drops below 1e-6 at k=%.0f",
              oracle_gap, needed));
  return common && decreasing && below;
}

struct CrossSeed {
  double mean_var = 0.0;         // per-step cross-seed variance, averaged over window, agents, modes
  double trailing_var = 0.0;     // cross-seed variance of trailing means
  std::size_t finite_runs = 0;
};

CrossSeed cross_seed(const SimulationConfig& base, std::size_t seeds) {
  const std::size_t window = base.run.trailing_window;
  std::vector<RunOutcome> runs;
  for (std::size_t s = 0; s < seeds; ++s) {
    SimulationConfig c = base;
    c.network.seed = base.run.seed;
    c.run.seed = 1000 + s;
    runs.push_back(simulate_config(c));
  }
  const TrajectoryRecord& r0 = runs.front().trajectory;
  CrossSeed out;
  double acc = 0.0, acc_t = 0.0;
  std::size_t cells = 0, cells_t = 0;
  const double n = static_cast<double>(seeds);
  for (std::size_t j = 0; j < r0.agents; ++j) {
    for (std::size_t i = 0; i < r0.modes; ++i) {
      for (std::size_t k = r0.steps - window; k < r0.steps; ++k) {
        double s1 = 0.0, s2 = 0.0;
        for (const RunOutcome& r : runs) s1 += r.trajectory.mu(k, j, i);
        const double m = s1 / n;
        for (const RunOutcome& r : runs) s2 += (r.trajectory.mu(k, j, i) - m) * (r.trajectory.mu(k, j, i) - m);
        acc += s2 / (n - 1.0);
        ++cells;
      }
      double t1 = 0.0, t2 = 0.0;
      for (const RunOutcome& r : runs) t1 += r.empirics.trailing_mean[j][i];
      for (const RunOutcome& r : runs) t2 += std::pow(r.empirics.trailing_mean[j][i] - t1 / n, 2);
      acc_t += t2 / (n - 1.0);
      ++cells_t;
    }
  }
  for (const RunOutcome& r : runs) out.finite_runs += std::isfinite(r.empirics.truth_displacement);
  out.mean_var = acc / static_cast<double>(cells);
  out.trailing_var = acc_t / static_cast<double>(cells_t);
  return out;
}

bool criterion3_on(const SimulationConfig& cfg, bool gating, const char* label) {
  const RunOutcome r = simulate_config(cfg);
  const Empirics& e = r.empirics;
  double worst = 0.0;
  for (double d : e.max_deviation) worst = std::isnan(d) ? kInf : std::max(worst, d);
  const bool part1 = e.all_within_tolerance;
  const double c = r.theory.limit_cov_scalar;
  const CrossSeed cs = cross_seed(cfg, 64);
  const double ratio = cs.mean_var / c;
  const bool part2 = std::isfinite(ratio) && std::abs(ratio - 1.0) <= 0.3;
  const double s = cfg.model.sigma_y / (r.theory.sigma_inf + cfg.model.sigma_y);
  const std::string line =
      fmt("%s: rho(A)=%.4f; max_j |trailing mean - theta| = %.3e (tol %.6f); 64-seed variance / c = %.4f "
          "(c=%.6f, need within 30%%, finite runs %zu/64)",
          label, r.theory.stability.spectral_radius, worst, e.tolerance, ratio, c, cs.finite_runs);
  if (gating) {
    report(3, part1 && part2, line);
  } else {
    info(3, line + (part1 && part2 ? " -> holds" : " -> does not hold"));
  }
  const double w = static_cast<double>(cfg.run.trailing_window);
  info(3, fmt("%s: cross-seed variance of the trailing means = %.3e (AR(1) prediction c(1+s)/((1-s)W) = %.3e)",
              label, cs.trailing_var, c * (1.0 + s) / ((1.0 - s) * w)));
  return part1 && part2;
}

bool criterion3() {
  const bool ok = criterion3_on(preset_config("S1"), true, "S1 with hub");
  criterion3_on(hub_free(preset_config("S1")), false, "S1 without hub");
  return ok;
}

bool criterion4() {
  const PreparedRun run = prepare_run(preset_config("S1"));
  const SystemMatrices sys = build_system_matrices(run.model.graph, run.coupling);
  const AsymptoticMoments m =
      asymptotic_mean_cov(run.config.model.theta, run.config.model.sigma_y, run.sigma_inf, run.model.graph.size());
  const double residual = verify_covariance_fixed_point(m.covariance(), sys.A, sys.B, run.config.model.sigma_y);
  return report(4, residual <= 1e-8,
                fmt("covariance fixed point: c=%.9f, max|P - (APA^T + sigma_y B11^TB^T)| = %.2e (tol 1e-8)",
                    m.cov_scalar, residual));
}

bool criterion5() {
  std::mt19937_64 rng(555);
  std::uniform_int_distribution<std::size_t> size(2, 10);
  std::uniform_real_distribution<double> u(0.0, 1.0), mu(-2.0, 2.0);
  const double theta = 1.0, sigma_y = 0.1, delta = 0.6;
  const double sigma_inf = sigma_fixed_point(0.1, sigma_y);
  const double s = sigma_y / (sigma_inf + sigma_y);
  double worst = 0.0;
  for (int trial = 0; trial < 20; ++trial) {
    const std::size_t n = trial < 2 ? 2 : size(rng);
    SocialGraph g(n);
    for (NodeId a = 0; a < n; ++a)
      for (NodeId b = 0; b < n; ++b)
        if (a != b && u(rng) < 0.5) g.add_edge(a, b, 0.05 + u(rng));
    // A built entry by entry from the edge list
    Eigen::MatrixXd a = Eigen::MatrixXd::Identity(n, n);
    for (const Edge& e : g.edges()) {
      a(e.to, e.from) += delta * e.weight;
      a(e.to, e.to) -= delta * e.weight;
    }
    a *= s;
    Model model;
    model.graph = g;
    model.observation = {theta, sigma_y};
    model.policy.delta_mu = delta;
    model.options.gain = GainMode::Steady;
    model.options.noise_free = true;
    PopulationState st;
    st.mean.resize(n, 2);
    st.variance = Eigen::MatrixXd::Constant(n, 2, 1.0);
    st.weight = Eigen::MatrixXd::Constant(n, 2, 0.5);
    st.pinned.assign(n, std::nullopt);
    for (std::size_t j = 0; j < n; ++j)
      for (int i = 0; i < 2; ++i) st.mean(j, i) = mu(rng);
    Rng unused(0);
    const StepResult r = step(st, model, unused);
    for (int i = 0; i < 2; ++i) {
      const Eigen::VectorXd expect = a * st.mean.col(i) + Eigen::VectorXd::Constant(n, (1.0 - s) * theta);
      worst = std::max(worst, (r.next.mean.col(i) - expect).cwiseAbs().maxCoeff());
    }
  }
  return report(5, worst <= 1e-12,
                fmt("matrix form: 20 random graphs, N in 2..10, steady gain, noise free: max|step - (A mu + B1 theta)| "
                    "= %.2e (tol 1e-12)",
                    worst));
}

bool criterion6() {
  const RunOutcome r = simulate_config(preset_config("S3"));
  const Empirics& e = r.empirics;
  double worst = 0.0;
  for (std::size_t j = 1; j < e.max_deviation.size(); ++j)
    worst = std::isnan(e.max_deviation[j]) ? kInf : std::max(worst, e.max_deviation[j]);

  SocialGraph g(2);
  g.add_edge(0, 1, 1.0);
  g.add_edge(1, 0, 1.0);
  const double sigma_inf = sigma_fixed_point(0.1, 0.1);
  const MeanCoupling coupling{0.6, sigma_inf, 0.1};
  const double sig = 0.1 / (sigma_inf + 0.1);
  const double closed = ((1.0 - sig) * 1.0 + sig * 0.6 * -1.0) / (1.0 - sig * (1.0 - 0.6));
  const double gamma = stubborn_equilibrium(g, coupling, 1, -1.0, 1.0).gamma(0);
  const bool hand = std::abs(gamma - closed) <= 1e-9 && std::abs(gamma - 0.45897) <= 1e-4;
  const bool ok = e.all_within_tolerance && hand;
  return report(6, ok,
                fmt("stubborn equilibrium: rho(A_-s,-s)=%.4f; max_j |trailing mean - gamma_j| = %.3e (tol %.6f); "
                    "2-node gamma = %.10f, |gamma - closed form| = %.1e",
                    r.theory.stability.block_spectral_radius.value_or(kInf), worst, e.tolerance, gamma,
                    std::abs(gamma - closed)));
}

bool criterion7_on(std::uint64_t net_seed, SimulationConfig (*shape)(SimulationConfig), bool gating,
                   const char* label) {
  auto d = [&](const char* preset) {
    SimulationConfig c = shape(preset_config(preset));
    c.network.seed = net_seed;
    return simulate_config(c).empirics.truth_displacement;
  };
  const double d2 = d("S2"), d3 = d("S3"), d4 = d("S4");
  const bool ok = d3 > d2 && d4 > d3;
  const std::string line = fmt("%s: d(S2)=%.4g d(S3)=%.4g d(S4)=%.4g; need d(S3) > d(S2): %s, d(S4) > d(S3): %s",
                               label, d2, d3, d4, d3 > d2 ? "yes" : "no", d4 > d3 ? "yes" : "no");
  if (gating) {
    report(7, ok, line);
  } else {
    info(7, line);
  }
  return ok;
}

SimulationConfig identity(SimulationConfig c) { return c; }

bool criterion7() {
  const std::uint64_t seed = preset_config("S1").run.seed;
  const bool ok = criterion7_on(seed, identity, true, "network with hub");
  criterion7_on(seed, hub_free, false, "network without hub");
  return ok;
}

bool criterion8() {
  std::mt19937_64 rng(888);
  std::uniform_int_distribution<int> count(1, 4);
  std::uniform_real_distribution<double> mean(-3.0, 3.0), var(0.05, 2.0), w(0.05, 1.0), sy(0.05, 2.0);
  double worst = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<Mode> modes(count(rng));
    double total = 0.0;
    for (Mode& m : modes) {
      m = {mean(rng), var(rng), w(rng)};
      total += m.weight;
    }
    for (Mode& m : modes) m.weight /= total;
    const GaussianMixture prior(modes);
    const double y = mean(rng), sigma_y = sy(rng);
    const BayesUpdate post = bayes_update(prior, y, sigma_y);
    const PosteriorDensity dens = posterior_oracle(prior, y, sigma_y, {});
    for (std::size_t i = 0; i < modes.size(); ++i) {
      worst = std::max({worst, std::abs(post.posterior[i].mean - dens.components[i].mean),
                        std::abs(post.posterior[i].variance - dens.components[i].variance),
                        std::abs(post.posterior[i].weight - dens.components[i].mass)});
    }
  }
  return report(8, worst <= 1e-5,
                fmt("Bayes update vs quadrature: 100 random mixtures, max per-mode |diff| = %.2e (tol 1e-5)", worst));
}

bool criterion9_on(const SimulationConfig& base, bool gating, const char* label) {
  SimulationConfig c = base;
  c.run.noise_free = true;
  const RunOutcome r = simulate_config(c);
  const TrajectoryRecord& rec = r.trajectory;
  double gap = 0.0;
  for (std::size_t j = 0; j < rec.agents; ++j) {
    const double g = std::abs(rec.mu(rec.steps - 1, j, 0) - rec.mu(rec.steps - 1, j, 1));
    gap = std::isnan(g) ? kInf : std::max(gap, g);
  }
  const bool ok = gap <= 1e-8;
  const std::string line = fmt("%s: noise-free M=2, rho(A)=%.4f, max_j |mu1 - mu2| at step %zu = %.3e (tol 1e-8)",
                               label, r.theory.stability.spectral_radius, rec.steps, gap);
  if (gating) {
    report(9, ok, line);
  } else {
    info(9, line + (ok ? " -> holds" : " -> does not hold"));
  }
  return ok;
}

bool criterion9() {
  const bool ok = criterion9_on(preset_config("S1"), true, "S1 with hub");
  criterion9_on(hub_free(preset_config("S1")), false, "S1 without hub");
  return ok;
}

bool criterion10() {
  const PreparedRun run = prepare_run(preset_config("S1"));
  const double theta = run.config.model.theta;
  auto zero_check = [&](const PreparedRun& pr) {
    const auto rows = sweep_centrality(pr.model.graph, pr.coupling, theta, theta);
    double worst = 0.0;
    std::size_t flagged = 0;
    for (const auto& row : rows) {
      if (row.flag != "ok") {
        ++flagged;
        continue;
      }
      worst = std::max(worst, std::abs(row.score));
    }
    return std::pair(flagged == 0 && worst <= 1e-12, fmt("max|score|=%.1e over %zu finite rows, %zu flagged",
                                                          worst, rows.size() - flagged, flagged));
  };
  const auto [zero_ok, zero_text] = zero_check(run);

  const auto rows = sweep_centrality(run.model.graph, run.coupling, run.config.stubborn.mu_dagger, theta);
  std::size_t finite = 0;
  for (const auto& row : rows) finite += row.flag == "ok";
  const bool hub_first = rows.front().node == 0 && rows.front().flag == "ok";
  const bool ok = zero_ok && hub_first;
  report(10, ok,
         fmt("centrality: mu_dagger=theta %s; mu_dagger=%.0f ranks node %zu first (score %.4f, %zu of %zu rows "
             "finite)",
             zero_text.c_str(), run.config.stubborn.mu_dagger, rows.front().node + 1, rows.front().score, finite,
             rows.size()));

  const auto [free_ok, free_text] = zero_check(prepare_run(hub_free(preset_config("S1"))));
  info(10, "without hub, mu_dagger=theta: " + free_text + (free_ok ? " -> holds" : " -> does not hold"));

  SimulationConfig slow = preset_config("S1");
  slow.policy.delta_mu = 0.1;
  const PreparedRun sr = prepare_run(slow);
  const auto srows = sweep_centrality(sr.model.graph, sr.coupling, -1.0, theta);
  std::size_t sfinite = 0;
  for (const auto& row : srows) sfinite += row.flag == "ok";
  info(10, fmt("same hub network with delta_mu=0.1: rho(A)=%.4f, node %zu ranks first (score %.4f, runner-up node "
               "%zu at %.4f), %zu of %zu rows finite",
               spectral_radius(build_system_matrices(sr.model.graph, sr.coupling).A), srows[0].node + 1,
               srows[0].score, srows[1].node + 1, srows[1].score, sfinite, srows.size()));
  return ok;
}

bool criterion11() {
  const fs::path dir = fs::temp_directory_path() / "gmop_acceptance_c11";
  fs::remove_all(dir);
  SimulationConfig c = preset_config("S3");
  c.run.output_dir = dir.string();
  auto snapshot = [&](std::size_t jobs) {
    RunOptions o;
    o.jobs = jobs;
    run_experiment(c, o);
    emit_plots_for_run(dir, {});
    std::map<std::string, std::string> files;
    for (const auto& entry : fs::directory_iterator(dir)) {
      files[entry.path().filename().string()] = read_text_file(entry.path());
    }
    fs::remove_all(dir);
    return files;
  };
  const auto first = snapshot(1);
  const auto second = snapshot(4);
  std::size_t differing = 0;
  for (const auto& [name, bytes] : first) {
    const auto it = second.find(name);
    differing += it == second.end() || it->second != bytes;
  }
  const bool ok = first.size() == 8 && second.size() == 8 && differing == 0;
  return report(11, ok,
                fmt("determinism: %zu artifacts from two runs (1 and 4 workers), %zu differ", first.size(),
                    differing));
}

}  // namespace

int main(int argc, char** argv) {
  const std::vector<std::function<bool()>> criteria = {criterion1, criterion2, criterion3,  criterion4,
                                                       criterion5, criterion6, criterion7,  criterion8,
                                                       criterion9, criterion10, criterion11};
  int only = 0;
  for (int a = 1; a < argc; ++a) {
    if (std::strcmp(argv[a], "--only") == 0 && a + 1 < argc) only = std::atoi(argv[++a]);
  }
  if (only < 0 || only > static_cast<int>(criteria.size())) {
    std::fprintf(stderr, "--only expects 1..%zu\n", criteria.size());
    return 2;
  }
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    if (only && static_cast<int>(i + 1) != only) continue;
    try {
      failed += !criteria[i]();
    } catch (const std::exception& e) {
      report(static_cast<int>(i + 1), false, std::string("threw: ") + e.what());
      ++failed;
    }
  }
  if (!only) std::printf("%d of %zu criteria failed\n", failed, criteria.size());
  return failed ? 1 : 0;
}
