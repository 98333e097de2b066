#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <string>
#include <sys/wait.h>

#include "gmop/io.hpp"

namespace fs = std::filesystem;
using gmop::read_text_file;
using gmop::write_text_file;

namespace {

const fs::path kRoot = fs::temp_directory_path() / "gmop_cli_test";

int run_cli(const std::string& args, const std::string& env = "") {
  const std::string cmd = env + " \"" GMOP_CLI_PATH "\" " + args + " >" + (kRoot / "stdout.txt").string() +
                          " 2>" + (kRoot / "stderr.txt").string();
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string out_dir(const std::string& name) { return (kRoot / name).string(); }

struct Fixture {
  Fixture() {
    fs::remove_all(kRoot);
    fs::create_directories(kRoot);
    write_text_file(kRoot / "short.json",
                    R"({"preset": "S3", "run": {"horizon": 80, "trailing_window": 40}})");
  }
  ~Fixture() { fs::remove_all(kRoot); }
};

std::string cfg() { return "--config " + (kRoot / "short.json").string(); }

}  // namespace

TEST_CASE_FIXTURE(Fixture, "run writes artifacts and exits 0") {
  CHECK(run_cli("run " + cfg() + " --out " + out_dir("a")) == 0);
  for (const char* f : {"config.json", "graph.txt", "trajectory.csv", "summary.json", "empirics.json"}) {
    CHECK(fs::exists(kRoot / "a" / f));
  }
  CHECK(run_cli("emit-plots --run " + out_dir("a")) == 0);
  CHECK(fs::exists(kRoot / "a" / "plot_mean.csv"));
  CHECK(run_cli("emit-plots --run " + out_dir("a") + " --selection malleable --count 49") == 0);
  CHECK(run_cli("emit-plots --run " + out_dir("a") + " --count 51") == 2);
}

TEST_CASE_FIXTURE(Fixture, "identical inputs give identical bytes") {
  REQUIRE(run_cli("run " + cfg() + " --out " + out_dir("a")) == 0);
  REQUIRE(run_cli("run " + cfg() + " --out " + out_dir("b") + " --jobs 3") == 0);
  for (const char* f : {"graph.txt", "trajectory.csv", "summary.json", "empirics.json"}) {
    CHECK(read_text_file(kRoot / "a" / f) == read_text_file(kRoot / "b" / f));
  }
}

TEST_CASE_FIXTURE(Fixture, "seed precedence") {
  REQUIRE(run_cli("run " + cfg() + " --out " + out_dir("base")) == 0);
  REQUIRE(run_cli("run " + cfg() + " --out " + out_dir("env"), "GMOP_SEED=99") == 0);
  REQUIRE(run_cli("run " + cfg() + " --out " + out_dir("flag") + " --seed 99", "GMOP_SEED=5") == 0);
  const std::string base = read_text_file(kRoot / "base" / "trajectory.csv");
  const std::string env = read_text_file(kRoot / "env" / "trajectory.csv");
  CHECK(base != env);
  CHECK(env == read_text_file(kRoot / "flag" / "trajectory.csv"));
  CHECK(run_cli("run " + cfg() + " --out " + out_dir("bad"), "GMOP_SEED=abc") == 2);
}

TEST_CASE_FIXTURE(Fixture, "instability aborts unless forced") {
  write_text_file(kRoot / "s1.json", R"({"run": {"horizon": 50, "trailing_window": 10}})");
  const std::string c = "--config " + (kRoot / "s1.json").string();
  CHECK(run_cli("run " + c + " --out " + out_dir("s1")) == 3);
  CHECK(read_text_file(kRoot / "stderr.txt").find("rho(A)") != std::string::npos);
  CHECK_FALSE(fs::exists(kRoot / "s1" / "trajectory.csv"));
  CHECK(run_cli("run " + c + " --out " + out_dir("s1") + " --force") == 0);
}

TEST_CASE_FIXTURE(Fixture, "bad configs exit 2 with the field path") {
  write_text_file(kRoot / "zero.json", R"({"run": {"horizon": 0}})");
  CHECK(run_cli("run --config " + (kRoot / "zero.json").string()) == 2);
  CHECK(read_text_file(kRoot / "stderr.txt").find("run.horizon") != std::string::npos);
  write_text_file(kRoot / "typo.json", R"({"modle": {}})");
  CHECK(run_cli("predict --config " + (kRoot / "typo.json").string()) == 2);
  write_text_file(kRoot / "broken.json", R"({"run": )");
  CHECK(run_cli("predict --config " + (kRoot / "broken.json").string()) == 2);
  CHECK(run_cli("run") == 2);
  CHECK(run_cli("frobnicate") != 0);
}

TEST_CASE_FIXTURE(Fixture, "predict and sweep") {
  CHECK(run_cli("predict " + cfg() + " --out " + (kRoot / "summary.json").string()) == 0);
  CHECK(read_text_file(kRoot / "summary.json").find("\"sigma_inf\"") != std::string::npos);
  CHECK(run_cli("predict --preset S2") == 0);
  CHECK(read_text_file(kRoot / "stdout.txt").find("\"limit_cov_scalar\"") != std::string::npos);
  CHECK(run_cli("sweep-centrality " + cfg() + " --mu-dagger 1 --jobs 2") == 0);
  const std::string csv = read_text_file(kRoot / "stdout.txt");
  CHECK(csv.rfind("node,score,gamma_min,gamma_max,flag\n", 0) == 0);
  CHECK(run_cli("sweep-centrality " + cfg()) != 0);
}
