#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>

#include "cccnet/experiment.hpp"

using namespace cccnet;
namespace fs = std::filesystem;

namespace {

fs::path temp_dir(const char* tag) {
  const fs::path dir = fs::temp_directory_path() /
                       (std::string("cccnet_test_") + tag);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

}  // namespace

TEST_CASE("defaults survive an empty config") {
  const ExperimentSpec spec = parse_config({}, {});
  CHECK(spec.n == 0);
  CHECK(spec.lambda == 1.0);
  CHECK(spec.session == "weibull:0.59");
  CHECK(spec.horizon_multiple == 30.0);
  CHECK(spec.scenario == Scenario::Steady);
  CHECK(spec.policy.stable_degree == 100.0);
  CHECK(spec.policy.buffer == 65.0);
  CHECK(spec.policy.suggestion_threshold == 5);
}

TEST_CASE("flags override file values") {
  const auto spec = parse_config({{"n", "1000"}, {"seed", "1"}},
                                 {{"seed", "99"}, {"lambda", "2.5"}});
  CHECK(spec.n == 1000);
  CHECK(spec.seed == 99);
  CHECK(spec.lambda == 2.5);
}

TEST_CASE("unknown keys are rejected by name") {
  try {
    parse_config({{"lambada", "1"}}, {});
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    CHECK(std::string(e.what()).find("lambada") != std::string::npos);
  }
}

TEST_CASE("bad values are rejected") {
  CHECK_THROWS_AS(parse_config({{"n", "lots"}}, {}), ConfigError);
  CHECK_THROWS_AS(parse_config({{"n", "-4"}}, {}), ConfigError);
  CHECK_THROWS_AS(parse_config({{"session", "zipf:2"}}, {}), ConfigError);
  CHECK_THROWS_AS(parse_config({{"session", "lognormal"}}, {}), ConfigError);
  CHECK_THROWS_AS(parse_config({{"scenario", "chaos"}}, {}), ConfigError);
  CHECK_THROWS_AS(parse_config({{"per_cycle_mode", "maybe"}}, {}), ConfigError);
}

TEST_CASE("kv files support comments and whitespace") {
  const fs::path dir = temp_dir("kv");
  const fs::path file = dir / "run.conf";
  std::ofstream(file) << "# a comment\n"
                      << "  n = 2000   # trailing comment\n"
                      << "\n"
                      << "session=exp\n";
  const auto values = read_kv_file(file.string());
  CHECK(values.at("n") == "2000");
  CHECK(values.at("session") == "exp");
  CHECK(values.size() == 2);

  std::ofstream(dir / "bad.conf") << "n 2000\n";
  CHECK_THROWS_AS(read_kv_file((dir / "bad.conf").string()), ConfigError);
  CHECK_THROWS_AS(read_kv_file((dir / "missing.conf").string()), ConfigError);
}

TEST_CASE("spec check catches contradictions") {
  ExperimentSpec spec;
  CHECK_THROWS_AS(spec.check(), ConfigError);  // no n
  spec.n = 1000;
  CHECK_NOTHROW(spec.check());
  spec.scenario = Scenario::RateChange;
  CHECK_THROWS_AS(spec.check(), ConfigError);  // no tau
  spec.tau = 100;
  CHECK_THROWS_AS(spec.check(), ConfigError);  // no n_prime
  spec.n_prime = 500;
  CHECK_NOTHROW(spec.check());
  spec.tau = 1e9;
  CHECK_THROWS_AS(spec.check(), ConfigError);  // past the horizon
}

TEST_CASE("churn_config resolves scenario defaults") {
  ExperimentSpec spec;
  spec.n = 1000;
  spec.session = "lognormal:1.2";
  const ChurnConfig steady = spec.churn_config(spec.n);
  CHECK(steady.dist == SessionDist::Lognormal);
  CHECK(steady.sigma == 1.2);
  CHECK(steady.resize_interval == 0);  // steady scenario: resizing off
  CHECK(steady.dim == 4);

  spec.scenario = Scenario::RateChange;
  spec.tau = 100;
  spec.n_prime = 500;
  const ChurnConfig rc = spec.churn_config(spec.n);
  CHECK(rc.resize_interval == spec.policy.inspect_interval);
  CHECK(rc.rate_change_time == 100);
  CHECK(rc.n_prime == 500);
}

TEST_CASE("run_experiment writes the artifact set") {
  const fs::path dir = temp_dir("steady");
  ExperimentSpec spec;
  spec.n = 500;
  spec.horizon_multiple = 8;
  spec.seed = 3;
  spec.out_dir = dir.string();
  CHECK(run_experiment(spec) == 0);
  CHECK(fs::exists(dir / "metrics.csv"));
  CHECK(fs::exists(dir / "summary.csv"));
  CHECK(fs::exists(dir / "resolved.conf"));
  CHECK(!fs::exists(dir / "convergence.csv"));

  // The resolved echo parses back to the same spec.
  const auto values = read_kv_file((dir / "resolved.conf").string());
  const auto round = parse_config(values, {});
  CHECK(round.n == spec.n);
  CHECK(round.seed == spec.seed);
  CHECK(round.session == spec.session);
}

TEST_CASE("sweeps emit per-size metrics and a summary") {
  const fs::path dir = temp_dir("sweep");
  ExperimentSpec spec;
  spec.sweep = {500, 1000};
  spec.horizon_multiple = 8;
  spec.seed = 4;
  spec.out_dir = dir.string();
  CHECK(run_experiment(spec) == 0);
  CHECK(fs::exists(dir / "metrics_500.csv"));
  CHECK(fs::exists(dir / "metrics_1000.csv"));
  std::ifstream summary(dir / "summary.csv");
  std::string line;
  int lines = 0;
  while (std::getline(summary, line)) ++lines;
  CHECK(lines == 3);  // header + one row per size
}

TEST_CASE("rate change emits convergence.csv") {
  const fs::path dir = temp_dir("rc");
  ExperimentSpec spec;
  spec.n = 500;
  spec.session = "exp";
  spec.horizon_multiple = 10;
  spec.scenario = Scenario::RateChange;
  spec.tau = 3000;
  spec.n_prime = 200;
  spec.seed = 5;
  spec.out_dir = dir.string();
  CHECK(run_experiment(spec) == 0);
  CHECK(fs::exists(dir / "convergence.csv"));
}

TEST_CASE("verify oracle suite") {
  CHECK(run_verify(3, 11) == 0);
  CHECK(run_verify(4, 12) == 0);
  CHECK(run_verify(4, 13, /*inject_fault=*/true) != 0);
  CHECK(run_verify(1, 1) != 0);
}
