#include <cstdio>
#include <map>
#include <string>

#include <CLI11.hpp>

#include "cccnet/experiment.hpp"

// Simulation driver. Flags override config-file values; everything resolved
// is echoed to <out>/resolved.conf.
int main(int argc, char** argv) {
  CLI::App app{"churn-tolerant CCC overlay simulator"};

  std::string config_path;
  std::map<std::string, std::string> overrides;
  bool verify = false;
  int verify_dim = 4;
  bool verify_fault = false;

  app.add_option("--config", config_path, "key=value config file");
  auto set = [&overrides](const std::string& key) {
    return [&overrides, key](const std::string& v) { overrides[key] = v; };
  };
  app.add_option_function<std::string>("--n", set("n"),
                                       "expected stable network size");
  app.add_option_function<std::string>("--lambda", set("lambda"),
                                       "arrival rate");
  app.add_option_function<std::string>(
      "--session", set("session"),
      "session distribution: weibull:k | lognormal:s | exp");
  app.add_option_function<std::string>("--horizon-multiple",
                                       set("horizon_multiple"),
                                       "run length in units of n/lambda");
  app.add_option_function<std::string>("--seed", set("seed"), "RNG seed");
  app.add_option_function<std::string>("--sample-interval",
                                       set("sample_interval"),
                                       "metrics sampling period (0 = auto)");
  app.add_option_function<std::string>("--scenario", set("scenario"),
                                       "steady | rate_change");
  app.add_option_function<std::string>("--tau", set("tau"),
                                       "rate-change instant");
  app.add_option_function<std::string>("--n-prime", set("n_prime"),
                                       "stable size after the rate change");
  app.add_option_function<std::string>(
      "--sweep", set("sweep"), "comma-separated list of sizes to sweep");
  app.add_option_function<std::string>("--out", set("out"),
                                       "output directory");
  app.add_flag_callback(
      "--per-cycle-mode", [&overrides] { overrides["per_cycle_mode"] = "1"; },
      "batch arrivals once per time unit");
  app.add_flag_callback(
      "--self-check", [&overrides] { overrides["validate"] = "1"; },
      "run structural invariant checks at every sample");
  app.add_option_function<std::string>(
      "--resize-interval", set("resize_interval"),
      "mean per-peer inspection gap (0 disables resizing)");
  app.add_flag("--verify", verify, "run the built-in oracle suite and exit");
  app.add_option("--verify-dim", verify_dim, "dimension for --verify");
  app.add_flag("--verify-inject-fault", verify_fault,
               "corrupt the occupancy index to exercise --verify");

  CLI11_PARSE(app, argc, argv);

  try {
    if (verify) {
      uint64_t seed = 1;
      if (auto it = overrides.find("seed"); it != overrides.end())
        seed = std::stoull(it->second);
      return cccnet::run_verify(verify_dim, seed, verify_fault);
    }
    std::map<std::string, std::string> file_values;
    if (!config_path.empty()) file_values = cccnet::read_kv_file(config_path);
    const cccnet::ExperimentSpec spec =
        cccnet::parse_config(file_values, overrides);
    return cccnet::run_experiment(spec);
  } catch (const cccnet::ConfigError& e) {
    std::fprintf(stderr, "cccsim: %s\n", e.what());
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "cccsim: %s\n", e.what());
    return 1;
  }
}
