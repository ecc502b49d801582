#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "cccnet/churn.hpp"

namespace cccnet {

enum class Scenario { Steady, RateChange };

struct ExperimentSpec {
  uint64_t n = 0;
  double lambda = 1.0;
  std::string session = "weibull:0.59";  // weibull:k | lognormal:s | exp
  double horizon_multiple = 30.0;
  uint64_t seed = 1;
  double sample_interval = 0;  // 0 = auto
  Scenario scenario = Scenario::Steady;
  double tau = -1;           // rate-change instant (rate_change scenario)
  uint64_t n_prime = 0;      // new stable size
  std::vector<uint64_t> sweep;  // optional list of N values
  std::string out_dir = ".";
  bool per_cycle = false;
  double resize_interval = -1;  // -1 = scenario default
  int data_inserts_per_sample = 10;
  int data_searches_per_sample = 20;
  bool validate = false;
  ResizePolicy policy;

  // Throws ConfigError on contradictions (e.g. rate_change without tau).
  void check() const;
  // Churn config for one run at stable size `n_value`.
  ChurnConfig churn_config(uint64_t n_value) const;
  // key=value form, echoed to the output directory for provenance.
  std::string resolved_text() const;
};

// Parses a line-oriented key=value file ('#' comments), then applies
// overrides (flag values). Unknown keys throw ConfigError naming the key.
ExperimentSpec parse_config(const std::map<std::string, std::string>& file_values,
                            const std::map<std::string, std::string>& overrides);
std::map<std::string, std::string> read_kv_file(const std::string& path);

// Runs the experiment and writes metrics.csv (per-N CSVs and summary.csv for
// sweeps; convergence.csv for rate changes) plus the resolved spec under
// spec.out_dir. Returns 0 on success.
int run_experiment(const ExperimentSpec& spec);

// Brute-force oracle suite at small scale: route validity/length vs all-pairs
// BFS, diameter formula, adjacency symmetry, occupancy-index rebuild
// equality. Prints one pass/fail line per check; returns 0 when all pass.
int run_verify(int dim, uint64_t seed, bool inject_fault = false);

}  // namespace cccnet
