#include "cccnet/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <future>
#include <queue>
#include <sstream>

namespace cccnet {

namespace {

std::pair<SessionDist, double> parse_session(const std::string& s) {
  if (s == "exp" || s == "exponential") return {SessionDist::Exponential, 1.0};
  const auto colon = s.find(':');
  const std::string name = s.substr(0, colon);
  double param = 0;
  if (colon != std::string::npos) {
    try {
      param = std::stod(s.substr(colon + 1));
    } catch (const std::exception&) {
      throw ConfigError("bad session parameter in '" + s + "'");
    }
  }
  if (name == "weibull")
    return {SessionDist::Weibull, colon == std::string::npos ? 0.59 : param};
  if (name == "lognormal") {
    if (colon == std::string::npos)
      throw ConfigError("lognormal session needs a sigma, e.g. lognormal:1.5");
    return {SessionDist::Lognormal, param};
  }
  throw ConfigError("unknown session distribution '" + s + "'");
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

double to_double(const std::string& key, const std::string& v) {
  try {
    size_t used = 0;
    const double x = std::stod(v, &used);
    if (used != v.size()) throw std::invalid_argument(v);
    return x;
  } catch (const std::exception&) {
    throw ConfigError("bad numeric value for '" + key + "': " + v);
  }
}

uint64_t to_u64(const std::string& key, const std::string& v) {
  const double x = to_double(key, v);
  if (x < 0 || x != std::floor(x))
    throw ConfigError("'" + key + "' wants a non-negative integer, got " + v);
  return static_cast<uint64_t>(x);
}

bool to_bool(const std::string& key, const std::string& v) {
  if (v == "1" || v == "true" || v == "yes" || v == "on") return true;
  if (v == "0" || v == "false" || v == "no" || v == "off") return false;
  throw ConfigError("bad boolean value for '" + key + "': " + v);
}

void write_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << text;
}

struct SummaryRow {
  uint64_t n = 0;
  int dim = 0;
  uint64_t samples = 0;
  double live_peers = 0, coverage = 0, avg_coverage = 0, avg_degree = 0;
  int max_degree = 0;
  double diameter = 0, path_len = 0, search_success = 1.0;
  uint64_t holes = 0, orphaned_keys = 0;
};

// Means over the post-warm-up samples.
SummaryRow summarize(const Engine& eng) {
  SummaryRow row;
  row.n = eng.config().n;
  row.dim = eng.config().dim;
  double searches = 0;
  for (const auto& s : eng.samples()) {
    if (s.pre_stable) continue;
    ++row.samples;
    row.live_peers += double(s.live_peers);
    row.coverage += s.coverage;
    row.avg_coverage += s.avg_coverage;
    row.avg_degree += s.avg_degree;
    row.max_degree = std::max(row.max_degree, s.max_degree);
    row.diameter += s.bfs_diameter_est;
    row.path_len += s.random_path_len;
    row.search_success += s.search_success_rate;
    ++searches;
    row.holes = s.holes;
    row.orphaned_keys = s.orphaned_keys;
  }
  if (row.samples) {
    const double k = double(row.samples);
    row.live_peers /= k;
    row.coverage /= k;
    row.avg_coverage /= k;
    row.avg_degree /= k;
    row.diameter /= k;
    row.path_len /= k;
    row.search_success = (row.search_success - 1.0) / searches;
  }
  return row;
}

std::string summary_header() {
  return "n,dim,samples,live_peers,coverage,avg_coverage,avg_degree,"
         "max_degree,diameter,path_len,search_success,holes,orphaned_keys\n";
}

void append_summary_row(std::string& out, const SummaryRow& r) {
  char buf[384];
  std::snprintf(buf, sizeof(buf),
                "%llu,%d,%llu,%.6g,%.6g,%.6g,%.6g,%d,%.6g,%.6g,%.6g,%llu,"
                "%llu\n",
                static_cast<unsigned long long>(r.n), r.dim,
                static_cast<unsigned long long>(r.samples), r.live_peers,
                r.coverage, r.avg_coverage, r.avg_degree, r.max_degree,
                r.diameter, r.path_len, r.search_success,
                static_cast<unsigned long long>(r.holes),
                static_cast<unsigned long long>(r.orphaned_keys));
  out += buf;
}

std::string convergence_csv(const Engine& eng) {
  std::string out =
      "time,time_since_onset,live_peers,"
      "fraction_at_majority_dim,avg_dimension,suggestion_messages\n";
  const double onset = eng.resize().cascade_onset_time;
  const double tau = eng.config().rate_change_time;
  for (const auto& s : eng.samples()) {
    if (s.time < tau) continue;
    char buf[256];
    std::snprintf(buf, sizeof(buf), "%.6g,%.6g,%llu,%.6g,%.6g,%llu\n",
                  s.time, onset < 0 ? -1.0 : s.time - onset,
                  static_cast<unsigned long long>(s.live_peers),
                  s.fraction_at_majority_dim, s.avg_dimension,
                  static_cast<unsigned long long>(s.suggestion_messages));
    out += buf;
  }
  return out;
}

bool report(const char* name, bool ok) {
  std::printf("verify %s: %s\n", name, ok ? "pass" : "FAIL");
  return ok;
}

}  // namespace

std::map<std::string, std::string> read_kv_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path);
  std::map<std::string, std::string> out;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string::npos)
      line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError(path + ":" + std::to_string(lineno) +
                        ": expected key=value");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty())
      throw ConfigError(path + ":" + std::to_string(lineno) + ": empty key");
    out[key] = value;
  }
  return out;
}

ExperimentSpec parse_config(
    const std::map<std::string, std::string>& file_values,
    const std::map<std::string, std::string>& overrides) {
  std::map<std::string, std::string> merged = file_values;
  for (const auto& [k, v] : overrides) merged[k] = v;

  ExperimentSpec spec;
  for (const auto& [key, value] : merged) {
    if (key == "n") {
      spec.n = to_u64(key, value);
    } else if (key == "lambda") {
      spec.lambda = to_double(key, value);
    } else if (key == "session") {
      parse_session(value);  // validate eagerly
      spec.session = value;
    } else if (key == "horizon_multiple") {
      spec.horizon_multiple = to_double(key, value);
    } else if (key == "seed") {
      spec.seed = to_u64(key, value);
    } else if (key == "sample_interval") {
      spec.sample_interval = to_double(key, value);
    } else if (key == "scenario") {
      if (value == "steady")
        spec.scenario = Scenario::Steady;
      else if (value == "rate_change")
        spec.scenario = Scenario::RateChange;
      else
        throw ConfigError("unknown scenario '" + value + "'");
    } else if (key == "tau") {
      spec.tau = to_double(key, value);
    } else if (key == "n_prime") {
      spec.n_prime = to_u64(key, value);
    } else if (key == "sweep") {
      spec.sweep.clear();
      std::stringstream ss(value);
      std::string item;
      while (std::getline(ss, item, ','))
        spec.sweep.push_back(to_u64(key, trim(item)));
    } else if (key == "out") {
      spec.out_dir = value;
    } else if (key == "per_cycle_mode") {
      spec.per_cycle = to_bool(key, value);
    } else if (key == "resize_interval") {
      spec.resize_interval = to_double(key, value);
    } else if (key == "data_inserts_per_sample") {
      spec.data_inserts_per_sample = static_cast<int>(to_u64(key, value));
    } else if (key == "data_searches_per_sample") {
      spec.data_searches_per_sample = static_cast<int>(to_u64(key, value));
    } else if (key == "validate") {
      spec.validate = to_bool(key, value);
    } else if (key == "stable_degree") {
      spec.policy.stable_degree = to_double(key, value);
    } else if (key == "degree_buffer") {
      spec.policy.buffer = to_double(key, value);
    } else if (key == "inspect_interval") {
      spec.policy.inspect_interval = to_double(key, value);
    } else if (key == "suggestion_threshold") {
      spec.policy.suggestion_threshold = static_cast<int>(to_u64(key, value));
    } else if (key == "degree_sample_size") {
      spec.policy.sample_size = static_cast<int>(to_u64(key, value));
    } else {
      throw ConfigError("unknown config key '" + key + "'");
    }
  }
  return spec;
}

void ExperimentSpec::check() const {
  if (n == 0 && sweep.empty())
    throw ConfigError("n is required (or a sweep list)");
  if (lambda <= 0) throw ConfigError("lambda must be > 0");
  if (horizon_multiple < 0) throw ConfigError("horizon_multiple must be >= 0");
  parse_session(session);
  if (scenario == Scenario::RateChange) {
    if (!sweep.empty())
      throw ConfigError("rate_change does not combine with a sweep");
    if (tau < 0) throw ConfigError("rate_change needs tau >= 0");
    if (n_prime == 0) throw ConfigError("rate_change needs n_prime > 0");
    if (tau >= horizon_multiple * double(n) / lambda)
      throw ConfigError("tau must fall before the horizon");
  }
}

ChurnConfig ExperimentSpec::churn_config(uint64_t n_value) const {
  ChurnConfig cfg;
  cfg.n = n_value;
  cfg.lambda = lambda;
  const auto [dist, param] = parse_session(session);
  cfg.dist = dist;
  if (dist == SessionDist::Weibull) cfg.shape = param;
  if (dist == SessionDist::Lognormal) cfg.sigma = param;
  cfg.horizon = horizon_multiple * double(n_value) / lambda;
  cfg.seed = seed;
  cfg.sample_interval = sample_interval;
  cfg.per_cycle = per_cycle;
  cfg.validate = validate;
  cfg.policy = policy;
  if (resize_interval >= 0)
    cfg.resize_interval = resize_interval;
  else
    cfg.resize_interval =
        scenario == Scenario::RateChange ? policy.inspect_interval : 0;
  if (scenario == Scenario::RateChange) {
    cfg.rate_change_time = tau;
    cfg.n_prime = n_prime;
  }
  cfg.data_inserts_per_sample = data_inserts_per_sample;
  cfg.data_searches_per_sample = data_searches_per_sample;
  cfg.resolve();
  return cfg;
}

std::string ExperimentSpec::resolved_text() const {
  std::ostringstream out;
  out << "# resolved experiment parameters\n";
  if (!sweep.empty()) {
    out << "sweep=";
    for (size_t i = 0; i < sweep.size(); ++i)
      out << (i ? "," : "") << sweep[i];
    out << "\n";
  } else {
    out << "n=" << n << "\n";
  }
  const uint64_t n0 = sweep.empty() ? n : sweep.front();
  const ChurnConfig cfg = churn_config(n0);
  out << "lambda=" << lambda << "\n"
      << "session=" << session << "\n"
      << "# derived: mean_session=" << cfg.mean_session << "\n"
      << "horizon_multiple=" << horizon_multiple << "\n"
      << "# derived: horizon=" << cfg.horizon << "\n"
      << "seed=" << seed << "\n"
      << "sample_interval=" << cfg.sample_interval << "\n"
      << "# derived: dim=" << cfg.dim << "\n"
      << "scenario="
      << (scenario == Scenario::RateChange ? "rate_change" : "steady") << "\n";
  if (scenario == Scenario::RateChange)
    out << "tau=" << tau << "\n"
        << "n_prime=" << n_prime << "\n";
  out << "per_cycle_mode=" << (per_cycle ? 1 : 0) << "\n"
      << "resize_interval=" << cfg.resize_interval << "\n"
      << "data_inserts_per_sample=" << data_inserts_per_sample << "\n"
      << "data_searches_per_sample=" << data_searches_per_sample << "\n"
      << "validate=" << (validate ? 1 : 0) << "\n"
      << "stable_degree=" << policy.stable_degree << "\n"
      << "degree_buffer=" << policy.buffer << "\n"
      << "inspect_interval=" << policy.inspect_interval << "\n"
      << "suggestion_threshold=" << policy.suggestion_threshold << "\n"
      << "degree_sample_size=" << policy.sample_size << "\n";
  return out.str();
}

int run_experiment(const ExperimentSpec& spec) {
  spec.check();
  const std::filesystem::path dir(spec.out_dir);
  std::filesystem::create_directories(dir);
  write_file(dir / "resolved.conf", spec.resolved_text());

  if (!spec.sweep.empty()) {
    // One engine per sweep size; engines are independent, so run them
    // concurrently.
    std::vector<std::future<std::pair<std::string, SummaryRow>>> futures;
    for (uint64_t n_value : spec.sweep)
      futures.push_back(std::async(std::launch::async, [&spec, n_value] {
        Engine eng(spec.churn_config(n_value));
        eng.run();
        return std::make_pair(eng.metrics_csv(), summarize(eng));
      }));
    std::string summary = summary_header();
    for (size_t i = 0; i < futures.size(); ++i) {
      auto [csv, row] = futures[i].get();
      write_file(dir / ("metrics_" + std::to_string(spec.sweep[i]) + ".csv"),
                 csv);
      append_summary_row(summary, row);
    }
    write_file(dir / "summary.csv", summary);
    return 0;
  }

  Engine eng(spec.churn_config(spec.n));
  eng.run();
  write_file(dir / "metrics.csv", eng.metrics_csv());
  std::string summary = summary_header();
  append_summary_row(summary, summarize(eng));
  write_file(dir / "summary.csv", summary);
  if (spec.scenario == Scenario::RateChange)
    write_file(dir / "convergence.csv", convergence_csv(eng));
  return 0;
}

int run_verify(int dim, uint64_t seed, bool inject_fault) {
  if (dim < 2 || dim > 8) {
    std::printf("verify: dim must be in [2, 8]\n");
    return 2;
  }
  Rng rng(seed);
  const auto space = static_cast<uint32_t>(label_space(dim));
  bool all = true;

  // Adjacency: symmetric, right degree, no self loops.
  {
    bool ok = true;
    for (uint32_t i = 0; i < space && ok; ++i) {
      const VertexLabel v = label_at(dim, i);
      const auto nb = neighbors(v);
      if (static_cast<int>(nb.size()) != (dim >= 3 ? 3 : (dim == 2 ? 2 : 1)))
        ok = false;
      for (const auto& w : nb) {
        if (w == v) ok = false;
        const auto back = neighbors(w);
        if (std::find(back.begin(), back.end(), v) == back.end()) ok = false;
      }
    }
    all &= report("adjacency-symmetry", ok);
  }

  // All-pairs BFS eccentricities against the closed-form diameter.
  {
    int bfs_diameter = 0;
    std::vector<int> dist(space);
    std::vector<std::vector<int>> all_dist(space);
    for (uint32_t s = 0; s < space; ++s) {
      std::fill(dist.begin(), dist.end(), -1);
      std::queue<uint32_t> q;
      dist[s] = 0;
      q.push(s);
      while (!q.empty()) {
        const uint32_t u = q.front();
        q.pop();
        for (const auto& w : neighbors(label_at(dim, u))) {
          const uint32_t wi = label_index(w);
          if (dist[wi] < 0) {
            dist[wi] = dist[u] + 1;
            bfs_diameter = std::max(bfs_diameter, dist[wi]);
            q.push(wi);
          }
        }
      }
      all_dist[s] = dist;
    }
    all &= report("diameter-formula", bfs_diameter == ccc_diameter(dim));

    // Routes: valid paths, never longer than 3*dim, never shorter than the
    // BFS distance.
    bool routes_ok = true;
    const int trials = 500;
    for (int t = 0; t < trials && routes_ok; ++t) {
      const uint32_t a = static_cast<uint32_t>(rng.below(space));
      const uint32_t b = static_cast<uint32_t>(rng.below(space));
      const VertexLabel src = label_at(dim, a), dst = label_at(dim, b);
      const auto path = bit_fix_route(src, dst);
      if (path.front() != src || path.back() != dst) routes_ok = false;
      const int hops = static_cast<int>(path.size()) - 1;
      if (hops > 3 * dim || hops < all_dist[a][b]) routes_ok = false;
      for (size_t i = 0; i + 1 < path.size(); ++i) {
        const auto nb = neighbors(path[i]);
        if (std::find(nb.begin(), nb.end(), path[i + 1]) == nb.end())
          routes_ok = false;
      }
    }
    all &= report("route-oracle", routes_ok);
  }

  // Occupancy index stays consistent under a random join/leave trace.
  {
    OverlayState ov(TemplateParams::for_dim(dim));
    PeerId next = 1;
    for (uint32_t i = 0; i < space * 4; ++i) {
      PeerNode p;
      p.id = next++;
      p.node_id = random_label(dim, rng);
      if (ov.empty()) {
        ov.register_peer(p);
      } else if (!ov.try_join(p, ov.random_live(rng)).ok) {
        ov.register_peer(p);
      }
      if (i % 3 == 2 && ov.size() > 1) ov.leave(ov.random_live(rng), rng);
    }
    for (int k = 0; k < 50; ++k) {
      ov.insert_data(uint64_t(k) + 1, ov.random_live(rng), rng);
      ov.search(ov.random_live(rng), uint64_t(rng.below(50)) + 1);
    }
    if (inject_fault) ov.debug_corrupt_occupancy(ov.peer(ov.random_live(rng)).node_id);
    all &= report("occupancy-index", !ov.occupancy_mismatch().has_value());
  }

  std::printf("verify: %s\n", all ? "all checks passed" : "FAILURES");
  return all ? 0 : 1;
}

}  // namespace cccnet
