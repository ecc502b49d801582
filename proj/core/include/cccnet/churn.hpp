#pragma once

#include <cstdint>
#include <optional>
#include <queue>
#include <stdexcept>
#include <vector>

#include "cccnet/metrics.hpp"
#include "cccnet/overlay.hpp"
#include "cccnet/resize.hpp"
#include "cccnet/rng.hpp"
#include "cccnet/tree.hpp"

namespace cccnet {

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

enum class SessionDist { Weibull, Lognormal, Exponential };

// Draw from the named distribution scaled so its mean equals `mean`.
double sample_session(SessionDist dist, double param, double mean, Rng& rng);

struct ChurnConfig {
  uint64_t n = 0;            // expected stable network size, lambda * mean
  double lambda = 1.0;       // arrival rate
  SessionDist dist = SessionDist::Weibull;
  double shape = 0.59;       // Weibull shape k
  double sigma = 1.5;        // lognormal sigma
  double mean_session = 0;   // resolved to n / lambda when 0
  double horizon = 0;
  uint64_t seed = 1;
  double sample_interval = 0;   // resolved to max(1, n/50) when 0
  double resize_interval = 0;   // mean per-peer inspection gap; 0 disables
  int dim = 0;                  // resolved via dimension_for(n) when 0
  bool per_cycle = false;       // batch arrivals per unit-time cycle
  double rate_change_time = -1;  // instant of the lambda change; < 0 disables
  uint64_t n_prime = 0;          // new stable size after the rate change
  int data_inserts_per_sample = 0;
  int data_searches_per_sample = 0;
  int join_retry_limit = 3;  // failed joins retry next tick this many times
  bool validate = false;     // run invariant self-checks during the run
  ResizePolicy policy;

  void resolve();  // fills derived fields, throws ConfigError when invalid
};

struct EngineStats {
  uint64_t arrivals = 0;
  uint64_t departures = 0;
  uint64_t forced_joins = 0;     // joins registered after exhausting retries
  uint64_t stale_events = 0;     // events referencing departed peers
  uint64_t inspections = 0;
  uint64_t data_inserts = 0;
  uint64_t data_searches = 0;
  uint64_t data_search_successes = 0;
  uint64_t cross_dim_search_failures = 0;
};

// The single-threaded deterministic event loop: Poisson arrivals, sampled
// session departures, metrics samples, and resize ticks, in (time, sequence)
// order.
class Engine {
 public:
  explicit Engine(ChurnConfig config);

  // Runs every event with time <= t.
  void run_until(double t);
  // Runs to the horizon and appends the final snapshot.
  void run();

  double now() const { return now_; }
  bool finished() const { return finished_; }

  OverlayState& overlay() { return overlay_; }
  const OverlayState& overlay() const { return overlay_; }
  SpanningTree& tree() { return tree_; }
  const SpanningTree& tree() const { return tree_; }
  ResizeProtocol& resize() { return resize_; }
  const ResizeProtocol& resize() const { return resize_; }
  Rng& rng() { return rng_; }
  const ChurnConfig& config() const { return config_; }
  const EngineStats& stats() const { return stats_; }
  const std::vector<MetricsSnapshot>& samples() const { return samples_; }

  // Keys successfully inserted so far (search targets).
  const std::vector<uint64_t>& key_registry() const { return keys_; }

  bool pre_stable(double t) const { return t < 5.0 * config_.mean_session; }

  // Inserts one key from a random live origin; registers it on success.
  InsertReport insert_random_key(double t);
  // Searches a uniformly random registered key from a random live origin.
  std::optional<SearchResult> search_random_key();

  MetricsSnapshot snapshot(double t);
  std::string metrics_csv() const;

  // Per-departure tree repair message counts (kept when enabled; used by the
  // deletion-cost audit).
  void record_delete_messages(bool on) { record_delete_msgs_ = on; }
  const std::vector<int>& delete_messages() const { return delete_msgs_; }
  const std::vector<int>& insert_repair_messages() const { return insert_msgs_; }
  uint64_t tree_deletions() const { return tree_deletions_; }
  uint64_t tree_rebuild_requests() const { return tree_rebuild_requests_; }

 private:
  enum class EventKind : uint8_t {
    Cycle,      // per-cycle batch arrivals
    Arrival,
    JoinRetry,
    Departure,
    ResizeTick,
    RateChange,
    Sample,
  };

  struct Event {
    double time = 0;
    uint64_t seq = 0;
    EventKind kind = EventKind::Arrival;
    PeerId peer = 0;
    VertexLabel label;
    double departure = 0;
    int retries = 0;
    double arrival = 0;

    bool operator>(const Event& o) const {
      if (time != o.time) return time > o.time;
      return seq > o.seq;
    }
  };

  void schedule(Event e);
  void dispatch(const Event& e);
  void handle_arrival(double t);
  void attempt_join(const Event& e);
  void admit(const PeerNode& node, int messages);
  void handle_departure(const Event& e);
  void handle_sample(double t);
  void handle_resize_tick(double t);
  void maybe_rebuild_tree();
  void self_check();
  int pick_arrival_dim();

  ChurnConfig config_;
  Rng rng_;
  OverlayState overlay_;
  SpanningTree tree_;
  ResizeProtocol resize_;
  std::priority_queue<Event, std::vector<Event>, std::greater<Event>> queue_;
  uint64_t next_seq_ = 0;
  PeerId next_peer_ = 1;
  uint64_t next_key_ = 1;
  double now_ = 0;
  double lambda_now_ = 0;
  bool finished_ = false;
  std::vector<MetricsSnapshot> samples_;
  std::vector<uint64_t> keys_;
  EngineStats stats_;

  // Window accumulators, reset at each sample.
  uint64_t window_joins_ = 0, window_join_messages_ = 0;
  uint64_t window_searches_ = 0, window_search_hits_ = 0;
  uint64_t path_failures_ = 0;

  bool record_delete_msgs_ = false;
  std::vector<int> delete_msgs_;
  std::vector<int> insert_msgs_;
  uint64_t tree_deletions_ = 0;
  uint64_t tree_rebuild_requests_ = 0;
  uint64_t events_since_check_ = 0;
};

}  // namespace cccnet
