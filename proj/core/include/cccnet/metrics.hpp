#pragma once

#include <cstdint>
#include <string>
#include <utility>

#include "cccnet/overlay.hpp"
#include "cccnet/rng.hpp"

namespace cccnet {

// One sampled row of the metrics time series. CSV column order follows field
// order here; floats are written with 6 significant digits.
struct MetricsSnapshot {
  double time = 0;
  uint64_t live_peers = 0;
  double coverage = 0;       // occupied fraction of the template vertex set
  double avg_coverage = 0;   // mean coverers per template vertex
  double avg_degree = 0;
  int max_degree = 0;
  int bfs_diameter_est = 0;  // 2 x BFS-tree height from a random live peer
  bool disconnected = false;
  double random_path_len = 0;
  uint64_t path_failures = 0;  // cumulative failed sampled paths
  double search_success_rate = 1.0;  // over the window since the last sample
  double join_messages_mean = 0;     // window mean
  uint64_t tree_repair_messages = 0;  // cumulative
  uint64_t rebuilds = 0;              // cumulative
  uint64_t holes = 0;                 // cumulative hole-formation events
  uint64_t orphaned_keys = 0;         // cumulative
  double avg_dimension = 0;
  double fraction_at_majority_dim = 1.0;
  uint64_t suggestion_messages = 0;         // cumulative
  uint64_t cross_dim_search_failures = 0;   // cumulative
  bool pre_stable = false;  // stability_flag column: 0 pre-warm-up, 1 after
};

// Metrics are computed at the majority dimension during transitions.
double coverage(const OverlayState& ov);
double avg_coverage(const OverlayState& ov);

// (mean, max) overlay degree over live peers.
std::pair<double, int> degree_stats(const OverlayState& ov);

// BFS over overlay adjacency from a uniformly random live peer; returns
// 2 x tree height. Sets *disconnected when the BFS misses a live peer.
int bfs_diameter_estimate(const OverlayState& ov, Rng& rng,
                          bool* disconnected = nullptr);

// Mean bit-fix route length over ceil(log2 N) random ordered pairs of
// distinct live peers; failed routes are excluded and counted.
double random_path_length(const OverlayState& ov, Rng& rng,
                          uint64_t* failures = nullptr);

std::string csv_header();
void append_csv_row(std::string& out, const MetricsSnapshot& s);

}  // namespace cccnet
