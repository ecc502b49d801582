#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "cccnet/label.hpp"
#include "cccnet/rng.hpp"

namespace cccnet {

using PeerId = uint64_t;

// Dimension used throughout a run at stable size N: ceil(log2(N / log2(N)^2)).
// Throws ConfigError when N is too small to yield a dimension >= 2.
int dimension_for(uint64_t n);

struct PeerNode {
  PeerId id = 0;
  VertexLabel node_id;
  double arrival_time = 0;
  double scheduled_departure = 0;
  std::vector<uint64_t> stored_keys;  // sorted key ids
  bool is_leader = false;
  uint32_t live_index = 0;  // position in the live-peer list
  // Distinct senders per suggested dimension (resize protocol state).
  std::map<int, std::vector<PeerId>> suggestion_senders;

  int dim() const { return node_id.dim; }
};

struct JoinReport {
  bool ok = false;
  bool hole = false;     // route hit an unoccupied vertex
  int hops = 0;
  int messages = 0;
};

struct LeaveReport {
  bool hole = false;     // label left unoccupied
  int keys_moved = 0;
  int keys_orphaned = 0;
  int data_messages = 0;
};

struct InsertReport {
  bool ok = false;
  bool hole = false;
  int hops = 0;
  int messages = 0;
  PeerId stored_at = 0;
};

enum class SearchStatus { Found, HoleOnRoute, DataLost };

struct SearchResult {
  SearchStatus status = SearchStatus::Found;
  bool cross_dim = false;  // a hop or probe needed cross-dimension coverers
  int hops = 0;
  int messages = 0;
  std::vector<VertexLabel> path;

  bool found() const { return status == SearchStatus::Found; }
};

struct RouteWalk {
  bool ok = false;
  bool used_cross_dim = false;
  int hops = 0;
  VertexLabel hole;  // first unoccupied vertex when !ok
  std::vector<VertexLabel> path;
};

struct OverlayCounters {
  uint64_t join_failures = 0;
  uint64_t insert_failures = 0;
  uint64_t hole_events = 0;
  uint64_t orphaned_keys = 0;
  // Routing messages attributable to departures. Never incremented; the
  // deletion-overhead audit asserts it stays zero.
  uint64_t departure_routing_messages = 0;
  uint64_t data_transfer_messages = 0;
  uint64_t message_counter = 0;
  uint64_t hop_counter = 0;
};

// The dynamic P2P network: peers covering template vertices, the occupancy
// index, join/leave with data handoff, and DHT insert/search over bit-fixing
// routes. Overlay adjacency is derived: two peers are neighbors iff their
// node-ids are equal or template-adjacent (same-label cliques plus template
// edges). Mixed dimensions compare labels truncated to the smaller dimension.
class OverlayState {
 public:
  explicit OverlayState(TemplateParams params);

  const TemplateParams& params() const { return params_; }

  uint64_t size() const { return live_.size(); }
  bool empty() const { return live_.empty(); }
  const std::vector<PeerId>& live() const { return live_; }
  PeerId random_live(Rng& rng) const;

  bool contains(PeerId id) const { return peers_.count(id) != 0; }
  const PeerNode& peer(PeerId id) const { return peers_.at(id); }
  PeerNode& peer_mut(PeerId id) { return peers_.at(id); }
  const std::unordered_map<PeerId, PeerNode>& peers() const { return peers_; }

  // Registers a peer unconditionally (bootstrap / forced join). Returns the
  // number of overlay neighbors at registration time.
  int register_peer(const PeerNode& node);

  // Join protocol: charge a bit-fix route from the entry point's label to the
  // candidate's label, then register and charge one message per overlay
  // neighbor. A hole on the route fails the join (candidate not registered).
  JoinReport try_join(const PeerNode& candidate, PeerId entry_point);

  // Departure: zero routing messages; stored keys are handed to a uniformly
  // random remaining coverer of the same label (cross-dimension compatible
  // coverers as a fallback during transitions), else orphaned.
  LeaveReport leave(PeerId id, Rng& rng);

  InsertReport insert_data(uint64_t key_id, PeerId origin, Rng& rng);
  SearchResult search(PeerId origin, uint64_t key_id);

  // Coverers of a label at exactly its dimension, sorted ascending.
  const std::vector<PeerId>& coverers(const VertexLabel& l) const;
  // Exact coverers if any; otherwise prefix-compatible coverers from the
  // other live dimensions (sorted, distinct).
  std::vector<PeerId> compatible_coverers(const VertexLabel& l) const;

  int overlay_degree(const PeerNode& p) const;
  // Overlay neighbors of p, sorted ascending, excluding p itself.
  std::vector<PeerId> neighbor_peers(const PeerNode& p) const;

  // Walks the bit-fix route between two labels of equal dimension, requiring
  // a live (compatible) coverer at every vertex past the first.
  RouteWalk walk_route(const VertexLabel& from, const VertexLabel& to) const;

  // Relabels a peer one dimension up (append a random bit) or down (drop the
  // last bit, clamp cycle_pos), rewires occupancy, and re-homes its stored
  // keys at the new dimension. Returns false when a decrease would drop the
  // dimension below 2.
  bool change_dim(PeerId id, bool increase, Rng& rng);

  // dim -> live peer count, ascending by dim.
  const std::map<int, uint64_t>& dims_live() const { return dims_live_; }
  std::optional<int> uniform_dim() const;
  int majority_dim() const;
  double avg_dimension() const;
  uint64_t peers_at_dim(int dim) const;
  uint64_t occupied_labels(int dim) const;

  bool key_lost(uint64_t key_id) const { return lost_keys_.count(key_id) != 0; }

  OverlayCounters& counters() { return counters_; }
  const OverlayCounters& counters() const { return counters_; }

  // Verifies that rebuilding the occupancy index from the peer map reproduces
  // the stored index. Returns the first mismatching label, if any.
  std::optional<VertexLabel> occupancy_mismatch() const;

  // Test-only fault injection: drops one coverer entry from the index.
  void debug_corrupt_occupancy(const VertexLabel& l);

 private:
  void occupancy_insert(const VertexLabel& l, PeerId id);
  void occupancy_erase(const VertexLabel& l, PeerId id);
  void rehome_keys(PeerNode& p, Rng& rng);

  TemplateParams params_;
  std::unordered_map<PeerId, PeerNode> peers_;
  std::unordered_map<uint64_t, std::vector<PeerId>> occupancy_;  // packed label
  std::vector<PeerId> live_;
  std::map<int, uint64_t> dims_live_;
  std::map<int, uint64_t> occupied_;  // dim -> occupied label count
  std::unordered_set<uint64_t> lost_keys_;
  OverlayCounters counters_;
};

}  // namespace cccnet
