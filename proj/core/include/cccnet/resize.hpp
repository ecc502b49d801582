#pragma once

#include <cstdint>
#include <unordered_set>

#include "cccnet/overlay.hpp"
#include "cccnet/tree.hpp"

namespace cccnet {

struct ResizePolicy {
  double stable_degree = 100.0;
  double buffer = 65.0;          // dead-band half-width around stable_degree
  double inspect_interval = 250.0;
  int suggestion_threshold = 5;  // distinct senders required to adopt
  int sample_size = 8;
};

enum class ResizeDecision { None, Increase, Decrease };

struct InspectReport {
  ResizeDecision decision = ResizeDecision::None;
  double sampled_avg_degree = 0;
  int suggestions_sent = 0;   // total deliveries including cascade propagation
  int adoptions = 0;          // suggestion-threshold adoptions triggered
};

// Decentralized dimension adjustment: sampled-average-degree inspections with
// a dead band, single-step dimension changes, and suggestion messages that
// propagate the change across the network.
class ResizeProtocol {
 public:
  explicit ResizeProtocol(ResizePolicy policy) : policy_(policy) {}

  const ResizePolicy& policy() const { return policy_; }

  // One inspection on the peer's resize tick: samples sample_size live peers'
  // degrees (all of them when fewer exist), applies the threshold decision,
  // and on a non-none decision steps the peer's own dimension by one and
  // floods suggestions, cascading threshold adoptions immediately.
  InspectReport inspect(OverlayState& ov, PeerId id, Rng& rng, double now,
                        SpanningTree* tree);

  // One suggestion delivered in isolation (no cascade): counts the sender,
  // adopts one step toward suggested_dim at the distinct-sender threshold.
  // Returns true on adoption.
  bool handle_suggestion(OverlayState& ov, PeerId target, PeerId from,
                         int suggested_dim, SpanningTree* tree, Rng& rng,
                         double now);

  // Dimension for a joining peer during a transition: round-half-up mean of
  // the dimensions of the peers covering the entry peer's vertex.
  int join_dimension(const OverlayState& ov, PeerId entry_point,
                     int fallback) const;

  uint64_t suggestion_messages = 0;
  uint64_t dim_changes = 0;
  uint64_t suggestion_adoptions = 0;
  double first_change_time = -1;   // first inspection-triggered change
  double cascade_onset_time = -1;  // first suggestion-threshold adoption

 private:
  struct Pending {
    PeerId target;
    PeerId from;
    int suggested_dim;
  };

  // Delivers one suggestion; returns true when the peer adopts. A peer
  // changes dimension at most once per zero-delay cascade (`changed`), which
  // keeps the cascade finite.
  bool deliver(OverlayState& ov, const Pending& msg, SpanningTree* tree,
               Rng& rng, std::vector<Pending>& queue,
               std::unordered_set<PeerId>& changed, double now);
  void flood(OverlayState& ov, const PeerNode& p, std::vector<Pending>& queue);

  ResizePolicy policy_;
};

}  // namespace cccnet
