#include "cccnet/resize.hpp"

#include <algorithm>
#include <cmath>

namespace cccnet {

InspectReport ResizeProtocol::inspect(OverlayState& ov, PeerId id, Rng& rng,
                                      double now, SpanningTree* tree) {
  InspectReport rep;
  if (!ov.contains(id)) return rep;

  // Average degree A over a sampling of live peers.
  const uint64_t live = ov.size();
  double sum = 0;
  uint64_t count = 0;
  if (live <= static_cast<uint64_t>(policy_.sample_size)) {
    for (PeerId p : ov.live()) {
      sum += ov.overlay_degree(ov.peer(p));
      ++count;
    }
  } else {
    for (int i = 0; i < policy_.sample_size; ++i) {
      sum += ov.overlay_degree(ov.peer(ov.random_live(rng)));
      ++count;
    }
  }
  rep.sampled_avg_degree = count ? sum / double(count) : 0;

  if (rep.sampled_avg_degree < policy_.stable_degree - policy_.buffer)
    rep.decision = ResizeDecision::Decrease;
  else if (rep.sampled_avg_degree > policy_.stable_degree + policy_.buffer)
    rep.decision = ResizeDecision::Increase;
  if (rep.decision == ResizeDecision::None) return rep;

  const bool increase = rep.decision == ResizeDecision::Increase;
  if (!ov.change_dim(id, increase, rng)) {
    rep.decision = ResizeDecision::None;
    return rep;
  }
  ++dim_changes;
  if (first_change_time < 0) first_change_time = now;
  if (tree) tree->mark_stale();

  std::vector<Pending> queue;
  std::unordered_set<PeerId> changed{id};
  flood(ov, ov.peer(id), queue);
  // Zero-delay suggestion delivery; adoptions propagate immediately.
  for (size_t i = 0; i < queue.size(); ++i) {
    Pending msg = queue[i];
    if (deliver(ov, msg, tree, rng, queue, changed, now)) ++rep.adoptions;
  }
  rep.suggestions_sent = static_cast<int>(queue.size());
  return rep;
}

void ResizeProtocol::flood(OverlayState& ov, const PeerNode& p,
                           std::vector<Pending>& queue) {
  for (PeerId nb : ov.neighbor_peers(p)) {
    queue.push_back({nb, p.id, p.dim()});
    ++suggestion_messages;
  }
}

bool ResizeProtocol::deliver(OverlayState& ov, const Pending& msg,
                             SpanningTree* tree, Rng& rng,
                             std::vector<Pending>& queue,
                             std::unordered_set<PeerId>& changed, double now) {
  if (!ov.contains(msg.target)) return false;
  if (changed.count(msg.target)) return false;
  PeerNode& p = ov.peer_mut(msg.target);
  if (msg.suggested_dim == p.dim() || msg.suggested_dim < 2) return false;

  auto& senders = p.suggestion_senders[msg.suggested_dim];
  auto it = std::lower_bound(senders.begin(), senders.end(), msg.from);
  if (it != senders.end() && *it == msg.from) return false;  // distinct senders
  senders.insert(it, msg.from);
  if (senders.size() < static_cast<size_t>(policy_.suggestion_threshold))
    return false;

  // Threshold reached: one step toward the suggested dimension, counters
  // reset, then propagate.
  const bool increase = msg.suggested_dim > p.dim();
  if (!ov.change_dim(p.id, increase, rng)) return false;
  changed.insert(p.id);
  p.suggestion_senders.clear();
  ++dim_changes;
  ++suggestion_adoptions;
  if (cascade_onset_time < 0) cascade_onset_time = now;
  if (tree) tree->mark_stale();
  flood(ov, p, queue);
  return true;
}

bool ResizeProtocol::handle_suggestion(OverlayState& ov, PeerId target,
                                       PeerId from, int suggested_dim,
                                       SpanningTree* tree, Rng& rng,
                                       double now) {
  std::vector<Pending> queue;
  std::unordered_set<PeerId> changed;
  return deliver(ov, {target, from, suggested_dim}, tree, rng, queue, changed,
                 now);
}

int ResizeProtocol::join_dimension(const OverlayState& ov, PeerId entry_point,
                                   int fallback) const {
  if (!ov.contains(entry_point)) return fallback;
  const VertexLabel& entry = ov.peer(entry_point).node_id;
  // Everyone sharing the entry vertex, across the live dimensions.
  double sum = 0;
  uint64_t count = 0;
  for (const auto& [d, live] : ov.dims_live()) {
    for (const auto& l : compat_equal_labels(entry, d)) {
      for (PeerId id : ov.coverers(l)) {
        sum += ov.peer(id).dim();
        ++count;
      }
    }
  }
  if (count == 0) return fallback;
  // Round half up.
  return static_cast<int>(std::floor(sum / double(count) + 0.5));
}

}  // namespace cccnet
