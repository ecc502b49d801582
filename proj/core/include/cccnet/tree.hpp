#pragma once

#include <cstdint>
#include <unordered_map>
#include <vector>

#include "cccnet/overlay.hpp"

namespace cccnet {

struct TreeRepair {
  bool applied = false;        // false when the tree is unbuilt or stale
  bool rebuild_needed = false;
  int messages = 0;
};

struct TreeCheck {
  bool spans = false;
  bool acyclic = false;
  bool edges_valid = false;
  bool leaves_ok = false;  // non-leaders are leaves
  int diameter = 0;

  bool ok() const { return spans && acyclic && edges_valid && leaves_ok; }
};

// Spanning tree of diameter O(D) over the overlay: a BFS tree on the template
// graph connects per-label leaders (lowest peer id in the clique); non-leaders
// attach as leaf children of their label's leader. Maintained incrementally
// under churn; a departure that empties a clique forces a rebuild at the next
// hole-free instant.
class SpanningTree {
 public:
  bool built() const { return built_; }
  int dim() const { return dim_; }

  // Buildable iff all peers share one dimension and every template vertex of
  // that dimension is occupied.
  bool can_build(const OverlayState& ov) const;

  // Builds (or rebuilds) from scratch. Returns false when not buildable.
  bool try_build(OverlayState& ov);

  void mark_stale() { built_ = false; }

  TreeRepair on_insert(OverlayState& ov, PeerId id);
  // Called after the peer has been removed from the overlay.
  TreeRepair on_delete(OverlayState& ov, const PeerNode& departed);

  TreeCheck validate(const OverlayState& ov) const;

  uint64_t builds() const { return builds_; }
  // Rebuilds beyond the initial construction.
  uint64_t rebuilds() const { return builds_ > 0 ? builds_ - 1 : 0; }
  uint64_t repair_messages() const { return repair_messages_; }

 private:
  uint32_t root_index() const;

  bool built_ = false;
  int dim_ = 0;
  std::vector<uint32_t> th_parent_;               // label index -> parent index
  std::vector<std::vector<uint32_t>> th_children_;
  std::vector<PeerId> leader_;                    // label index -> leader (0 = none)
  std::unordered_map<PeerId, PeerId> parent_;     // peer -> parent (root -> itself)
  PeerId root_peer_ = 0;
  uint64_t builds_ = 0;
  uint64_t repair_messages_ = 0;
};

}  // namespace cccnet
