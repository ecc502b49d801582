#include "cccnet/tree.hpp"

#include <algorithm>
#include <queue>

namespace cccnet {

uint32_t SpanningTree::root_index() const { return 0; }  // <all-zeros word, 1>

bool SpanningTree::can_build(const OverlayState& ov) const {
  auto d = ov.uniform_dim();
  if (!d) return false;
  return ov.occupied_labels(*d) == label_space(*d);
}

bool SpanningTree::try_build(OverlayState& ov) {
  auto d = ov.uniform_dim();
  if (!d || ov.occupied_labels(*d) != label_space(*d)) return false;
  dim_ = *d;
  const auto space = static_cast<uint32_t>(label_space(dim_));

  // BFS tree T_H on the template, rooted at <0...0, 1>.
  th_parent_.assign(space, space);
  th_children_.assign(space, {});
  std::queue<uint32_t> q;
  th_parent_[root_index()] = root_index();
  q.push(root_index());
  while (!q.empty()) {
    const uint32_t u = q.front();
    q.pop();
    for (const auto& nb : neighbors(label_at(dim_, u))) {
      const uint32_t v = label_index(nb);
      if (th_parent_[v] == space) {
        th_parent_[v] = u;
        th_children_[u].push_back(v);
        q.push(v);
      }
    }
  }

  leader_.assign(space, 0);
  parent_.clear();
  parent_.reserve(ov.size());
  for (uint32_t idx = 0; idx < space; ++idx)
    leader_[idx] = ov.coverers(label_at(dim_, idx)).front();
  root_peer_ = leader_[root_index()];
  for (PeerId id : ov.live()) {
    PeerNode& p = ov.peer_mut(id);
    const uint32_t idx = label_index(p.node_id);
    if (leader_[idx] == id) {
      p.is_leader = true;
      parent_[id] = (idx == root_index()) ? id : leader_[th_parent_[idx]];
    } else {
      p.is_leader = false;
      parent_[id] = leader_[idx];
    }
  }
  built_ = true;
  ++builds_;
  return true;
}

TreeRepair SpanningTree::on_insert(OverlayState& ov, PeerId id) {
  TreeRepair rep;
  if (!built_) return rep;
  PeerNode& p = ov.peer_mut(id);
  if (p.dim() != dim_) {
    mark_stale();
    rep.rebuild_needed = true;
    return rep;
  }
  const uint32_t idx = label_index(p.node_id);
  rep.applied = true;
  if (leader_[idx] != 0) {
    p.is_leader = false;
    parent_[id] = leader_[idx];
    rep.messages = 1;
  } else {
    // Sole coverer mid-churn: becomes leader, wired per T_H.
    p.is_leader = true;
    leader_[idx] = id;
    rep.messages = 1;
    if (idx == root_index()) {
      root_peer_ = id;
      parent_[id] = id;
    } else {
      const PeerId pl = leader_[th_parent_[idx]];
      if (pl == 0) {
        mark_stale();
        rep.applied = false;
        rep.rebuild_needed = true;
        return rep;
      }
      parent_[id] = pl;
    }
    for (uint32_t c : th_children_[idx])
      if (leader_[c] != 0) {
        parent_[leader_[c]] = id;
        ++rep.messages;
      }
  }
  repair_messages_ += rep.messages;
  return rep;
}

TreeRepair SpanningTree::on_delete(OverlayState& ov, const PeerNode& departed) {
  TreeRepair rep;
  if (!built_) return rep;
  if (departed.dim() != dim_) {
    mark_stale();
    rep.rebuild_needed = true;
    return rep;
  }
  const uint32_t idx = label_index(departed.node_id);
  if (!departed.is_leader) {
    parent_.erase(departed.id);
    rep.applied = true;
    return rep;
  }
  const auto& clique = ov.coverers(departed.node_id);
  if (clique.empty()) {
    // The departure left a hole: reconstruct from scratch at the next
    // hole-free instant.
    parent_.erase(departed.id);
    leader_[idx] = 0;
    mark_stale();
    rep.rebuild_needed = true;
    return rep;
  }
  // Promote the lowest remaining coverer; it inherits the departed leader's
  // tree position (parent plus leader-children).
  const PeerId x = clique.front();
  const PeerId old_parent = parent_.at(departed.id);
  parent_.erase(departed.id);
  leader_[idx] = x;
  ov.peer_mut(x).is_leader = true;
  if (departed.id == root_peer_) {
    root_peer_ = x;
    parent_[x] = x;
  } else {
    parent_[x] = old_parent;
  }
  rep.messages = static_cast<int>(clique.size());  // clique-wide election round
  for (PeerId y : clique)
    if (y != x) parent_[y] = x;
  for (uint32_t c : th_children_[idx])
    if (leader_[c] != 0 && leader_[c] != x) {
      parent_[leader_[c]] = x;
      ++rep.messages;
    }
  rep.applied = true;
  repair_messages_ += rep.messages;
  return rep;
}

TreeCheck SpanningTree::validate(const OverlayState& ov) const {
  TreeCheck check;
  if (!built_) return check;
  if (parent_.size() != ov.size()) return check;

  std::unordered_map<PeerId, std::vector<PeerId>> adj;
  adj.reserve(parent_.size());
  check.edges_valid = true;
  check.leaves_ok = true;
  for (const auto& [p, par] : parent_) {
    if (!ov.contains(p)) return check;
    if (p == par) {
      if (p != root_peer_) return check;
      continue;
    }
    adj[p].push_back(par);
    adj[par].push_back(p);
    const auto& lp = ov.peer(p).node_id;
    const auto& lq = ov.peer(par).node_id;
    if (lp != lq) {
      const auto nbs = neighbors(lp);
      if (std::find(nbs.begin(), nbs.end(), lq) == nbs.end())
        check.edges_valid = false;
    }
    if (!ov.peer(par).is_leader) check.leaves_ok = false;
  }

  // BFS from the root: reaching every live peer over live-1 edges means the
  // edge set is a single spanning tree.
  auto bfs = [&](PeerId start, PeerId* farthest) {
    std::unordered_map<PeerId, int> dist;
    dist.reserve(parent_.size());
    std::queue<PeerId> q;
    dist[start] = 0;
    q.push(start);
    int ecc = 0;
    PeerId far = start;
    while (!q.empty()) {
      const PeerId u = q.front();
      q.pop();
      auto it = adj.find(u);
      if (it == adj.end()) continue;
      for (PeerId v : it->second)
        if (!dist.count(v)) {
          dist[v] = dist[u] + 1;
          if (dist[v] > ecc) {
            ecc = dist[v];
            far = v;
          }
          q.push(v);
        }
    }
    if (farthest) *farthest = far;
    return std::pair<size_t, int>(dist.size(), ecc);
  };

  PeerId far = root_peer_;
  auto [reached, ecc0] = bfs(root_peer_, &far);
  check.spans = reached == ov.size();
  check.acyclic = check.spans;  // n nodes, n-1 edges, connected
  auto [r2, ecc1] = bfs(far, nullptr);
  (void)r2;
  (void)ecc0;
  check.diameter = ecc1;
  return check;
}

}  // namespace cccnet
