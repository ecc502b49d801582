#include "cccnet/overlay.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "cccnet/churn.hpp"
#include "cccnet/hash.hpp"

namespace cccnet {

namespace {

const std::vector<PeerId> kNoCoverers;

void sorted_insert(std::vector<PeerId>& v, PeerId id) {
  v.insert(std::lower_bound(v.begin(), v.end(), id), id);
}

bool sorted_erase(std::vector<PeerId>& v, PeerId id) {
  auto it = std::lower_bound(v.begin(), v.end(), id);
  if (it == v.end() || *it != id) return false;
  v.erase(it);
  return true;
}

void sorted_insert_key(std::vector<uint64_t>& v, uint64_t k) {
  v.insert(std::lower_bound(v.begin(), v.end(), k), k);
}

bool holds_key(const PeerNode& p, uint64_t k) {
  return std::binary_search(p.stored_keys.begin(), p.stored_keys.end(), k);
}

}  // namespace

int dimension_for(uint64_t n) {
  if (n < 16) throw ConfigError("dimension_for: N must be >= 16");
  const double lg = std::log2(static_cast<double>(n));
  const int r = static_cast<int>(std::ceil(std::log2(n / (lg * lg))));
  if (r < 2) throw ConfigError("dimension_for: N too small for dimension >= 2");
  return r;
}

OverlayState::OverlayState(TemplateParams params) : params_(params) {}

PeerId OverlayState::random_live(Rng& rng) const {
  if (live_.empty()) throw std::logic_error("random_live: empty network");
  return live_[rng.below(live_.size())];
}

void OverlayState::occupancy_insert(const VertexLabel& l, PeerId id) {
  auto& v = occupancy_[l.packed()];
  if (v.empty()) ++occupied_[l.dim];
  sorted_insert(v, id);
}

void OverlayState::occupancy_erase(const VertexLabel& l, PeerId id) {
  auto it = occupancy_.find(l.packed());
  if (it == occupancy_.end() || !sorted_erase(it->second, id)) return;
  if (it->second.empty()) {
    occupancy_.erase(it);
    if (--occupied_[l.dim] == 0) occupied_.erase(l.dim);
  }
}

int OverlayState::register_peer(const PeerNode& node) {
  auto [it, inserted] = peers_.emplace(node.id, node);
  if (!inserted) throw std::logic_error("register_peer: duplicate peer id");
  it->second.live_index = static_cast<uint32_t>(live_.size());
  live_.push_back(node.id);
  occupancy_insert(node.node_id, node.id);
  ++dims_live_[node.dim()];
  return overlay_degree(it->second);
}

JoinReport OverlayState::try_join(const PeerNode& candidate, PeerId entry_point) {
  JoinReport rep;
  if (live_.empty()) {
    register_peer(candidate);
    rep.ok = true;
    return rep;
  }
  const PeerNode& entry = peer(entry_point);
  const VertexLabel from = entry.node_id;
  const VertexLabel to = adapt_label(candidate.node_id, entry.dim());
  RouteWalk walk = walk_route(from, to);
  rep.hops = walk.hops;
  if (!walk.ok) {
    rep.hole = true;
    ++counters_.join_failures;
    counters_.message_counter += walk.hops;
    counters_.hop_counter += walk.hops;
    return rep;
  }
  const int degree = register_peer(candidate);
  rep.ok = true;
  rep.messages = rep.hops + degree;
  counters_.message_counter += rep.messages;
  counters_.hop_counter += rep.hops;
  return rep;
}

LeaveReport OverlayState::leave(PeerId id, Rng& rng) {
  LeaveReport rep;
  auto it = peers_.find(id);
  if (it == peers_.end()) throw std::logic_error("leave: unknown peer");
  PeerNode node = std::move(it->second);
  peers_.erase(it);

  // Swap-remove from the live list.
  const uint32_t idx = node.live_index;
  if (idx + 1 != live_.size()) {
    live_[idx] = live_.back();
    peers_.at(live_[idx]).live_index = idx;
  }
  live_.pop_back();
  occupancy_erase(node.node_id, id);
  if (--dims_live_[node.dim()] == 0) dims_live_.erase(node.dim());

  const auto& clique = coverers(node.node_id);
  if (clique.empty()) {
    rep.hole = true;
    ++counters_.hole_events;
  }
  if (!node.stored_keys.empty()) {
    std::vector<PeerId> recipients = clique;
    if (recipients.empty()) recipients = compatible_coverers(node.node_id);
    if (!recipients.empty()) {
      PeerNode& target = peers_.at(recipients[rng.below(recipients.size())]);
      for (uint64_t k : node.stored_keys) sorted_insert_key(target.stored_keys, k);
      rep.keys_moved = static_cast<int>(node.stored_keys.size());
      rep.data_messages = 1;
      ++counters_.data_transfer_messages;
    } else {
      for (uint64_t k : node.stored_keys) lost_keys_.insert(k);
      rep.keys_orphaned = static_cast<int>(node.stored_keys.size());
      counters_.orphaned_keys += node.stored_keys.size();
    }
  }
  // Deletions charge no routing messages; counters_.departure_routing_messages
  // stays untouched.
  return rep;
}

InsertReport OverlayState::insert_data(uint64_t key_id, PeerId origin, Rng& rng) {
  InsertReport rep;
  const PeerNode& o = peer(origin);
  const VertexLabel home = hash_key(key_bytes(key_id), o.dim());
  RouteWalk walk = walk_route(o.node_id, home);
  rep.hops = walk.hops;
  counters_.hop_counter += walk.hops;
  counters_.message_counter += walk.hops;
  if (!walk.ok) {
    rep.hole = true;
    ++counters_.insert_failures;
    return rep;
  }
  std::vector<PeerId> candidates = compatible_coverers(home);
  if (candidates.empty()) {
    rep.hole = true;
    ++counters_.insert_failures;
    return rep;
  }
  rep.stored_at = candidates[rng.below(candidates.size())];
  sorted_insert_key(peers_.at(rep.stored_at).stored_keys, key_id);
  rep.ok = true;
  rep.messages = rep.hops + 1;
  ++counters_.message_counter;
  return rep;
}

SearchResult OverlayState::search(PeerId origin, uint64_t key_id) {
  SearchResult res;
  const PeerNode& o = peer(origin);
  const std::string bytes = key_bytes(key_id);
  const VertexLabel home = hash_key(bytes, o.dim());
  RouteWalk walk = walk_route(o.node_id, home);
  res.hops = walk.hops;
  res.path = std::move(walk.path);
  res.cross_dim = walk.used_cross_dim;
  res.messages = walk.hops;
  counters_.hop_counter += walk.hops;
  counters_.message_counter += walk.hops;
  if (!walk.ok) {
    res.status = SearchStatus::HoleOnRoute;
    return res;
  }
  // Final clique probe; during transitions the key may be homed at another
  // live dimension, whose clique is prefix-compatible with the route end.
  std::vector<PeerId> probed;
  auto probe = [&](PeerId id, bool cross) -> bool {
    ++res.messages;
    ++counters_.message_counter;
    probed.push_back(id);
    if (!holds_key(peers_.at(id), key_id)) return false;
    if (cross) res.cross_dim = true;
    if (id != origin) ++res.hops;
    res.status = SearchStatus::Found;
    return true;
  };
  for (const auto& [d, count] : dims_live_) {
    const VertexLabel h = hash_key(bytes, d);
    for (PeerId id : coverers(h))
      if (probe(id, d != o.dim())) return res;
  }
  // Second pass: a re-homed key can sit with a prefix-compatible coverer of
  // another dimension's home vertex.
  std::sort(probed.begin(), probed.end());
  for (const auto& [d, count] : dims_live_) {
    const VertexLabel h = hash_key(bytes, d);
    for (PeerId id : compatible_coverers(h)) {
      if (std::binary_search(probed.begin(), probed.end(), id)) continue;
      if (probe(id, true)) return res;
    }
  }
  if (dims_live_.size() > 1) res.cross_dim = true;
  res.status = SearchStatus::DataLost;
  return res;
}

const std::vector<PeerId>& OverlayState::coverers(const VertexLabel& l) const {
  auto it = occupancy_.find(l.packed());
  return it == occupancy_.end() ? kNoCoverers : it->second;
}

std::vector<PeerId> OverlayState::compatible_coverers(const VertexLabel& l) const {
  const auto& exact = coverers(l);
  if (!exact.empty()) return exact;
  std::vector<PeerId> out;
  for (const auto& [d, count] : dims_live_) {
    if (d == l.dim) continue;
    for (const auto& lab : compat_equal_labels(l, d)) {
      const auto& cov = coverers(lab);
      out.insert(out.end(), cov.begin(), cov.end());
    }
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

int OverlayState::overlay_degree(const PeerNode& p) const {
  if (dims_live_.size() <= 1) {
    int degree = static_cast<int>(coverers(p.node_id).size()) - 1;
    for (const auto& nb : neighbors(p.node_id))
      degree += static_cast<int>(coverers(nb).size());
    return degree;
  }
  return static_cast<int>(neighbor_peers(p).size());
}

std::vector<PeerId> OverlayState::neighbor_peers(const PeerNode& p) const {
  std::vector<VertexLabel> base = neighbors(p.node_id);
  base.push_back(p.node_id);
  std::vector<VertexLabel> labels;
  for (const auto& [d, count] : dims_live_)
    for (const auto& l : base) {
      auto eq = compat_equal_labels(l, d);
      labels.insert(labels.end(), eq.begin(), eq.end());
    }
  std::sort(labels.begin(), labels.end());
  labels.erase(std::unique(labels.begin(), labels.end()), labels.end());

  std::vector<PeerId> out;
  for (const auto& l : labels) {
    const auto& cov = coverers(l);
    out.insert(out.end(), cov.begin(), cov.end());
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  if (auto it = std::lower_bound(out.begin(), out.end(), p.id);
      it != out.end() && *it == p.id)
    out.erase(it);
  return out;
}

RouteWalk OverlayState::walk_route(const VertexLabel& from,
                                   const VertexLabel& to) const {
  RouteWalk walk;
  walk.path = bit_fix_route(from, to);
  for (size_t i = 1; i < walk.path.size(); ++i) {
    const auto& v = walk.path[i];
    if (coverers(v).empty()) {
      if (compatible_coverers(v).empty()) {
        walk.hole = v;
        walk.path.resize(i);
        return walk;
      }
      walk.used_cross_dim = true;
    }
    ++walk.hops;
  }
  walk.ok = true;
  return walk;
}

bool OverlayState::change_dim(PeerId id, bool increase, Rng& rng) {
  PeerNode& p = peers_.at(id);
  if (!increase && p.dim() <= 2) return false;
  occupancy_erase(p.node_id, id);
  if (--dims_live_[p.dim()] == 0) dims_live_.erase(p.dim());

  VertexLabel l = p.node_id;
  if (increase) {
    l.word = (l.word << 1) | (rng.coin() ? 1u : 0u);
    l.dim = static_cast<uint16_t>(l.dim + 1);
  } else {
    l.word >>= 1;
    l.dim = static_cast<uint16_t>(l.dim - 1);
    l.cycle_pos = static_cast<uint16_t>(std::min<int>(l.cycle_pos, l.dim));
  }
  p.node_id = l;
  occupancy_insert(l, id);
  ++dims_live_[l.dim];
  rehome_keys(p, rng);
  return true;
}

void OverlayState::rehome_keys(PeerNode& p, Rng& rng) {
  if (p.stored_keys.empty()) return;
  std::vector<uint64_t> keep;
  keep.reserve(p.stored_keys.size());
  bool moved_any = false;
  for (uint64_t k : p.stored_keys) {
    const VertexLabel home = hash_key(key_bytes(k), p.dim());
    if (home == p.node_id) {
      keep.push_back(k);
      continue;
    }
    std::vector<PeerId> candidates = compatible_coverers(home);
    std::erase(candidates, p.id);
    if (candidates.empty()) {
      lost_keys_.insert(k);
      ++counters_.orphaned_keys;
      continue;
    }
    PeerId target = candidates[rng.below(candidates.size())];
    sorted_insert_key(peers_.at(target).stored_keys, k);
    moved_any = true;
    ++counters_.data_transfer_messages;
  }
  (void)moved_any;
  p.stored_keys = std::move(keep);
}

std::optional<int> OverlayState::uniform_dim() const {
  if (dims_live_.size() == 1) return dims_live_.begin()->first;
  return std::nullopt;
}

int OverlayState::majority_dim() const {
  int best = params_.dim;
  uint64_t best_count = 0;
  for (const auto& [d, count] : dims_live_)
    if (count > best_count) {
      best = d;
      best_count = count;
    }
  return best;
}

double OverlayState::avg_dimension() const {
  if (live_.empty()) return 0;
  double sum = 0;
  for (const auto& [d, count] : dims_live_) sum += double(d) * double(count);
  return sum / double(live_.size());
}

uint64_t OverlayState::peers_at_dim(int dim) const {
  auto it = dims_live_.find(dim);
  return it == dims_live_.end() ? 0 : it->second;
}

uint64_t OverlayState::occupied_labels(int dim) const {
  auto it = occupied_.find(dim);
  return it == occupied_.end() ? 0 : it->second;
}

std::optional<VertexLabel> OverlayState::occupancy_mismatch() const {
  std::unordered_map<uint64_t, std::vector<PeerId>> rebuilt;
  for (const auto& [id, p] : peers_) sorted_insert(rebuilt[p.node_id.packed()], id);
  for (const auto& [packed, ids] : rebuilt) {
    auto it = occupancy_.find(packed);
    if (it == occupancy_.end() || it->second != ids) {
      VertexLabel v;
      v.dim = static_cast<uint16_t>(packed >> 48);
      v.word = static_cast<uint32_t>((packed >> 16) & 0xffffffffu);
      v.cycle_pos = static_cast<uint16_t>(packed & 0xffff);
      return v;
    }
  }
  for (const auto& [packed, ids] : occupancy_) {
    if (!rebuilt.count(packed)) {
      VertexLabel v;
      v.dim = static_cast<uint16_t>(packed >> 48);
      v.word = static_cast<uint32_t>((packed >> 16) & 0xffffffffu);
      v.cycle_pos = static_cast<uint16_t>(packed & 0xffff);
      return v;
    }
  }
  return std::nullopt;
}

void OverlayState::debug_corrupt_occupancy(const VertexLabel& l) {
  auto it = occupancy_.find(l.packed());
  if (it != occupancy_.end() && !it->second.empty()) it->second.pop_back();
}

}  // namespace cccnet
