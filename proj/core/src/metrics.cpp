#include "cccnet/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <queue>
#include <unordered_map>

namespace cccnet {

double coverage(const OverlayState& ov) {
  if (ov.empty()) return 0;
  const int d = ov.majority_dim();
  return double(ov.occupied_labels(d)) / double(label_space(d));
}

double avg_coverage(const OverlayState& ov) {
  if (ov.empty()) return 0;
  const int d = ov.majority_dim();
  return double(ov.peers_at_dim(d)) / double(label_space(d));
}

std::pair<double, int> degree_stats(const OverlayState& ov) {
  if (ov.empty()) return {0.0, 0};
  if (auto d = ov.uniform_dim()) {
    // All peers on one label share a degree; aggregate per occupied label.
    double total = 0;
    int max_degree = 0;
    const auto space = static_cast<uint32_t>(label_space(*d));
    for (uint32_t idx = 0; idx < space; ++idx) {
      const VertexLabel l = label_at(*d, idx);
      const auto& clique = ov.coverers(l);
      if (clique.empty()) continue;
      int degree = static_cast<int>(clique.size()) - 1;
      for (const auto& nb : neighbors(l))
        degree += static_cast<int>(ov.coverers(nb).size());
      total += double(degree) * double(clique.size());
      max_degree = std::max(max_degree, degree);
    }
    return {total / double(ov.size()), max_degree};
  }
  double total = 0;
  int max_degree = 0;
  for (PeerId id : ov.live()) {
    const int degree = ov.overlay_degree(ov.peer(id));
    total += degree;
    max_degree = std::max(max_degree, degree);
  }
  return {total / double(ov.size()), max_degree};
}

namespace {

// Label-level overlay graph: occupied (dim, label) entries, with same-dim
// template edges plus cross-dimension prefix-compatibility edges.
struct LabelGraph {
  std::unordered_map<uint64_t, uint32_t> index;
  std::vector<VertexLabel> labels;
  std::vector<std::vector<uint32_t>> adj;

  explicit LabelGraph(const OverlayState& ov) {
    for (const auto& [d, count] : ov.dims_live()) {
      const auto space = static_cast<uint32_t>(label_space(d));
      for (uint32_t i = 0; i < space; ++i) {
        const VertexLabel l = label_at(d, i);
        if (!ov.coverers(l).empty()) {
          index.emplace(l.packed(), static_cast<uint32_t>(labels.size()));
          labels.push_back(l);
        }
      }
    }
    adj.resize(labels.size());
    std::vector<int> dims;
    for (const auto& [d, count] : ov.dims_live()) dims.push_back(d);
    auto link = [&](uint32_t u, const VertexLabel& other) {
      if (auto it = index.find(other.packed()); it != index.end()) {
        adj[u].push_back(it->second);
        adj[it->second].push_back(u);  // symmetrized below
      }
    };
    for (uint32_t u = 0; u < labels.size(); ++u) {
      const VertexLabel& l = labels[u];
      for (const auto& nb : neighbors(l))
        if (auto it = index.find(nb.packed()); it != index.end())
          adj[u].push_back(it->second);
      // Cross-dimension edges: equal-or-adjacent after truncating to the
      // smaller dimension.
      for (int d : dims) {
        if (d == l.dim) continue;
        for (const auto& eq : compat_equal_labels(l, d)) link(u, eq);
        for (const auto& nb : neighbors(l))
          for (const auto& eq : compat_equal_labels(nb, d)) link(u, eq);
      }
    }
    for (auto& v : adj) {
      std::sort(v.begin(), v.end());
      v.erase(std::unique(v.begin(), v.end()), v.end());
    }
  }
};

}  // namespace

int bfs_diameter_estimate(const OverlayState& ov, Rng& rng, bool* disconnected) {
  if (disconnected) *disconnected = false;
  if (ov.empty()) return 0;
  const PeerNode& start = ov.peer(ov.random_live(rng));

  LabelGraph g(ov);
  std::vector<int> dist(g.labels.size(), -1);
  std::queue<uint32_t> q;
  const uint32_t s = g.index.at(start.node_id.packed());
  dist[s] = 0;
  q.push(s);
  int height = 0;
  size_t reached = 0;
  while (!q.empty()) {
    const uint32_t u = q.front();
    q.pop();
    ++reached;
    height = std::max(height, dist[u]);
    for (uint32_t v : g.adj[u])
      if (dist[v] < 0) {
        dist[v] = dist[u] + 1;
        q.push(v);
      }
  }
  if (disconnected && reached != g.labels.size()) *disconnected = true;
  // Peer-level height equals the label-level height, except that clique
  // members of the start label sit at depth 1.
  if (height == 0 && ov.coverers(start.node_id).size() > 1) height = 1;
  return 2 * height;
}

double random_path_length(const OverlayState& ov, Rng& rng, uint64_t* failures) {
  if (ov.size() < 2) return 0;
  const int pairs = static_cast<int>(
      std::ceil(std::log2(double(std::max<uint64_t>(ov.size(), 2)))));
  double total = 0;
  int ok = 0;
  for (int i = 0; i < pairs; ++i) {
    const PeerId a = ov.random_live(rng);
    PeerId b = a;
    while (b == a) b = ov.random_live(rng);
    const PeerNode& pa = ov.peer(a);
    const PeerNode& pb = ov.peer(b);
    const RouteWalk walk =
        ov.walk_route(pa.node_id, adapt_label(pb.node_id, pa.dim()));
    if (walk.ok) {
      total += walk.hops;
      ++ok;
    } else if (failures) {
      ++*failures;
    }
  }
  return ok ? total / double(ok) : 0;
}

std::string csv_header() {
  return "time,live_peers,coverage,avg_coverage,avg_degree,max_degree,"
         "bfs_diameter_est,disconnected,random_path_len,path_failures,"
         "search_success_rate,join_messages_mean,tree_repair_messages,"
         "rebuilds,holes,orphaned_keys,avg_dimension,"
         "fraction_at_majority_dim,suggestion_messages,"
         "cross_dim_search_failures,stability_flag\n";
}

void append_csv_row(std::string& out, const MetricsSnapshot& s) {
  char buf[512];
  std::snprintf(
      buf, sizeof(buf),
      "%.6g,%llu,%.6g,%.6g,%.6g,%d,%d,%d,%.6g,%llu,%.6g,%.6g,%llu,%llu,%llu,"
      "%llu,%.6g,%.6g,%llu,%llu,%d\n",
      s.time, static_cast<unsigned long long>(s.live_peers), s.coverage,
      s.avg_coverage, s.avg_degree, s.max_degree, s.bfs_diameter_est,
      s.disconnected ? 1 : 0, s.random_path_len,
      static_cast<unsigned long long>(s.path_failures), s.search_success_rate,
      s.join_messages_mean,
      static_cast<unsigned long long>(s.tree_repair_messages),
      static_cast<unsigned long long>(s.rebuilds),
      static_cast<unsigned long long>(s.holes),
      static_cast<unsigned long long>(s.orphaned_keys), s.avg_dimension,
      s.fraction_at_majority_dim,
      static_cast<unsigned long long>(s.suggestion_messages),
      static_cast<unsigned long long>(s.cross_dim_search_failures),
      s.pre_stable ? 0 : 1);
  out += buf;
}

}  // namespace cccnet
