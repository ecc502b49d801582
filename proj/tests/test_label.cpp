#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <map>
#include <queue>

#include "cccnet/label.hpp"
#include "cccnet/rng.hpp"

using namespace cccnet;

namespace {

std::vector<std::vector<int>> all_pairs_bfs(int dim) {
  const auto n = static_cast<uint32_t>(label_space(dim));
  std::vector<std::vector<int>> dist(n, std::vector<int>(n, -1));
  for (uint32_t s = 0; s < n; ++s) {
    std::queue<uint32_t> q;
    dist[s][s] = 0;
    q.push(s);
    while (!q.empty()) {
      const uint32_t u = q.front();
      q.pop();
      for (const auto& w : neighbors(label_at(dim, u))) {
        const uint32_t wi = label_index(w);
        if (dist[s][wi] < 0) {
          dist[s][wi] = dist[s][u] + 1;
          q.push(wi);
        }
      }
    }
  }
  return dist;
}

}  // namespace

TEST_CASE("label space and index round-trip") {
  CHECK(label_space(3) == 24);
  CHECK(label_space(4) == 64);
  for (int dim : {1, 2, 3, 5}) {
    for (uint32_t i = 0; i < label_space(dim); ++i) {
      const VertexLabel v = label_at(dim, i);
      CHECK(is_valid(v));
      CHECK(label_index(v) == i);
    }
  }
}

TEST_CASE("packed is injective across dimensions") {
  std::map<uint64_t, VertexLabel> seen;
  for (int dim = 1; dim <= 6; ++dim)
    for (uint32_t i = 0; i < label_space(dim); ++i) {
      const VertexLabel v = label_at(dim, i);
      CHECK(seen.emplace(v.packed(), v).second);
    }
}

TEST_CASE("neighbor ordering matches the fixed convention") {
  // <000, 1> at r=3: cycle previous (wraps to 3), cycle next, then the
  // hypercube edge flipping bit 1 (the leftmost bit).
  const VertexLabel v{0b000, 1, 3};
  const auto nb = neighbors(v);
  REQUIRE(nb.size() == 3);
  CHECK(nb[0] == VertexLabel{0b000, 3, 3});
  CHECK(nb[1] == VertexLabel{0b000, 2, 3});
  CHECK(nb[2] == VertexLabel{0b100, 1, 3});
}

TEST_CASE("degree three and symmetry, exhaustive over small dimensions") {
  for (int dim = 2; dim <= 6; ++dim) {
    for (uint32_t i = 0; i < label_space(dim); ++i) {
      const VertexLabel v = label_at(dim, i);
      const auto nb = neighbors(v);
      CHECK(nb.size() == (dim == 2 ? 2 : 3));
      for (const auto& w : nb) {
        CHECK(is_valid(w));
        CHECK(w != v);
        const auto back = neighbors(w);
        CHECK(std::find(back.begin(), back.end(), v) != back.end());
      }
    }
  }
}

TEST_CASE("degenerate dimension one") {
  const VertexLabel v{0, 1, 1};
  const auto nb = neighbors(v);
  REQUIRE(nb.size() == 1);
  CHECK(nb[0] == VertexLabel{1, 1, 1});
}

TEST_CASE("route example at r=2") {
  // <00,1> -> <11,2> takes three hops.
  const auto path = bit_fix_route({0b00, 1, 2}, {0b11, 2, 2});
  CHECK(path.size() == 4);
  CHECK(path.front() == VertexLabel{0b00, 1, 2});
  CHECK(path.back() == VertexLabel{0b11, 2, 2});
}

TEST_CASE("routes are valid, bounded, and never beat BFS") {
  Rng rng(42);
  for (int dim = 2; dim <= 5; ++dim) {
    const auto dist = all_pairs_bfs(dim);
    const auto n = static_cast<uint32_t>(label_space(dim));
    for (int t = 0; t < 400; ++t) {
      const uint32_t a = static_cast<uint32_t>(rng.below(n));
      const uint32_t b = static_cast<uint32_t>(rng.below(n));
      const auto path = bit_fix_route(label_at(dim, a), label_at(dim, b));
      REQUIRE(!path.empty());
      CHECK(path.front() == label_at(dim, a));
      CHECK(path.back() == label_at(dim, b));
      const int hops = static_cast<int>(path.size()) - 1;
      CHECK(hops <= 3 * dim);
      CHECK(hops >= dist[a][b]);
      for (size_t i = 0; i + 1 < path.size(); ++i) {
        const auto nb = neighbors(path[i]);
        CHECK(std::find(nb.begin(), nb.end(), path[i + 1]) != nb.end());
      }
    }
  }
}

TEST_CASE("route to self is empty") {
  const VertexLabel v{0b101, 2, 3};
  const auto path = bit_fix_route(v, v);
  CHECK(path.size() == 1);
}

TEST_CASE("route rejects mismatched dimensions") {
  CHECK_THROWS_AS(bit_fix_route({0, 1, 3}, {0, 1, 4}), std::invalid_argument);
}

TEST_CASE("diameter closed form matches BFS") {
  for (int dim = 2; dim <= 6; ++dim) {
    const auto dist = all_pairs_bfs(dim);
    int bfs = 0;
    for (const auto& row : dist)
      for (int d : row) bfs = std::max(bfs, d);
    CHECK(ccc_diameter(dim) == bfs);
  }
  CHECK(ccc_diameter(4) == 8);
  CHECK(ccc_diameter(5) == 10);
  CHECK(ccc_diameter(6) == 13);
}

TEST_CASE("adapt_label truncates and extends") {
  const VertexLabel v{0b1011, 3, 4};
  const VertexLabel down = adapt_label(v, 2);
  CHECK(down == VertexLabel{0b10, 2, 2});  // clamped position
  const VertexLabel up = adapt_label(v, 6);
  CHECK(up == VertexLabel{0b101100, 3, 6});
  CHECK(adapt_label(v, 4) == v);
}

TEST_CASE("compat_equal_labels inverts truncation") {
  for (int dim = 2; dim <= 4; ++dim)
    for (uint32_t i = 0; i < label_space(dim); ++i) {
      const VertexLabel v = label_at(dim, i);
      for (int other = 2; other <= 6; ++other) {
        for (const auto& eq : compat_equal_labels(v, other)) {
          CHECK(eq.dim == other);
          CHECK(is_valid(eq));
          const int lo = std::min<int>(dim, other);
          CHECK(adapt_label(eq, lo) == adapt_label(v, lo));
        }
      }
    }
}

TEST_CASE("compat_equal_labels at a larger dimension covers the clamp") {
  // Last cycle position absorbs the extra positions of the larger cycle.
  const VertexLabel v{0b11, 2, 2};
  const auto eq = compat_equal_labels(v, 3);
  CHECK(eq.size() == 4);  // two suffix bits x positions {2, 3}
  for (const auto& l : eq) CHECK(adapt_label(l, 2) == v);
}

TEST_CASE("random labels are near-uniform") {
  Rng rng(7);
  const int dim = 3;
  const auto n = static_cast<uint32_t>(label_space(dim));
  std::vector<int> counts(n, 0);
  const int draws = 48000;
  for (int i = 0; i < draws; ++i) ++counts[label_index(random_label(dim, rng))];
  const double expected = double(draws) / n;
  double chi2 = 0;
  for (int c : counts) chi2 += (c - expected) * (c - expected) / expected;
  // 23 degrees of freedom; 99.9th percentile is ~49.7.
  CHECK(chi2 < 55.0);
}

TEST_CASE("random labels are deterministic per seed") {
  Rng a(99), b(99);
  for (int i = 0; i < 100; ++i)
    CHECK(random_label(5, a) == random_label(5, b));
}

TEST_CASE("template params") {
  const auto p = TemplateParams::for_dim(5);
  CHECK(p.dim == 5);
  CHECK(p.vertex_count == 160);
  CHECK(p.diameter == 10);
}
