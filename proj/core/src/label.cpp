#include "cccnet/label.hpp"

#include <algorithm>
#include <queue>
#include <stdexcept>

#include "cccnet/rng.hpp"

namespace cccnet {

namespace {

void check_valid(const VertexLabel& v) {
  if (!is_valid(v))
    throw std::invalid_argument("invalid vertex label");
}

// Forward (increasing position) and backward arc lengths from p to q on an
// r-cycle with positions 1..r.
int forward_arc(int p, int q, int r) { return ((q - p) % r + r) % r; }

}  // namespace

bool is_valid(const VertexLabel& v) {
  if (v.dim < 1 || v.dim > 26) return false;
  if (v.cycle_pos < 1 || v.cycle_pos > v.dim) return false;
  return v.word < (uint32_t{1} << v.dim);
}

uint64_t label_space(int dim) {
  if (dim < 1) throw std::invalid_argument("label_space: dim must be >= 1");
  return static_cast<uint64_t>(dim) << dim;
}

uint32_t label_index(const VertexLabel& v) {
  return v.word * v.dim + (v.cycle_pos - 1);
}

VertexLabel label_at(int dim, uint32_t index) {
  VertexLabel v;
  v.dim = static_cast<uint16_t>(dim);
  v.word = index / dim;
  v.cycle_pos = static_cast<uint16_t>(index % dim + 1);
  return v;
}

int word_bit(uint32_t word, int i, int dim) {
  return (word >> (dim - i)) & 1u;
}

uint32_t with_bit_flipped(uint32_t word, int i, int dim) {
  return word ^ (uint32_t{1} << (dim - i));
}

VertexLabel adapt_label(const VertexLabel& v, int dim) {
  if (v.dim == dim) return v;
  VertexLabel out;
  out.dim = static_cast<uint16_t>(dim);
  if (dim < v.dim) {
    out.word = v.word >> (v.dim - dim);
    out.cycle_pos = static_cast<uint16_t>(std::min<int>(v.cycle_pos, dim));
  } else {
    out.word = v.word << (dim - v.dim);
    out.cycle_pos = v.cycle_pos;
  }
  return out;
}

std::vector<VertexLabel> compat_equal_labels(const VertexLabel& v, int other) {
  std::vector<VertexLabel> out;
  if (other == v.dim) {
    out.push_back(v);
    return out;
  }
  if (other < v.dim) {
    out.push_back(adapt_label(v, other));
    return out;
  }
  const int extra = other - v.dim;
  const uint32_t base = v.word << extra;
  for (uint32_t suffix = 0; suffix < (uint32_t{1} << extra); ++suffix) {
    VertexLabel l;
    l.dim = static_cast<uint16_t>(other);
    l.word = base | suffix;
    l.cycle_pos = v.cycle_pos;
    out.push_back(l);
    if (v.cycle_pos == v.dim) {
      // Positions beyond the smaller cycle clamp onto its last position.
      for (int q = v.dim + 1; q <= other; ++q) {
        l.cycle_pos = static_cast<uint16_t>(q);
        out.push_back(l);
      }
    }
  }
  return out;
}

std::vector<VertexLabel> neighbors(const VertexLabel& v) {
  check_valid(v);
  const int r = v.dim;
  std::vector<VertexLabel> out;
  out.reserve(3);
  if (r >= 2) {
    const uint16_t prev =
        static_cast<uint16_t>((v.cycle_pos - 2 + r) % r + 1);
    const uint16_t next = static_cast<uint16_t>(v.cycle_pos % r + 1);
    out.push_back({v.word, prev, v.dim});
    if (next != prev) out.push_back({v.word, next, v.dim});
  }
  out.push_back({with_bit_flipped(v.word, v.cycle_pos, r), v.cycle_pos, v.dim});
  return out;
}

std::vector<VertexLabel> bit_fix_route(const VertexLabel& src,
                                       const VertexLabel& dst) {
  check_valid(src);
  check_valid(dst);
  if (src.dim != dst.dim)
    throw std::invalid_argument("bit_fix_route: dimension mismatch");

  const int r = src.dim;
  std::vector<VertexLabel> path{src};
  VertexLabel cur = src;

  auto cycle_to = [&](int target) {
    const int fwd = forward_arc(cur.cycle_pos, target, r);
    const int bwd = forward_arc(target, cur.cycle_pos, r);
    const bool forward = fwd <= bwd;  // ties toward increasing position
    int steps = forward ? fwd : bwd;
    while (steps-- > 0) {
      cur.cycle_pos = forward
                          ? static_cast<uint16_t>(cur.cycle_pos % r + 1)
                          : static_cast<uint16_t>((cur.cycle_pos - 2 + r) % r + 1);
      path.push_back(cur);
    }
  };

  for (int i = 1; i <= r; ++i) {
    if (word_bit(cur.word, i, r) != word_bit(dst.word, i, r)) {
      cycle_to(i);
      cur.word = with_bit_flipped(cur.word, i, r);
      path.push_back(cur);
    }
  }
  cycle_to(dst.cycle_pos);
  return path;
}

int ccc_diameter(int dim) {
  if (dim < 1) throw std::invalid_argument("ccc_diameter: dim must be >= 1");
  if (dim >= 4) return 2 * dim + dim / 2 - 2;

  // Small dimensions: exact all-pairs BFS on the full graph.
  const auto n = static_cast<uint32_t>(label_space(dim));
  int diameter = 0;
  std::vector<int> dist(n);
  for (uint32_t s = 0; s < n; ++s) {
    std::fill(dist.begin(), dist.end(), -1);
    std::queue<uint32_t> q;
    dist[s] = 0;
    q.push(s);
    while (!q.empty()) {
      const uint32_t u = q.front();
      q.pop();
      for (const auto& w : neighbors(label_at(dim, u))) {
        const uint32_t wi = label_index(w);
        if (dist[wi] < 0) {
          dist[wi] = dist[u] + 1;
          diameter = std::max(diameter, dist[wi]);
          q.push(wi);
        }
      }
    }
  }
  return diameter;
}

VertexLabel random_label(int dim, Rng& rng) {
  if (dim < 1) throw std::invalid_argument("random_label: dim must be >= 1");
  VertexLabel v;
  v.dim = static_cast<uint16_t>(dim);
  uint32_t word = 0;
  for (int i = 0; i < dim; ++i) word = (word << 1) | (rng.coin() ? 1u : 0u);
  v.word = word;
  v.cycle_pos = static_cast<uint16_t>(rng.below(dim) + 1);
  return v;
}

TemplateParams TemplateParams::for_dim(int dim) {
  TemplateParams p;
  p.dim = dim;
  p.vertex_count = label_space(dim);
  p.diameter = ccc_diameter(dim);
  return p;
}

}  // namespace cccnet
