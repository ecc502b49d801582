#pragma once

#include <compare>
#include <cstdint>
#include <vector>

namespace cccnet {

class Rng;

// A vertex of the r-dimensional cube-connected cycles graph: an r-bit
// hypercube word plus a position on the attached r-cycle. Word bits are
// indexed 1..r left to right; cycle position i selects bit i.
struct VertexLabel {
  uint32_t word = 0;
  uint16_t cycle_pos = 1;  // in [1, dim]
  uint16_t dim = 1;

  friend auto operator<=>(const VertexLabel&, const VertexLabel&) = default;

  // Packed form usable as a hash-map key across dimensions.
  uint64_t packed() const {
    return (static_cast<uint64_t>(dim) << 48) |
           (static_cast<uint64_t>(word) << 16) | cycle_pos;
  }
};

bool is_valid(const VertexLabel& v);

// dim * 2^dim, the size of the label space.
uint64_t label_space(int dim);

// Dense index in [0, label_space(dim)): word * dim + (cycle_pos - 1).
uint32_t label_index(const VertexLabel& v);
VertexLabel label_at(int dim, uint32_t index);

// Bit i of `word`, 1-based, left to right (bit 1 is the most significant of
// the dim-bit word).
int word_bit(uint32_t word, int i, int dim);
uint32_t with_bit_flipped(uint32_t word, int i, int dim);

// Truncate (drop trailing bits, clamp cycle_pos) or zero-extend a label to
// another dimension. Identity when dims match.
VertexLabel adapt_label(const VertexLabel& v, int dim);

// Labels at dimension `other` whose truncation-to-min(dim, other) equals v's.
std::vector<VertexLabel> compat_equal_labels(const VertexLabel& v, int other);

// The two cycle neighbors and the hypercube neighbor, in the order
// (cycle_pos-1, cycle_pos+1, bit flip). Deduplicated for dim <= 2.
std::vector<VertexLabel> neighbors(const VertexLabel& v);

// Bit-fixing route: fixes word bits in ascending dimension order, walking the
// cycle along the shorter arc (ties toward increasing position) to reach each
// needed position, then walks to dst's cycle position. The returned path
// starts at src, ends at dst, every consecutive pair is adjacent, and the
// length is at most 3*dim.
std::vector<VertexLabel> bit_fix_route(const VertexLabel& src,
                                       const VertexLabel& dst);

// Exact CCC diameter: 2*dim + dim/2 - 2 for dim >= 4, all-pairs BFS below.
int ccc_diameter(int dim);

// Uniform label: dim fair word bits plus a uniform cycle position.
VertexLabel random_label(int dim, Rng& rng);

struct TemplateParams {
  int dim = 0;
  uint64_t vertex_count = 0;
  int diameter = 0;

  static TemplateParams for_dim(int dim);
};

}  // namespace cccnet
