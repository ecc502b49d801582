#pragma once

#include <cstdint>
#include <string>
#include <string_view>

#include "cccnet/label.hpp"

namespace cccnet {

// Deterministic map from key bytes to a vertex label of the given dimension.
// word = first `dim` bits of a SHA-256 digest of the key (so truncating the
// dimension by one drops exactly the last word bit); cycle_pos = next digest
// word mod dim, plus one. Throws std::invalid_argument on an empty key or
// dim < 2.
VertexLabel hash_key(std::string_view key, int dim);

// Canonical byte representation of a simulator-generated key id.
std::string key_bytes(uint64_t key_id);

}  // namespace cccnet
