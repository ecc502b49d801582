#include "cccnet/hash.hpp"

#include <openssl/evp.h>

#include <stdexcept>

namespace cccnet {

VertexLabel hash_key(std::string_view key, int dim) {
  if (key.empty()) throw std::invalid_argument("hash_key: empty key");
  if (dim < 2 || dim > 26) throw std::invalid_argument("hash_key: bad dim");

  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(key.data(), key.size(), digest, &len, EVP_sha256(),
                 nullptr) != 1 ||
      len < 8)
    throw std::runtime_error("hash_key: digest failure");

  // word = first dim bits of the digest stream, MSB first, so truncating the
  // dimension by one drops exactly the last word bit.
  uint32_t head = (uint32_t(digest[0]) << 24) | (uint32_t(digest[1]) << 16) |
                  (uint32_t(digest[2]) << 8) | uint32_t(digest[3]);
  uint32_t tail = (uint32_t(digest[4]) << 24) | (uint32_t(digest[5]) << 16) |
                  (uint32_t(digest[6]) << 8) | uint32_t(digest[7]);

  VertexLabel v;
  v.dim = static_cast<uint16_t>(dim);
  v.word = head >> (32 - dim);
  v.cycle_pos = static_cast<uint16_t>(tail % dim + 1);
  return v;
}

std::string key_bytes(uint64_t key_id) {
  std::string out(8, '\0');
  for (int i = 0; i < 8; ++i)
    out[i] = static_cast<char>((key_id >> (8 * i)) & 0xff);
  return out;
}

}  // namespace cccnet
