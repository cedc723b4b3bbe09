#include "drbac/util/sha256.h"

#include <openssl/evp.h>

#include <stdexcept>

namespace drbac::util {

Digest32 sha256(std::span<const std::uint8_t> data) {
  Digest32 digest{};
  unsigned int len = 0;
  if (EVP_Digest(data.data(), data.size(), digest.data(), &len, EVP_sha256(), nullptr) != 1 ||
      len != digest.size()) {
    throw std::runtime_error("sha256: EVP_Digest failed");
  }
  return digest;
}

Digest32 sha256(std::string_view data) {
  return sha256(std::span<const std::uint8_t>(
      reinterpret_cast<const std::uint8_t*>(data.data()), data.size()));
}

std::string sha256_hex(std::string_view data) {
  return to_hex(sha256(data));
}

}  // namespace drbac::util
