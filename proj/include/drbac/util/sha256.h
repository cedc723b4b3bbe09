#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>

#include "drbac/util/hex.h"

namespace drbac::util {

Digest32 sha256(std::span<const std::uint8_t> data);
Digest32 sha256(std::string_view data);
std::string sha256_hex(std::string_view data);

}  // namespace drbac::util
