#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace drbac::util {

using Digest32 = std::array<std::uint8_t, 32>;

inline constexpr Digest32 kZeroDigest{};

std::string to_hex(std::span<const std::uint8_t> bytes);
std::string to_hex(const Digest32& digest);

// Lowercase or uppercase hex accepted; nullopt on odd length or non-hex input.
std::optional<std::vector<std::uint8_t>> from_hex(std::string_view hex);
std::optional<Digest32> digest_from_hex(std::string_view hex);

}  // namespace drbac::util
