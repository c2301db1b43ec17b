#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace smarthouse::crypto {

using Digest = std::array<std::uint8_t, 32>;

Digest sha256(std::span<const std::uint8_t> data);
Digest sha256(std::string_view data);

std::string to_hex(std::span<const std::uint8_t> bytes);
/// Accepts lowercase or uppercase hex of even length.
std::optional<std::vector<std::uint8_t>> from_hex(std::string_view hex);

/// Cryptographically random bytes from the OpenSSL DRBG.
std::vector<std::uint8_t> random_bytes(std::size_t n);

/// Compares every byte regardless of where the first mismatch sits. Lengths
/// are not secret.
bool constant_time_equal(std::string_view a, std::string_view b);

}  // namespace smarthouse::crypto
