#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>

namespace forge3d {

/// Lowercase hex SHA-256 digest.
std::string sha256_hex(std::span<const std::uint8_t> bytes);
std::string sha256_hex(std::string_view text);

/// Fast, stable 64-bit hash (FNV-1a followed by a splitmix finalizer). Used to
/// derive mock-provider outputs and seeds; never for content addressing.
std::uint64_t hash64(std::string_view text, std::uint64_t seed = 0) noexcept;

inline std::uint64_t mix64(std::uint64_t x) noexcept {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

inline std::uint64_t hash_combine(std::uint64_t a, std::uint64_t b) noexcept {
  return mix64(a ^ (mix64(b) + 0x9e3779b97f4a7c15ULL + (a << 6) + (a >> 2)));
}

std::string hex64(std::uint64_t value);

} // namespace forge3d
