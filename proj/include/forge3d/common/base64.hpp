#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace forge3d {

std::string base64_encode(std::span<const std::uint8_t> bytes);
/// Throws invalid_argument on characters outside the standard alphabet.
std::vector<std::uint8_t> base64_decode(std::string_view text);

} // namespace forge3d
