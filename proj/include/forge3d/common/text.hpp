#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace forge3d {

/// Lowercased alphanumeric tokens; every other character separates tokens.
std::vector<std::string> tokenize(std::string_view text);

std::string to_lower(std::string_view text);
std::string trim(std::string_view text);

} // namespace forge3d
