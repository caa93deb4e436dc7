#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "forge3d/imaging/image.hpp"

namespace forge3d::imaging {

/// Decodes PNG or JPEG (sniffed from the signature) into RGB.
RasterImage decode_image(std::span<const std::uint8_t> bytes);
std::vector<std::uint8_t> encode_png(const RasterImage& img);

RasterImage read_image(const std::filesystem::path& path);
void write_png(const std::filesystem::path& path, const RasterImage& img);

} // namespace forge3d::imaging
