#include "forge3d/imaging/image.hpp"

#include <algorithm>
#include <cstring>

#include "forge3d/common/error.hpp"
#include "forge3d/common/hash.hpp"

namespace forge3d::imaging {

namespace {

void check_dims(int width, int height) {
  if (width < kMinImageSide || height < kMinImageSide) {
    throw Error(ErrorCode::invalid_argument,
                "image must be at least 16x16, got " + std::to_string(width) + "x" +
                    std::to_string(height),
                "imaging");
  }
}

} // namespace

RasterImage::RasterImage(int width, int height, Rgb fill) : width_(width), height_(height) {
  check_dims(width, height);
  pixels_.resize(pixel_count() * 3);
  for (std::size_t i = 0; i < pixels_.size(); i += 3) {
    pixels_[i] = fill.r;
    pixels_[i + 1] = fill.g;
    pixels_[i + 2] = fill.b;
  }
}

RasterImage::RasterImage(int width, int height, std::vector<std::uint8_t> rgb)
    : width_(width), height_(height), pixels_(std::move(rgb)) {
  check_dims(width, height);
  if (pixels_.size() != pixel_count() * 3) {
    throw Error(ErrorCode::invalid_argument, "pixel buffer does not match dimensions",
                "imaging");
  }
}

std::string RasterImage::content_hash() const {
  std::vector<std::uint8_t> buf(8 + pixels_.size());
  const std::uint32_t dims[2] = {static_cast<std::uint32_t>(width_),
                                 static_cast<std::uint32_t>(height_)};
  std::memcpy(buf.data(), dims, sizeof dims);
  std::copy(pixels_.begin(), pixels_.end(), buf.begin() + 8);
  return sha256_hex(std::span<const std::uint8_t>(buf));
}

BinaryMask::BinaryMask(int width, int height)
    : width_(width), height_(height),
      bits_(static_cast<std::size_t>(width) * static_cast<std::size_t>(height), 0) {}

void BinaryMask::set(int x, int y, bool on) noexcept {
  auto& bit = bits_[offset(x, y)];
  if ((bit != 0) == on) return;
  bit = on ? 1 : 0;
  if (on) ++count_; else --count_;
}

Box BinaryMask::bbox() const noexcept {
  Box box{width_, height_, -1, -1};
  for (int y = 0; y < height_; ++y) {
    for (int x = 0; x < width_; ++x) {
      if (!bits_[offset(x, y)]) continue;
      box.x0 = std::min(box.x0, x);
      box.y0 = std::min(box.y0, y);
      box.x1 = std::max(box.x1, x);
      box.y1 = std::max(box.y1, y);
    }
  }
  if (box.x1 < 0) return Box{};
  return box;
}

} // namespace forge3d::imaging
