#include "forge3d/imaging/color.hpp"

#include <algorithm>
#include <array>
#include <cmath>

#include "forge3d/common/error.hpp"

namespace forge3d::imaging {

namespace {

// D65 reference white.
constexpr double kXn = 0.95047;
constexpr double kYn = 1.0;
constexpr double kZn = 1.08883;

const std::array<double, 256>& linear_lut() {
  static const std::array<double, 256> lut = [] {
    std::array<double, 256> t{};
    for (int i = 0; i < 256; ++i) {
      const double c = i / 255.0;
      t[i] = c <= 0.04045 ? c / 12.92 : std::pow((c + 0.055) / 1.055, 2.4);
    }
    return t;
  }();
  return lut;
}

double lab_f(double t) noexcept {
  constexpr double delta = 6.0 / 29.0;
  return t > delta * delta * delta ? std::cbrt(t) : t / (3.0 * delta * delta) + 4.0 / 29.0;
}

} // namespace

LabPixel rgb_to_lab(Rgb c) noexcept {
  const auto& lut = linear_lut();
  const double r = lut[c.r];
  const double g = lut[c.g];
  const double b = lut[c.b];
  const double x = 0.4124564 * r + 0.3575761 * g + 0.1804375 * b;
  const double y = 0.2126729 * r + 0.7151522 * g + 0.0721750 * b;
  const double z = 0.0193339 * r + 0.1191920 * g + 0.9503041 * b;
  const double fx = lab_f(x / kXn);
  const double fy = lab_f(y / kYn);
  const double fz = lab_f(z / kZn);
  LabPixel out;
  out.l = static_cast<float>(std::clamp(116.0 * fy - 16.0, 0.0, 100.0));
  out.a = static_cast<float>(std::clamp(500.0 * (fx - fy), -128.0, 127.0));
  out.b = static_cast<float>(std::clamp(200.0 * (fy - fz), -128.0, 127.0));
  return out;
}

LabImage rgb_to_lab(const RasterImage& img) {
  LabImage lab{img.width(), img.height(), {}};
  lab.pixels.resize(img.pixel_count());
  const auto bytes = img.bytes();
  for (std::size_t i = 0; i < lab.pixels.size(); ++i) {
    lab.pixels[i] = rgb_to_lab(Rgb{bytes[3 * i], bytes[3 * i + 1], bytes[3 * i + 2]});
  }
  return lab;
}

int bin_index(const LabPixel& p, HistogramMode mode) noexcept {
  const auto bucket = [](double v, double lo, double span, int n) {
    const int k = static_cast<int>(std::floor((v - lo) / span * n));
    return std::clamp(k, 0, n - 1);
  };
  if (mode == HistogramMode::l_channel) return bucket(p.l, 0.0, 100.0, kLightBins);
  const int lb = bucket(p.l, 0.0, 100.0, kLabBinsPerAxis);
  const int ab = bucket(p.a, -128.0, 255.0, kLabBinsPerAxis);
  const int bb = bucket(p.b, -128.0, 255.0, kLabBinsPerAxis);
  return (lb * kLabBinsPerAxis + ab) * kLabBinsPerAxis + bb;
}

namespace {

void normalize(Histogram& h, double total) {
  for (auto& v : h.bins) v /= total;
}

} // namespace

Histogram histogram(const LabImage& img, HistogramMode mode, const BinaryMask* mask) {
  Histogram h{mode, std::vector<double>(static_cast<std::size_t>(bin_count(mode)), 0.0)};
  if (mask != nullptr) {
    if (mask->width() != img.width || mask->height() != img.height) {
      throw Error(ErrorCode::invalid_argument, "mask dimensions differ from image", "imaging");
    }
    if (mask->empty()) throw Error(ErrorCode::empty_mask, "mask has no foreground", "imaging");
  }
  double total = 0.0;
  for (std::size_t i = 0; i < img.pixels.size(); ++i) {
    if (mask != nullptr && mask->bits()[i] == 0) continue;
    h.bins[static_cast<std::size_t>(bin_index(img.pixels[i], mode))] += 1.0;
    total += 1.0;
  }
  normalize(h, total);
  return h;
}

Histogram histogram_in_region(const LabImage& img, HistogramMode mode, const BinaryMask& mask,
                              const Box& region) {
  Histogram h{mode, std::vector<double>(static_cast<std::size_t>(bin_count(mode)), 0.0)};
  double total = 0.0;
  const int x0 = std::max(region.x0, 0);
  const int y0 = std::max(region.y0, 0);
  const int x1 = std::min(region.x1, img.width - 1);
  const int y1 = std::min(region.y1, img.height - 1);
  for (int y = y0; y <= y1; ++y) {
    for (int x = x0; x <= x1; ++x) {
      if (!mask.at(x, y)) continue;
      h.bins[static_cast<std::size_t>(bin_index(img.at(x, y), mode))] += 1.0;
      total += 1.0;
    }
  }
  if (total == 0.0) {
    h.bins.clear();
    return h;
  }
  normalize(h, total);
  return h;
}

Histogram mean_histogram(std::span<const Histogram> hists) {
  if (hists.empty()) {
    throw Error(ErrorCode::insufficient_data, "mean of zero histograms", "imaging");
  }
  Histogram mean{hists.front().mode, std::vector<double>(hists.front().bins.size(), 0.0)};
  for (const auto& h : hists) {
    if (h.mode != mean.mode || h.bins.size() != mean.bins.size()) {
      throw Error(ErrorCode::mode_mismatch, "histogram layouts differ", "imaging");
    }
    for (std::size_t i = 0; i < h.bins.size(); ++i) mean.bins[i] += h.bins[i];
  }
  double total = 0.0;
  for (const double v : mean.bins) total += v;
  if (total > 0.0) normalize(mean, total);
  return mean;
}

double bhattacharyya(const Histogram& p, const Histogram& q) {
  if (p.mode != q.mode || p.bins.size() != q.bins.size()) {
    throw Error(ErrorCode::mode_mismatch, "histogram layouts differ", "imaging");
  }
  double sum = 0.0;
  for (std::size_t i = 0; i < p.bins.size(); ++i) sum += std::sqrt(p.bins[i] * q.bins[i]);
  return std::clamp(sum, 0.0, 1.0);
}

} // namespace forge3d::imaging
