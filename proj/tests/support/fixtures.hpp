#pragma once

// Synthetic inputs and brute-force reference computations shared by the
// unit and acceptance tests. Nothing here calls into the library's own
// scoring code.

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <random>
#include <string>
#include <vector>

#include "forge3d/imaging/image.hpp"

namespace forge3d::testing {

inline imaging::RasterImage square_on_background(int size, int x0, int y0, int side, imaging::Rgb fg,
                                                 imaging::Rgb bg = {255, 255, 255}) {
  imaging::RasterImage img(size, size, bg);
  for (int y = y0; y < y0 + side && y < size; ++y) {
    for (int x = x0; x < x0 + side && x < size; ++x) img.set(x, y, fg);
  }
  return img;
}

inline imaging::BinaryMask box_mask(int w, int h, int x0, int y0, int x1, int y1) {
  imaging::BinaryMask m(w, h);
  for (int y = y0; y <= y1; ++y) {
    for (int x = x0; x <= x1; ++x) m.set(x, y, true);
  }
  return m;
}

inline double brute_bc(const std::vector<double>& p, const std::vector<double>& q) {
  long double s = 0.0L;
  for (std::size_t i = 0; i < p.size(); ++i) s += std::sqrt(static_cast<long double>(p[i]) * q[i]);
  return static_cast<double>(s);
}

inline std::vector<double> random_histogram(std::mt19937_64& rng, std::size_t bins, double sparsity = 0.0) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<double> h(bins);
  double total = 0.0;
  for (auto& v : h) {
    v = u(rng) < sparsity ? 0.0 : u(rng);
    total += v;
  }
  if (total == 0.0) {
    h[0] = 1.0;
    return h;
  }
  for (auto& v : h) v /= total;
  return h;
}

inline double brute_iou(const imaging::BinaryMask& a, const imaging::BinaryMask& b) {
  std::size_t inter = 0, uni = 0;
  for (int y = 0; y < a.height(); ++y) {
    for (int x = 0; x < a.width(); ++x) {
      inter += (a.at(x, y) && b.at(x, y)) ? 1 : 0;
      uni += (a.at(x, y) || b.at(x, y)) ? 1 : 0;
    }
  }
  return uni == 0 ? 0.0 : static_cast<double>(inter) / static_cast<double>(uni);
}

/// Fresh directory under the system temp dir, removed on destruction.
struct TempDir {
  std::filesystem::path path;
  explicit TempDir(const std::string& tag) {
    std::random_device rd;
    path = std::filesystem::temp_directory_path() /
           ("forge3d-" + tag + "-" + std::to_string(rd()) + std::to_string(rd()));
    std::filesystem::create_directories(path);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;
};

} // namespace forge3d::testing
