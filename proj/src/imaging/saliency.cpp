#include "forge3d/imaging/saliency.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <numbers>
#include <vector>

#include <unsupported/Eigen/FFT>

#include "forge3d/common/error.hpp"

namespace forge3d::imaging {

namespace {

constexpr int kThumb = 64;
using Complex = std::complex<double>;

struct Grid {
  int width = 0;
  int height = 0;
  std::vector<double> v;

  double& at(int x, int y) { return v[static_cast<std::size_t>(y * width + x)]; }
  double at(int x, int y) const { return v[static_cast<std::size_t>(y * width + x)]; }
};

int reflect101(int i, int n) {
  if (n == 1) return 0;
  while (i < 0 || i >= n) {
    if (i < 0) i = -i;
    if (i >= n) i = 2 * n - 2 - i;
  }
  return i;
}

// Bilinear resampling with pixel-center alignment.
Grid resize(const Grid& src, int width, int height) {
  Grid dst{width, height, std::vector<double>(static_cast<std::size_t>(width * height))};
  const double sx = static_cast<double>(src.width) / width;
  const double sy = static_cast<double>(src.height) / height;
  for (int y = 0; y < height; ++y) {
    const double fy = std::clamp((y + 0.5) * sy - 0.5, 0.0, src.height - 1.0);
    const int y0 = static_cast<int>(fy);
    const int y1 = std::min(y0 + 1, src.height - 1);
    const double ty = fy - y0;
    for (int x = 0; x < width; ++x) {
      const double fx = std::clamp((x + 0.5) * sx - 0.5, 0.0, src.width - 1.0);
      const int x0 = static_cast<int>(fx);
      const int x1 = std::min(x0 + 1, src.width - 1);
      const double tx = fx - x0;
      const double top = src.at(x0, y0) * (1 - tx) + src.at(x1, y0) * tx;
      const double bottom = src.at(x0, y1) * (1 - tx) + src.at(x1, y1) * tx;
      dst.at(x, y) = top * (1 - ty) + bottom * ty;
    }
  }
  return dst;
}

// Separable 2-D DFT on an n x n grid, row pass then column pass.
void dft2(std::vector<Complex>& data, int n, bool inverse) {
  Eigen::FFT<double> fft;
  std::vector<Complex> in(static_cast<std::size_t>(n));
  std::vector<Complex> out;
  const auto idx = [n](int row, int col) { return static_cast<std::size_t>(row * n + col); };
  for (int pass = 0; pass < 2; ++pass) {
    for (int r = 0; r < n; ++r) {
      for (int j = 0; j < n; ++j) in[static_cast<std::size_t>(j)] = data[pass == 0 ? idx(r, j) : idx(j, r)];
      if (inverse) fft.inv(out, in); else fft.fwd(out, in);
      for (int k = 0; k < n; ++k) data[pass == 0 ? idx(r, k) : idx(k, r)] = out[static_cast<std::size_t>(k)];
    }
  }
}

Grid box_blur3(const Grid& g) {
  Grid out = g;
  for (int y = 0; y < g.height; ++y) {
    for (int x = 0; x < g.width; ++x) {
      double acc = 0.0;
      for (int dy = -1; dy <= 1; ++dy) {
        for (int dx = -1; dx <= 1; ++dx) {
          acc += g.at(reflect101(x + dx, g.width), reflect101(y + dy, g.height));
        }
      }
      out.at(x, y) = acc / 9.0;
    }
  }
  return out;
}

Grid gaussian_blur(const Grid& g, int ksize, double sigma) {
  const int half = ksize / 2;
  std::vector<double> kernel(static_cast<std::size_t>(ksize));
  double total = 0.0;
  for (int i = 0; i < ksize; ++i) {
    const double d = i - half;
    kernel[static_cast<std::size_t>(i)] = std::exp(-d * d / (2 * sigma * sigma));
    total += kernel[static_cast<std::size_t>(i)];
  }
  for (auto& k : kernel) k /= total;
  Grid tmp = g;
  for (int y = 0; y < g.height; ++y) {
    for (int x = 0; x < g.width; ++x) {
      double acc = 0.0;
      for (int i = 0; i < ksize; ++i) {
        acc += kernel[static_cast<std::size_t>(i)] * g.at(reflect101(x + i - half, g.width), y);
      }
      tmp.at(x, y) = acc;
    }
  }
  Grid out = g;
  for (int y = 0; y < g.height; ++y) {
    for (int x = 0; x < g.width; ++x) {
      double acc = 0.0;
      for (int i = 0; i < ksize; ++i) {
        acc += kernel[static_cast<std::size_t>(i)] * tmp.at(x, reflect101(y + i - half, g.height));
      }
      out.at(x, y) = acc;
    }
  }
  return out;
}

bool is_uniform(const RasterImage& img) {
  const auto bytes = img.bytes();
  for (std::size_t i = 3; i < bytes.size(); i += 3) {
    if (bytes[i] != bytes[0] || bytes[i + 1] != bytes[1] || bytes[i + 2] != bytes[2]) return false;
  }
  return true;
}

// Otsu components peaking within 10% of the global maximum, cut at 60% of that
// maximum and filled to their convex hull. Flat synthetic objects light up only at corners and edges, and
// the hull restores the interior.
BinaryMask salient_region(const ScalarMap& map, const BinaryMask& raw) {
  const int w = raw.width(), h = raw.height();
  std::vector<int> label(static_cast<std::size_t>(w) * h, -1);
  std::vector<float> peaks;
  std::vector<std::pair<int, int>> stack;
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      if (!raw.at(x, y) || label[static_cast<std::size_t>(y) * w + x] >= 0) continue;
      const int id = static_cast<int>(peaks.size());
      float peak = 0.0f;
      stack.assign(1, {x, y});
      label[static_cast<std::size_t>(y) * w + x] = id;
      while (!stack.empty()) {
        const auto [cx, cy] = stack.back();
        stack.pop_back();
        peak = std::max(peak, map.at(cx, cy));
        constexpr int dx[] = {1, -1, 0, 0}, dy[] = {0, 0, 1, -1};
        for (int k = 0; k < 4; ++k) {
          const int nx = cx + dx[k], ny = cy + dy[k];
          if (nx < 0 || ny < 0 || nx >= w || ny >= h || !raw.at(nx, ny)) continue;
          auto& l = label[static_cast<std::size_t>(ny) * w + nx];
          if (l < 0) {
            l = id;
            stack.emplace_back(nx, ny);
          }
        }
      }
      peaks.push_back(peak);
    }
  }
  const float top = peaks.empty() ? 0.0f : *std::max_element(peaks.begin(), peaks.end());

  // Hull over pixel corners of the part above the cut of the kept components
  // (monotone chain).
  const auto kept = [&](int x, int y) {
    const int l = label[static_cast<std::size_t>(y) * w + x];
    return l >= 0 && peaks[static_cast<std::size_t>(l)] >= 0.9f * top && map.at(x, y) >= 0.6f * top;
  };
  using P = std::pair<long long, long long>;
  std::vector<P> pts;
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      if (!kept(x, y)) continue;
      if (x == 0 || !kept(x - 1, y)) pts.push_back({x, y}), pts.push_back({x, y + 1});
      if (x == w - 1 || !kept(x + 1, y)) pts.push_back({x + 1, y}), pts.push_back({x + 1, y + 1});
    }
  }
  std::sort(pts.begin(), pts.end());
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
  if (pts.size() < 3) return raw;
  const auto cross = [](const P& o, const P& a, const P& b) {
    return (a.first - o.first) * (b.second - o.second) - (a.second - o.second) * (b.first - o.first);
  };
  std::vector<P> hull(2 * pts.size());
  std::size_t k = 0;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    while (k >= 2 && cross(hull[k - 2], hull[k - 1], pts[i]) <= 0) --k;
    hull[k++] = pts[i];
  }
  for (std::size_t i = pts.size() - 1, lower = k + 1; i-- > 0;) {
    while (k >= lower && cross(hull[k - 2], hull[k - 1], pts[i]) <= 0) --k;
    hull[k++] = pts[i];
  }
  hull.resize(k - 1);

  // A pixel is inside when its center lies within the hull.
  BinaryMask out(w, h);
  for (int y = 0; y < h; ++y) {
    const double cy = y + 0.5;
    double lo = w, hi = -1.0;
    for (std::size_t i = 0; i < hull.size(); ++i) {
      const auto& a = hull[i];
      const auto& b = hull[(i + 1) % hull.size()];
      const double ay = static_cast<double>(a.second), by = static_cast<double>(b.second);
      if ((cy < std::min(ay, by)) || (cy > std::max(ay, by))) continue;
      if (ay == by) {
        lo = std::min({lo, static_cast<double>(a.first), static_cast<double>(b.first)});
        hi = std::max({hi, static_cast<double>(a.first), static_cast<double>(b.first)});
        continue;
      }
      const double t = (cy - ay) / (by - ay);
      const double x = static_cast<double>(a.first) + t * static_cast<double>(b.first - a.first);
      lo = std::min(lo, x);
      hi = std::max(hi, x);
    }
    for (int x = std::max(0, static_cast<int>(std::ceil(lo - 0.5))); x < w && x + 0.5 <= hi; ++x) {
      out.set(x, y, true);
    }
  }
  return out.empty() ? raw : out;
}

} // namespace

std::optional<double> otsu_threshold(std::span<const float> values) {
  std::array<double, 256> hist{};
  for (const float v : values) {
    const int k = std::clamp(static_cast<int>(v * 255.0f + 0.5f), 0, 255);
    hist[static_cast<std::size_t>(k)] += 1.0;
  }
  const double total = static_cast<double>(values.size());
  double sum_all = 0.0;
  for (int k = 0; k < 256; ++k) sum_all += k * hist[static_cast<std::size_t>(k)];

  double weight_bg = 0.0;
  double sum_bg = 0.0;
  double best_var = -1.0;
  int best = -1;
  for (int t = 0; t < 255; ++t) {
    weight_bg += hist[static_cast<std::size_t>(t)];
    sum_bg += t * hist[static_cast<std::size_t>(t)];
    const double weight_fg = total - weight_bg;
    if (weight_bg == 0.0 || weight_fg == 0.0) continue;
    const double mean_bg = sum_bg / weight_bg;
    const double mean_fg = (sum_all - sum_bg) / weight_fg;
    const double between = weight_bg * weight_fg * (mean_bg - mean_fg) * (mean_bg - mean_fg);
    if (between > best_var) {
      best_var = between;
      best = t;
    }
  }
  if (best < 0) return std::nullopt;
  // Foreground is every value that quantizes above level `best`.
  return (best + 0.5) / 255.0;
}

BinaryMask threshold_otsu(const ScalarMap& map) {
  const auto level = otsu_threshold(map.values);
  if (!level) throw Error(ErrorCode::no_foreground, "map is flat", "imaging");
  BinaryMask mask(map.width, map.height);
  for (int y = 0; y < map.height; ++y) {
    for (int x = 0; x < map.width; ++x) {
      if (map.at(x, y) > *level) mask.set(x, y, true);
    }
  }
  if (mask.empty()) throw Error(ErrorCode::no_foreground, "no value above threshold", "imaging");
  return mask;
}

SaliencyResult saliency_mask(const RasterImage& img) {
  if (is_uniform(img)) {
    throw Error(ErrorCode::no_foreground, "uniform image has no salient region", "imaging");
  }
  Grid gray{img.width(), img.height(), std::vector<double>(img.pixel_count())};
  for (int y = 0; y < img.height(); ++y) {
    for (int x = 0; x < img.width(); ++x) {
      const Rgb c = img.at(x, y);
      gray.at(x, y) = 0.299 * c.r + 0.587 * c.g + 0.114 * c.b;
    }
  }
  const Grid thumb = resize(gray, kThumb, kThumb);

  std::vector<Complex> spectrum(thumb.v.begin(), thumb.v.end());
  dft2(spectrum, kThumb, false);

  Grid log_amp{kThumb, kThumb, std::vector<double>(spectrum.size())};
  std::vector<double> phase(spectrum.size());
  for (std::size_t i = 0; i < spectrum.size(); ++i) {
    log_amp.v[i] = std::log1p(std::abs(spectrum[i]));
    phase[i] = std::arg(spectrum[i]);
  }
  const Grid smooth = box_blur3(log_amp);
  for (std::size_t i = 0; i < spectrum.size(); ++i) {
    spectrum[i] = std::polar(std::exp(log_amp.v[i] - smooth.v[i]), phase[i]);
  }
  dft2(spectrum, kThumb, true);

  Grid energy{kThumb, kThumb, std::vector<double>(spectrum.size())};
  for (std::size_t i = 0; i < spectrum.size(); ++i) energy.v[i] = std::abs(spectrum[i]);
  energy = gaussian_blur(energy, 5, 8.0);
  double peak = 0.0;
  for (auto& v : energy.v) {
    v *= v;
    peak = std::max(peak, v);
  }
  if (!(peak > 0.0)) throw Error(ErrorCode::no_foreground, "saliency is flat", "imaging");
  for (auto& v : energy.v) v /= peak;

  const Grid full = resize(energy, img.width(), img.height());
  SaliencyResult result;
  result.saliency = ScalarMap{img.width(), img.height(), {}};
  result.saliency.values.reserve(full.v.size());
  for (const double v : full.v) {
    result.saliency.values.push_back(static_cast<float>(std::clamp(v, 0.0, 1.0)));
  }
  result.mask = salient_region(result.saliency, threshold_otsu(result.saliency));
  result.bbox = result.mask.bbox();
  return result;
}

} // namespace forge3d::imaging
