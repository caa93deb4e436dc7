#include "forge3d/providers/render.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>

#include "forge3d/common/hash.hpp"
#include "forge3d/common/rng.hpp"
#include "forge3d/common/text.hpp"

namespace forge3d::providers {

namespace {

using imaging::Rgb;
constexpr double kPi = std::numbers::pi;

struct NamedColor {
  std::string_view name;
  Rgb rgb;
};

constexpr std::array<NamedColor, 14> kColors = {{
    {"red", {200, 40, 40}},     {"pink", {235, 120, 170}}, {"blue", {50, 90, 210}},
    {"green", {60, 160, 70}},   {"yellow", {230, 200, 40}}, {"orange", {235, 130, 30}},
    {"purple", {130, 60, 170}}, {"black", {35, 35, 40}},   {"white", {250, 250, 250}},
    {"brown", {120, 80, 45}},   {"gold", {212, 175, 55}},  {"silver", {170, 170, 180}},
    {"gray", {120, 120, 125}},  {"wooden", {150, 105, 60}},
}};

Rgb hue_color(double hue) {
  const double h = std::fmod(hue, 1.0) * 6.0;
  const double f = h - std::floor(h);
  const double hi = 215.0;
  const double lo = 60.0;
  const double up = lo + (hi - lo) * f;
  const double down = hi - (hi - lo) * f;
  double r = 0, g = 0, b = 0;
  switch (static_cast<int>(h) % 6) {
  case 0: r = hi; g = up; b = lo; break;
  case 1: r = down; g = hi; b = lo; break;
  case 2: r = lo; g = hi; b = up; break;
  case 3: r = lo; g = down; b = hi; break;
  case 4: r = up; g = lo; b = hi; break;
  default: r = hi; g = lo; b = down; break;
  }
  return {static_cast<std::uint8_t>(r), static_cast<std::uint8_t>(g), static_cast<std::uint8_t>(b)};
}

Rgb shade(Rgb c, double k) {
  const auto ch = [k](std::uint8_t v) {
    return static_cast<std::uint8_t>(std::clamp(std::lround(v * k), 0L, 255L));
  };
  return {ch(c.r), ch(c.g), ch(c.b)};
}

Rgb invert_hue(Rgb c) {
  const int hi = std::max({c.r, c.g, c.b});
  const int lo = std::min({c.r, c.g, c.b});
  return {static_cast<std::uint8_t>(hi + lo - c.r), static_cast<std::uint8_t>(hi + lo - c.g),
          static_cast<std::uint8_t>(hi + lo - c.b)};
}

double lambert(double nx, double ny, double nz, double yaw, double phase) {
  double lx = std::sin(yaw + phase);
  double ly = -0.45;
  double lz = std::cos(yaw + phase) + 0.6;
  const double len = std::sqrt(lx * lx + ly * ly + lz * lz);
  lx /= len;
  ly /= len;
  lz /= len;
  return 0.45 + 0.55 * std::max(0.0, nx * lx + ny * ly + nz * lz);
}

} // namespace

ObjectSpec spec_for_prompt(std::string_view prompt, std::uint64_t seed) {
  const std::uint64_t h = hash64(to_lower(prompt), seed);
  Rng rng(h);
  ObjectSpec spec;
  spec.shape = static_cast<Shape>(rng.below(3));
  spec.color = hue_color(rng.uniform());
  for (const auto& token : tokenize(prompt)) {
    const auto it = std::find_if(kColors.begin(), kColors.end(),
                                 [&](const NamedColor& c) { return c.name == token; });
    if (it != kColors.end()) {
      spec.color = it->rgb;
      break;
    }
  }
  spec.accent = invert_hue(spec.color);
  if (spec.accent == spec.color) spec.accent = Rgb{40, 60, 170};
  spec.scale = rng.uniform(0.22, 0.34);
  spec.offset_x = rng.uniform(-0.04, 0.04);
  spec.offset_y = rng.uniform(-0.04, 0.04);
  if (rng.below(5) == 0) {
    // Off-centre subject, poorer gate score.
    spec.offset_x = rng.uniform(0.16, 0.22) * (rng.below(2) ? 1.0 : -1.0);
    spec.offset_y = rng.uniform(0.10, 0.16) * (rng.below(2) ? 1.0 : -1.0);
  }
  spec.clutter = rng.below(6) == 0;
  spec.light_phase = rng.uniform(0.0, 2.0 * kPi);
  spec.marker_phase = rng.uniform(0.0, 2.0 * kPi);
  if (rng.below(4) == 0) spec.defect_view = 1 + static_cast<int>(rng.below(8));
  return spec;
}

imaging::RasterImage render_view(const ObjectSpec& spec, int view_index, int size) {
  imaging::RasterImage img(size, size, kBackground);
  const double yaw = view_index * scoring::kYawStepDegrees * kPi / 180.0;
  const double cx = size * (0.5 + spec.offset_x);
  const double cy = size * (0.5 + spec.offset_y);
  const double r = size * spec.scale;
  const bool invert = spec.defect_view && *spec.defect_view == view_index;

  const auto paint = [&](int x, int y, Rgb c) {
    if (x < 0 || y < 0 || x >= size || y >= size) return;
    img.set(x, y, invert ? invert_hue(c) : c);
  };

  const int x0 = std::max(0, static_cast<int>(cx - 1.6 * r));
  const int x1 = std::min(size - 1, static_cast<int>(cx + 1.6 * r));
  const int y0 = std::max(0, static_cast<int>(cy - 1.6 * r));
  const int y1 = std::min(size - 1, static_cast<int>(cy + 1.6 * r));

  switch (spec.shape) {
  case Shape::sphere:
    for (int y = y0; y <= y1; ++y) {
      for (int x = x0; x <= x1; ++x) {
        const double nx = (x + 0.5 - cx) / r;
        const double ny = (y + 0.5 - cy) / r;
        const double d2 = nx * nx + ny * ny;
        if (d2 > 1.0) continue;
        const double nz = std::sqrt(1.0 - d2);
        // Longitude bands rotate with the object.
        const double lon = std::atan2(nx, nz) + yaw;
        const bool band = std::cos(3.0 * lon) > 0.6;
        const Rgb base = band ? spec.accent : spec.color;
        paint(x, y, shade(base, lambert(nx, ny, nz, yaw, spec.light_phase)));
      }
    }
    break;
  case Shape::cube: {
    const double s = r * 0.85;
    std::array<double, 4> ex{};
    for (int k = 0; k < 4; ++k) {
      ex[static_cast<std::size_t>(k)] = s * std::sqrt(2.0) * std::sin(yaw + kPi / 4 + k * kPi / 2);
    }
    for (int k = 0; k < 4; ++k) {
      const double normal = yaw + kPi / 2 + k * kPi / 2;
      const double nz = std::cos(normal);
      if (nz <= 1e-6) continue;
      const double nx = std::sin(normal);
      const double a = ex[static_cast<std::size_t>(k)];
      const double b = ex[static_cast<std::size_t>((k + 1) % 4)];
      const double lo = std::min(a, b);
      const double hi = std::max(a, b);
      const Rgb base = (k % 2 == 0) ? spec.color : spec.accent;
      const Rgb c = shade(base, lambert(nx, 0.0, nz, yaw, spec.light_phase));
      for (int y = static_cast<int>(cy - s); y < static_cast<int>(cy + s); ++y) {
        for (int x = static_cast<int>(cx + lo); x < static_cast<int>(cx + hi); ++x) paint(x, y, c);
      }
    }
    break;
  }
  case Shape::torus: {
    const double outer = r * 1.15;
    const double inner = r * 0.5;
    const double squash = 0.6;
    for (int y = y0; y <= y1; ++y) {
      for (int x = x0; x <= x1; ++x) {
        const double dx = x + 0.5 - cx;
        const double dy = (y + 0.5 - cy) / squash;
        const double d = std::sqrt(dx * dx + dy * dy);
        if (d > outer || d < inner) continue;
        const double t = (d - inner) / (outer - inner) * 2.0 - 1.0;
        const double ring = std::atan2(dy, dx) + yaw;
        const Rgb base = std::sin(4.0 * ring) > 0.3 ? spec.accent : spec.color;
        paint(x, y, shade(base, lambert(t * dx / d, t * dy / d, std::sqrt(std::max(0.0, 1 - t * t)),
                                        yaw, spec.light_phase)));
      }
    }
    break;
  }
  }

  // A small feature on the surface that swings around with the yaw.
  const double psi = yaw + spec.marker_phase;
  if (std::cos(psi) > 0.0) {
    const double mx = cx + r * 0.75 * std::sin(psi);
    const double my = cy - r * 0.9;
    const double mr = r * 0.2;
    for (int y = static_cast<int>(my - mr); y <= static_cast<int>(my + mr); ++y) {
      for (int x = static_cast<int>(mx - mr); x <= static_cast<int>(mx + mr); ++x) {
        if ((x + 0.5 - mx) * (x + 0.5 - mx) + (y + 0.5 - my) * (y + 0.5 - my) <= mr * mr) {
          paint(x, y, shade(spec.accent, 0.8));
        }
      }
    }
  }

  if (spec.clutter) {
    // Background props: identical in every view, unrelated to the subject.
    const int prop = std::max(4, size / 10);
    for (const auto& [px, py] : {std::pair{size / 12, size / 12}, std::pair{size - size / 5, size / 9},
                                std::pair{size / 10, size - size / 5}}) {
      for (int y = py; y < py + prop && y < size; ++y) {
        for (int x = px; x < px + prop && x < size; ++x) img.set(x, y, Rgb{90, 110, 60});
      }
    }
  }
  return img;
}

scoring::MultiViewSet render_views(const ObjectSpec& spec, int size, std::string candidate_id) {
  scoring::MultiViewSet set;
  set.candidate_id = std::move(candidate_id);
  set.views.reserve(scoring::kViewCount);
  for (int i = 0; i < scoring::kViewCount; ++i) set.views.push_back(render_view(spec, i, size));
  return set;
}

} // namespace forge3d::providers
