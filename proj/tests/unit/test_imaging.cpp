#include <doctest.h>

#include <random>

#include "../support/fixtures.hpp"
#include "forge3d/common/error.hpp"
#include "forge3d/imaging/codec.hpp"
#include "forge3d/imaging/color.hpp"
#include "forge3d/imaging/mask.hpp"
#include "forge3d/imaging/saliency.hpp"

using namespace forge3d;
using namespace forge3d::imaging;
using forge3d::testing::box_mask;

namespace {

Histogram make_hist(std::vector<double> bins) {
  Histogram h;
  h.mode = bins.size() == static_cast<std::size_t>(kLightBins) ? HistogramMode::l_channel : HistogramMode::lab3d;
  h.bins = std::move(bins);
  return h;
}

} // namespace

TEST_CASE("lab conversion endpoints") {
  const auto white = rgb_to_lab(Rgb{255, 255, 255});
  CHECK(white.l == doctest::Approx(100.0).epsilon(1e-3));
  CHECK(std::abs(white.a) < 0.01);
  CHECK(std::abs(white.b) < 0.01);
  const auto black = rgb_to_lab(Rgb{0, 0, 0});
  CHECK(std::abs(black.l) < 1e-4);
  // sRGB red, D65: L 53.24, a 80.09, b 67.20
  const auto red = rgb_to_lab(Rgb{255, 0, 0});
  CHECK(red.l == doctest::Approx(53.24).epsilon(1e-3));
  CHECK(red.a == doctest::Approx(80.09).epsilon(1e-3));
  CHECK(red.b == doctest::Approx(67.20).epsilon(1e-3));
}

TEST_CASE("histograms are normalized and mask-restricted") {
  auto img = forge3d::testing::square_on_background(32, 8, 8, 16, {200, 30, 30});
  const auto lab = rgb_to_lab(img);
  for (auto mode : {HistogramMode::lab3d, HistogramMode::l_channel}) {
    const auto h = histogram(lab, mode);
    CHECK(h.bin_count() == bin_count(mode));
    double sum = 0.0;
    for (double v : h.bins) sum += v;
    CHECK(sum == doctest::Approx(1.0).epsilon(1e-12));
  }
  const auto mask = box_mask(32, 32, 8, 8, 23, 23);
  const auto h = histogram(lab, HistogramMode::lab3d, &mask);
  const auto peak = std::max_element(h.bins.begin(), h.bins.end());
  CHECK(*peak == doctest::Approx(1.0));
  CHECK(std::distance(h.bins.begin(), peak) == bin_index(lab.at(10, 10), HistogramMode::lab3d));

  BinaryMask empty(32, 32);
  CHECK_THROWS_AS(histogram(lab, HistogramMode::lab3d, &empty), Error);
}

TEST_CASE("bhattacharyya symmetry, identity, disjointness, brute force") {
  std::mt19937_64 rng(1234);
  for (int i = 0; i < 1000; ++i) {
    const auto bins = (i % 2 == 0) ? kLabBins : kLightBins;
    const auto p = forge3d::testing::random_histogram(rng, bins, i % 3 == 0 ? 0.7 : 0.0);
    const auto q = forge3d::testing::random_histogram(rng, bins, i % 5 == 0 ? 0.7 : 0.0);
    const auto hp = make_hist(p), hq = make_hist(q);
    const double bc = bhattacharyya(hp, hq);
    CHECK(std::abs(bc - forge3d::testing::brute_bc(p, q)) <= 1e-9);
    CHECK(bc == bhattacharyya(hq, hp));
    CHECK(std::abs(bhattacharyya(hp, hp) - 1.0) <= 1e-9);
  }
  std::vector<double> a(kLightBins, 0.0), b(kLightBins, 0.0);
  a[0] = 0.5;
  a[1] = 0.5;
  b[2] = 1.0;
  CHECK(bhattacharyya(make_hist(a), make_hist(b)) == 0.0);
  CHECK_THROWS_AS(bhattacharyya(make_hist(a), make_hist(std::vector<double>(kLabBins, 0.0))), Error);
}

TEST_CASE("mean histogram") {
  std::vector<double> a(kLightBins, 0.0), b(kLightBins, 0.0);
  a[0] = 1.0;
  b[1] = 1.0;
  const std::vector<Histogram> hs{make_hist(a), make_hist(b)};
  const auto m = mean_histogram(hs);
  CHECK(m.bins[0] == doctest::Approx(0.5));
  CHECK(m.bins[1] == doctest::Approx(0.5));
  CHECK_THROWS_AS(mean_histogram(std::span<const Histogram>{}), Error);
}

TEST_CASE("mask iou against brute force") {
  std::mt19937_64 rng(99);
  std::uniform_int_distribution<int> coord(0, 39);
  for (int i = 0; i < 200; ++i) {
    BinaryMask a(40, 40), b(40, 40);
    for (int k = 0; k < 300; ++k) {
      a.set(coord(rng), coord(rng), true);
      b.set(coord(rng), coord(rng), true);
    }
    CHECK(mask_iou(a, b) == doctest::Approx(forge3d::testing::brute_iou(a, b)).epsilon(1e-12));
  }
}

TEST_CASE("box iou hand case") {
  // 10x10 boxes overlapping by half: 50 / 150
  const Box a{0, 0, 9, 9}, b{5, 0, 14, 9};
  CHECK(box_iou(a, b) == doctest::Approx(1.0 / 3.0).epsilon(1e-12));
  CHECK(box_iou(a, a) == 1.0);
  CHECK(box_iou(a, Box{20, 20, 25, 25}) == 0.0);
  CHECK(box_iou(a, Box{}) == 0.0);
}

TEST_CASE("centroid and offset metrics") {
  const auto m = box_mask(20, 20, 0, 0, 1, 1);
  const auto c = centroid(m);
  CHECK(c.x == doctest::Approx(1.0));
  CHECK(c.y == doctest::Approx(1.0));
  const auto metrics = mask_metrics(m, m);
  CHECK(metrics.iou == 1.0);
  CHECK(metrics.max_offset == doctest::Approx(std::sqrt(200.0)));
  CHECK(metrics.centroid_offset == doctest::Approx(std::sqrt(162.0)));
  CHECK_THROWS_AS(mask_metrics(BinaryMask(20, 20), m), Error);
}

TEST_CASE("saliency on a small white square") {
  RasterImage img(256, 256, Rgb{0, 0, 0});
  for (int y = 112; y < 144; ++y) {
    for (int x = 112; x < 144; ++x) img.set(x, y, {255, 255, 255});
  }
  const auto s = saliency_mask(img);
  const auto b = s.mask.bbox();
  CHECK(b == s.bbox);
  CHECK((b.x0 <= 128 && 128 <= b.x1 && b.y0 <= 128 && 128 <= b.y1));
  const double ratio = static_cast<double>(s.mask.count()) / (32.0 * 32.0);
  CHECK(ratio >= 0.5);
  CHECK(ratio <= 2.0);
}

TEST_CASE("saliency recovers a flat square") {
  const auto img = forge3d::testing::square_on_background(32, 10, 10, 12, {20, 40, 200});
  const auto s = saliency_mask(img);
  REQUIRE_FALSE(s.mask.empty());
  const auto truth = box_mask(32, 32, 10, 10, 21, 21);
  CHECK(forge3d::testing::brute_iou(s.mask, truth) > 0.5);
  const auto c = centroid(s.mask);
  CHECK(std::abs(c.x - 16.0) < 2.0);
  CHECK(std::abs(c.y - 16.0) < 2.0);
}

TEST_CASE("saliency rejects uniform images") {
  CHECK_THROWS_AS(saliency_mask(RasterImage(64, 64, Rgb{128, 128, 128})), Error);
}

TEST_CASE("otsu threshold separates two levels") {
  std::vector<float> v(100, 0.1f);
  std::fill(v.begin() + 50, v.end(), 0.9f);
  const auto t = otsu_threshold(v);
  REQUIRE(t.has_value());
  CHECK(*t >= 0.1);
  CHECK(*t < 0.9);
  CHECK_FALSE(otsu_threshold(std::vector<float>(10, 0.5f)).has_value());
}

TEST_CASE("png round trip") {
  forge3d::testing::TempDir dir("codec");
  const auto img = forge3d::testing::square_on_background(24, 3, 5, 7, {1, 2, 3}, {250, 240, 230});
  write_png(dir.path / "a.png", img);
  CHECK(read_image(dir.path / "a.png") == img);
  const auto bytes = encode_png(img);
  CHECK(decode_image(bytes) == img);
  const std::vector<std::uint8_t> junk{1, 2, 3, 4};
  CHECK_THROWS_AS(decode_image(junk), Error);
}
