#include "forge3d/providers/mock.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>

#include <json.hpp>

#include "forge3d/common/hash.hpp"
#include "forge3d/common/rng.hpp"
#include "forge3d/common/text.hpp"
#include "forge3d/imaging/color.hpp"
#include "forge3d/providers/render.hpp"

namespace forge3d::providers {

namespace {

constexpr int kGrid = 4;
constexpr int kFeatures = kGrid * kGrid * 3;

void normalize(Embedding& v) {
  double n = 0.0;
  for (const double x : v) n += x * x;
  n = std::sqrt(n);
  if (n > 0.0) {
    for (auto& x : v) x /= n;
  }
}

} // namespace

Embedding hash_unit_vector(std::string_view text, std::uint64_t seed, int dim) {
  Rng rng(hash64(text, seed));
  Embedding v(static_cast<std::size_t>(dim));
  for (auto& x : v) x = rng.normal();
  normalize(v);
  return v;
}

MockEmbedding::MockEmbedding(std::uint64_t seed, int dim) : seed_(seed), dim_(dim) {
  Rng rng(hash_combine(seed, 0x1a2b3c4dULL));
  projection_.resize(static_cast<std::size_t>(dim) * kFeatures);
  for (auto& x : projection_) x = rng.normal();
}

Embedding MockEmbedding::embed_text(std::string_view text) {
  const auto tokens = tokenize(text);
  Embedding sum(static_cast<std::size_t>(dim_), 0.0);
  if (tokens.empty()) return hash_unit_vector(text, seed_, dim_);
  for (const auto& t : tokens) {
    const auto v = hash_unit_vector(t, seed_, dim_);
    for (std::size_t i = 0; i < sum.size(); ++i) sum[i] += v[i];
  }
  normalize(sum);
  return sum;
}

Embedding MockEmbedding::embed_image(const imaging::RasterImage& img) {
  std::array<double, kFeatures> features{};
  std::array<double, kGrid * kGrid> counts{};
  for (int y = 0; y < img.height(); y += 2) {
    for (int x = 0; x < img.width(); x += 2) {
      const int cell = (y * kGrid / img.height()) * kGrid + (x * kGrid / img.width());
      const auto c = img.at(x, y);
      features[static_cast<std::size_t>(cell * 3)] += c.r;
      features[static_cast<std::size_t>(cell * 3 + 1)] += c.g;
      features[static_cast<std::size_t>(cell * 3 + 2)] += c.b;
      counts[static_cast<std::size_t>(cell)] += 1.0;
    }
  }
  for (int f = 0; f < kFeatures; ++f) {
    features[static_cast<std::size_t>(f)] =
        features[static_cast<std::size_t>(f)] / counts[static_cast<std::size_t>(f / 3)] / 127.5 - 1.0;
  }
  Embedding out(static_cast<std::size_t>(dim_), 0.0);
  for (int d = 0; d < dim_; ++d) {
    double acc = 0.0;
    for (int f = 0; f < kFeatures; ++f) {
      acc += projection_[static_cast<std::size_t>(d * kFeatures + f)] *
             features[static_cast<std::size_t>(f)];
    }
    out[static_cast<std::size_t>(d)] = acc;
  }
  normalize(out);
  if (std::all_of(out.begin(), out.end(), [](double x) { return x == 0.0; })) {
    return hash_unit_vector(img.content_hash(), seed_, dim_);
  }
  return out;
}

imaging::BinaryMask MockSegmentation::segment(const imaging::RasterImage& img) {
  const imaging::Rgb bg = img.at(img.width() - 1, img.height() - 1);
  imaging::BinaryMask mask(img.width(), img.height());
  for (int y = 0; y < img.height(); ++y) {
    for (int x = 0; x < img.width(); ++x) {
      const auto c = img.at(x, y);
      const int diff = std::max({std::abs(c.r - bg.r), std::abs(c.g - bg.g), std::abs(c.b - bg.b)});
      if (diff > 24) mask.set(x, y, true);
    }
  }
  return mask;
}

GenerationResult MockGeneration::generate(const std::string& prompt,
                                          const std::string& candidate_id) {
  GenerationResult r;
  r.candidate_id = candidate_id;
  r.branch = Branch::generation;
  r.prompt = prompt;
  r.views = render_views(spec_for_prompt(prompt, seed_), size_, candidate_id);
  return r;
}

const std::vector<Fixture>& retrieval_fixtures() {
  static const std::vector<Fixture> fixtures = [] {
    const char* prompts[] = {
        "a red ceramic teapot with a curved spout",
        "a wooden chair with four legs",
        "a pink cat figurine with blue eyes",
        "a blue ceramic vase with floral pattern",
        "a green dragon toy with small wings",
        "a yellow rubber duck",
        "a black leather boot",
        "a white marble bust of a statue",
        "a brown teddy bear with a bow",
        "a gold trophy cup on a base",
        "a silver robot with round head",
        "a purple crystal gemstone",
        "an orange pumpkin lantern",
        "a gray stone gargoyle",
        "a pink donut with sprinkles",
        "a blue sports car toy",
        "a red fire hydrant",
        "a green cactus in a clay pot",
        "a wooden treasure chest",
        "a white porcelain cup",
        "a cute cat plush toy",
        "a japanese style lantern",
        "a low poly fox figurine",
        "a metallic helmet with visor",
    };
    std::vector<Fixture> out;
    int i = 0;
    for (const char* p : prompts) {
      char id[16];
      std::snprintf(id, sizeof id, "fx%02d", i++);
      out.push_back({id, p});
    }
    return out;
  }();
  return fixtures;
}

MockRetrieval::MockRetrieval(std::uint64_t seed, int size, int embedding_dim)
    : embedding_(seed, embedding_dim), size_(size) {}

std::vector<GenerationResult> MockRetrieval::retrieve(std::string_view query, std::size_t k) {
  const auto q = embedding_.embed_text(query);
  const auto& fixtures = retrieval_fixtures();
  std::vector<std::pair<double, std::size_t>> ranked;
  for (std::size_t i = 0; i < fixtures.size(); ++i) {
    const auto e = embedding_.embed_text(fixtures[i].prompt);
    double dot = 0.0;
    for (std::size_t d = 0; d < e.size(); ++d) dot += e[d] * q[d];
    ranked.emplace_back(dot, i);
  }
  std::stable_sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) {
    return a.first > b.first;
  });
  std::vector<GenerationResult> out;
  for (std::size_t r = 0; r < std::min(k, ranked.size()); ++r) {
    const auto& f = fixtures[ranked[r].second];
    GenerationResult g;
    g.candidate_id = f.id;
    g.branch = Branch::retrieval;
    g.prompt = f.prompt;
    // Fixtures are bundled assets: rendered with a fixed seed, never the session's.
    g.views = render_views(spec_for_prompt(f.prompt, 0x5eedf1c7ULL), size_, f.id);
    out.push_back(std::move(g));
  }
  return out;
}

MockJudge::Scenario MockJudge::load_scenario(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::config_error, "cannot read judge scenario " + path.string(), "config");
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::config_error, "judge scenario: " + std::string(e.what()), "config");
  }
  Scenario s;
  s.mode = j.value("mode", s.mode);
  s.default_response = j.value("default_response", std::string{});
  if (j.contains("responses")) {
    for (const auto& [metric, list] : j.at("responses").items()) {
      s.responses[metric] = list.get<std::vector<std::string>>();
    }
  }
  return s;
}

namespace {

imaging::Histogram coarse_histogram(const imaging::RasterImage& img) {
  const imaging::Rgb bg = img.at(img.width() - 1, img.height() - 1);
  imaging::Histogram h{imaging::HistogramMode::lab3d,
                       std::vector<double>(imaging::kLabBins, 0.0)};
  double total = 0.0;
  for (int y = 0; y < img.height(); y += 4) {
    for (int x = 0; x < img.width(); x += 4) {
      const auto c = img.at(x, y);
      if (c == bg) continue;
      h.bins[static_cast<std::size_t>(
          imaging::bin_index(imaging::rgb_to_lab(c), imaging::HistogramMode::lab3d))] += 1.0;
      total += 1.0;
    }
  }
  if (total == 0.0) return h;
  for (auto& v : h.bins) v /= total;
  return h;
}

} // namespace

std::string MockJudge::evaluate(const JudgeCall& call) {
  if (scenario_.mode == "fail") throw ProviderError("judge", "scripted outage");
  if (scenario_.mode == "malformed") return "I am unable to rate these images.";
  if (const auto it = scenario_.responses.find(call.metric);
      it != scenario_.responses.end() && !it->second.empty()) {
    const auto& list = it->second;
    return list[static_cast<std::size_t>(call.view_indices[0]) % list.size()];
  }
  if (!scenario_.default_response.empty()) return scenario_.default_response;

  const auto ha = coarse_histogram(*call.images[0]);
  const auto hb = coarse_histogram(*call.images[1]);
  double bc = 0.0;
  for (std::size_t i = 0; i < ha.bins.size(); ++i) bc += std::sqrt(ha.bins[i] * hb.bins[i]);
  const std::uint64_t h = hash64(call.metric + call.image_hashes[0] + call.image_hashes[1], seed_);
  const int jitter = static_cast<int>(h % 3) - 1;
  const int score = std::clamp(static_cast<int>(std::lround(2.0 + 8.0 * bc * bc)) + jitter, 1, 10);
  nlohmann::json j{{"score", score},
                   {"rationale", score >= 7 ? "views agree; no visible defects"
                                            : "appearance changes between the two views"}};
  return j.dump();
}

std::vector<std::string> MockLlm::augment(const std::string& prompt, std::size_t n,
                                          std::span<const std::string> modifiers,
                                          std::uint64_t seed) {
  std::vector<std::string> out;
  if (modifiers.empty()) return out;
  for (std::size_t i = 0; i < n; ++i) {
    Rng rng(hash_combine(hash64(prompt, seed), i));
    const std::size_t a = rng.below(modifiers.size());
    std::size_t b = rng.below(modifiers.size());
    if (modifiers.size() > 1 && b == a) b = (a + 1) % modifiers.size();
    out.push_back(prompt + ", " + modifiers[a] + (a == b ? "" : ", " + modifiers[b]));
  }
  return out;
}

imaging::ScalarMap MockAttention::attention(std::string_view keyword, std::string_view,
                                            const imaging::RasterImage& view, int view_index) {
  Rng rng(hash64(keyword, seed_));
  const double w = view.width();
  const double h = view.height();
  const double ox = rng.uniform(-0.25, 0.25);
  const double oy = rng.uniform(-0.2, 0.2);
  const double yaw = view_index * std::numbers::pi / 4.0;
  const double cx = w * (0.5 + ox * std::cos(yaw));
  const double cy = h * (0.5 + oy);
  const double sigma = 0.18 * std::min(w, h);
  imaging::ScalarMap map{view.width(), view.height(), {}};
  map.values.resize(view.pixel_count());
  for (int y = 0; y < view.height(); ++y) {
    for (int x = 0; x < view.width(); ++x) {
      const double d2 = (x + 0.5 - cx) * (x + 0.5 - cx) + (y + 0.5 - cy) * (y + 0.5 - cy);
      map.values[static_cast<std::size_t>(y * view.width() + x)] =
          static_cast<float>(std::exp(-d2 / (2 * sigma * sigma)));
    }
  }
  return map;
}

} // namespace forge3d::providers
