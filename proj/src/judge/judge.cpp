#include "forge3d/judge/judge.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "forge3d/common/base64.hpp"
#include "forge3d/common/hash.hpp"
#include "forge3d/common/parallel.hpp"
#include "forge3d/imaging/codec.hpp"

namespace forge3d::judge {

using nlohmann::json;

std::string_view metric_name(Metric m) noexcept {
  return scoring::dimension_name(to_dimension(m));
}

Metric parse_metric(std::string_view name) {
  for (const Metric m : kAllMetrics) {
    if (metric_name(m) == name) return m;
  }
  throw Error(ErrorCode::unknown_metric, "unknown judge metric '" + std::string(name) + "'", "judge");
}

scoring::Dimension to_dimension(Metric m) noexcept {
  switch (m) {
  case Metric::text_image_alignment: return scoring::Dimension::text_image_alignment;
  case Metric::plausibility_3d: return scoring::Dimension::plausibility_3d;
  case Metric::texture_geometry: return scoring::Dimension::texture_geometry;
  case Metric::low_level_texture: return scoring::Dimension::low_level_texture;
  }
  return scoring::Dimension::plausibility_3d;
}

// ---------------------------------------------------------------------------
// Template

std::string JudgeTemplate::version() const {
  std::ostringstream all;
  all << task_definition << '\x1f' << output_format;
  for (const auto& [k, v] : criteria) all << '\x1f' << k << '=' << v;
  for (const auto& [k, ex] : calibration) all << '\x1f' << k << '+' << ex.high << '-' << ex.low;
  for (const auto& s : rubric_steps) all << '\x1f' << s;
  return "tmpl-" + sha256_hex(all.str()).substr(0, 16);
}

std::string JudgeTemplate::render(Metric metric, std::string_view prompt_text) const {
  const std::string name(metric_name(metric));
  std::ostringstream out;
  out << "# Task\n" << task_definition << "\n\n";
  out << "# Criterion: " << name << "\n";
  if (const auto it = criteria.find(name); it != criteria.end()) out << it->second << "\n";
  out << "\n# Prompt used to create the model\n" << prompt_text << "\n\n";
  if (const auto it = calibration.find(name); it != calibration.end()) {
    out << "# Calibration\n"
        << "A pair that deserves a high score (9-10): " << it->second.high << "\n"
        << "A pair that deserves a low score (1-3): " << it->second.low << "\n\n";
  }
  out << "# Steps\n";
  for (std::size_t i = 0; i < rubric_steps.size(); ++i) out << i + 1 << ". " << rubric_steps[i] << "\n";
  out << "\n# Output\n" << output_format << "\n";
  return out.str();
}

const JudgeTemplate& default_template() {
  static const JudgeTemplate tmpl = [] {
    JudgeTemplate t;
    t.task_definition =
        "You are reviewing two renders of the same 3D model taken from neighbouring viewpoints "
        "(45 degrees apart). Score the model on a single criterion using an integer from 1 "
        "(unusable) to 10 (flawless). Judge the model, not the rendering background.";
    t.criteria = {
        {"text_image_alignment",
         "Does the model depict what the prompt asks for (subject, attributes, style) in both "
         "views, beyond surface-level keyword overlap?"},
        {"plausibility_3d",
         "Is the object spatially coherent across the two viewpoints: consistent silhouette, "
         "no missing or duplicated parts, physically possible structure?"},
        {"texture_geometry",
         "Do surface details follow the object's contours and shape, with texture seams and "
         "patterns aligned to geometry in both views?"},
        {"low_level_texture",
         "Are fine details preserved: sharp edges, readable patterns, smooth color transitions, "
         "no blur, noise or banding?"},
    };
    t.calibration = {
        {"text_image_alignment",
         {"a prompt for a red ceramic teapot; both views show a glossy red teapot with spout and "
          "handle",
          "a prompt for a red ceramic teapot; the views show a grey mug without a spout"}},
        {"plausibility_3d",
         {"a chair whose four legs and backrest line up between the two views",
          "a chair that has four legs in one view and two legs floating in the other"}},
        {"texture_geometry",
         {"wood grain that wraps around the curved armrest in both views",
          "a face texture painted across the back of the head in the second view"}},
        {"low_level_texture",
         {"crisp stitching on a leather shoe, visible in both views",
          "a smeared, blurry surface where the pattern dissolves into noise"}},
    };
    t.rubric_steps = {
        "Describe what is visible in the first view.",
        "Describe what is visible in the second view.",
        "List differences that cannot be explained by the 45 degree rotation.",
        "Assess the criterion above against the calibration examples.",
        "Pick one integer score from 1 to 10.",
    };
    t.output_format =
        "Reply with strict JSON only: {\"score\": <integer 1-10>, \"rationale\": <string>, "
        "\"regions\": [{\"x\": <0-1>, \"y\": <0-1>, \"w\": <0-1>, \"h\": <0-1>}]}. "
        "\"regions\" is optional and marks defect areas in the second image.";
    return t;
  }();
  return tmpl;
}

std::vector<std::array<int, 2>> view_pairs() {
  std::vector<std::array<int, 2>> pairs;
  for (int i = 0; i + 1 < scoring::kViewCount; ++i) pairs.push_back({i, i + 1});
  return pairs;
}

JudgeRequest build_request(Metric metric, std::array<int, 2> pair, const scoring::MultiViewSet& set,
                           std::span<const std::string> hashes, std::string_view prompt_text,
                           const JudgeTemplate& tmpl) {
  for (const int v : pair) {
    if (v < 0 || static_cast<std::size_t>(v) >= set.views.size() ||
        static_cast<std::size_t>(v) >= hashes.size()) {
      throw Error(ErrorCode::invalid_argument, "view index out of range", "judge");
    }
  }
  JudgeRequest req;
  auto& call = req.call;
  call.metric = std::string(metric_name(metric));
  call.template_version = tmpl.version();
  call.template_text = tmpl.render(metric, prompt_text);
  call.prompt_text = std::string(prompt_text);
  for (std::size_t k = 0; k < 2; ++k) {
    call.images[k] = &set.views[static_cast<std::size_t>(pair[k])];
    call.image_hashes[k] = hashes[static_cast<std::size_t>(pair[k])];
    call.view_indices[k] = pair[k];
  }
  req.cache_key =
      call.template_version + "/" + call.metric + "/" + call.image_hashes[0] + "_" + call.image_hashes[1];
  return req;
}

std::string to_wire_json(const providers::JudgeCall& call) {
  json images = json::array();
  for (const auto* img : call.images) {
    if (img == nullptr) throw Error(ErrorCode::invalid_argument, "judge call without image", "judge");
    images.push_back(base64_encode(imaging::encode_png(*img)));
  }
  return json{{"template_text", call.template_text}, {"images", images}, {"metric", call.metric}}
      .dump();
}

// ---------------------------------------------------------------------------
// Parsing

namespace {

std::string trim_view(std::string_view s) {
  const auto is_space = [](unsigned char c) { return std::isspace(c) != 0; };
  std::size_t b = 0;
  std::size_t e = s.size();
  while (b < e && is_space(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && is_space(static_cast<unsigned char>(s[e - 1]))) --e;
  return std::string(s.substr(b, e - b));
}

[[noreturn]] void malformed(const std::string& why) {
  throw Error(ErrorCode::malformed, "judge response: " + why, "judge", true);
}

JudgeVerdict from_object(const json& obj, Metric metric) {
  const auto& score = obj.at("score");
  if (!score.is_number()) malformed("score is not a number");
  const double s = score.get<double>();
  if (s != std::floor(s) || s < 1 || s > 10) malformed("score outside 1-10");
  JudgeVerdict v;
  v.metric = metric;
  v.raw = static_cast<int>(s);
  v.normalized = v.raw / 10.0;
  if (const auto it = obj.find("rationale"); it != obj.end() && it->is_string()) {
    v.rationale = it->get<std::string>();
  }
  if (const auto it = obj.find("regions"); it != obj.end() && it->is_array()) {
    for (const auto& r : *it) {
      scoring::RegionRect rect{r.value("x", 0.0), r.value("y", 0.0), r.value("w", 0.0),
                               r.value("h", 0.0)};
      if (rect.w > 0 && rect.h > 0) v.regions.push_back(rect);
    }
  }
  return v;
}

} // namespace

JudgeVerdict parse_verdict(std::string_view response, Metric metric) {
  const auto open = response.find('{');
  const auto close = response.rfind('}');
  if (open != std::string_view::npos && close != std::string_view::npos && close > open) {
    const json obj = json::parse(response.substr(open, close - open + 1), nullptr, false);
    if (!obj.is_discarded() && obj.is_object() && obj.contains("score")) {
      return from_object(obj, metric);
    }
  }

  // Lenient fallback: first integer in 1..10, remaining text as rationale.
  std::size_t i = 0;
  while (i < response.size() && !std::isdigit(static_cast<unsigned char>(response[i]))) ++i;
  if (i == response.size()) malformed("no score found");
  std::size_t j = i;
  while (j < response.size() && std::isdigit(static_cast<unsigned char>(response[j]))) ++j;
  if (j - i > 2) malformed("score outside 1-10");
  const int raw = std::stoi(std::string(response.substr(i, j - i)));
  if (raw < 1 || raw > 10) malformed("score outside 1-10");
  std::string_view rest = response.substr(j);
  if (rest.starts_with("/10")) rest.remove_prefix(3);
  while (!rest.empty() && (std::ispunct(static_cast<unsigned char>(rest.front())) ||
                           std::isspace(static_cast<unsigned char>(rest.front())))) {
    rest.remove_prefix(1);
  }
  JudgeVerdict v;
  v.metric = metric;
  v.raw = raw;
  v.normalized = raw / 10.0;
  v.rationale = trim_view(rest);
  v.fallback_parse = true;
  return v;
}

std::string verdict_to_json(const JudgeVerdict& v) {
  json regions = json::array();
  for (const auto& r : v.regions) regions.push_back({{"x", r.x}, {"y", r.y}, {"w", r.w}, {"h", r.h}});
  return json{{"metric", metric_name(v.metric)},
              {"score", v.raw},
              {"rationale", v.rationale},
              {"regions", regions},
              {"fallback_parse", v.fallback_parse}}
      .dump();
}

JudgeVerdict verdict_from_json(std::string_view text) {
  const json obj = json::parse(text);
  JudgeVerdict v = from_object(obj, parse_metric(obj.at("metric").get<std::string>()));
  v.fallback_parse = obj.value("fallback_parse", false);
  return v;
}

// ---------------------------------------------------------------------------
// Cache

std::optional<std::string> VerdictCache::get(const std::string& key) {
  std::lock_guard lock(mutex_);
  if (const auto it = memory_.find(key); it != memory_.end()) {
    ++hits_;
    return it->second;
  }
  if (root_) {
    std::ifstream in(*root_ / (key + ".json"), std::ios::binary);
    if (in) {
      std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
      memory_[key] = text;
      ++hits_;
      return text;
    }
  }
  return std::nullopt;
}

void VerdictCache::put(const std::string& key, const std::string& verdict_json) {
  std::lock_guard lock(mutex_);
  memory_[key] = verdict_json;
  if (root_) {
    const auto path = *root_ / (key + ".json");
    std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    out << verdict_json;
  }
}

std::size_t VerdictCache::hits() const {
  std::lock_guard lock(mutex_);
  return hits_;
}

// ---------------------------------------------------------------------------
// Candidate evaluation

std::optional<double> JudgeOutcome::score(Metric m) const noexcept {
  switch (m) {
  case Metric::text_image_alignment: return scores.text_image_alignment;
  case Metric::plausibility_3d: return scores.plausibility_3d;
  case Metric::texture_geometry: return scores.texture_geometry;
  case Metric::low_level_texture: return scores.low_level_texture;
  }
  return std::nullopt;
}

std::optional<double> JudgeOutcome::per_view(Metric m, int view) const {
  double sum = 0.0;
  int n = 0;
  for (const auto& p : pairs) {
    if (p.metric != m || !p.verdict) continue;
    if (p.views[0] != view && p.views[1] != view) continue;
    sum += p.verdict->normalized;
    ++n;
  }
  if (n == 0) return std::nullopt;
  return sum / n;
}

std::vector<std::vector<scoring::RegionRect>> JudgeOutcome::regions_per_view() const {
  std::vector<std::vector<scoring::RegionRect>> out(static_cast<std::size_t>(scoring::kViewCount));
  for (const auto& p : pairs) {
    if (!p.verdict) continue;
    auto& dst = out[static_cast<std::size_t>(p.views[1])];
    dst.insert(dst.end(), p.verdict->regions.begin(), p.verdict->regions.end());
  }
  return out;
}

namespace {

std::optional<double> aggregate(std::vector<double> values, Aggregation how) {
  if (values.empty()) return std::nullopt;
  if (how == Aggregation::median) {
    std::sort(values.begin(), values.end());
    const std::size_t mid = values.size() / 2;
    return values.size() % 2 ? values[mid] : (values[mid - 1] + values[mid]) / 2.0;
  }
  double sum = 0.0;
  for (const double v : values) sum += v;
  return sum / static_cast<double>(values.size());
}

} // namespace

JudgeOutcome judge_candidate(const scoring::MultiViewSet& set, std::span<const std::string> hashes,
                             std::string_view prompt_text, providers::JudgeProvider& provider,
                             const JudgeTemplate& tmpl, VerdictCache* cache,
                             const JudgeOptions& options) {
  set.validate();
  const auto pairs = view_pairs();
  std::vector<JudgeRequest> requests;
  JudgeOutcome outcome;
  for (const Metric m : kAllMetrics) {
    for (std::size_t p = 0; p < pairs.size(); ++p) {
      requests.push_back(build_request(m, pairs[p], set, hashes, prompt_text, tmpl));
      PairOutcome po;
      po.metric = m;
      po.pair_index = static_cast<int>(p);
      po.views = pairs[p];
      outcome.pairs.push_back(po);
    }
  }

  parallel_for(requests.size(), options.in_flight, [&](std::size_t i) {
    auto& po = outcome.pairs[i];
    const auto& req = requests[i];
    if (cache != nullptr) {
      if (const auto hit = cache->get(req.cache_key)) {
        po.verdict = verdict_from_json(*hit);
        po.verdict->pair_index = po.pair_index;
        po.cached = true;
        return;
      }
    }
    for (int attempt = 0; attempt <= options.max_retries; ++attempt) {
      ++po.attempts;
      std::string response;
      try {
        response = provider.evaluate(req.call);
      } catch (const providers::ProviderError& e) {
        po.error = e.what();
        return;
      }
      try {
        po.verdict = parse_verdict(response, po.metric);
        po.verdict->pair_index = po.pair_index;
        po.error.clear();
        break;
      } catch (const Error& e) {
        if (e.code() != ErrorCode::malformed) throw;
        po.error = e.what();
      }
    }
    if (po.verdict && cache != nullptr) cache->put(req.cache_key, verdict_to_json(*po.verdict));
  });

  for (const Metric m : kAllMetrics) {
    std::vector<double> values;
    for (const auto& po : outcome.pairs) {
      if (po.metric == m && po.verdict) values.push_back(po.verdict->normalized);
    }
    const auto agg = aggregate(std::move(values), options.aggregation);
    switch (m) {
    case Metric::text_image_alignment: outcome.scores.text_image_alignment = agg; break;
    case Metric::plausibility_3d: outcome.scores.plausibility_3d = agg; break;
    case Metric::texture_geometry: outcome.scores.texture_geometry = agg; break;
    case Metric::low_level_texture: outcome.scores.low_level_texture = agg; break;
    }
  }
  return outcome;
}

} // namespace forge3d::judge
