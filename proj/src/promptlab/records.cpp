#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

#include "forge3d/common/error.hpp"
#include "forge3d/common/hash.hpp"
#include "forge3d/common/rng.hpp"
#include "forge3d/common/text.hpp"
#include "forge3d/promptlab/promptlab.hpp"

namespace forge3d::promptlab {

std::string_view source_name(PromptSource s) noexcept {
  switch (s) {
  case PromptSource::user: return "user";
  case PromptSource::augmented: return "augmented";
  case PromptSource::keyword_merge: return "keyword-merge";
  }
  return "user";
}

std::optional<PromptSource> parse_source(std::string_view name) noexcept {
  if (name == "user") return PromptSource::user;
  if (name == "augmented") return PromptSource::augmented;
  if (name == "keyword-merge") return PromptSource::keyword_merge;
  return std::nullopt;
}

PromptRecord PromptRecord::make(std::string id, std::string text, std::optional<std::string> parent,
                                PromptSource source) {
  if (trim(text).empty()) throw Error(ErrorCode::invalid_argument, "prompt text is empty", "promptlab");
  PromptRecord r;
  r.id = std::move(id);
  r.tokens = tokenize(text);
  r.text = std::move(text);
  r.parent = std::move(parent);
  r.source = source;
  return r;
}

TextAsset load_text_asset(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::io_error, "cannot read asset " + path.string(), "promptlab");
  std::stringstream buffer;
  buffer << in.rdbuf();
  const std::string raw = buffer.str();
  TextAsset asset;
  asset.hash = sha256_hex(std::string_view(raw));
  std::istringstream lines(raw);
  for (std::string line; std::getline(lines, line);) {
    auto entry = trim(line);
    if (entry.empty() || entry.front() == '#') continue;
    asset.entries.push_back(std::move(entry));
  }
  return asset;
}

Assets load_assets(const std::filesystem::path& dir) {
  return {load_text_asset(dir / "corpus_3d_modifiers.txt"), load_text_asset(dir / "stopwords.txt")};
}

std::vector<std::string> corpus_templates(const std::string& t0, std::size_t n,
                                          std::span<const std::string> corpus, std::uint64_t seed) {
  std::vector<std::string> out;
  if (corpus.empty()) return out;
  std::vector<std::size_t> order(corpus.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  Rng rng(hash64(t0, seed));
  for (std::size_t i = order.size(); i > 1; --i) std::swap(order[i - 1], order[rng.below(i)]);
  // Single modifiers first, then ordered pairs.
  for (std::size_t i = 0; i < order.size() && out.size() < n; ++i) {
    out.push_back(t0 + ", " + corpus[order[i]]);
  }
  for (std::size_t i = 0; i < order.size() && out.size() < n; ++i) {
    for (std::size_t j = 0; j < order.size() && out.size() < n; ++j) {
      if (i != j) out.push_back(t0 + ", " + corpus[order[i]] + ", " + corpus[order[j]]);
    }
  }
  return out;
}

namespace {

std::vector<std::string> anchor_tokens(const PromptRecord& t0) {
  std::vector<std::string> anchors;
  for (const auto& t : t0.tokens) {
    if (t.size() >= 3) anchors.push_back(t);
  }
  return anchors.empty() ? t0.tokens : anchors;
}

std::string pad2(std::size_t k) {
  return (k < 10 ? "0" : "") + std::to_string(k);
}

} // namespace

AugmentResult augment(const PromptRecord& t0, providers::LlmProvider& llm,
                      std::span<const std::string> corpus, const AugmentOptions& options) {
  if (options.n < 4 || options.n > 64) {
    throw Error(ErrorCode::invalid_argument, "augment n must lie in [4, 64]", "promptlab");
  }
  AugmentResult result;
  std::set<std::string> seen;
  std::vector<std::string> accepted;
  const auto accept = [&](const std::vector<std::string>& texts) {
    for (const auto& text : texts) {
      if (accepted.size() >= options.n) break;
      auto key = to_lower(trim(text));
      if (key.empty() || !seen.insert(key).second) continue;
      accepted.push_back(trim(text));
    }
  };

  try {
    accept(llm.augment(t0.text, options.n, corpus, options.seed));
    for (int attempt = 1; attempt <= options.refill_attempts && accepted.size() < options.n;
         ++attempt) {
      accept(llm.augment(t0.text, options.n - accepted.size(), corpus,
                         hash_combine(options.seed, static_cast<std::uint64_t>(attempt))));
    }
  } catch (const Error& e) {
    if (e.code() != ErrorCode::provider_error) throw;
    result.fallback = true;
    result.warnings.push_back(std::string("llm unavailable, corpus templates used: ") + e.what());
    accepted.clear();
    seen.clear();
    accept(corpus_templates(t0.text, options.n, corpus, options.seed));
  }
  if (accepted.size() < options.n) {
    result.warnings.push_back("only " + std::to_string(accepted.size()) + " distinct prompts of " +
                              std::to_string(options.n) + " requested");
  }

  const auto anchors = anchor_tokens(t0);
  for (std::size_t k = 0; k < accepted.size(); ++k) {
    auto record = PromptRecord::make(t0.id + "-a" + pad2(k), accepted[k], t0.id, PromptSource::augmented);
    record.drift = std::none_of(anchors.begin(), anchors.end(), [&](const std::string& a) {
      return contains_token(record.tokens, a);
    });
    result.prompts.push_back(std::move(record));
  }
  return result;
}

} // namespace forge3d::promptlab
