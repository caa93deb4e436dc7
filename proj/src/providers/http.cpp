#include "forge3d/providers/http.hpp"

#include <cstdlib>
#include <regex>

#include <httplib.h>

#include "forge3d/common/base64.hpp"
#include "forge3d/imaging/codec.hpp"
#include "forge3d/judge/judge.hpp"

namespace forge3d::providers {

using nlohmann::json;

Url parse_url(const std::string& url) {
  static const std::regex re(R"(^(http://[A-Za-z0-9._\-]+(:[0-9]+)?)(/.*)?$)");
  std::smatch m;
  if (!std::regex_match(url, m, re)) {
    throw Error(ErrorCode::config_error, "unsupported endpoint URL '" + url + "'", "config");
  }
  Url u{m[1].str(), m[3].matched ? m[3].str() : std::string{}};
  while (!u.path.empty() && u.path.back() == '/') u.path.pop_back();
  return u;
}

HttpTransport::HttpTransport(std::string name, ProviderConfig config)
    : name_(std::move(name)), config_(std::move(config)), url_(parse_url(config_.endpoint)) {}

namespace {

httplib::Client make_client(const Url& url, const ProviderConfig& c) {
  httplib::Client cli(url.scheme_host_port);
  const auto sec = c.timeout_ms / 1000;
  const auto usec = (c.timeout_ms % 1000) * 1000;
  cli.set_connection_timeout(sec, usec);
  cli.set_read_timeout(sec, usec);
  cli.set_write_timeout(sec, usec);
  if (!c.token_env.empty()) {
    if (const char* token = std::getenv(c.token_env.c_str())) cli.set_bearer_token_auth(token);
  }
  return cli;
}

} // namespace

std::string HttpTransport::post_text(const std::string& suffix, const std::string& body) const {
  auto cli = make_client(url_, config_);
  const auto res = cli.Post(url_.path + suffix, body, "application/json");
  if (!res) throw ProviderError(name_, "request failed: " + httplib::to_string(res.error()));
  if (res->status != 200) throw ProviderError(name_, "HTTP " + std::to_string(res->status));
  return res->body;
}

json HttpTransport::post_json(const std::string& suffix, const json& body) const {
  const auto text = post_text(suffix, body.dump());
  json parsed = json::parse(text, nullptr, false);
  if (parsed.is_discarded()) throw ProviderError(name_, "response is not JSON");
  return parsed;
}

bool HttpTransport::healthy() const {
  auto cli = make_client(url_, config_);
  const auto res = cli.Get(url_.path + "/healthz");
  return res && res->status == 200;
}

std::string encode_image_b64(const imaging::RasterImage& img) {
  return base64_encode(imaging::encode_png(img));
}

imaging::RasterImage decode_image_b64(const std::string& text) {
  return imaging::decode_image(base64_decode(text));
}

namespace {

Embedding to_embedding(const json& j, const std::string& name) {
  if (!j.is_array() || j.empty()) throw ProviderError(name, "embedding must be a non-empty array");
  Embedding e;
  for (const auto& v : j) {
    if (!v.is_number()) throw ProviderError(name, "embedding has non-numeric entries");
    e.push_back(v.get<double>());
  }
  return e;
}

scoring::MultiViewSet views_from(const json& arr, const std::string& id, const std::string& name) {
  if (!arr.is_array()) throw ProviderError(name, "views must be an array");
  scoring::MultiViewSet set;
  set.candidate_id = id;
  for (const auto& v : arr) set.views.push_back(decode_image_b64(v.get<std::string>()));
  try {
    set.validate();
  } catch (const Error& e) {
    throw ProviderError(name, e.what());
  }
  return set;
}

} // namespace

Embedding HttpEmbedding::embed_text(std::string_view text) {
  return to_embedding(t_.post_json("/text", json{{"text", text}}), t_.name());
}

Embedding HttpEmbedding::embed_image(const imaging::RasterImage& img) {
  return to_embedding(t_.post_json("/image", json{{"image", encode_image_b64(img)}}), t_.name());
}

imaging::BinaryMask HttpSegmentation::segment(const imaging::RasterImage& img) {
  const auto res = t_.post_json("", json{{"image", encode_image_b64(img)}});
  const auto mask_img = decode_image_b64(res.at("mask").get<std::string>());
  if (mask_img.width() != img.width() || mask_img.height() != img.height()) {
    throw ProviderError(t_.name(), "mask size differs from image");
  }
  imaging::BinaryMask mask(img.width(), img.height());
  for (int y = 0; y < img.height(); ++y) {
    for (int x = 0; x < img.width(); ++x) mask.set(x, y, mask_img.at(x, y).r > 127);
  }
  return mask;
}

GenerationResult HttpGeneration::generate(const std::string& prompt,
                                          const std::string& candidate_id) {
  const auto res = t_.post_json("", json{{"prompt", prompt}, {"candidate_id", candidate_id}});
  GenerationResult r;
  r.candidate_id = candidate_id;
  r.branch = Branch::generation;
  r.prompt = prompt;
  r.views = views_from(res.at("views"), candidate_id, t_.name());
  if (res.contains("mesh_ref") && res.at("mesh_ref").is_string()) {
    r.mesh_ref = res.at("mesh_ref").get<std::string>();
  }
  return r;
}

std::vector<GenerationResult> HttpRetrieval::retrieve(std::string_view query, std::size_t k) {
  const auto res = t_.post_json("", json{{"query", query}, {"k", k}});
  std::vector<GenerationResult> out;
  for (const auto& item : res.at("results")) {
    GenerationResult r;
    r.candidate_id = item.at("id").get<std::string>();
    r.branch = Branch::retrieval;
    r.prompt = item.at("prompt").get<std::string>();
    r.views = views_from(item.at("views"), r.candidate_id, t_.name());
    out.push_back(std::move(r));
    if (out.size() == k) break;
  }
  return out;
}

std::string HttpJudge::evaluate(const JudgeCall& call) {
  return t_.post_text("", judge::to_wire_json(call));
}

std::vector<std::string> HttpLlm::augment(const std::string& prompt, std::size_t n,
                                          std::span<const std::string> modifiers,
                                          std::uint64_t seed) {
  const auto res = t_.post_json(
      "", json{{"prompt", prompt},
               {"n", n},
               {"modifiers", std::vector<std::string>(modifiers.begin(), modifiers.end())},
               {"seed", seed}});
  return res.at("prompts").get<std::vector<std::string>>();
}

imaging::ScalarMap HttpAttention::attention(std::string_view keyword, std::string_view prompt,
                                            const imaging::RasterImage& view, int view_index) {
  const auto res = t_.post_json("", json{{"keyword", keyword},
                                         {"prompt", prompt},
                                         {"image", encode_image_b64(view)},
                                         {"view_index", view_index}});
  const auto map_img = decode_image_b64(res.at("map").get<std::string>());
  imaging::ScalarMap map{map_img.width(), map_img.height(), {}};
  map.values.reserve(map_img.pixel_count());
  for (int y = 0; y < map_img.height(); ++y) {
    for (int x = 0; x < map_img.width(); ++x) map.values.push_back(map_img.at(x, y).r / 255.0f);
  }
  return map;
}

} // namespace forge3d::providers
