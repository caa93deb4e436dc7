#include <fstream>
#include <sstream>
#include <thread>

#include "forge3d/common/error.hpp"
#include "forge3d/common/hash.hpp"
#include "forge3d/imaging/codec.hpp"
#include "forge3d/orchestrator/engine.hpp"

namespace forge3d::orchestrator {
namespace fs = std::filesystem;

namespace {

void write_atomic(const fs::path& path, std::span<const std::uint8_t> bytes) {
  fs::create_directories(path.parent_path());
  auto tmp = path;
  tmp += ".tmp" + std::to_string(std::hash<std::thread::id>{}(std::this_thread::get_id()));
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorCode::io_error, "cannot write " + tmp.string(), "store");
    out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw Error(ErrorCode::io_error, "short write to " + tmp.string(), "store");
  }
  fs::rename(tmp, path);
}

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::io_error, "cannot read " + path.string(), "store");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

bool valid_id(const std::string& id) {
  if (id.empty() || id.size() > 64) return false;
  return std::all_of(id.begin(), id.end(), [](char c) { return std::isalnum(static_cast<unsigned char>(c)); });
}

} // namespace

Store::Store(fs::path root) : root_(std::move(root)) {
  fs::create_directories(root_ / "sessions");
  fs::create_directories(root_ / "blobs");
}

std::string Store::put_blob(const imaging::RasterImage& img) {
  const auto png = imaging::encode_png(img);
  const auto sha = sha256_hex(std::span<const std::uint8_t>(png));
  const auto path = root_ / "blobs" / (sha + ".png");
  if (!fs::exists(path)) write_atomic(path, png);
  return sha;
}

imaging::RasterImage Store::get_blob(const std::string& sha) const {
  const auto path = root_ / "blobs" / (sha + ".png");
  if (!fs::exists(path)) throw Error(ErrorCode::corrupt_file, "missing blob " + sha, "store");
  const auto bytes = read_file(path);
  return imaging::decode_image(
      std::span<const std::uint8_t>(reinterpret_cast<const std::uint8_t*>(bytes.data()), bytes.size()));
}

void Store::save(const Session& s) {
  const auto text = to_json(s).dump(1) + "\n";
  write_atomic(root_ / "sessions" / (s.id + ".json"),
               std::span<const std::uint8_t>(reinterpret_cast<const std::uint8_t*>(text.data()), text.size()));
}

bool Store::exists(const std::string& id) const {
  return valid_id(id) && fs::exists(root_ / "sessions" / (id + ".json"));
}

Session Store::load(const std::string& id) const {
  if (!exists(id)) throw Error(ErrorCode::session_not_found, "no session " + id, "store");
  const auto path = root_ / "sessions" / (id + ".json");
  const auto text = read_file(path);
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw Error(ErrorCode::corrupt_file,
                path.string() + " at byte " + std::to_string(e.byte) + ": " + e.what(), "store");
  }
  try {
    return session_from_json(j);
  } catch (const Error& e) {
    if (e.code() == ErrorCode::corrupt_file) {
      throw Error(ErrorCode::corrupt_file, path.string() + ": " + e.what(), "store");
    }
    throw;
  }
}

std::vector<std::string> Store::list() const {
  std::vector<std::string> ids;
  for (const auto& entry : fs::directory_iterator(root_ / "sessions")) {
    if (entry.path().extension() == ".json") ids.push_back(entry.path().stem().string());
  }
  std::sort(ids.begin(), ids.end());
  return ids;
}

} // namespace forge3d::orchestrator
