#include "pcs/snapshot_store.hpp"

#include <openssl/evp.h>
#include <unistd.h>

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "pcs/errors.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace pcs {

std::string sha256_hex(std::string_view bytes) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int length = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), digest, &length, EVP_sha256(), nullptr) != 1)
    throw Error(ErrorCode::internal, "sha256 failed");
  static constexpr char kHex[] = "0123456789abcdef";
  std::string out;
  out.reserve(length * 2);
  for (unsigned int i = 0; i < length; ++i) {
    out.push_back(kHex[digest[i] >> 4]);
    out.push_back(kHex[digest[i] & 0x0f]);
  }
  return out;
}

namespace {

bool is_snapshot_id(std::string_view id) {
  return id.size() == 64 &&
         std::all_of(id.begin(), id.end(), [](char c) { return (c >= '0' && c <= '9') || (c >= 'a' && c <= 'f'); });
}

void write_file(const fs::path& path, std::string_view bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  out.flush();
  if (!out) throw Error(ErrorCode::persistence, "cannot write " + path.string(), {{"path", path.string()}});
}

std::optional<std::string> read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return std::nullopt;
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

fs::path page_path(const fs::path& dir, std::size_t n) {
  return dir / "pages" / (std::to_string(n) + ".json");
}

json read_meta(const fs::path& dir) {
  const auto text = read_file(dir / "meta.json");
  if (!text) throw Error(ErrorCode::corruption, "snapshot " + dir.filename().string() + ": meta.json is missing",
                         {{"file", "meta.json"}});
  try {
    return json::parse(*text);
  } catch (const json::exception&) {
    throw Error(ErrorCode::corruption, "snapshot " + dir.filename().string() + ": meta.json is unreadable",
                {{"file", "meta.json"}});
  }
}

std::string unique_suffix() {
  static std::atomic<unsigned> counter{0};
  return std::to_string(::getpid()) + "-" + std::to_string(counter++);
}

}  // namespace

SnapshotStore::SnapshotStore(fs::path root) : root_(std::move(root)) {}

fs::path SnapshotStore::resolve_root(const std::string& flag) {
  if (!flag.empty()) return flag;
  if (const char* env = std::getenv(kStoreEnv); env && *env) return env;
  return "pcs-store";
}

std::string SnapshotStore::put(const Snapshot& snapshot, bool replace) {
  if (!is_snapshot_id(snapshot.id) || sha256_hex(snapshot.query_text) != snapshot.id)
    throw Error(ErrorCode::integrity,
                "snapshot id '" + snapshot.id + "' is not the hash of its request body",
                {{"id", snapshot.id}, {"expected", sha256_hex(snapshot.query_text)}});
  if (snapshot.format_version != kSnapshotFormatVersion)
    throw Error(ErrorCode::integrity,
                "snapshot format version " + std::to_string(snapshot.format_version) + " is not writable");

  const fs::path target = root_ / snapshot.id;
  if (!replace && fs::exists(target)) {
    if (get(snapshot.id) == snapshot) return snapshot.id;
    throw Error(ErrorCode::integrity,
                "a different snapshot " + snapshot.id + " is already stored; replace it explicitly",
                {{"id", snapshot.id}});
  }

  const fs::path staging = root_ / (".tmp-" + snapshot.id + "-" + unique_suffix());
  try {
    fs::create_directories(staging / "pages");
    json page_hashes = json::array();
    for (std::size_t i = 0; i < snapshot.pages.size(); ++i) {
      write_file(page_path(staging, i + 1), snapshot.pages[i]);
      page_hashes.push_back(sha256_hex(snapshot.pages[i]));
    }
    write_file(staging / "normalized.json", snapshot.normalized);
    const json meta{{"id", snapshot.id},
                    {"created_at", snapshot.created_at},
                    {"query_text", snapshot.query_text},
                    {"format_version", snapshot.format_version},
                    {"page_count", snapshot.pages.size()},
                    {"page_sha256", std::move(page_hashes)},
                    {"normalized_sha256", sha256_hex(snapshot.normalized)}};
    write_file(staging / "meta.json", meta.dump(2) + "\n");

    if (fs::exists(target)) {
      const fs::path retired = root_ / (".old-" + snapshot.id + "-" + unique_suffix());
      fs::rename(target, retired);
      fs::rename(staging, target);
      fs::remove_all(retired);
    } else {
      fs::rename(staging, target);
    }
  } catch (const fs::filesystem_error& e) {
    std::error_code ignored;
    fs::remove_all(staging, ignored);
    throw Error(ErrorCode::persistence, std::string("snapshot store write failed: ") + e.what(),
                {{"path", root_.string()}});
  } catch (const Error&) {
    std::error_code ignored;
    fs::remove_all(staging, ignored);
    throw;
  }
  write_index();
  return snapshot.id;
}

bool SnapshotStore::contains(std::string_view id) const {
  return is_snapshot_id(id) && fs::is_directory(root_ / std::string(id));
}

Snapshot SnapshotStore::get(std::string_view id_view) const {
  const std::string id(id_view);
  if (!contains(id)) throw Error(ErrorCode::cache_miss, "no snapshot " + id + " in " + root_.string(), {{"id", id}});
  const fs::path dir = root_ / id;
  const json meta = read_meta(dir);

  auto corrupt = [&](const std::string& file, const std::string& why) {
    return Error(ErrorCode::corruption, "snapshot " + id + ": " + file + " " + why, {{"id", id}, {"file", file}});
  };

  Snapshot snapshot;
  std::vector<std::string> page_hashes;
  std::string normalized_hash;
  std::size_t page_count = 0;
  try {
    snapshot.format_version = meta.at("format_version").get<int>();
    if (snapshot.format_version != kSnapshotFormatVersion)
      throw corrupt("meta.json", "has unsupported format version " + std::to_string(snapshot.format_version));
    snapshot.id = meta.at("id").get<std::string>();
    snapshot.created_at = meta.at("created_at").get<std::string>();
    snapshot.query_text = meta.at("query_text").get<std::string>();
    page_count = meta.at("page_count").get<std::size_t>();
    page_hashes = meta.at("page_sha256").get<std::vector<std::string>>();
    normalized_hash = meta.at("normalized_sha256").get<std::string>();
  } catch (const json::exception&) {
    throw corrupt("meta.json", "is missing required fields");
  }
  if (snapshot.id != id || sha256_hex(snapshot.query_text) != id)
    throw corrupt("meta.json", "does not hash to the snapshot id");
  if (page_hashes.size() != page_count) throw corrupt("meta.json", "lists inconsistent page hashes");

  for (std::size_t n = 1; n <= page_count; ++n) {
    const std::string name = "pages/" + std::to_string(n) + ".json";
    auto blob = read_file(page_path(dir, n));
    if (!blob) throw corrupt(name, "(page " + std::to_string(n) + ") is missing");
    if (sha256_hex(*blob) != page_hashes[n - 1])
      throw corrupt(name, "(page " + std::to_string(n) + ") fails its hash check");
    snapshot.pages.push_back(std::move(*blob));
  }
  auto normalized = read_file(dir / "normalized.json");
  if (!normalized) throw corrupt("normalized.json", "is missing");
  if (sha256_hex(*normalized) != normalized_hash) throw corrupt("normalized.json", "fails its hash check");
  snapshot.normalized = std::move(*normalized);
  return snapshot;
}

std::vector<SnapshotSummary> SnapshotStore::list() const {
  std::vector<SnapshotSummary> out;
  std::error_code ec;
  if (!fs::is_directory(root_, ec)) return out;
  for (const auto& entry : fs::directory_iterator(root_, ec)) {
    const auto name = entry.path().filename().string();
    if (!entry.is_directory() || !is_snapshot_id(name)) continue;
    try {
      const auto meta = read_meta(entry.path());
      out.push_back({name, meta.at("created_at").get<std::string>(), meta.at("page_count").get<std::size_t>(),
                     meta.at("query_text").get<std::string>()});
    } catch (const std::exception&) {
      continue;  // unreadable entries surface through get()
    }
  }
  std::sort(out.begin(), out.end(), [](const SnapshotSummary& a, const SnapshotSummary& b) {
    return a.created_at != b.created_at ? a.created_at > b.created_at : a.id < b.id;
  });
  return out;
}

void SnapshotStore::write_index() const {
  json index = json::array();
  for (const auto& s : list())
    index.push_back(json{{"id", s.id}, {"created_at", s.created_at}, {"page_count", s.page_count},
                         {"query_text", s.query_text}});
  const fs::path staging = root_ / (".index-" + unique_suffix());
  write_file(staging, index.dump(2) + "\n");
  std::error_code ec;
  fs::rename(staging, root_ / "index.json", ec);
  if (ec) throw Error(ErrorCode::persistence, "cannot update " + (root_ / "index.json").string());
}

Snapshot open_snapshot(const SnapshotStore& store, const std::string& id_or_path) {
  if (store.contains(id_or_path)) return store.get(id_or_path);
  const fs::path path(id_or_path);
  std::error_code ec;
  if (fs::is_directory(path, ec) && fs::exists(path / "meta.json", ec)) {
    const auto canonical = fs::weakly_canonical(path);
    return SnapshotStore(canonical.parent_path()).get(canonical.filename().string());
  }
  throw Error(ErrorCode::cache_miss,
              "no snapshot '" + id_or_path + "' in " + store.root().string() + " or on disk",
              {{"id", id_or_path}});
}

}  // namespace pcs
