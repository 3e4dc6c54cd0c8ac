#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace pcs {

std::string sha256_hex(std::string_view bytes);

inline constexpr int kSnapshotFormatVersion = 1;
inline constexpr const char* kStoreEnv = "PCS_STORE";

// A frozen retrieval: the canonical page-1 request body, every raw provider
// response, and the normalized RetrievalResult JSON.
struct Snapshot {
  std::string id;          // sha256_hex(query_text)
  std::string created_at;  // ISO-8601 UTC
  std::string query_text;
  std::vector<std::string> pages;
  std::string normalized;
  int format_version = kSnapshotFormatVersion;

  friend bool operator==(const Snapshot&, const Snapshot&) = default;
};

struct SnapshotSummary {
  std::string id;
  std::string created_at;
  std::size_t page_count = 0;
  std::string query_text;

  friend bool operator==(const SnapshotSummary&, const SnapshotSummary&) = default;
};

// Directory-of-files store:
//   <root>/<id>/meta.json, <root>/<id>/pages/<n>.json, <root>/<id>/normalized.json
// plus <root>/index.json summarizing the snapshots. Writes go to a hidden
// temporary directory that is renamed into place.
class SnapshotStore {
 public:
  explicit SnapshotStore(std::filesystem::path root);

  // Throws Error{integrity} when snapshot.id is not the hash of its
  // query_text, Error{persistence} when the store cannot be written. An
  // existing snapshot with the same id is kept unless `replace` is set.
  std::string put(const Snapshot& snapshot, bool replace = false);

  // Verifies every stored hash. Error{cache_miss} for unknown ids,
  // Error{corruption} naming the damaged file otherwise.
  Snapshot get(std::string_view id) const;
  bool contains(std::string_view id) const;

  // Newest first.
  std::vector<SnapshotSummary> list() const;

  const std::filesystem::path& root() const noexcept { return root_; }

  // Store root from an explicit flag, else $PCS_STORE, else ./pcs-store.
  static std::filesystem::path resolve_root(const std::string& flag);

 private:
  void write_index() const;

  std::filesystem::path root_;
};

// Opens a snapshot named either by id within `store` or by a path to its
// directory.
Snapshot open_snapshot(const SnapshotStore& store, const std::string& id_or_path);

}  // namespace pcs
