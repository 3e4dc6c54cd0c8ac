#pragma once

#include <functional>
#include <map>
#include <string>

#include "pcs/patentsview_client.hpp"
#include "pcs/snapshot_store.hpp"

namespace pcs {

// Serves recorded responses keyed by exact request body. Any other request
// is a cache miss; nothing ever reaches the network.
class ReplayTransport final : public Transport {
 public:
  explicit ReplayTransport(std::map<std::string, std::string> responses);

  HttpResponse post(const std::string& path, const std::string& body,
                    std::chrono::seconds timeout) override;
  std::string describe() const override { return "replay"; }
  int calls() const noexcept { return calls_; }

 private:
  std::map<std::string, std::string> responses_;
  int calls_ = 0;
};

Snapshot make_snapshot(const Retrieval& retrieval);

// Persists raw pages and the normalized result under the request hash.
// A fresh recording supersedes an older one with the same id.
std::string record_snapshot(const Retrieval& retrieval, SnapshotStore& store);

// Re-runs the client over the recorded pages and checks the outcome
// against the stored normalized result (Error{corruption} on mismatch).
// Error{integrity} when the snapshot was recorded for a different query.
RetrievalResult replay_patents(const Query& query, const Snapshot& snapshot,
                               const FieldCatalog& catalog = default_catalog());

// The snapshot to replay for `query`: `explicit_snapshot` (id or directory)
// when given, otherwise the one stored under the query's request hash, or
// any snapshot whose recorded request is this query at another page size.
Snapshot locate_snapshot(const Query& query, const SnapshotStore& store,
                         const std::string& explicit_snapshot = {},
                         const FieldCatalog& catalog = default_catalog());

// Snapshot id a default-policy fetch of `query` is recorded under.
std::string snapshot_id_for(const Query& query, const FieldCatalog& catalog = default_catalog());

struct SourceSpec {
  bool live = false;
  std::string snapshot;  // replay: id or directory; empty means "by request hash"
};

using TransportFactory = std::function<std::shared_ptr<Transport>()>;

// Live: fetch through `live_transport` and record the snapshot in `store`.
// Replay: locate_snapshot + replay_patents, without touching any transport.
RetrievalResult retrieve(const Query& query, const SourceSpec& source, SnapshotStore& store,
                         const TransportFactory& live_transport, const FetchPolicy& policy,
                         const ProgressFn& progress = {});

}  // namespace pcs
