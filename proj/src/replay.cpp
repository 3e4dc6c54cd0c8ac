#include "pcs/replay.hpp"

#include "pcs/errors.hpp"

namespace pcs {

using nlohmann::json;

ReplayTransport::ReplayTransport(std::map<std::string, std::string> responses)
    : responses_(std::move(responses)) {}

HttpResponse ReplayTransport::post(const std::string&, const std::string& body, std::chrono::seconds) {
  ++calls_;
  auto it = responses_.find(body);
  if (it == responses_.end())
    throw Error(ErrorCode::cache_miss, "the snapshot holds no response for request " + body);
  return {200, it->second, {}};
}

Snapshot make_snapshot(const Retrieval& retrieval) {
  Snapshot snapshot;
  snapshot.id = sha256_hex(retrieval.request_body);
  snapshot.created_at = retrieval.result.provenance.timestamp;
  snapshot.query_text = retrieval.request_body;
  snapshot.pages = retrieval.pages;
  snapshot.normalized = to_json(retrieval.result).dump(1) + "\n";
  return snapshot;
}

std::string record_snapshot(const Retrieval& retrieval, SnapshotStore& store) {
  return store.put(make_snapshot(retrieval), /*replace=*/true);
}

namespace {

int recorded_per_page(const Snapshot& snapshot) {
  try {
    return json::parse(snapshot.query_text).at("o").at("per_page").get<int>();
  } catch (const json::exception&) {
    throw Error(ErrorCode::corruption, "snapshot " + snapshot.id + ": request body lacks per_page");
  }
}

}  // namespace

RetrievalResult replay_patents(const Query& query, const Snapshot& snapshot, const FieldCatalog& catalog) {
  const int per_page = recorded_per_page(snapshot);
  if (to_request(query, 1, per_page, catalog) != snapshot.query_text)
    throw Error(ErrorCode::integrity, "snapshot " + snapshot.id + " was recorded for a different query",
                {{"id", snapshot.id}, {"recorded_request", snapshot.query_text}});

  std::map<std::string, std::string> responses;
  for (std::size_t i = 0; i < snapshot.pages.size(); ++i)
    responses.emplace(to_request(query, static_cast<int>(i + 1), per_page, catalog), snapshot.pages[i]);

  FetchPolicy policy;
  policy.per_page = per_page;
  policy.max_pages = static_cast<int>(snapshot.pages.size());
  policy.max_concurrent_requests = 1;
  policy.rate_limit = 1e9;
  policy.max_attempts = 1;
  PatentsViewClient client(std::make_shared<ReplayTransport>(std::move(responses)), policy,
                           std::make_shared<SystemClock>(), catalog);
  auto result = client.fetch(query).result;

  const auto stored = retrieval_from_json(json::parse(snapshot.normalized));
  result.provenance.timestamp = stored.provenance.timestamp;
  result.provenance.endpoint = stored.provenance.endpoint;
  if (result != stored)
    throw Error(ErrorCode::corruption,
                "snapshot " + snapshot.id + ": normalized.json does not match the recorded pages",
                {{"id", snapshot.id}, {"file", "normalized.json"}});
  return result;
}

std::string snapshot_id_for(const Query& query, const FieldCatalog& catalog) {
  return sha256_hex(to_request(query, 1, catalog.default_per_page(), catalog));
}

Snapshot locate_snapshot(const Query& query, const SnapshotStore& store, const std::string& explicit_snapshot,
                         const FieldCatalog& catalog) {
  if (!explicit_snapshot.empty()) return open_snapshot(store, explicit_snapshot);
  const auto id = snapshot_id_for(query, catalog);
  if (store.contains(id)) return store.get(id);
  // Recorded with a non-default page size: match on the stored request body.
  for (const auto& summary : store.list()) {
    int per_page = 0;
    try {
      per_page = json::parse(summary.query_text).at("o").at("per_page").get<int>();
    } catch (const json::exception&) {
      continue;
    }
    if (per_page >= 1 && per_page <= catalog.max_per_page() &&
        to_request(query, 1, per_page, catalog) == summary.query_text)
      return store.get(summary.id);
  }
  throw Error(ErrorCode::cache_miss,
              "no recorded snapshot " + id + " for this query in " + store.root().string() +
                  "; record one with `pcs fetch` or run with --live",
              {{"id", id}});
}

RetrievalResult retrieve(const Query& query, const SourceSpec& source, SnapshotStore& store,
                         const TransportFactory& live_transport, const FetchPolicy& policy,
                         const ProgressFn& progress) {
  if (!source.live) {
    auto snapshot = locate_snapshot(query, store, source.snapshot);
    if (progress) progress(static_cast<int>(snapshot.pages.size()), static_cast<int>(snapshot.pages.size()));
    return replay_patents(query, snapshot);
  }
  auto transport = live_transport ? live_transport() : HttpTransport::from_environment();
  PatentsViewClient client(std::move(transport), policy);
  auto retrieval = client.fetch(query, progress);
  record_snapshot(retrieval, store);
  return std::move(retrieval.result);
}

}  // namespace pcs
