#include "pcs/patentsview_client.hpp"

#include <atomic>
#include <ctime>
#include <exception>
#include <mutex>
#include <set>
#include <thread>

#include "pcs/errors.hpp"
#include "pcs/snapshot_store.hpp"

namespace pcs {

std::string utc_timestamp() {
  const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buffer[32];
  std::strftime(buffer, sizeof buffer, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buffer;
}

PatentsViewClient::PatentsViewClient(std::shared_ptr<Transport> transport, FetchPolicy policy,
                                     std::shared_ptr<Clock> clock, const FieldCatalog& catalog)
    : transport_(std::move(transport)),
      policy_(policy),
      clock_(std::move(clock)),
      catalog_(catalog) {
  policy_.validate();
  limiter_ = std::make_shared<RateLimiter>(policy_.rate_limit, *clock_);
  backoff_ = std::make_shared<Backoff>(policy_.backoff_base, policy_.jitter_seed);
}

std::string PatentsViewClient::request_page(const std::string& body) const {
  std::string last_failure;
  for (int attempt = 1; attempt <= policy_.max_attempts; ++attempt) {
    if (attempt > 1) clock_->sleep_for(backoff_->delay(attempt - 1));
    limiter_->acquire();
    HttpResponse response;
    try {
      response = transport_->post(catalog_.endpoint(), body, policy_.timeout);
    } catch (const Error& e) {
      if (e.code() != ErrorCode::transport) throw;
      last_failure = e.what();
      continue;
    }
    if (response.status >= 200 && response.status < 300) return std::move(response.body);
    if (response.status >= 400 && response.status < 500 && response.status != 429) {
      std::string message = response.reason.empty() ? response.body : response.reason;
      throw Error(ErrorCode::query_rejected,
                  "provider rejected the query (HTTP " + std::to_string(response.status) +
                      "): " + message,
                  {{"status", response.status}, {"provider_message", message}});
    }
    last_failure = "HTTP " + std::to_string(response.status) +
                   (response.reason.empty() ? "" : " " + response.reason);
  }
  throw Error(ErrorCode::transport,
              "giving up after " + std::to_string(policy_.max_attempts) +
                  " attempts against " + transport_->describe() + ": " + last_failure,
              {{"attempts", policy_.max_attempts}, {"last_failure", last_failure}});
}

Retrieval PatentsViewClient::fetch(const Query& query, const ProgressFn& progress) const {
  Retrieval out;
  out.request_body = to_request(query, 1, policy_.per_page, catalog_);
  const std::string first = request_page(out.request_body);
  const auto first_page = parse_provider_page(first);

  const std::int64_t per_page = policy_.per_page;
  auto pages_total = static_cast<int>(std::max<std::int64_t>(1, (first_page.total + per_page - 1) / per_page));
  bool truncated = false;
  if (policy_.max_pages && pages_total > *policy_.max_pages) {
    pages_total = *policy_.max_pages;
    truncated = true;
  }

  out.pages.resize(static_cast<std::size_t>(pages_total));
  out.pages[0] = first;
  std::mutex progress_mutex;
  int pages_done = 1;
  if (progress) progress(pages_done, pages_total);

  if (pages_total > 1) {
    std::vector<std::exception_ptr> failures(out.pages.size());
    std::atomic<int> next_page{2};
    auto worker = [&] {
      for (int page = next_page++; page <= pages_total; page = next_page++) {
        const auto slot = static_cast<std::size_t>(page - 1);
        try {
          out.pages[slot] = request_page(to_request(query, page, policy_.per_page, catalog_));
        } catch (...) {
          failures[slot] = std::current_exception();
          continue;
        }
        std::lock_guard lock(progress_mutex);
        ++pages_done;
        if (progress) progress(pages_done, pages_total);
      }
    };
    const int workers = std::min(policy_.max_concurrent_requests, pages_total - 1);
    {
      std::vector<std::jthread> pool;
      for (int i = 0; i < workers; ++i) pool.emplace_back(worker);
    }
    for (const auto& failure : failures)
      if (failure) std::rethrow_exception(failure);
  }

  out.result = assemble_result(out.pages, out.request_body, transport_->describe() + catalog_.endpoint(),
                               utc_timestamp(), truncated);
  return out;
}

RetrievalResult PatentsViewClient::fetch_patents(const Query& query, const ProgressFn& progress) const {
  return fetch(query, progress).result;
}

std::vector<PatentRecord> PatentsViewClient::fetch_forward_citations(const PatentId& target,
                                                                     const ProgressFn& progress) const {
  return select_citers(target, fetch_patents(forward_citation_query(target), progress));
}

Query forward_citation_query(const PatentId& target) {
  const auto id = normalize_patent_id(target);
  if (id.empty()) throw Error(ErrorCode::invalid_query, "empty patent id");
  return Query::advanced(Branch{Combinator::or_,
                                {Leaf{"patent_number", Op::eq, id},
                                 Leaf{"cited_patent_number", Op::eq, id}}});
}

std::vector<PatentRecord> select_citers(const PatentId& target, const RetrievalResult& result) {
  const auto id = normalize_patent_id(target);
  std::vector<PatentRecord> citers;
  bool target_seen = false;
  for (const auto& patent : result.patents) {
    if (patent.patent_id == id) target_seen = true;
    else if (patent.cites(id)) citers.push_back(patent);
  }
  if (!target_seen && citers.empty())
    throw Error(ErrorCode::not_found, "patent " + id + " is unknown to the provider and has no citers",
                {{"patent_id", id}});
  return citers;
}

RetrievalResult assemble_result(const std::vector<std::string>& pages, const std::string& request_body,
                                const std::string& endpoint, const std::string& timestamp,
                                bool truncated) {
  RetrievalResult result;
  std::set<PatentId> seen;
  std::int64_t duplicates = 0;
  for (std::size_t i = 0; i < pages.size(); ++i) {
    auto page = parse_provider_page(pages[i]);
    if (i == 0) result.provenance.total_reported = page.total;
    for (auto& patent : page.patents) {
      if (!seen.insert(patent.patent_id).second) {
        ++duplicates;
        continue;
      }
      result.patents.push_back(std::move(patent));
    }
  }
  auto& provenance = result.provenance;
  provenance.request_hash = sha256_hex(request_body);
  provenance.endpoint = endpoint;
  provenance.timestamp = timestamp;
  provenance.page_count = static_cast<int>(pages.size());
  if (duplicates > 0)
    provenance.warnings.push_back(std::to_string(duplicates) + " duplicate patent records across pages dropped");
  const auto received = static_cast<std::int64_t>(result.patents.size());
  if (truncated)
    provenance.warnings.push_back("stopped at max_pages: received " + std::to_string(received) + " of " +
                                  std::to_string(provenance.total_reported) + " reported patents");
  else if (received != provenance.total_reported)
    provenance.warnings.push_back("integrity: provider reported " + std::to_string(provenance.total_reported) +
                                  " patents, received " + std::to_string(received));
  result.citations = derive_citations(result.patents);
  return result;
}

}  // namespace pcs
