#pragma once

#include <chrono>
#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "pcs/fetch_policy.hpp"
#include "pcs/patent_record.hpp"
#include "pcs/query.hpp"

namespace pcs {

struct HttpResponse {
  int status = 0;
  std::string body;
  std::string reason;  // provider status message, if any
};

// Carries one POST to the provider. Implementations throw Error{transport}
// for connection failures and timeouts; HTTP status handling is the
// client's job.
class Transport {
 public:
  virtual ~Transport() = default;
  virtual HttpResponse post(const std::string& path, const std::string& body,
                            std::chrono::seconds timeout) = 0;
  virtual std::string describe() const = 0;
};

inline constexpr const char* kDefaultBaseUrl = "https://api.patentsview.org";
inline constexpr const char* kApiKeyEnv = "PATENTSVIEW_API_KEY";
inline constexpr const char* kBaseUrlEnv = "PATENTSVIEW_BASE_URL";

// HTTPS (or plain HTTP for local servers) via cpp-httplib. The API key, when
// present, is sent as X-Api-Key.
class HttpTransport final : public Transport {
 public:
  HttpTransport(std::string base_url, std::string api_key);
  // Base URL and key from the environment, falling back to the public host.
  static std::shared_ptr<HttpTransport> from_environment();

  HttpResponse post(const std::string& path, const std::string& body,
                    std::chrono::seconds timeout) override;
  std::string describe() const override { return base_url_; }

 private:
  std::string base_url_;
  std::string api_key_;
};

// Pages fetched so far and the page total, once known.
using ProgressFn = std::function<void(int pages_done, int pages_total)>;

// Raw wire responses alongside the normalized result, for record_snapshot.
struct Retrieval {
  std::string request_body;  // canonical page-1 body; its hash is the snapshot id
  std::vector<std::string> pages;
  RetrievalResult result;
};

class PatentsViewClient {
 public:
  PatentsViewClient(std::shared_ptr<Transport> transport, FetchPolicy policy = {},
                    std::shared_ptr<Clock> clock = std::make_shared<SystemClock>(),
                    const FieldCatalog& catalog = default_catalog());

  // Page 1 first (it reports the total), the remaining pages concurrently.
  // Output order is (page, position in page) regardless of completion order.
  Retrieval fetch(const Query& query, const ProgressFn& progress = {}) const;
  RetrievalResult fetch_patents(const Query& query, const ProgressFn& progress = {}) const;

  // Patents citing `target`. Throws Error{not_found} when the provider knows
  // neither the patent nor any citer.
  std::vector<PatentRecord> fetch_forward_citations(const PatentId& target,
                                                    const ProgressFn& progress = {}) const;

  const FetchPolicy& policy() const noexcept { return policy_; }

 private:
  std::string request_page(const std::string& body) const;

  std::shared_ptr<Transport> transport_;
  FetchPolicy policy_;
  std::shared_ptr<Clock> clock_;
  const FieldCatalog& catalog_;
  std::shared_ptr<RateLimiter> limiter_;
  std::shared_ptr<Backoff> backoff_;
};

// The single query that yields a patent's forward citations: the patent
// itself or anything citing it.
Query forward_citation_query(const PatentId& target);

// Citers of `target` from a forward-citation retrieval; throws
// Error{not_found} when the retrieval holds neither the patent nor a citer.
std::vector<PatentRecord> select_citers(const PatentId& target, const RetrievalResult& result);

// Assembles the normalized result from raw pages, as both live fetches and
// replays do.
RetrievalResult assemble_result(const std::vector<std::string>& pages,
                                const std::string& request_body, const std::string& endpoint,
                                const std::string& timestamp, bool truncated);

std::string utc_timestamp();

}  // namespace pcs
