#pragma once

#include <atomic>
#include <filesystem>
#include <memory>
#include <mutex>
#include <random>
#include <string>
#include <thread>
#include <vector>

#include "pcs/patentsview_client.hpp"
#include "pcs/query.hpp"

namespace pcs::testing {

// Legacy-API JSON for one provider record.
nlohmann::json provider_record(const PatentRecord& record);
// {"patents": [...], "count": n, "total_patent_count": total}
std::string provider_page(const std::vector<PatentRecord>& records, std::int64_t total);

// Deterministic synthetic patents: ids "9000000"+i, cited references drawn
// from a pool of older patents with grant years spread over decades.
std::vector<PatentRecord> synthetic_patents(std::size_t count, std::uint64_t seed);

// Patents that all cite `target`, with inventors in the given countries.
PatentRecord citer(const std::string& id, const std::string& grant_date, const std::string& target,
                   const std::vector<std::string>& inventor_countries);

// Serves a fixed record list, paginated by the request body's o.page and
// o.per_page, ignoring the criteria. Can fail the first N calls.
class FixtureProvider final : public Transport {
 public:
  explicit FixtureProvider(std::vector<PatentRecord> records) : records_(std::move(records)) {}

  HttpResponse post(const std::string& path, const std::string& body, std::chrono::seconds timeout) override;
  std::string describe() const override { return "fixture://provider"; }

  void fail_first(int calls, int status) {
    failures_left_ = calls;
    failure_status_ = status;
  }
  void throw_first(int calls) { throws_left_ = calls; }
  void reject_with(int status, std::string reason) {
    reject_status_ = status;
    reject_reason_ = std::move(reason);
  }
  void set_total_override(std::int64_t total) { total_override_ = total; }
  void set_delay(std::chrono::milliseconds delay) { delay_ = delay; }

  int calls() const { return calls_; }
  int max_in_flight() const { return max_in_flight_; }
  std::vector<std::string> bodies() const {
    std::lock_guard lock(mutex_);
    return bodies_;
  }

 private:
  std::vector<PatentRecord> records_;
  std::atomic<int> calls_{0};
  std::atomic<int> in_flight_{0};
  std::atomic<int> max_in_flight_{0};
  std::atomic<int> failures_left_{0};
  std::atomic<int> throws_left_{0};
  int failure_status_ = 503;
  int reject_status_ = 0;
  std::string reject_reason_;
  std::int64_t total_override_ = -1;
  std::chrono::milliseconds delay_{0};
  mutable std::mutex mutex_;
  std::vector<std::string> bodies_;
};

// Any request is a test failure: used to prove replay never reaches out.
class FailingTransport final : public Transport {
 public:
  HttpResponse post(const std::string&, const std::string&, std::chrono::seconds) override;
  std::string describe() const override { return "failing://"; }
  int calls() const { return calls_; }

 private:
  std::atomic<int> calls_{0};
};

// FixtureProvider behind a real HTTP socket on 127.0.0.1.
class LoopbackProvider {
 public:
  explicit LoopbackProvider(std::shared_ptr<FixtureProvider> provider);
  ~LoopbackProvider();
  std::string base_url() const { return "http://127.0.0.1:" + std::to_string(port_); }

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
  int port_ = 0;
};

// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  TempDir();
  ~TempDir();
  const std::filesystem::path& path() const { return path_; }

 private:
  std::filesystem::path path_;
};

struct CommandResult {
  int exit_code = -1;
  std::string out;
  std::string err;
};

// Runs `command` through the shell, capturing stdout and stderr.
CommandResult run_command(const std::string& command);
std::string shell_quote(const std::string& text);

// Random valid criteria tree over the default catalog, at most `max_depth`
// deep. Every leaf passes catalog validation.
QueryNode random_query(std::mt19937& rng, int max_depth = 5);

// Fast policy for tests: no backoff, no rate limiting to speak of.
FetchPolicy test_policy(int per_page);

}  // namespace pcs::testing
