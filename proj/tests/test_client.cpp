#include <doctest.h>

#include <algorithm>

#include "fixtures.hpp"
#include "pcs/errors.hpp"
#include "pcs/patentsview_client.hpp"

using namespace pcs;
using namespace pcs::testing;
using namespace std::chrono_literals;

namespace {

const Query kQuery = parse_advanced(R"({"cpc_subgroup_id":"Y02E10V541"})");

PatentsViewClient client_for(std::shared_ptr<Transport> transport, FetchPolicy policy,
                             std::shared_ptr<Clock> clock = std::make_shared<SimulatedClock>()) {
  return PatentsViewClient(std::move(transport), policy, std::move(clock));
}

// Stamps every request with the clock's time.
class StampingTransport final : public Transport {
 public:
  StampingTransport(std::shared_ptr<Transport> inner, Clock& clock) : inner_(std::move(inner)), clock_(clock) {}
  HttpResponse post(const std::string& path, const std::string& body, std::chrono::seconds t) override {
    stamps.push_back(clock_.now());
    return inner_->post(path, body, t);
  }
  std::string describe() const override { return inner_->describe(); }
  std::vector<Clock::time_point> stamps;

 private:
  std::shared_ptr<Transport> inner_;
  Clock& clock_;
};

std::size_t max_in_any_second(const std::vector<Clock::time_point>& stamps) {
  std::size_t worst = 0;
  for (std::size_t i = 0; i < stamps.size(); ++i) {
    const auto n = std::count_if(stamps.begin(), stamps.end(),
                                 [&](auto t) { return t >= stamps[i] && t < stamps[i] + 1s; });
    worst = std::max(worst, static_cast<std::size_t>(n));
  }
  return worst;
}

}  // namespace

TEST_CASE("multi-page fetch equals a single-page fetch") {
  const auto records = synthetic_patents(57, 1);
  auto paged = std::make_shared<FixtureProvider>(records);
  auto single = std::make_shared<FixtureProvider>(records);
  const auto a = client_for(paged, test_policy(25)).fetch(kQuery);
  const auto b = client_for(single, test_policy(100)).fetch(kQuery);
  CHECK(a.pages.size() == 3);
  CHECK(b.pages.size() == 1);
  CHECK(paged->calls() == 3);
  CHECK(a.result.patents == records);
  CHECK(a.result.patents == b.result.patents);
  CHECK(a.result.citations == b.result.citations);
  CHECK(a.result.provenance.total_reported == 57);
  CHECK(a.result.provenance.page_count == 3);
  CHECK(a.result.provenance.warnings.empty());
  CHECK(a.result.provenance.request_hash.size() == 64);
}

TEST_CASE("empty result is one page with zero patents") {
  auto provider = std::make_shared<FixtureProvider>(std::vector<PatentRecord>{});
  const auto r = client_for(provider, test_policy(25)).fetch(kQuery);
  CHECK(r.pages.size() == 1);
  CHECK(r.result.patents.empty());
  CHECK(r.result.provenance.total_reported == 0);
  CHECK(provider->calls() == 1);
}

TEST_CASE("transient failures are retried with backoff") {
  auto provider = std::make_shared<FixtureProvider>(synthetic_patents(5, 2));
  provider->fail_first(2, 503);
  auto clock = std::make_shared<SimulatedClock>();
  auto policy = test_policy(25);
  policy.backoff_base = 100ms;
  const auto r = client_for(provider, policy, clock).fetch(kQuery);
  CHECK(provider->calls() == 3);
  CHECK(r.result.patents.size() == 5);
  // 100ms*1 + 100ms*2 plus jitter below 100ms each.
  CHECK(clock->slept() >= 300ms);
  CHECK(clock->slept() < 500ms);
}

TEST_CASE("429 and transport errors are retried too") {
  auto provider = std::make_shared<FixtureProvider>(synthetic_patents(5, 2));
  provider->fail_first(1, 429);
  provider->throw_first(1);
  client_for(provider, test_policy(25)).fetch(kQuery);
  CHECK(provider->calls() == 3);
}

TEST_CASE("client errors are not retried") {
  auto provider = std::make_shared<FixtureProvider>(synthetic_patents(5, 2));
  provider->reject_with(400, "Invalid field: cpc_subgrup_id");
  try {
    client_for(provider, test_policy(25)).fetch(kQuery);
    FAIL("expected rejection");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::query_rejected);
    CHECK(e.detail().at("status") == 400);
    CHECK(std::string(e.what()).find("Invalid field") != std::string::npos);
  }
  CHECK(provider->calls() == 1);
}

TEST_CASE("persistent failure gives up after max attempts") {
  auto provider = std::make_shared<FixtureProvider>(synthetic_patents(5, 2));
  provider->fail_first(100, 502);
  auto policy = test_policy(25);
  policy.max_attempts = 4;
  try {
    client_for(provider, policy).fetch(kQuery);
    FAIL("expected transport error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::transport);
  }
  CHECK(provider->calls() == 4);
}

TEST_CASE("retry attempts are capped at ten") {
  auto policy = test_policy(25);
  policy.max_attempts = 11;
  CHECK_THROWS_AS(policy.validate(), Error);
  policy.max_attempts = 10;
  CHECK_NOTHROW(policy.validate());
}

TEST_CASE("rate limiter admits at most the rate in any one second window") {
  SimulatedClock clock;
  for (double rate : {0.75, 1.0, 3.0, 10.0}) {
    RateLimiter limiter(rate, clock);
    std::vector<Clock::time_point> stamps;
    for (int i = 0; i < 40; ++i) {
      limiter.acquire();
      stamps.push_back(clock.now());
    }
    CHECK(max_in_any_second(stamps) <= static_cast<std::size_t>(std::max(1.0, rate)));
  }
}

TEST_CASE("client requests respect the rate limit") {
  auto clock = std::make_shared<SimulatedClock>();
  auto provider = std::make_shared<FixtureProvider>(synthetic_patents(40, 3));
  auto stamping = std::make_shared<StampingTransport>(provider, *clock);
  auto policy = test_policy(4);
  policy.rate_limit = 2.0;
  policy.max_concurrent_requests = 1;
  client_for(stamping, policy, clock).fetch(kQuery);
  CHECK(stamping->stamps.size() == 10);
  CHECK(max_in_any_second(stamping->stamps) <= 2);
}

TEST_CASE("concurrency stays within the configured bound") {
  auto provider = std::make_shared<FixtureProvider>(synthetic_patents(60, 4));
  provider->set_delay(20ms);
  auto policy = test_policy(5);
  policy.max_concurrent_requests = 3;
  const auto r = client_for(provider, policy).fetch(kQuery);
  CHECK(r.pages.size() == 12);
  CHECK(provider->max_in_flight() <= 3);
  CHECK(provider->max_in_flight() >= 2);
  CHECK(r.result.patents == synthetic_patents(60, 4));
}

TEST_CASE("progress reports every page") {
  auto provider = std::make_shared<FixtureProvider>(synthetic_patents(30, 5));
  std::vector<std::pair<int, int>> seen;
  client_for(provider, test_policy(10)).fetch(kQuery, [&](int done, int total) { seen.emplace_back(done, total); });
  REQUIRE(seen.size() == 3);
  CHECK(seen.back() == std::pair{3, 3});
}

TEST_CASE("max_pages truncates with a warning") {
  auto provider = std::make_shared<FixtureProvider>(synthetic_patents(30, 6));
  auto policy = test_policy(10);
  policy.max_pages = 2;
  const auto r = client_for(provider, policy).fetch(kQuery);
  CHECK(r.result.patents.size() == 20);
  REQUIRE(r.result.provenance.warnings.size() == 1);
  CHECK(r.result.provenance.warnings[0].find("max_pages") != std::string::npos);
}

TEST_CASE("reported total mismatch is an integrity warning") {
  auto provider = std::make_shared<FixtureProvider>(synthetic_patents(8, 7));
  provider->set_total_override(9);
  const auto r = client_for(provider, test_policy(25)).fetch(kQuery);
  REQUIRE(r.result.provenance.warnings.size() == 1);
  CHECK(r.result.provenance.warnings[0].starts_with("integrity"));
  CHECK(r.result.patents.size() == 8);
}

TEST_CASE("page requests differ only in the page number") {
  auto provider = std::make_shared<FixtureProvider>(synthetic_patents(30, 8));
  client_for(provider, test_policy(10)).fetch(kQuery);
  auto bodies = provider->bodies();
  std::sort(bodies.begin(), bodies.end());
  CHECK(bodies == std::vector<std::string>{to_request(kQuery, 1, 10), to_request(kQuery, 2, 10),
                                           to_request(kQuery, 3, 10)});
}

TEST_CASE("forward citations") {
  std::vector<PatentRecord> records;
  PatentRecord target;
  target.patent_id = "4335266";
  target.grant_date = "1982-06-15";
  records.push_back(target);
  records.push_back(citer("5000001", "2010-01-01", "4335266", {"US"}));
  records.push_back(citer("5000002", "2012-01-01", "4335266", {"JP"}));
  records.push_back(citer("5000003", "2012-05-01", "4335266", {"US"}));

  auto provider = std::make_shared<FixtureProvider>(records);
  const auto citers = client_for(provider, test_policy(2)).fetch_forward_citations("US4335266");
  CHECK(provider->calls() == 2);
  REQUIRE(citers.size() == 3);
  CHECK(citers[0].patent_id == "5000001");
  const auto sent = nlohmann::json::parse(provider->bodies().front());
  CHECK(sent.at("q").dump() == R"({"_or":[{"patent_number":"4335266"},{"cited_patent_number":"4335266"}]})");

  auto lonely = std::make_shared<FixtureProvider>(std::vector<PatentRecord>{target});
  CHECK(client_for(lonely, test_policy(2)).fetch_forward_citations("4335266").empty());

  auto nobody = std::make_shared<FixtureProvider>(std::vector<PatentRecord>{});
  try {
    client_for(nobody, test_policy(2)).fetch_forward_citations("1234567");
    FAIL("expected not found");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::not_found);
  }
}

TEST_CASE("http transport against a loopback provider") {
  auto provider = std::make_shared<FixtureProvider>(synthetic_patents(12, 9));
  LoopbackProvider loopback(provider);
  auto http = std::make_shared<HttpTransport>(loopback.base_url(), "key");
  const auto r = client_for(http, test_policy(5), std::make_shared<SystemClock>()).fetch(kQuery);
  CHECK(r.result.patents == synthetic_patents(12, 9));
  CHECK(r.result.provenance.endpoint == loopback.base_url() + "/patents/query");

  provider->reject_with(400, "bad field");
  CHECK_THROWS_AS(client_for(http, test_policy(5)).fetch(kQuery), Error);
}

TEST_CASE("unreachable host is a transport error") {
  auto http = std::make_shared<HttpTransport>("http://127.0.0.1:1", "");
  auto policy = test_policy(5);
  policy.max_attempts = 2;
  try {
    client_for(http, policy).fetch(kQuery);
    FAIL("expected transport error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::transport);
  }
}
