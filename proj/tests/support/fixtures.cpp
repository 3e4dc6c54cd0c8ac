#include "fixtures.hpp"

#include <httplib.h>

#include "pcs/errors.hpp"

namespace pcs::testing {

using nlohmann::json;

json provider_record(const PatentRecord& r) {
  json inventors = json::array(), assignees = json::array(), cpcs = json::array(), cited = json::array();
  for (const auto& p : r.inventors) {
    const auto space = p.name.find(' ');
    inventors.push_back(json{{"inventor_first_name", p.name.substr(0, space)},
                             {"inventor_last_name", space == std::string::npos ? "" : p.name.substr(space + 1)},
                             {"inventor_country", p.country ? json(*p.country) : json(nullptr)}});
  }
  for (const auto& p : r.assignees)
    assignees.push_back(json{{"assignee_organization", p.name},
                             {"assignee_country", p.country ? json(*p.country) : json(nullptr)}});
  for (const auto& c : r.cpc_subgroups) cpcs.push_back(json{{"cpc_subgroup_id", c}});
  for (const auto& c : r.cited)
    cited.push_back(json{{"cited_patent_number", c.patent_id},
                         {"cited_patent_date", c.grant_date ? json(*c.grant_date) : json(nullptr)},
                         {"cited_patent_title", c.title ? json(*c.title) : json(nullptr)}});
  return json{{"patent_number", r.patent_id}, {"patent_title", r.title}, {"patent_date", r.grant_date},
              {"inventors", inventors},        {"assignees", assignees},  {"cpcs", cpcs},
              {"cited_patents", cited}};
}

std::string provider_page(const std::vector<PatentRecord>& records, std::int64_t total) {
  json patents = records.empty() ? json(nullptr) : json::array();
  for (const auto& r : records) patents.push_back(provider_record(r));
  return json{{"patents", patents}, {"count", records.size()}, {"total_patent_count", total}}.dump();
}

std::vector<PatentRecord> synthetic_patents(std::size_t count, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  const std::vector<std::string> countries{"US", "JP", "TW", "DE", "KR"};
  std::vector<PatentRecord> out;
  for (std::size_t i = 0; i < count; ++i) {
    PatentRecord r;
    r.patent_id = std::to_string(9000000 + i);
    r.title = "Synthetic device " + std::to_string(i);
    r.grant_date = std::to_string(2000 + static_cast<int>(rng() % 20)) + "-06-1" + std::to_string(rng() % 10);
    const auto inventors = 1 + rng() % 3;
    for (std::size_t k = 0; k < inventors; ++k)
      r.inventors.push_back({"Inventor " + std::to_string(i) + "_" + std::to_string(k), countries[rng() % countries.size()]});
    r.assignees.push_back({"Assignee " + std::to_string(i % 7), countries[rng() % countries.size()]});
    r.cpc_subgroups.push_back("Y02E10/541");
    const auto refs = rng() % 8;
    for (std::size_t k = 0; k < refs; ++k) {
      const auto cited = rng() % 400;
      const int year = 1960 + static_cast<int>(cited / 10);
      std::optional<std::string> date;
      if (cited % 37 != 0) date = std::to_string(year) + "-03-0" + std::to_string(1 + cited % 9);
      const auto id = std::to_string(3000000 + cited * 1000);
      if (r.cites(id)) continue;  // the provider lists each cited patent once
      r.cited.push_back({id, date});
    }
    out.push_back(std::move(r));
  }
  return out;
}

PatentRecord citer(const std::string& id, const std::string& grant_date, const std::string& target,
                   const std::vector<std::string>& inventor_countries) {
  PatentRecord r;
  r.patent_id = id;
  r.title = "Citer " + id;
  r.grant_date = grant_date;
  for (std::size_t i = 0; i < inventor_countries.size(); ++i)
    r.inventors.push_back({"Inventor " + id + "_" + std::to_string(i), inventor_countries[i]});
  r.cited.push_back({target, "1982-06-08"});
  return r;
}

HttpResponse FixtureProvider::post(const std::string&, const std::string& body, std::chrono::seconds) {
  ++calls_;
  const int now = ++in_flight_;
  int seen = max_in_flight_.load();
  while (now > seen && !max_in_flight_.compare_exchange_weak(seen, now)) {}
  struct Leave {
    std::atomic<int>& n;
    ~Leave() { --n; }
  } leave{in_flight_};
  {
    std::lock_guard lock(mutex_);
    bodies_.push_back(body);
  }
  if (delay_.count() > 0) std::this_thread::sleep_for(delay_);
  if (throws_left_.fetch_sub(1) > 0) throw Error(ErrorCode::transport, "simulated timeout");
  if (failures_left_.fetch_sub(1) > 0) return {failure_status_, "", "Service Unavailable"};
  if (reject_status_ != 0) return {reject_status_, "", reject_reason_};

  const auto doc = json::parse(body);
  const auto page = doc.at("o").at("page").get<std::size_t>();
  const auto per_page = doc.at("o").at("per_page").get<std::size_t>();
  const auto first = std::min(records_.size(), (page - 1) * per_page);
  const auto last = std::min(records_.size(), first + per_page);
  std::vector<PatentRecord> slice(records_.begin() + static_cast<std::ptrdiff_t>(first),
                                  records_.begin() + static_cast<std::ptrdiff_t>(last));
  const std::int64_t total = total_override_ >= 0 ? total_override_ : static_cast<std::int64_t>(records_.size());
  return {200, provider_page(slice, total), {}};
}

HttpResponse FailingTransport::post(const std::string&, const std::string&, std::chrono::seconds) {
  ++calls_;
  throw Error(ErrorCode::internal, "network access attempted during replay");
}

struct LoopbackProvider::Impl {
  httplib::Server server;
  std::thread thread;
};

LoopbackProvider::LoopbackProvider(std::shared_ptr<FixtureProvider> provider) : impl_(std::make_unique<Impl>()) {
  impl_->server.Post(R"(/.*)", [provider](const httplib::Request& req, httplib::Response& res) {
    const auto answer = provider->post(req.path, req.body, std::chrono::seconds(5));
    res.status = answer.status;
    if (!answer.reason.empty()) res.set_header("X-Status-Reason", answer.reason);
    res.set_content(answer.body, "application/json");
  });
  port_ = impl_->server.bind_to_any_port("127.0.0.1");
  impl_->thread = std::thread([this] { impl_->server.listen_after_bind(); });
  impl_->server.wait_until_ready();
}

LoopbackProvider::~LoopbackProvider() {
  impl_->server.stop();
  if (impl_->thread.joinable()) impl_->thread.join();
}

TempDir::TempDir() {
  static std::atomic<int> counter{0};
  std::random_device rd;
  path_ = std::filesystem::temp_directory_path() /
          ("pcs-test-" + std::to_string(rd()) + "-" + std::to_string(counter++));
  std::filesystem::create_directories(path_);
}

TempDir::~TempDir() {
  std::error_code ec;
  std::filesystem::remove_all(path_, ec);
}

FetchPolicy test_policy(int per_page) {
  FetchPolicy policy;
  policy.per_page = per_page;
  policy.backoff_base = std::chrono::milliseconds(0);
  policy.rate_limit = 1e6;
  return policy;
}

}  // namespace pcs::testing

namespace pcs::testing {

namespace {

Leaf random_leaf(std::mt19937& rng) {
  const auto pick = [&](auto&& options) { return options[rng() % std::size(options)]; };
  static const char* string_fields[] = {"patent_number", "cpc_subgroup_id", "inventor_country",
                                        "assignee_country", "cited_patent_number"};
  static const char* text_fields[] = {"patent_title", "patent_abstract", "assignee_organization"};
  static const char* date_fields[] = {"patent_date", "app_date", "cited_patent_date"};
  static const char* int_fields[] = {"patent_year", "patent_num_claims"};
  static const char* words[] = {"solar", "thin film", "cell", "wind \"turbine\"", "caf\xc3\xa9", "a/b"};
  static const Op ordered[] = {Op::eq, Op::neq, Op::gt, Op::gte, Op::lt, Op::lte};
  static const Op textual[] = {Op::text_any, Op::text_all, Op::text_phrase, Op::eq, Op::contains};
  static const Op stringy[] = {Op::eq, Op::neq, Op::begins, Op::contains};
  switch (rng() % 4) {
    case 0:
      return {pick(string_fields), pick(stringy), std::string(pick(words))};
    case 1:
      return {pick(text_fields), pick(textual), std::string(pick(words))};
    case 2: {
      char date[16];
      std::snprintf(date, sizeof date, "%04u-%02u-%02u", 1900 + static_cast<unsigned>(rng() % 120),
                    1 + static_cast<unsigned>(rng() % 12), 1 + static_cast<unsigned>(rng() % 28));
      return {pick(date_fields), pick(ordered), std::string(date)};
    }
    default:
      return {pick(int_fields), pick(ordered), static_cast<std::int64_t>(rng() % 5000)};
  }
}

}  // namespace

QueryNode random_query(std::mt19937& rng, int max_depth) {
  if (max_depth <= 1 || rng() % 3 == 0) return random_leaf(rng);
  Branch branch;
  branch.combinator = static_cast<Combinator>(rng() % 3);
  const std::size_t n = branch.combinator == Combinator::not_ ? 1 : 1 + rng() % 4;
  for (std::size_t i = 0; i < n; ++i) branch.children.push_back(random_query(rng, max_depth - 1));
  return branch;
}

}  // namespace pcs::testing

#include <sys/wait.h>

#include <cstdio>
#include <fstream>
#include <sstream>

namespace pcs::testing {

std::string shell_quote(const std::string& text) {
  std::string out = "'";
  for (char c : text) {
    if (c == '\'') out += "'\\''";
    else out += c;
  }
  return out + "'";
}

CommandResult run_command(const std::string& command) {
  TempDir scratch;
  const auto err_path = scratch.path() / "stderr";
  CommandResult result;
  FILE* pipe = ::popen((command + " 2>" + shell_quote(err_path.string())).c_str(), "r");
  if (!pipe) return result;
  char buffer[4096];
  for (std::size_t n; (n = std::fread(buffer, 1, sizeof buffer, pipe)) > 0;) result.out.append(buffer, n);
  const int status = ::pclose(pipe);
  result.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  std::ifstream err(err_path);
  std::ostringstream text;
  text << err.rdbuf();
  result.err = text.str();
  return result;
}

}  // namespace pcs::testing
