// Acceptance suite. Each criterion runs as its own ctest entry:
//   acceptance <criterion>
// and prints exactly one line: "PASS <criterion>: ..." or "FAIL <criterion>: ...".
// Runs every criterion when called without arguments.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <functional>
#include <iostream>
#include <map>
#include <random>
#include <sstream>

#include "fixtures.hpp"
#include "pcs/analysis.hpp"
#include "pcs/diffusion.hpp"
#include "pcs/errors.hpp"
#include "pcs/replay.hpp"

using namespace pcs;
using namespace pcs::testing;
using Stopwatch = std::chrono::steady_clock;

namespace {

// Tolerances and limits.
constexpr int kSeriesCount = 1000;
constexpr auto kAnalyticBudget = std::chrono::seconds(5);
constexpr auto kSnapshotBudget = std::chrono::seconds(10);
constexpr auto kSweepBudget = std::chrono::seconds(60);
constexpr int kSweepTarget = 7;
constexpr double kShareTolerance = 1e-12;

struct Outcome {
  bool pass = false;
  std::string detail;
};

double seconds_since(Stopwatch::time_point start) {
  return std::chrono::duration<double>(Stopwatch::now() - start).count();
}

std::string within(Stopwatch::time_point start, Stopwatch::duration budget, bool& pass) {
  const double took = seconds_since(start);
  if (Stopwatch::now() - start > budget) pass = false;
  std::ostringstream out;
  out.precision(3);
  out << took << "s (limit " << std::chrono::duration<double>(budget).count() << "s)";
  return out.str();
}

double sort_and_pick(const std::vector<std::int64_t>& s, std::size_t i) {
  std::vector<std::int64_t> w;
  for (long j = static_cast<long>(i) - 2; j <= static_cast<long>(i) + 2; ++j)
    if (j >= 0 && j < static_cast<long>(s.size())) w.push_back(s[static_cast<std::size_t>(j)]);
  std::sort(w.begin(), w.end());
  const auto n = w.size();
  return n % 2 ? static_cast<double>(w[n / 2]) : (static_cast<double>(w[n / 2 - 1]) + static_cast<double>(w[n / 2])) / 2;
}

Outcome detrend_median_oracle() {
  const auto start = Stopwatch::now();
  std::mt19937_64 rng(20240601);
  std::size_t years = 0, mismatches = 0, boundary = 0;
  for (int trial = 0; trial < kSeriesCount; ++trial) {
    const std::size_t len = 1 + rng() % 200;
    std::vector<std::int64_t> series(len);
    for (auto& v : series) v = static_cast<std::int64_t>(rng() % 1'000'001);
    // Dense: the first and last years carry citations, interior years may be 0.
    series.front() = std::max<std::int64_t>(series.front(), 1);
    series.back() = std::max<std::int64_t>(series.back(), 1);
    if (trial % 5 == 0)
      for (std::size_t i = 1; i + 1 < len; i += 3) series[i] = 0;
    CitationTable table;
    for (std::size_t i = 0; i < len; ++i)
      if (series[i] > 0) table.buckets[1900 + static_cast<int>(i)]["P" + std::to_string(i % 7)] = series[i];
    const auto spectrum = compute_spectrum(table);
    if (spectrum.points.size() != len) return {false, "spectrum is not dense"};
    for (std::size_t i = 0; i < len; ++i) {
      const double expected = static_cast<double>(series[i]) - sort_and_pick(series, i);
      ++years;
      if (i < 2 || i + 2 >= len) ++boundary;
      if (spectrum.points[i].f != expected) ++mismatches;
    }
  }
  bool pass = mismatches == 0;
  const auto timing = within(start, kAnalyticBudget, pass);
  return {pass, std::to_string(years) + " years (" + std::to_string(boundary) + " boundary), " +
                    std::to_string(mismatches) + " mismatches, " + timing};
}

Outcome dominance_score_properties() {
  const auto start = Stopwatch::now();
  std::mt19937 rng(77);
  std::size_t tables = 0, single = 0, empty_years = 0, violations = 0;
  for (int trial = 0; trial < 2000; ++trial) {
    CitationTable t;
    const int years = 1 + static_cast<int>(rng() % 40);
    for (int y = 0; y < years; ++y) {
      if (y != 0 && y != years - 1 && rng() % 4 == 0) continue;
      const int patents = rng() % 3 == 0 ? 1 : 1 + static_cast<int>(rng() % 8);
      for (int p = 0; p < patents; ++p)
        t.buckets[1950 + y]["P" + std::to_string(rng() % 12)] += 1 + static_cast<std::int64_t>(rng() % 300);
    }
    ++tables;
    for (const auto& p : compute_spectrum(t).points) {
      if (std::abs(p.pcs) > std::abs(p.f)) ++violations;
      if (p.c_total == 0) {
        ++empty_years;
        if (p.pcs != 0.0) ++violations;
      } else if (p.top_count == p.c_total) {
        ++single;
        if (p.pcs != p.f) ++violations;
      }
    }
  }
  bool pass = violations == 0 && single > 0 && empty_years > 0;
  const auto timing = within(start, kAnalyticBudget, pass);
  return {pass, std::to_string(tables) + " tables, " + std::to_string(single) + " single-owner years, " +
                    std::to_string(empty_years) + " empty years, " + std::to_string(violations) + " violations, " +
                    timing};
}

// Recorded provider snapshots shipped with the repository.
SnapshotStore fixture_store() { return SnapshotStore(PCS_FIXTURE_STORE); }

std::optional<RetrievalResult> recorded(const Query& query) {
  try {
    return replay_patents(query, locate_snapshot(query, fixture_store()));
  } catch (const Error& e) {
    if (e.code() == ErrorCode::cache_miss) return std::nullopt;
    throw;
  }
}

std::string not_recorded(const std::string& what) {
  return "snapshot not recorded (" + what + "); record it with `pcs fetch` into " PCS_FIXTURE_STORE;
}

Outcome seminal_y02e10v541() {
  const auto start = Stopwatch::now();
  const auto query = parse_query_string(R"(ADVANCED={"cpc_subgroup_id":"Y02E10V541"})");
  auto retrieval = recorded(query);
  if (!retrieval) return {false, not_recorded("Y02E10V541")};
  const auto analysis = analyze(std::move(*retrieval));
  const auto patents = analysis.retrieval.patents.size();
  const auto references = analysis.table.distinct_cited();
  std::ostringstream out;
  bool pass = !analysis.no_signal() && analysis.seminal->patent_id == "4335266" && analysis.seminal->peak_year == 1982;
  out << "seminal " << (analysis.seminal ? "US" + analysis.seminal->patent_id : "none") << " peak "
      << (analysis.seminal ? std::to_string(analysis.seminal->peak_year) : "-") << " (expected US4335266, 1982); "
      << patents << " patents vs 962 (drift " << static_cast<long>(patents) - 962 << "), " << references
      << " unique references vs 3502 (drift " << static_cast<long>(references) - 3502 << "); ";
  out << within(start, kSnapshotBudget, pass);
  return {pass, out.str()};
}

Outcome seminal_sweep_y02e10v54x() {
  const auto start = Stopwatch::now();
  const std::vector<std::pair<std::string, std::string>> expected{
      {"Y02E10V541", "4335266"}, {"Y02E10V542", "4927721"}, {"Y02E10V543", "5536333"},
      {"Y02E10V544", "6252287"}, {"Y02E10V545", "5677236"}, {"Y02E10V546", "5227329"},
      {"Y02E10V547", "5053083"}, {"Y02E10V548", "4109271"}, {"Y02E10V549", "4539507"}};
  int matches = 0, missing = 0;
  std::string rows;
  for (const auto& [cpc, seminal] : expected) {
    auto retrieval = recorded(parse_advanced(R"({"cpc_subgroup_id":")" + cpc + R"("})"));
    if (!retrieval) {
      ++missing;
      rows += " " + cpc + "=missing";
      continue;
    }
    const auto analysis = analyze(std::move(*retrieval));
    const auto found = analysis.seminal ? analysis.seminal->patent_id : std::string("none");
    if (found == seminal) ++matches;
    rows += " " + cpc + "=" + found + (found == seminal ? "" : "(expected " + seminal + ")");
  }
  bool pass = matches >= kSweepTarget;
  std::string detail = std::to_string(matches) + "/9 match (target >= " + std::to_string(kSweepTarget) + ");" + rows;
  if (missing > 0) detail = not_recorded(std::to_string(missing) + " of 9 subgroups") + "; " + detail;
  const auto timing = within(start, kSweepBudget, pass);
  return {pass, detail + "; " + timing};
}

Outcome diffusion_4335266() {
  const auto start = Stopwatch::now();
  const PatentId target = "4335266";
  auto retrieval = recorded(forward_citation_query(target));
  if (!retrieval) return {false, not_recorded("forward citations of 4335266")};
  const auto citers = select_citers(target, *retrieval);
  const auto profile = build_profile(target, citers);
  auto tally = [&](const char* c) {
    auto it = profile.inventor_tallies.find(c);
    return it == profile.inventor_tallies.end() ? std::int64_t{0} : it->second;
  };
  double shares = 0;
  for (const auto& row : profile_summary(profile).countries) shares += row.inventor_share;
  bool pass = profile.citing_patents == 151 &&
              (profile.inventor_instances == 0 || std::abs(shares - 1.0) <= kShareTolerance);
  std::ostringstream out;
  out << profile.citing_patents << " citing patents (expected 151); inventors " << profile.inventor_instances
      << " vs 351, JP " << tally("JP") << " vs 56, TW " << tally("TW") << " vs 10, US " << tally("US")
      << " vs 273; " << within(start, kSnapshotBudget, pass);
  return {pass, out.str()};
}

Outcome parser_round_trip() {
  const auto start = Stopwatch::now();
  const auto cpc_query = parse_query_string(R"(ADVANCED={"cpc_subgroup_id":"Y02E10V541"})");
  bool pass = !cpc_query.is_keyword() && cpc_query.root().is_leaf() &&
              cpc_query.root().leaf() == Leaf{"cpc_subgroup_id", Op::eq, std::string("Y02E10V541")};
  std::mt19937 rng(1234);
  int failures = 0, branches = 0;
  for (int i = 0; i < 1000; ++i) {
    const auto tree = random_query(rng);
    if (!tree.is_leaf()) ++branches;
    try {
      if (parse_advanced(serialize(Query::advanced(tree).root())).root() != tree) ++failures;
    } catch (const Error&) {
      ++failures;
    }
  }
  pass = pass && failures == 0;
  const auto timing = within(start, kAnalyticBudget, pass);
  return {pass, std::string("cpc query -> ") + (cpc_query.root().is_leaf() ? "single leaf" : "not a leaf") +
                    "; 1000 trees (" + std::to_string(branches) + " with combinators), " + std::to_string(failures) +
                    " round-trip failures; " + timing};
}

Outcome client_correctness() {
  std::vector<std::string> problems;
  const auto query = parse_advanced(R"({"cpc_subgroup_id":"Y02E10V541"})");

  // Multi-page reassembly against a single-page fetch of the same records.
  const auto records = synthetic_patents(257, 99);
  auto paged = std::make_shared<FixtureProvider>(records);
  paged->set_delay(std::chrono::milliseconds(2));
  auto policy = test_policy(10);
  policy.max_concurrent_requests = 4;
  const auto multi = PatentsViewClient(paged, policy, std::make_shared<SimulatedClock>()).fetch(query);
  const auto whole = PatentsViewClient(std::make_shared<FixtureProvider>(records), test_policy(1000),
                                       std::make_shared<SimulatedClock>())
                         .fetch(query);
  if (multi.pages.size() != 26) problems.push_back("expected 26 pages, got " + std::to_string(multi.pages.size()));
  if (multi.result.patents != records) problems.push_back("multi-page records differ from the source");
  if (multi.result.citations != whole.result.citations) problems.push_back("citations differ from single page");
  if (!multi.result.provenance.warnings.empty()) problems.push_back("unexpected integrity warning");

  // Replay: zero network calls.
  TempDir dir;
  SnapshotStore store(dir.path());
  record_snapshot(multi, store);
  auto failing = std::make_shared<FailingTransport>();
  const auto replayed = retrieve(query, SourceSpec{}, store, [&] { return failing; }, policy);
  if (failing->calls() != 0) problems.push_back("replay reached the transport");
  if (replayed != multi.result) problems.push_back("replay differs from the recording");

  // Forward citations for the diffusion command.
  std::vector<PatentRecord> forward{citer("8000001", "2010-04-06", "4335266", {"US"}),
                                    citer("8000002", "2012-09-11", "4335266", {"JP", "US"})};
  record_snapshot(PatentsViewClient(std::make_shared<FixtureProvider>(forward), test_policy(10),
                                    std::make_shared<SimulatedClock>())
                      .fetch(forward_citation_query("4335266")),
                  store);

  // Every CLI command, replayed twice, must print identical bytes, with the
  // provider unreachable.
  const auto id = sha256_hex(to_request(query, 1, 10));
  const std::string env = std::string(kBaseUrlEnv) + "=http://127.0.0.1:1 ";
  const std::string s = " --store " + shell_quote(dir.path().string());
  const std::string q = " --advanced " + shell_quote(R"({"cpc_subgroup_id":"Y02E10V541"})");
  std::vector<std::string> commands;
  for (const char* format : {"json", "csv", "table"}) {
    const std::string f = std::string(" --format ") + format;
    commands.push_back("spectrum" + q + s + f);
    commands.push_back("seminal" + q + s + f);
    commands.push_back("seminal" + q + s + " --replay " + id + f);
    commands.push_back("diffusion 4335266" + s + f);
    commands.push_back("snapshots list" + s + f);
    commands.push_back("snapshots show " + id + s + f);
  }
  for (const auto& args : commands) {
    const auto a = run_command(env + shell_quote(PCS_BINARY) + " " + args);
    const auto b = run_command(env + shell_quote(PCS_BINARY) + " " + args);
    if (a.exit_code != 0 || b.exit_code != 0)
      problems.push_back("`pcs " + args + "` exited " + std::to_string(a.exit_code) + ": " + a.err);
    else if (a.out != b.out || a.out.empty())
      problems.push_back("`pcs " + args + "` output differs between runs");
  }

  std::string detail = "257 records over 26 pages reassembled; replay transport calls " +
                       std::to_string(failing->calls()) + "; " + std::to_string(commands.size()) +
                       " CLI commands replayed twice";
  for (const auto& p : problems) detail += "; " + p;
  return {problems.empty(), detail};
}

const std::map<std::string, std::function<Outcome()>>& criteria() {
  static const std::map<std::string, std::function<Outcome()>> all{
      {"detrend_median_oracle", detrend_median_oracle},
      {"dominance_score_properties", dominance_score_properties},
      {"seminal_y02e10v541", seminal_y02e10v541},
      {"seminal_sweep_y02e10v54x", seminal_sweep_y02e10v54x},
      {"diffusion_4335266", diffusion_4335266},
      {"parser_round_trip", parser_round_trip},
      {"client_correctness", client_correctness},
  };
  return all;
}

bool run(const std::string& name) {
  const auto it = criteria().find(name);
  if (it == criteria().end()) {
    std::cout << "FAIL " << name << ": unknown criterion\n";
    return false;
  }
  Outcome outcome;
  try {
    outcome = it->second();
  } catch (const std::exception& e) {
    outcome = {false, std::string("error: ") + e.what()};
  }
  std::cout << (outcome.pass ? "PASS " : "FAIL ") << name << ": " << outcome.detail << std::endl;
  return outcome.pass;
}

}  // namespace

int main(int argc, char** argv) {
  bool ok = true;
  if (argc > 1) {
    for (int i = 1; i < argc; ++i) ok = run(argv[i]) && ok;
  } else {
    for (const auto& [name, fn] : criteria()) ok = run(name) && ok;
  }
  return ok ? 0 : 1;
}
