// pcs: patent citation spectroscopy from the command line.
//
//   pcs spectrum  --advanced '{"cpc_subgroup_id":"Y02E10V541"}' [--replay ID|--live] [--format json|csv|table]
//   pcs seminal   --keyword "photovoltaic cells" --live
//   pcs diffusion 4335266 [--replay ID|--live]
//   pcs fetch     --advanced ... | --forward 4335266
//   pcs snapshots list | show ID
//   pcs serve     --port 8080

#include <csignal>
#include <cstdlib>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>

#include "pcs/analysis.hpp"
#include "pcs/api_service.hpp"
#include "pcs/diffusion.hpp"
#include "pcs/errors.hpp"
#include "pcs/render.hpp"
#include "pcs/replay.hpp"

namespace {

using nlohmann::json;

enum ExitCode : int {
  kOk = 0,
  kInternal = 1,
  kUsage = 2,
  kQueryRejected = 3,
  kTransport = 4,
  kNoSignal = 5,
  kCorruption = 6,
  kNotFound = 7,
  kPersistence = 8,
};

int exit_code_for(pcs::ErrorCode code) {
  using pcs::ErrorCode;
  switch (code) {
    case ErrorCode::syntax:
    case ErrorCode::unsupported_operator:
    case ErrorCode::unknown_field:
    case ErrorCode::invalid_query:
    case ErrorCode::empty_query:
    case ErrorCode::bounds:
    case ErrorCode::query_rejected:
    case ErrorCode::integrity:
      return kQueryRejected;
    case ErrorCode::transport: return kTransport;
    case ErrorCode::no_signal: return kNoSignal;
    case ErrorCode::corruption: return kCorruption;
    case ErrorCode::not_found:
    case ErrorCode::cache_miss:
      return kNotFound;
    case ErrorCode::persistence: return kPersistence;
    default: return kInternal;
  }
}

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct QueryFlags {
  std::string keyword;
  std::string advanced;

  pcs::Query query() const {
    if (keyword.empty() == advanced.empty())
      throw UsageError("give exactly one of --keyword or --advanced");
    return advanced.empty() ? pcs::parse_keyword(keyword) : pcs::parse_advanced(advanced);
  }
};

struct SourceFlags {
  std::string replay;
  bool live = false;
  std::string store;

  pcs::SourceSpec source() const {
    if (live && !replay.empty()) throw UsageError("--live and --replay are exclusive");
    return {live, replay};
  }
  pcs::SnapshotStore open_store() const { return pcs::SnapshotStore(pcs::SnapshotStore::resolve_root(store)); }
};

struct OutputFlags {
  std::string format = "table";
  std::string out;

  void emit(const std::string& text) const {
    if (out.empty()) {
      std::cout << text;
      return;
    }
    std::ofstream file(out, std::ios::binary | std::ios::trunc);
    file << text;
    if (!file) throw pcs::Error(pcs::ErrorCode::persistence, "cannot write " + out);
  }
};

void add_query_flags(CLI::App* cmd, QueryFlags& q) {
  cmd->add_option("--keyword", q.keyword, "Keyword phrase matched against titles and abstracts");
  cmd->add_option("--advanced", q.advanced, "Provider JSON criteria, e.g. {\"cpc_subgroup_id\":\"Y02E10V541\"}");
}

void add_source_flags(CLI::App* cmd, SourceFlags& s) {
  cmd->add_option("--replay", s.replay, "Replay a recorded snapshot (id or directory)");
  cmd->add_flag("--live", s.live, "Query the provider (records the retrieval in the store)");
  cmd->add_option("--store", s.store, "Snapshot store directory (default $PCS_STORE or ./pcs-store)");
}

void add_output_flags(CLI::App* cmd, OutputFlags& o) {
  cmd->add_option("--format", o.format, "json, csv or table")
      ->check(CLI::IsMember({"json", "csv", "table"}));
  cmd->add_option("--out", o.out, "Write to a file instead of stdout");
}

pcs::Analysis run_analysis(const QueryFlags& q, const SourceFlags& s, std::size_t top_k) {
  const auto query = q.query();
  auto store = s.open_store();
  auto retrieval = pcs::retrieve(query, s.source(), store, {}, pcs::FetchPolicy{});
  return pcs::analyze(std::move(retrieval), top_k);
}

int cmd_spectrum(const QueryFlags& q, const SourceFlags& s, const OutputFlags& o, std::size_t top_k) {
  const auto analysis = run_analysis(q, s, top_k);
  switch (pcs::parse_output_format(o.format)) {
    case pcs::OutputFormat::json: o.emit(pcs::canonical(pcs::analysis_json(analysis))); break;
    case pcs::OutputFormat::csv:
      o.emit(analysis.spectrum ? pcs::spectrum_csv(*analysis.spectrum)
                               : std::string("year,c_total,median5,f,top_patent_id,top_count,pcs\n"));
      break;
    case pcs::OutputFormat::table: o.emit(pcs::spectrum_table(analysis)); break;
  }
  if (analysis.no_signal()) std::cerr << "pcs: no signal: no cited references with a grant year; broaden the query\n";
  return analysis.no_signal() ? kNoSignal : kOk;
}

int cmd_seminal(const QueryFlags& q, const SourceFlags& s, const OutputFlags& o, std::size_t top_k) {
  const auto analysis = run_analysis(q, s, top_k);
  if (analysis.no_signal()) {
    if (pcs::parse_output_format(o.format) == pcs::OutputFormat::json)
      o.emit(pcs::canonical(json{{"seminal", nullptr}, {"no_signal", true},
                                 {"provenance", pcs::provenance_json(analysis)}}));
    std::cerr << "pcs: no signal: no cited references with a grant year; broaden the query\n";
    return kNoSignal;
  }
  switch (pcs::parse_output_format(o.format)) {
    case pcs::OutputFormat::json:
      o.emit(pcs::canonical(json{{"seminal", pcs::to_json(*analysis.seminal)},
                                 {"seminal_patent", pcs::analysis_json(analysis).at("seminal_patent")},
                                 {"no_signal", false},
                                 {"provenance", pcs::provenance_json(analysis)}}));
      break;
    case pcs::OutputFormat::csv: o.emit(pcs::seminal_csv(*analysis.seminal)); break;
    case pcs::OutputFormat::table: o.emit(pcs::seminal_table(analysis)); break;
  }
  return kOk;
}

int cmd_diffusion(const std::string& patent, const SourceFlags& s, const OutputFlags& o) {
  const auto target = pcs::normalize_patent_id(patent);
  auto store = s.open_store();
  const auto retrieval =
      pcs::retrieve(pcs::forward_citation_query(target), s.source(), store, {}, pcs::FetchPolicy{});
  const auto citers = pcs::select_citers(target, retrieval);
  const auto profile = pcs::build_profile(target, citers);
  const auto summary = pcs::profile_summary(profile);
  switch (pcs::parse_output_format(o.format)) {
    case pcs::OutputFormat::json:
      o.emit(pcs::canonical(pcs::diffusion_json(profile, summary, retrieval.provenance)));
      break;
    case pcs::OutputFormat::csv: o.emit(pcs::diffusion_csv(profile)); break;
    case pcs::OutputFormat::table: o.emit(pcs::diffusion_table(profile, summary)); break;
  }
  return kOk;
}

struct FetchFlags {
  std::string forward;
  std::string store;
  int per_page = 0;
  int max_pages = 0;
  int concurrency = 4;
  double rate_limit = 0.75;
};

int cmd_fetch(const QueryFlags& q, const FetchFlags& f) {
  const bool has_query = !q.keyword.empty() || !q.advanced.empty();
  if (has_query == !f.forward.empty()) throw UsageError("give a query (--keyword/--advanced) or --forward ID");
  const auto query = f.forward.empty() ? q.query() : pcs::forward_citation_query(f.forward);

  pcs::FetchPolicy policy;
  policy.per_page = f.per_page > 0 ? f.per_page : pcs::default_catalog().default_per_page();
  if (f.max_pages > 0) policy.max_pages = f.max_pages;
  policy.max_concurrent_requests = f.concurrency;
  policy.rate_limit = f.rate_limit;

  pcs::SnapshotStore store(pcs::SnapshotStore::resolve_root(f.store));
  pcs::PatentsViewClient client(pcs::HttpTransport::from_environment(), policy);
  const auto retrieval = client.fetch(query, [](int done, int total) {
    std::cerr << "\rpages " << done << "/" << total << std::flush;
  });
  std::cerr << '\n';
  for (const auto& warning : retrieval.result.provenance.warnings) std::cerr << "pcs: warning: " << warning << '\n';
  std::cout << pcs::record_snapshot(retrieval, store) << '\n';
  return kOk;
}

int cmd_snapshots_list(const std::string& store_flag, const OutputFlags& o) {
  const pcs::SnapshotStore store(pcs::SnapshotStore::resolve_root(store_flag));
  const auto summaries = store.list();
  switch (pcs::parse_output_format(o.format)) {
    case pcs::OutputFormat::json: {
      json items = json::array();
      for (const auto& s : summaries) items.push_back(pcs::to_json(s));
      o.emit(pcs::canonical(items));
      break;
    }
    case pcs::OutputFormat::csv: o.emit(pcs::snapshots_csv(summaries)); break;
    case pcs::OutputFormat::table: o.emit(pcs::snapshots_table(summaries)); break;
  }
  return kOk;
}

int cmd_snapshots_show(const std::string& store_flag, const std::string& id, const OutputFlags& o) {
  const pcs::SnapshotStore store(pcs::SnapshotStore::resolve_root(store_flag));
  const auto snapshot = pcs::open_snapshot(store, id);
  const auto retrieval = pcs::retrieval_from_json(json::parse(snapshot.normalized));
  const json doc{{"id", snapshot.id},
                 {"created_at", snapshot.created_at},
                 {"format_version", snapshot.format_version},
                 {"query_text", snapshot.query_text},
                 {"page_count", snapshot.pages.size()},
                 {"patents", retrieval.patents.size()},
                 {"citations", retrieval.citations.size()},
                 {"provenance", pcs::to_json(retrieval.provenance)}};
  if (pcs::parse_output_format(o.format) == pcs::OutputFormat::json) {
    o.emit(pcs::canonical(doc));
  } else {
    std::string text;
    for (const auto& [key, value] : doc.items())
      text += key + ": " + (value.is_string() ? value.get<std::string>() : value.dump()) + '\n';
    o.emit(text);
  }
  return kOk;
}

pcs::ApiService* g_service = nullptr;

int cmd_serve(const std::string& host, int port, const std::string& store, const std::string& static_dir) {
  pcs::ServiceConfig config;
  config.store_root = pcs::SnapshotStore::resolve_root(store);
  if (!static_dir.empty()) config.static_dir = static_dir;
  pcs::ApiService service(std::move(config));
  const int bound = service.bind(host, port);
  std::cerr << "pcs: serving on http://" << host << ':' << bound << '\n';
  g_service = &service;
  std::signal(SIGINT, [](int) { if (g_service) g_service->stop(); });
  std::signal(SIGTERM, [](int) { if (g_service) g_service->stop(); });
  service.serve();
  g_service = nullptr;
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Patent citation spectroscopy: find the foundational patent of a technology area"};
  app.require_subcommand(1);

  QueryFlags query;
  SourceFlags source;
  OutputFlags output;
  std::size_t top_k = pcs::kDefaultRunnerUps;
  std::function<int()> action;

  auto* spectrum = app.add_subcommand("spectrum", "Cited-year spectrum of a query's patents");
  add_query_flags(spectrum, query);
  add_source_flags(spectrum, source);
  add_output_flags(spectrum, output);
  spectrum->add_option("--top-k", top_k, "Runner-up peak years to report");
  spectrum->callback([&] { action = [&] { return cmd_spectrum(query, source, output, top_k); }; });

  auto* seminal = app.add_subcommand("seminal", "The most likely foundational patent for a query");
  add_query_flags(seminal, query);
  add_source_flags(seminal, source);
  add_output_flags(seminal, output);
  seminal->add_option("--top-k", top_k, "Runner-up peak years to report");
  seminal->callback([&] { action = [&] { return cmd_seminal(query, source, output, top_k); }; });

  std::string patent;
  auto* diffusion = app.add_subcommand("diffusion", "Country-by-year spread of patents citing a patent");
  diffusion->add_option("patent", patent, "Patent number, with or without the US prefix")->required();
  add_source_flags(diffusion, source);
  add_output_flags(diffusion, output);
  diffusion->callback([&] { action = [&] { return cmd_diffusion(patent, source, output); }; });

  FetchFlags fetch_flags;
  auto* fetch = app.add_subcommand("fetch", "Retrieve from the provider and record a snapshot");
  add_query_flags(fetch, query);
  fetch->add_option("--forward", fetch_flags.forward, "Record the forward citations of this patent instead");
  fetch->add_option("--store,--snapshot", fetch_flags.store, "Snapshot store directory");
  fetch->add_option("--per-page", fetch_flags.per_page, "Records per page (default: provider maximum)");
  fetch->add_option("--max-pages", fetch_flags.max_pages, "Stop after this many pages");
  fetch->add_option("--concurrency", fetch_flags.concurrency, "Concurrent page requests")->check(CLI::PositiveNumber);
  fetch->add_option("--rate-limit", fetch_flags.rate_limit, "Requests per second")->check(CLI::PositiveNumber);
  fetch->callback([&] { action = [&] { return cmd_fetch(query, fetch_flags); }; });

  std::string store_flag, snapshot_id;
  auto* snapshots = app.add_subcommand("snapshots", "Inspect the snapshot store");
  snapshots->require_subcommand(1);
  auto* list = snapshots->add_subcommand("list", "List snapshots, newest first");
  list->add_option("--store", store_flag, "Snapshot store directory");
  add_output_flags(list, output);
  list->callback([&] { action = [&] { return cmd_snapshots_list(store_flag, output); }; });
  auto* show = snapshots->add_subcommand("show", "Show one snapshot");
  show->add_option("id", snapshot_id, "Snapshot id or directory")->required();
  show->add_option("--store", store_flag, "Snapshot store directory");
  add_output_flags(show, output);
  show->callback([&] { action = [&] { return cmd_snapshots_show(store_flag, snapshot_id, output); }; });

  std::string host = "127.0.0.1", static_dir;
  int port = 8080;
  auto* serve = app.add_subcommand("serve", "Serve the HTTP API (and the explorer UI assets)");
  serve->add_option("--host", host, "Interface to bind");
  serve->add_option("--port", port, "Port (0 picks a free one)");
  serve->add_option("--store", store_flag, "Snapshot store directory");
  serve->add_option("--static", static_dir, "Directory of built UI assets served at /");
  serve->callback([&] { action = [&] { return cmd_serve(host, port, store_flag, static_dir); }; });

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kUsage;
  }

  try {
    return action();
  } catch (const UsageError& e) {
    std::cerr << "pcs: " << e.what() << "\nRun with --help for usage.\n";
    return kUsage;
  } catch (const pcs::Error& e) {
    std::cerr << "pcs: " << pcs::to_string(e.code()) << ": " << e.what() << '\n';
    return exit_code_for(e.code());
  } catch (const std::exception& e) {
    std::cerr << "pcs: internal error: " << e.what() << '\n';
    return kInternal;
  }
}
