#include "pcs/api_service.hpp"

#include <charconv>
#include <mutex>

#include <httplib.h>

#include "pcs/analysis.hpp"
#include "pcs/diffusion.hpp"
#include "pcs/render.hpp"
#include "pcs/replay.hpp"
#include "pcs/snapshot_store.hpp"

namespace pcs {

using nlohmann::json;

std::string_view api_error_code(ErrorCode code) {
  switch (code) {
    case ErrorCode::syntax:
    case ErrorCode::unsupported_operator:
    case ErrorCode::unknown_field:
    case ErrorCode::invalid_query:
    case ErrorCode::empty_query:
    case ErrorCode::bounds:
    case ErrorCode::query_rejected:
    case ErrorCode::integrity:
      return "query_rejected";
    case ErrorCode::transport: return "transport";
    case ErrorCode::no_signal: return "no_signal";
    case ErrorCode::not_found:
    case ErrorCode::cache_miss:
      return "not_found";
    default: return "internal";
  }
}

int http_status(ErrorCode code) {
  const auto api = api_error_code(code);
  if (api == "query_rejected") return 400;
  if (api == "transport") return 502;
  if (api == "not_found") return 404;
  if (api == "no_signal") return 200;
  return 500;
}

ApiResponse error_response(const Error& error) {
  std::string message = error.what();
  if (message.empty()) message = std::string(to_string(error.code()));
  json detail = error.detail();
  if (detail.is_object()) detail["reason"] = std::string(to_string(error.code()));
  const json body{{"error", json{{"code", std::string(api_error_code(error.code()))},
                                 {"message", std::move(message)},
                                 {"detail", std::move(detail)}}}};
  return {http_status(error.code()), "application/json", canonical(body)};
}

std::string sse_event(std::string_view event, const json& data) {
  return "event: " + std::string(event) + "\ndata: " + data.dump() + "\n\n";
}

struct ApiService::Server {
  httplib::Server http;
};

ApiService::ApiService(ServiceConfig config) : config_(std::move(config)) {}
ApiService::~ApiService() { stop(); }

namespace {

template <typename Fn>
ApiResponse guarded(Fn&& fn) {
  try {
    return fn();
  } catch (const Error& e) {
    return error_response(e);
  } catch (const std::exception& e) {
    return error_response(Error(ErrorCode::internal, e.what()));
  }
}

std::string param(const std::map<std::string, std::string>& params, const std::string& key,
                  const std::string& fallback = {}) {
  auto it = params.find(key);
  return it == params.end() ? fallback : it->second;
}

int parse_int(const std::string& text, const char* what) {
  int value = 0;
  const auto [end, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc{} || end != text.data() + text.size())
    throw Error(ErrorCode::invalid_query, std::string(what) + " must be an integer, got '" + text + "'");
  return value;
}

SourceSpec source_from(const std::string& source, const std::string& snapshot) {
  if (source.empty() || source == "replay") return {false, snapshot};
  if (source == "live") return {true, {}};
  throw Error(ErrorCode::invalid_query, "source must be 'live' or 'replay', got '" + source + "'");
}

}  // namespace

ApiResponse ApiService::spectrum(const std::string& body, const ProgressFn& progress) const {
  return guarded([&] {
    json doc;
    try {
      doc = json::parse(body);
    } catch (const json::parse_error& e) {
      throw Error(ErrorCode::syntax, std::string("request body is not JSON: ") + e.what());
    }
    if (!doc.is_object() || !doc.contains("query"))
      throw Error(ErrorCode::invalid_query, "request body needs a 'query'");
    const auto query = query_from_json(doc.at("query"));
    const auto source = source_from(doc.value("source", std::string("replay")),
                                    doc.contains("snapshot") && doc.at("snapshot").is_string()
                                        ? doc.at("snapshot").get<std::string>()
                                        : std::string());
    std::size_t top_k = kDefaultRunnerUps;
    if (doc.contains("top_k")) {
      if (!doc.at("top_k").is_number_unsigned())
        throw Error(ErrorCode::invalid_query, "top_k must be a non-negative integer");
      top_k = doc.at("top_k").get<std::size_t>();
    }
    SnapshotStore store(config_.store_root);
    auto retrieval = retrieve(query, source, store, config_.live_transport, config_.policy, progress);
    const auto analysis = analyze(std::move(retrieval), top_k);
    return ApiResponse{200, "application/json", canonical(analysis_json(analysis))};
  });
}

ApiResponse ApiService::diffusion(const std::string& patent_id,
                                  const std::map<std::string, std::string>& params) const {
  return guarded([&] {
    const auto target = normalize_patent_id(patent_id);
    const auto query = forward_citation_query(target);
    const auto source = source_from(param(params, "source"), param(params, "snapshot"));
    SnapshotStore store(config_.store_root);
    const auto retrieval = retrieve(query, source, store, config_.live_transport, config_.policy);
    const auto citers = select_citers(target, retrieval);
    const auto profile = build_profile(target, citers);
    return ApiResponse{200, "application/json",
                       canonical(diffusion_json(profile, profile_summary(profile), retrieval.provenance))};
  });
}

ApiResponse ApiService::year_top(const std::string& year_text,
                                 const std::map<std::string, std::string>& params) const {
  return guarded([&] {
    const int year = parse_int(year_text, "year");
    const auto hash = param(params, "query_hash");
    if (hash.empty()) throw Error(ErrorCode::invalid_query, "query_hash is required");
    std::size_t limit = 50;
    if (auto text = param(params, "limit"); !text.empty()) {
      const int requested = parse_int(text, "limit");
      if (requested < 1) throw Error(ErrorCode::bounds, "limit must be positive");
      limit = static_cast<std::size_t>(requested);
    }
    const SnapshotStore store(config_.store_root);
    const auto snapshot = store.get(hash);
    const auto retrieval = retrieval_from_json(json::parse(snapshot.normalized));
    const auto table = build_citation_table(retrieval.citations);
    auto ranked = table.ranked(year);
    if (ranked.size() > limit) ranked.resize(limit);
    json entries = json::array();
    for (const auto& [id, count] : ranked) entries.push_back(json{{"patent_id", id}, {"count", count}});
    return ApiResponse{200, "application/json",
                       canonical(json{{"year", year}, {"query_hash", hash}, {"entries", std::move(entries)}})};
  });
}

ApiResponse ApiService::health() const {
  const json body{{"status", "ok"},
                  {"version", PCS_VERSION},
                  {"snapshot_format", kSnapshotFormatVersion},
                  {"field_catalog_version", default_catalog().version()}};
  return {200, "application/json", canonical(body)};
}

ApiResponse ApiService::handle(const ApiRequest& request) const {
  const auto& path = request.path;
  if (path == "/api/health" && request.method == "GET") return health();
  if (path == "/api/spectrum" && request.method == "POST") return spectrum(request.body);

  constexpr std::string_view patents = "/api/patents/";
  constexpr std::string_view diffusion_suffix = "/diffusion";
  if (request.method == "GET" && path.starts_with(patents) && path.ends_with(diffusion_suffix) &&
      path.size() > patents.size() + diffusion_suffix.size()) {
    const auto id = path.substr(patents.size(), path.size() - patents.size() - diffusion_suffix.size());
    if (id.find('/') == std::string::npos) return diffusion(id, request.params);
  }
  constexpr std::string_view years = "/api/years/";
  constexpr std::string_view top_suffix = "/top";
  if (request.method == "GET" && path.starts_with(years) && path.ends_with(top_suffix) &&
      path.size() > years.size() + top_suffix.size()) {
    const auto year = path.substr(years.size(), path.size() - years.size() - top_suffix.size());
    if (year.find('/') == std::string::npos) return year_top(year, request.params);
  }
  return error_response(Error(ErrorCode::not_found, "no route for " + request.method + " " + path));
}

int ApiService::bind(const std::string& host, int port) {
  server_ = std::make_unique<Server>();
  auto& http = server_->http;
  http.set_default_headers({{"Access-Control-Allow-Origin", "*"},
                            {"Access-Control-Allow-Headers", "Content-Type, Accept"},
                            {"Access-Control-Allow-Methods", "GET, POST, OPTIONS"}});
  if (config_.static_dir && std::filesystem::is_directory(*config_.static_dir))
    http.set_mount_point("/", config_.static_dir->string());

  auto to_request = [](const httplib::Request& req) {
    ApiRequest out{req.method, req.path, {}, req.body};
    for (const auto& [key, value] : req.params) out.params.emplace(key, value);
    return out;
  };
  auto reply = [](httplib::Response& res, const ApiResponse& api) {
    res.status = api.status;
    res.set_content(api.body, api.content_type);
  };

  http.Options(R"(/api/.*)", [](const httplib::Request&, httplib::Response& res) { res.status = 204; });
  http.Get(R"(/api/.*)", [this, to_request, reply](const httplib::Request& req, httplib::Response& res) {
    reply(res, handle(to_request(req)));
  });
  http.Post("/api/spectrum", [this, to_request, reply](const httplib::Request& req, httplib::Response& res) {
    if (req.get_header_value("Accept").find("text/event-stream") == std::string::npos) {
      reply(res, handle(to_request(req)));
      return;
    }
    const std::string body = req.body;
    res.set_chunked_content_provider("text/event-stream", [this, body](std::size_t, httplib::DataSink& sink) {
      std::mutex write_mutex;
      auto progress = [&](int done, int total) {
        std::lock_guard lock(write_mutex);
        const auto event = sse_event("progress", json{{"pages_fetched", done}, {"pages_total", total}});
        sink.write(event.data(), event.size());
      };
      const auto result = spectrum(body, progress);
      const auto payload = json::parse(result.body);
      const auto event = sse_event(result.status == 200 ? "result" : "error", payload);
      sink.write(event.data(), event.size());
      sink.done();
      return true;
    });
  });
  http.Post(R"(/api/.*)", [this, to_request, reply](const httplib::Request& req, httplib::Response& res) {
    reply(res, handle(to_request(req)));
  });

  if (port == 0) return http.bind_to_any_port(host);
  if (!http.bind_to_port(host, port))
    throw Error(ErrorCode::transport, "cannot bind " + host + ":" + std::to_string(port));
  return port;
}

void ApiService::serve() {
  if (!server_) throw Error(ErrorCode::internal, "serve() before bind()");
  server_->http.listen_after_bind();
}

void ApiService::stop() {
  if (server_) server_->http.stop();
}

}  // namespace pcs
