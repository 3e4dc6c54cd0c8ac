#pragma once

#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <string>

#include <json.hpp>

#include "pcs/errors.hpp"
#include "pcs/patentsview_client.hpp"

namespace pcs {

struct ApiRequest {
  std::string method;
  std::string path;
  std::map<std::string, std::string> params;
  std::string body;
};

struct ApiResponse {
  int status = 200;
  std::string content_type = "application/json";
  std::string body;
};

struct ServiceConfig {
  std::filesystem::path store_root = "pcs-store";
  std::optional<std::filesystem::path> static_dir;
  // Transport for source=live; defaults to HttpTransport::from_environment.
  std::function<std::shared_ptr<Transport>()> live_transport;
  FetchPolicy policy;
};

// {"error": {"code", "message", "detail"}} with code one of query_rejected,
// transport, no_signal, not_found, internal.
ApiResponse error_response(const Error& error);
std::string_view api_error_code(ErrorCode code);
int http_status(ErrorCode code);

// One server-sent event.
std::string sse_event(std::string_view event, const nlohmann::json& data);

// Routes:
//   POST /api/spectrum                     {query, source: live|replay, snapshot?, top_k?}
//   GET  /api/patents/{id}/diffusion       ?source=live|replay&snapshot=
//   GET  /api/years/{year}/top             ?query_hash=&limit=
//   GET  /api/health
// Replay responses are pure functions of (route, body).
class ApiService {
 public:
  explicit ApiService(ServiceConfig config);
  ~ApiService();
  ApiService(const ApiService&) = delete;
  ApiService& operator=(const ApiService&) = delete;

  ApiResponse handle(const ApiRequest& request) const;

  // POST /api/spectrum; `progress` sees page counts during live fetches.
  ApiResponse spectrum(const std::string& body, const ProgressFn& progress = {}) const;
  ApiResponse diffusion(const std::string& patent_id, const std::map<std::string, std::string>& params) const;
  ApiResponse year_top(const std::string& year, const std::map<std::string, std::string>& params) const;
  ApiResponse health() const;

  // Binds to host:port (port 0 picks a free one) and returns the bound port.
  int bind(const std::string& host, int port);
  // Serves until stop(); call after bind().
  void serve();
  void stop();

 private:
  ServiceConfig config_;
  struct Server;
  std::unique_ptr<Server> server_;
};

}  // namespace pcs
