#include <cstdlib>
#include <regex>

#include <httplib.h>

#include "pcs/errors.hpp"
#include "pcs/patentsview_client.hpp"

namespace pcs {

HttpTransport::HttpTransport(std::string base_url, std::string api_key)
    : base_url_(std::move(base_url)), api_key_(std::move(api_key)) {
  while (!base_url_.empty() && base_url_.back() == '/') base_url_.pop_back();
}

std::shared_ptr<HttpTransport> HttpTransport::from_environment() {
  const char* base = std::getenv(kBaseUrlEnv);
  const char* key = std::getenv(kApiKeyEnv);
  return std::make_shared<HttpTransport>(base && *base ? base : kDefaultBaseUrl, key ? key : "");
}

HttpResponse HttpTransport::post(const std::string& path, const std::string& body,
                                 std::chrono::seconds timeout) {
  static const std::regex url_pattern(R"(^(https?://[^/]+)(/.*)?$)");
  std::smatch m;
  if (!std::regex_match(base_url_, m, url_pattern))
    throw Error(ErrorCode::transport, "malformed provider base URL '" + base_url_ + "'");

  httplib::Client client(m[1].str());
  client.set_connection_timeout(timeout);
  client.set_read_timeout(timeout);
  client.set_write_timeout(timeout);
  httplib::Headers headers;
  if (!api_key_.empty()) headers.emplace("X-Api-Key", api_key_);

  auto response = client.Post(m[2].str() + path, headers, body, "application/json");
  if (!response)
    throw Error(ErrorCode::transport,
                "request to " + base_url_ + path + " failed: " + httplib::to_string(response.error()));
  HttpResponse out{response->status, response->body, response->get_header_value("X-Status-Reason")};
  if (out.reason.empty() && response->status >= 400) out.reason = response->reason;
  return out;
}

}  // namespace pcs
