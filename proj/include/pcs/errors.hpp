#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

#include <json.hpp>

namespace pcs {

enum class ErrorCode {
  invalid_input,        // a record violates a domain invariant
  empty_input,          // nothing to compute a spectrum from
  no_signal,            // spectrum carries no citations at all
  syntax,               // malformed query JSON
  unsupported_operator, // combinator/operator key outside the supported subset
  unknown_field,        // field not in the catalog
  invalid_query,        // structurally wrong advanced query
  empty_query,
  bounds,               // pagination or size limits
  query_rejected,       // provider answered 4xx
  transport,            // network failure after retries
  not_found,
  cache_miss,
  corruption,           // stored bytes fail verification
  integrity,            // caller-supplied data contradicts itself
  persistence,          // store write failure
  inconsistent_input,
  internal,
};

std::string_view to_string(ErrorCode code);

// Every failure raised by this library. `detail` carries structured context
// (byte offsets, nearest field names, offending records) for the CLI and the
// HTTP service to render.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message,
        nlohmann::json detail = nlohmann::json::object());

  ErrorCode code() const noexcept { return code_; }
  const nlohmann::json& detail() const noexcept { return detail_; }

 private:
  ErrorCode code_;
  nlohmann::json detail_;
};

}  // namespace pcs
