#include "pcs/errors.hpp"

namespace pcs {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::invalid_input: return "invalid_input";
    case ErrorCode::empty_input: return "empty_input";
    case ErrorCode::no_signal: return "no_signal";
    case ErrorCode::syntax: return "syntax";
    case ErrorCode::unsupported_operator: return "unsupported_operator";
    case ErrorCode::unknown_field: return "unknown_field";
    case ErrorCode::invalid_query: return "invalid_query";
    case ErrorCode::empty_query: return "empty_query";
    case ErrorCode::bounds: return "bounds";
    case ErrorCode::query_rejected: return "query_rejected";
    case ErrorCode::transport: return "transport";
    case ErrorCode::not_found: return "not_found";
    case ErrorCode::cache_miss: return "cache_miss";
    case ErrorCode::corruption: return "corruption";
    case ErrorCode::integrity: return "integrity";
    case ErrorCode::persistence: return "persistence";
    case ErrorCode::inconsistent_input: return "inconsistent_input";
    case ErrorCode::internal: return "internal";
  }
  return "internal";
}

Error::Error(ErrorCode code, const std::string& message, nlohmann::json detail)
    : std::runtime_error(message), code_(code), detail_(std::move(detail)) {}

}  // namespace pcs
