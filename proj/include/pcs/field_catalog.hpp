#pragma once

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

namespace pcs {

enum class FieldType { string, fulltext, date, integer };

// Provider fields a query may reference, plus request defaults. Loaded from
// data/field_catalog.json (compiled in by default).
class FieldCatalog {
 public:
  static FieldCatalog from_json(const nlohmann::json& doc);

  int version() const noexcept { return version_; }
  const std::string& endpoint() const noexcept { return endpoint_; }
  int max_per_page() const noexcept { return max_per_page_; }
  int default_per_page() const noexcept { return default_per_page_; }
  const std::vector<std::string>& keyword_fields() const noexcept { return keyword_fields_; }
  const std::vector<std::string>& request_fields() const noexcept { return request_fields_; }
  const nlohmann::json& sort() const noexcept { return sort_; }

  std::optional<FieldType> type_of(std::string_view field) const;
  std::vector<std::string> field_names() const;
  // Up to `limit` catalog fields closest to `field` by edit distance.
  std::vector<std::string> nearest(std::string_view field, std::size_t limit = 3) const;

 private:
  int version_ = 0;
  std::string endpoint_;
  int max_per_page_ = 0;
  int default_per_page_ = 0;
  std::map<std::string, FieldType, std::less<>> fields_;
  std::vector<std::string> keyword_fields_;
  std::vector<std::string> request_fields_;
  nlohmann::json sort_;
};

const FieldCatalog& default_catalog();

}  // namespace pcs
