#include "pcs/field_catalog.hpp"

#include <algorithm>
#include <numeric>

#include "pcs/errors.hpp"

namespace pcs {

namespace detail {
extern const std::string_view kFieldCatalogJson;
}

namespace {

FieldType parse_type(const std::string& name) {
  if (name == "string") return FieldType::string;
  if (name == "fulltext") return FieldType::fulltext;
  if (name == "date") return FieldType::date;
  if (name == "integer") return FieldType::integer;
  throw Error(ErrorCode::invalid_input, "field catalog: unknown field type '" + name + "'");
}

std::size_t edit_distance(std::string_view a, std::string_view b) {
  std::vector<std::size_t> row(b.size() + 1);
  std::iota(row.begin(), row.end(), std::size_t{0});
  for (std::size_t i = 1; i <= a.size(); ++i) {
    std::size_t diagonal = row[0];
    row[0] = i;
    for (std::size_t j = 1; j <= b.size(); ++j) {
      const std::size_t above = row[j];
      row[j] = std::min({row[j] + 1, row[j - 1] + 1, diagonal + (a[i - 1] == b[j - 1] ? 0 : 1)});
      diagonal = above;
    }
  }
  return row[b.size()];
}

}  // namespace

FieldCatalog FieldCatalog::from_json(const nlohmann::json& doc) {
  try {
    FieldCatalog catalog;
    catalog.version_ = doc.at("catalog_version").get<int>();
    catalog.endpoint_ = doc.at("endpoint").get<std::string>();
    catalog.max_per_page_ = doc.at("max_per_page").get<int>();
    catalog.default_per_page_ = doc.at("default_per_page").get<int>();
    for (const auto& [name, type] : doc.at("fields").items())
      catalog.fields_.emplace(name, parse_type(type.get<std::string>()));
    catalog.keyword_fields_ = doc.at("keyword_fields").get<std::vector<std::string>>();
    catalog.request_fields_ = doc.at("request_fields").get<std::vector<std::string>>();
    catalog.sort_ = doc.value("sort", nlohmann::json::array());
    return catalog;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::invalid_input, std::string("field catalog: ") + e.what());
  }
}

std::optional<FieldType> FieldCatalog::type_of(std::string_view field) const {
  if (auto it = fields_.find(field); it != fields_.end()) return it->second;
  return std::nullopt;
}

std::vector<std::string> FieldCatalog::field_names() const {
  std::vector<std::string> names;
  for (const auto& [name, type] : fields_) names.push_back(name);
  return names;
}

std::vector<std::string> FieldCatalog::nearest(std::string_view field, std::size_t limit) const {
  std::vector<std::pair<std::size_t, std::string>> scored;
  for (const auto& [name, type] : fields_) scored.emplace_back(edit_distance(field, name), name);
  std::sort(scored.begin(), scored.end());
  std::vector<std::string> out;
  for (std::size_t i = 0; i < scored.size() && i < limit; ++i) out.push_back(scored[i].second);
  return out;
}

const FieldCatalog& default_catalog() {
  static const FieldCatalog catalog =
      FieldCatalog::from_json(nlohmann::json::parse(detail::kFieldCatalogJson));
  return catalog;
}

}  // namespace pcs
