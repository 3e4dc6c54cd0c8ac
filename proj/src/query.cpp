#include "pcs/query.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <regex>

#include "pcs/errors.hpp"

namespace pcs {

using nlohmann::json;

namespace {

constexpr std::array<std::pair<Op, std::string_view>, 11> kOpKeys{{
    {Op::eq, "_eq"},
    {Op::neq, "_neq"},
    {Op::gt, "_gt"},
    {Op::gte, "_gte"},
    {Op::lt, "_lt"},
    {Op::lte, "_lte"},
    {Op::begins, "_begins"},
    {Op::contains, "_contains"},
    {Op::text_any, "_text_any"},
    {Op::text_all, "_text_all"},
    {Op::text_phrase, "_text_phrase"},
}};

std::string_view op_key(Op op) {
  for (const auto& [candidate, key] : kOpKeys)
    if (candidate == op) return key;
  return "_eq";
}

std::string_view combinator_key(Combinator c) {
  switch (c) {
    case Combinator::and_: return "_and";
    case Combinator::or_: return "_or";
    case Combinator::not_: return "_not";
  }
  return "_and";
}

bool is_text_op(Op op) {
  return op == Op::text_any || op == Op::text_all || op == Op::text_phrase;
}

bool is_iso_date(const std::string& s) {
  static const std::regex pattern(R"(\d{4}-(0[1-9]|1[0-2])-(0[1-9]|[12]\d|3[01]))");
  return std::regex_match(s, pattern);
}

json scalar_json(const Scalar& value) {
  return std::visit([](const auto& v) { return json(v); }, value);
}

std::string describe(const Leaf& leaf) {
  json j;
  j[std::string(op_key(leaf.op))] = {{leaf.field, scalar_json(leaf.value)}};
  return j.dump();
}

struct TreeStats {
  std::size_t depth = 0;
  std::size_t leaves = 0;
};

void validate_leaf(const Leaf& leaf, const FieldCatalog& catalog) {
  const auto type = catalog.type_of(leaf.field);
  if (!type) {
    const auto suggestions = catalog.nearest(leaf.field);
    std::string hint;
    for (const auto& s : suggestions) hint += (hint.empty() ? "" : ", ") + s;
    throw Error(ErrorCode::unknown_field,
                "unknown field '" + leaf.field + "' (did you mean: " + hint + ")",
                {{"field", leaf.field}, {"nearest", suggestions}});
  }
  const bool is_string = std::holds_alternative<std::string>(leaf.value);
  auto reject = [&](const std::string& why) {
    throw Error(ErrorCode::invalid_query, describe(leaf) + ": " + why,
                {{"field", leaf.field}, {"op", std::string(to_string(leaf.op))}});
  };
  if (is_text_op(leaf.op) && *type != FieldType::fulltext)
    reject("full-text operators need a full-text field");
  if ((leaf.op == Op::begins || leaf.op == Op::contains || is_text_op(leaf.op)) && !is_string)
    reject("operator needs a string value");
  switch (*type) {
    case FieldType::date:
      if (!is_string || !is_iso_date(std::get<std::string>(leaf.value)))
        reject("date fields take YYYY-MM-DD strings");
      break;
    case FieldType::integer:
      if (is_string) reject("integer field needs an integer value");
      break;
    case FieldType::string:
    case FieldType::fulltext:
      if (!is_string) reject("text field needs a string value");
      break;
  }
}

void validate_node(const QueryNode& node, const FieldCatalog& catalog, std::size_t depth,
                   TreeStats& stats) {
  if (depth > kMaxQueryDepth)
    throw Error(ErrorCode::bounds,
                "query nests deeper than " + std::to_string(kMaxQueryDepth) + " levels");
  stats.depth = std::max(stats.depth, depth);
  if (node.is_leaf()) {
    if (++stats.leaves > kMaxQueryLeaves)
      throw Error(ErrorCode::bounds,
                  "query has more than " + std::to_string(kMaxQueryLeaves) + " criteria");
    validate_leaf(node.leaf(), catalog);
    return;
  }
  const auto& branch = node.branch();
  if (branch.children.empty())
    throw Error(ErrorCode::invalid_query,
                std::string(combinator_key(branch.combinator)) + " needs at least one criterion");
  if (branch.combinator == Combinator::not_ && branch.children.size() != 1)
    throw Error(ErrorCode::invalid_query, "_not takes exactly one criterion");
  for (const auto& child : branch.children) validate_node(child, catalog, depth + 1, stats);
}

// json -> tree, without field validation (Query::advanced does that).
class Reader {
 public:
  QueryNode read(const json& value, std::size_t depth) {
    if (depth > kMaxQueryDepth)
      throw Error(ErrorCode::bounds,
                  "query nests deeper than " + std::to_string(kMaxQueryDepth) + " levels");
    if (!value.is_object())
      throw Error(ErrorCode::invalid_query,
                  "expected a criterion object, found " + std::string(value.type_name()));
    if (value.empty()) throw Error(ErrorCode::invalid_query, "empty criterion object {}");
    if (value.size() > 1) {
      Branch implicit{Combinator::and_, {}};
      for (const auto& [key, inner] : value.items())
        implicit.children.push_back(read_pair(key, inner, depth + 1));
      return implicit;
    }
    const auto& [key, inner] = *value.items().begin();
    return read_pair(key, inner, depth);
  }

 private:
  QueryNode read_pair(const std::string& key, const json& value, std::size_t depth) {
    if (depth > kMaxQueryDepth)
      throw Error(ErrorCode::bounds,
                  "query nests deeper than " + std::to_string(kMaxQueryDepth) + " levels");
    if (key.empty()) throw Error(ErrorCode::invalid_query, "empty field name");
    if (key.front() != '_') return read_field(key, Op::eq, value, depth);

    if (key == "_and" || key == "_or") {
      if (!value.is_array() || value.empty())
        throw Error(ErrorCode::invalid_query, key + " takes a nonempty list of criteria");
      Branch branch{key == "_and" ? Combinator::and_ : Combinator::or_, {}};
      for (const auto& child : value) branch.children.push_back(read(child, depth + 1));
      return branch;
    }
    if (key == "_not") {
      const json* child = &value;
      if (value.is_array()) {
        if (value.size() != 1) throw Error(ErrorCode::invalid_query, "_not takes exactly one criterion");
        child = &value.front();
      }
      return Branch{Combinator::not_, {read(*child, depth + 1)}};
    }
    for (const auto& [op, op_name] : kOpKeys) {
      if (key != op_name) continue;
      if (!value.is_object() || value.empty())
        throw Error(ErrorCode::invalid_query, key + " takes an object of {field: value}");
      if (value.size() == 1) {
        const auto& [field, operand] = *value.items().begin();
        return read_scalar_leaf(field, op, operand);
      }
      Branch implicit{Combinator::and_, {}};
      for (const auto& [field, operand] : value.items())
        implicit.children.push_back(read_scalar_leaf(field, op, operand));
      if (depth + 1 > kMaxQueryDepth)
        throw Error(ErrorCode::bounds,
                    "query nests deeper than " + std::to_string(kMaxQueryDepth) + " levels");
      return implicit;
    }
    throw Error(ErrorCode::unsupported_operator, "unsupported operator '" + key + "'",
                {{"operator", key}});
  }

  QueryNode read_field(const std::string& field, Op op, const json& value, std::size_t depth) {
    if (!value.is_array()) return read_scalar_leaf(field, op, value);
    if (value.empty())
      throw Error(ErrorCode::invalid_query, "field '" + field + "' has an empty value list");
    if (depth + 1 > kMaxQueryDepth)
      throw Error(ErrorCode::bounds,
                  "query nests deeper than " + std::to_string(kMaxQueryDepth) + " levels");
    Branch any{Combinator::or_, {}};
    for (const auto& item : value) any.children.push_back(read_scalar_leaf(field, op, item));
    return any;
  }

  QueryNode read_scalar_leaf(const std::string& field, Op op, const json& value) {
    if (field.empty()) throw Error(ErrorCode::invalid_query, "empty field name");
    if (field.front() == '_')
      throw Error(ErrorCode::unsupported_operator,
                  "operator '" + field + "' where a field name was expected",
                  {{"operator", field}});
    if (value.is_string()) return Leaf{field, op, value.get<std::string>()};
    if (value.is_number_integer()) {
      if (value.is_number_unsigned() &&
          value.get<std::uint64_t>() > static_cast<std::uint64_t>(INT64_MAX))
        throw Error(ErrorCode::invalid_query, "value for '" + field + "' is out of range");
      return Leaf{field, op, value.get<std::int64_t>()};
    }
    throw Error(ErrorCode::invalid_query,
                "value for '" + field + "' must be a string or an integer, found " +
                    std::string(value.type_name()));
  }
};

std::string trimmed(std::string_view text) {
  const auto not_space = [](char c) { return !std::isspace(static_cast<unsigned char>(c)); };
  auto first = std::find_if(text.begin(), text.end(), not_space);
  auto last = std::find_if(text.rbegin(), text.rend(), not_space).base();
  return first < last ? std::string(first, last) : std::string();
}

// "Y02E10V541" -> "Y02E10/541"
std::string provider_cpc(const std::string& value) {
  static const std::regex v_form(R"(([A-HY]\d{2}[A-Z]\d{1,4})V(\d{2,6}))");
  std::smatch m;
  if (std::regex_match(value, m, v_form)) return m[1].str() + "/" + m[2].str();
  return value;
}

json lower(const QueryNode& node) {
  if (node.is_leaf()) {
    Leaf leaf = node.leaf();
    if (leaf.field == "cpc_subgroup_id" && std::holds_alternative<std::string>(leaf.value))
      leaf.value = provider_cpc(std::get<std::string>(leaf.value));
    return to_json(QueryNode{std::move(leaf)});
  }
  const auto& branch = node.branch();
  const std::string key(combinator_key(branch.combinator));
  if (branch.combinator == Combinator::not_) return json{{key, lower(branch.children.front())}};
  json children = json::array();
  for (const auto& child : branch.children) children.push_back(lower(child));
  return json{{key, std::move(children)}};
}

}  // namespace

std::string_view to_string(Op op) { return op_key(op).substr(1); }
std::string_view to_string(Combinator combinator) { return combinator_key(combinator).substr(1); }

Query Query::keyword(std::string_view phrase) {
  auto text = trimmed(phrase);
  if (text.empty()) throw Error(ErrorCode::empty_query, "the keyword query is empty");
  Query q;
  q.form_ = std::move(text);
  return q;
}

Query Query::advanced(QueryNode root, const FieldCatalog& catalog) {
  TreeStats stats;
  validate_node(root, catalog, 1, stats);
  Query q;
  q.form_ = std::move(root);
  return q;
}

Query parse_keyword(std::string_view text) { return Query::keyword(text); }

Query parse_advanced(std::string_view text, const FieldCatalog& catalog) {
  json doc;
  try {
    doc = json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    const auto offset = e.byte == 0 ? std::size_t{0} : e.byte - 1;
    throw Error(ErrorCode::syntax,
                "malformed query JSON at byte " + std::to_string(offset) + ": " + e.what(),
                {{"offset", offset}});
  }
  try {
    return Query::advanced(Reader{}.read(doc, 1), catalog);
  } catch (const json::exception& e) {
    throw Error(ErrorCode::invalid_query, std::string("unreadable query: ") + e.what());
  }
}

Query parse_query_string(std::string_view text, const FieldCatalog& catalog) {
  constexpr std::string_view prefix = "ADVANCED=";
  const auto body = trimmed(text);
  if (std::string_view(body).starts_with(prefix))
    return parse_advanced(std::string_view(body).substr(prefix.size()), catalog);
  return parse_keyword(body);
}

json to_json(const QueryNode& node) {
  if (node.is_leaf()) {
    const auto& leaf = node.leaf();
    if (leaf.op == Op::eq) return json{{leaf.field, scalar_json(leaf.value)}};
    return json{{std::string(op_key(leaf.op)), json{{leaf.field, scalar_json(leaf.value)}}}};
  }
  const auto& branch = node.branch();
  const std::string key(combinator_key(branch.combinator));
  if (branch.combinator == Combinator::not_) return json{{key, to_json(branch.children.front())}};
  json children = json::array();
  for (const auto& child : branch.children) children.push_back(to_json(child));
  return json{{key, std::move(children)}};
}

std::string serialize(const QueryNode& node) { return to_json(node).dump(); }

json query_to_json(const Query& query) {
  if (query.is_keyword()) return json{{"keyword", query.phrase()}};
  return json{{"advanced", to_json(query.root())}};
}

Query query_from_json(const json& doc, const FieldCatalog& catalog) {
  if (doc.is_string()) return parse_query_string(doc.get<std::string>(), catalog);
  if (!doc.is_object())
    throw Error(ErrorCode::invalid_query, "query must be an object with 'keyword' or 'advanced'");
  const bool has_keyword = doc.contains("keyword");
  const bool has_advanced = doc.contains("advanced");
  if (has_keyword == has_advanced)
    throw Error(ErrorCode::invalid_query, "query needs exactly one of 'keyword' or 'advanced'");
  if (has_keyword) {
    const auto& phrase = doc.at("keyword");
    if (!phrase.is_string()) throw Error(ErrorCode::invalid_query, "'keyword' must be a string");
    return parse_keyword(phrase.get<std::string>());
  }
  const auto& advanced = doc.at("advanced");
  if (advanced.is_string()) return parse_advanced(advanced.get<std::string>(), catalog);
  try {
    return Query::advanced(Reader{}.read(advanced, 1), catalog);
  } catch (const json::exception& e) {
    throw Error(ErrorCode::invalid_query, std::string("unreadable query: ") + e.what());
  }
}

json provider_criteria(const Query& query, const FieldCatalog& catalog) {
  if (!query.is_keyword()) return lower(query.root());
  json any = json::array();
  for (const auto& field : catalog.keyword_fields())
    any.push_back(json{{"_text_any", json{{field, query.phrase()}}}});
  if (any.size() == 1) return any.front();
  return json{{"_or", std::move(any)}};
}

std::string to_request(const Query& query, int page, int per_page, const FieldCatalog& catalog) {
  if (page < 1) throw Error(ErrorCode::bounds, "page must be at least 1");
  if (per_page < 1 || per_page > catalog.max_per_page())
    throw Error(ErrorCode::bounds, "per_page must be in [1, " +
                                       std::to_string(catalog.max_per_page()) + "], got " +
                                       std::to_string(per_page));
  json body;
  body["q"] = provider_criteria(query, catalog);
  body["f"] = catalog.request_fields();
  body["o"] = json{{"page", page}, {"per_page", per_page}};
  body["s"] = catalog.sort();
  return body.dump();
}

}  // namespace pcs
