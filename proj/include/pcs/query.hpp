#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include <json.hpp>

#include "pcs/field_catalog.hpp"

namespace pcs {

enum class Op { eq, neq, gt, gte, lt, lte, begins, contains, text_any, text_all, text_phrase };
enum class Combinator { and_, or_, not_ };

std::string_view to_string(Op op);
std::string_view to_string(Combinator combinator);

using Scalar = std::variant<std::string, std::int64_t>;

struct QueryNode;

struct Leaf {
  std::string field;
  Op op = Op::eq;
  Scalar value;

  friend bool operator==(const Leaf&, const Leaf&) = default;
};

struct Branch {
  Combinator combinator = Combinator::and_;
  std::vector<QueryNode> children;  // nonempty; exactly one under not_

  friend bool operator==(const Branch&, const Branch&);
};

struct QueryNode {
  std::variant<Leaf, Branch> node;

  QueryNode() = default;
  QueryNode(Leaf leaf) : node(std::move(leaf)) {}
  QueryNode(Branch branch) : node(std::move(branch)) {}

  bool is_leaf() const noexcept { return std::holds_alternative<Leaf>(node); }
  const Leaf& leaf() const { return std::get<Leaf>(node); }
  const Branch& branch() const { return std::get<Branch>(node); }

  friend bool operator==(const QueryNode&, const QueryNode&) = default;
};

inline bool operator==(const Branch& a, const Branch& b) {
  return a.combinator == b.combinator && a.children == b.children;
}

inline constexpr std::size_t kMaxQueryDepth = 32;
inline constexpr std::size_t kMaxQueryLeaves = 1024;

// Either a keyword phrase or an advanced criteria tree. Construction
// validates, so every Query in hand is well formed.
class Query {
 public:
  static Query keyword(std::string_view phrase);
  static Query advanced(QueryNode root, const FieldCatalog& catalog = default_catalog());

  bool is_keyword() const noexcept { return std::holds_alternative<std::string>(form_); }
  const std::string& phrase() const { return std::get<std::string>(form_); }
  const QueryNode& root() const { return std::get<QueryNode>(form_); }

  friend bool operator==(const Query&, const Query&) = default;

 private:
  std::variant<std::string, QueryNode> form_;
};

// Provider JSON criteria -> Query. Bare {field: value} is an equality leaf,
// {"_and"|"_or": [...]} and {"_not": {...}} are branches, {"_gte": {field:
// value}} and friends are comparison leaves. Objects with several keys are
// read as an implicit _and, {field: [v1, v2]} as an _or of equalities.
Query parse_advanced(std::string_view text, const FieldCatalog& catalog = default_catalog());
Query parse_keyword(std::string_view text);

// "ADVANCED={...}" selects the advanced form, anything else is a keyword.
Query parse_query_string(std::string_view text, const FieldCatalog& catalog = default_catalog());

nlohmann::json to_json(const QueryNode& node);
std::string serialize(const QueryNode& node);

// {"keyword": "..."} or {"advanced": {...}}, as used in service bodies.
nlohmann::json query_to_json(const Query& query);
Query query_from_json(const nlohmann::json& doc, const FieldCatalog& catalog = default_catalog());

// Criteria as sent to the provider: keywords lowered to _text_any over the
// catalog's keyword fields, CPC subgroup "V" spellings rewritten to "/".
nlohmann::json provider_criteria(const Query& query, const FieldCatalog& catalog = default_catalog());

// Canonical request body (sorted keys, compact). Throws Error{bounds} for
// page < 1, per_page < 1 or per_page above the provider maximum.
std::string to_request(const Query& query, int page, int per_page,
                       const FieldCatalog& catalog = default_catalog());

}  // namespace pcs
