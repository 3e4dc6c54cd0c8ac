#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "pcs/citation_table.hpp"

namespace pcs {

struct Person {
  std::string name;
  std::optional<std::string> country;  // ISO-3166 alpha-2 as reported

  friend bool operator==(const Person&, const Person&) = default;
};

struct CitedReference {
  PatentId patent_id;
  std::optional<std::string> grant_date;  // YYYY-MM-DD
  std::optional<std::string> title;

  friend bool operator==(const CitedReference&, const CitedReference&) = default;
};

struct PatentRecord {
  PatentId patent_id;
  std::string title;
  std::string grant_date;  // YYYY-MM-DD
  std::vector<Person> inventors;
  std::vector<Person> assignees;
  std::vector<std::string> cpc_subgroups;
  std::vector<CitedReference> cited;

  std::optional<int> grant_year() const;
  bool cites(const PatentId& target) const;

  friend bool operator==(const PatentRecord&, const PatentRecord&) = default;
};

struct Provenance {
  std::string request_hash;  // snapshot id of the first-page request body
  std::string endpoint;
  std::string timestamp;     // ISO-8601 UTC
  int page_count = 0;
  std::int64_t total_reported = 0;
  std::vector<std::string> warnings;

  friend bool operator==(const Provenance&, const Provenance&) = default;
};

struct RetrievalResult {
  std::vector<PatentRecord> patents;
  std::vector<CitationRecord> citations;
  Provenance provenance;

  friend bool operator==(const RetrievalResult&, const RetrievalResult&) = default;
};

// Year of an ISO date string, or nullopt when it does not start with a
// plausible four digit year.
std::optional<int> year_of(std::string_view iso_date);

// One citation per distinct (citing, cited) pair in record order; self
// citations are skipped.
std::vector<CitationRecord> derive_citations(const std::vector<PatentRecord>& patents);

nlohmann::json to_json(const PatentRecord& record);
PatentRecord patent_from_json(const nlohmann::json& doc);
nlohmann::json to_json(const Provenance& provenance);
Provenance provenance_from_json(const nlohmann::json& doc);
nlohmann::json to_json(const RetrievalResult& result);
RetrievalResult retrieval_from_json(const nlohmann::json& doc);

// A page of the provider's response: its records plus the reported totals.
struct ProviderPage {
  std::vector<PatentRecord> patents;
  std::int64_t count = 0;
  std::int64_t total = 0;
};

// Parses one legacy-API response body ({"patents": [...], "count": n,
// "total_patent_count": N}). Throws Error{corruption} on unreadable bodies.
ProviderPage parse_provider_page(std::string_view body);

}  // namespace pcs
