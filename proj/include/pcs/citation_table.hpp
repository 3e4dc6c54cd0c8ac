#pragma once

#include <compare>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace pcs {

// Patent numbers are held without the "US" prefix ("4335266").
using PatentId = std::string;

// Strips whitespace, commas and a leading "US" so that "US 4,335,266" and
// "4335266" name the same patent.
PatentId normalize_patent_id(std::string_view raw);

inline constexpr int kEarliestGrantYear = 1790;
int current_year();

// One citing -> cited edge. The grant year belongs to the cited patent.
struct CitationRecord {
  PatentId citing_id;
  PatentId cited_id;
  std::optional<int> cited_grant_year;

  friend auto operator<=>(const CitationRecord&, const CitationRecord&) = default;
};

// Reference counts bucketed by the cited patent's grant year.
struct CitationTable {
  std::map<int, std::map<PatentId, std::int64_t>> buckets;
  std::int64_t total_edges_in = 0;
  std::int64_t deduplicated_edges = 0;
  std::int64_t edges_dropped_missing_year = 0;

  bool empty() const noexcept { return buckets.empty(); }
  std::int64_t bucketed_edges() const;
  // Distinct cited patents across all buckets.
  std::size_t distinct_cited() const;
  // (patent, count) for one year, ranked by count descending then id.
  std::vector<std::pair<PatentId, std::int64_t>> ranked(int year) const;

  friend bool operator==(const CitationTable&, const CitationTable&) = default;
};

// Deduplicates exact (citing, cited) pairs (first occurrence wins), drops
// edges without a cited grant year and buckets the rest. Throws
// Error{invalid_input} for self citations, empty ids or years outside
// [1790, current year].
CitationTable build_citation_table(std::span<const CitationRecord> citations);

}  // namespace pcs
