#include "pcs/citation_table.hpp"

#include <algorithm>
#include <cctype>
#include <chrono>
#include <set>
#include <string_view>
#include <utility>

#include "pcs/errors.hpp"

namespace pcs {

PatentId normalize_patent_id(std::string_view raw) {
  PatentId id;
  id.reserve(raw.size());
  for (char ch : raw) {
    if (std::isspace(static_cast<unsigned char>(ch)) || ch == ',') continue;
    id.push_back(static_cast<char>(std::toupper(static_cast<unsigned char>(ch))));
  }
  if (id.size() > 2 && id.starts_with("US")) id.erase(0, 2);
  return id;
}

int current_year() {
  using namespace std::chrono;
  const year_month_day today{floor<days>(system_clock::now())};
  return static_cast<int>(today.year());
}

std::int64_t CitationTable::bucketed_edges() const {
  std::int64_t total = 0;
  for (const auto& [year, counts] : buckets)
    for (const auto& [id, n] : counts) total += n;
  return total;
}

std::size_t CitationTable::distinct_cited() const {
  std::set<std::string_view> ids;
  for (const auto& [year, counts] : buckets)
    for (const auto& [id, n] : counts) ids.insert(id);
  return ids.size();
}

std::vector<std::pair<PatentId, std::int64_t>> CitationTable::ranked(int year) const {
  std::vector<std::pair<PatentId, std::int64_t>> out;
  if (auto it = buckets.find(year); it != buckets.end())
    out.assign(it->second.begin(), it->second.end());
  std::stable_sort(out.begin(), out.end(),
                   [](const auto& a, const auto& b) { return a.second > b.second; });
  return out;
}

namespace {

nlohmann::json describe(const CitationRecord& r) {
  nlohmann::json j{{"citing_id", r.citing_id}, {"cited_id", r.cited_id}};
  j["cited_grant_year"] = r.cited_grant_year ? nlohmann::json(*r.cited_grant_year) : nullptr;
  return j;
}

void validate(const CitationRecord& r, int latest_year) {
  if (r.citing_id.empty() || r.cited_id.empty())
    throw Error(ErrorCode::invalid_input, "citation record has an empty patent id",
                describe(r));
  if (r.citing_id == r.cited_id)
    throw Error(ErrorCode::invalid_input,
                "patent " + r.citing_id + " cites itself", describe(r));
  if (r.cited_grant_year &&
      (*r.cited_grant_year < kEarliestGrantYear || *r.cited_grant_year > latest_year))
    throw Error(ErrorCode::invalid_input,
                "citation " + r.citing_id + " -> " + r.cited_id + " has grant year " +
                    std::to_string(*r.cited_grant_year) + " outside [" +
                    std::to_string(kEarliestGrantYear) + ", " +
                    std::to_string(latest_year) + "]",
                describe(r));
}

}  // namespace

CitationTable build_citation_table(std::span<const CitationRecord> citations) {
  const int latest_year = current_year();
  CitationTable table;
  std::set<std::pair<std::string_view, std::string_view>> seen;
  for (const auto& record : citations) {
    validate(record, latest_year);
    ++table.total_edges_in;
    if (!seen.emplace(record.citing_id, record.cited_id).second) continue;
    ++table.deduplicated_edges;
    if (!record.cited_grant_year) {
      ++table.edges_dropped_missing_year;
      continue;
    }
    ++table.buckets[*record.cited_grant_year][record.cited_id];
  }
  return table;
}

}  // namespace pcs
