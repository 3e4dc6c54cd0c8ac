#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "pcs/patent_record.hpp"

namespace pcs {

inline constexpr const char* kUnknownCountry = "unknown";

// Country-by-year spread of the patents citing one target patent.
struct DiffusionProfile {
  PatentId target_patent_id;
  // (grant year of the citing patent, inventor country) -> citing patents.
  // A patent counts once for each distinct inventor country it has.
  std::map<std::pair<int, std::string>, std::int64_t> cells;
  // Inventor instances per country (unknown countries under "unknown").
  std::map<std::string, std::int64_t> inventor_tallies;
  // Assignee instances per country, for assignees reporting one.
  std::map<std::string, std::int64_t> assignee_tallies;
  std::int64_t citing_patents = 0;
  std::int64_t inventor_instances = 0;
  std::int64_t assignee_instances = 0;

  friend bool operator==(const DiffusionProfile&, const DiffusionProfile&) = default;
};

// Throws Error{inconsistent_input} if a citer does not cite `target`, and
// Error{invalid_input} if a citer has no grant year. Duplicate citers count
// once.
DiffusionProfile build_profile(const PatentId& target, std::span<const PatentRecord> citers);

struct CountryRow {
  std::string country;
  std::int64_t inventors = 0;
  double inventor_share = 0.0;
  std::int64_t citing_patents = 0;  // sum of this country's cells
  std::optional<int> first_year;
  std::optional<int> last_year;

  friend bool operator==(const CountryRow&, const CountryRow&) = default;
};

struct ProfileSummary {
  std::vector<CountryRow> countries;  // by inventors descending, then code
  // Assignee (applicant) country shares; empty when no assignee reports a
  // country. A different population from the inventor shares above.
  std::vector<std::pair<std::string, double>> applicant_shares;

  friend bool operator==(const ProfileSummary&, const ProfileSummary&) = default;
};

ProfileSummary profile_summary(const DiffusionProfile& profile);

}  // namespace pcs
