#include "pcs/diffusion.hpp"

#include <algorithm>
#include <set>

#include "pcs/errors.hpp"

namespace pcs {

DiffusionProfile build_profile(const PatentId& target, std::span<const PatentRecord> citers) {
  DiffusionProfile profile;
  profile.target_patent_id = normalize_patent_id(target);
  std::set<PatentId> seen;
  for (const auto& citer : citers) {
    if (!citer.cites(profile.target_patent_id))
      throw Error(ErrorCode::inconsistent_input,
                  "patent " + citer.patent_id + " does not cite " + profile.target_patent_id,
                  {{"patent_id", citer.patent_id}, {"target", profile.target_patent_id}});
    const auto year = citer.grant_year();
    if (!year)
      throw Error(ErrorCode::invalid_input, "citing patent " + citer.patent_id + " has no grant date",
                  {{"patent_id", citer.patent_id}});
    if (!seen.insert(citer.patent_id).second) continue;

    ++profile.citing_patents;
    std::set<std::string> countries;
    for (const auto& inventor : citer.inventors) {
      const std::string country = inventor.country.value_or(kUnknownCountry);
      countries.insert(country);
      ++profile.inventor_tallies[country];
      ++profile.inventor_instances;
    }
    if (countries.empty()) countries.insert(kUnknownCountry);
    for (const auto& country : countries) ++profile.cells[{*year, country}];

    for (const auto& assignee : citer.assignees) {
      if (!assignee.country) continue;
      ++profile.assignee_tallies[*assignee.country];
      ++profile.assignee_instances;
    }
  }
  return profile;
}

ProfileSummary profile_summary(const DiffusionProfile& profile) {
  std::map<std::string, CountryRow> rows;
  for (const auto& [country, count] : profile.inventor_tallies) {
    auto& row = rows[country];
    row.country = country;
    row.inventors = count;
    row.inventor_share = static_cast<double>(count) / static_cast<double>(profile.inventor_instances);
  }
  for (const auto& [cell, count] : profile.cells) {
    const auto& [year, country] = cell;
    auto& row = rows[country];
    row.country = country;
    row.citing_patents += count;
    row.first_year = row.first_year ? std::min(*row.first_year, year) : year;
    row.last_year = row.last_year ? std::max(*row.last_year, year) : year;
  }

  ProfileSummary summary;
  for (auto& [country, row] : rows) summary.countries.push_back(std::move(row));
  std::stable_sort(summary.countries.begin(), summary.countries.end(),
                   [](const CountryRow& a, const CountryRow& b) { return a.inventors > b.inventors; });
  for (const auto& [country, count] : profile.assignee_tallies)
    summary.applicant_shares.emplace_back(
        country, static_cast<double>(count) / static_cast<double>(profile.assignee_instances));
  return summary;
}

}  // namespace pcs
