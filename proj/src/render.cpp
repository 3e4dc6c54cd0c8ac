#include "pcs/render.hpp"

#include <algorithm>
#include <charconv>
#include <sstream>

#include "pcs/errors.hpp"

namespace pcs {

using nlohmann::json;

OutputFormat parse_output_format(std::string_view name) {
  if (name == "json") return OutputFormat::json;
  if (name == "csv") return OutputFormat::csv;
  if (name == "table") return OutputFormat::table;
  throw Error(ErrorCode::invalid_query, "unknown output format '" + std::string(name) + "'");
}

std::string format_real(double value) {
  char buffer[64];
  const auto [end, ec] = std::to_chars(buffer, buffer + sizeof buffer, value);
  if (ec != std::errc{}) throw Error(ErrorCode::internal, "cannot format real");
  return std::string(buffer, end);
}

std::string csv_field(std::string_view field) {
  if (field.find_first_of(",\"\r\n") == std::string_view::npos) return std::string(field);
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + '"';
}

std::string canonical(const json& doc) { return doc.dump() + "\n"; }

namespace {

json optional_id(const std::optional<PatentId>& id) { return id ? json(*id) : json(nullptr); }
json optional_string(const std::optional<std::string>& s) { return s ? json(*s) : json(nullptr); }
json optional_int(const std::optional<int>& v) { return v ? json(*v) : json(nullptr); }

// Left-aligned text columns separated by two spaces.
class TextTable {
 public:
  explicit TextTable(std::vector<std::string> header) { rows_.push_back(std::move(header)); }
  void add(std::vector<std::string> row) { rows_.push_back(std::move(row)); }

  std::string str() const {
    std::vector<std::size_t> widths;
    for (const auto& row : rows_) {
      widths.resize(std::max(widths.size(), row.size()));
      for (std::size_t i = 0; i < row.size(); ++i) widths[i] = std::max(widths[i], row[i].size());
    }
    std::ostringstream out;
    for (const auto& row : rows_) {
      std::string line;
      for (std::size_t i = 0; i < row.size(); ++i) {
        line += row[i];
        if (i + 1 < row.size()) line += std::string(widths[i] - row[i].size() + 2, ' ');
      }
      out << line << '\n';
    }
    return out.str();
  }

 private:
  std::vector<std::vector<std::string>> rows_;
};

}  // namespace

json to_json(const SpectrumPoint& p) {
  return json{{"year", p.year},     {"c_total", p.c_total},
              {"median5", p.median5}, {"f", p.f},
              {"top_patent_id", optional_id(p.top_patent_id)},
              {"top_count", p.top_count}, {"top_ties", p.top_ties},
              {"pcs", p.pcs}};
}

json to_json(const Spectrum& spectrum) {
  json points = json::array();
  for (const auto& p : spectrum.points) points.push_back(to_json(p));
  return json{{"points", std::move(points)}, {"query_provenance", spectrum.query_provenance}};
}

json to_json(const SeminalResult& s) {
  json runners = json::array();
  for (const auto& [year, pcs] : s.runner_up_years) runners.push_back(json{{"year", year}, {"pcs", pcs}});
  return json{{"peak_year", s.peak_year},           {"patent_id", s.patent_id},
              {"peak_pcs", s.peak_pcs},             {"peak_top_count", s.peak_top_count},
              {"runner_up_years", std::move(runners)}, {"co_leaders", s.co_leaders}};
}

json to_json(const DiffusionProfile& profile) {
  json cells = json::array();
  for (const auto& [cell, count] : profile.cells)
    cells.push_back(json{{"year", cell.first}, {"country", cell.second}, {"citing_patents", count}});
  return json{{"target_patent_id", profile.target_patent_id},
              {"cells", std::move(cells)},
              {"inventor_tallies", profile.inventor_tallies},
              {"assignee_tallies", profile.assignee_tallies},
              {"totals", json{{"citing_patents", profile.citing_patents},
                              {"inventor_instances", profile.inventor_instances},
                              {"assignee_instances", profile.assignee_instances}}}};
}

json to_json(const ProfileSummary& summary) {
  json countries = json::array();
  for (const auto& row : summary.countries)
    countries.push_back(json{{"country", row.country},
                             {"inventors", row.inventors},
                             {"inventor_share", row.inventor_share},
                             {"citing_patents", row.citing_patents},
                             {"first_year", optional_int(row.first_year)},
                             {"last_year", optional_int(row.last_year)}});
  json applicants = json::array();
  for (const auto& [country, share] : summary.applicant_shares)
    applicants.push_back(json{{"country", country}, {"share", share}});
  return json{{"countries", std::move(countries)}, {"applicant_shares", std::move(applicants)}};
}

json to_json(const SnapshotSummary& s) {
  return json{{"id", s.id}, {"created_at", s.created_at}, {"page_count", s.page_count},
              {"query_text", s.query_text}};
}

json provenance_json(const Analysis& a) {
  const auto& p = a.retrieval.provenance;
  return json{{"snapshot_id", p.request_hash},
              {"endpoint", p.endpoint},
              {"timestamp", p.timestamp},
              {"page_count", p.page_count},
              {"total_reported", p.total_reported},
              {"warnings", p.warnings},
              {"patents", a.retrieval.patents.size()},
              {"unique_references", a.table.distinct_cited()},
              {"total_edges_in", a.table.total_edges_in},
              {"deduplicated_edges", a.table.deduplicated_edges},
              {"edges_dropped_missing_year", a.table.edges_dropped_missing_year}};
}

json analysis_json(const Analysis& a) {
  return json{{"spectrum", a.spectrum ? to_json(*a.spectrum) : json(nullptr)},
              {"seminal", a.seminal ? to_json(*a.seminal) : json(nullptr)},
              {"seminal_patent", a.seminal_patent ? json{{"patent_id", a.seminal_patent->patent_id},
                                                        {"title", optional_string(a.seminal_patent->title)},
                                                        {"grant_date", optional_string(a.seminal_patent->grant_date)}}
                                                  : json(nullptr)},
              {"no_signal", a.no_signal()},
              {"provenance", provenance_json(a)}};
}

json diffusion_json(const DiffusionProfile& profile, const ProfileSummary& summary,
                    const Provenance& provenance) {
  return json{{"profile", to_json(profile)}, {"summary", to_json(summary)}, {"provenance", to_json(provenance)}};
}

std::string spectrum_csv(const Spectrum& spectrum) {
  std::string out = "year,c_total,median5,f,top_patent_id,top_count,pcs\n";
  for (const auto& p : spectrum.points) {
    out += std::to_string(p.year) + ',' + std::to_string(p.c_total) + ',' + format_real(p.median5) + ',' +
           format_real(p.f) + ',' + csv_field(p.top_patent_id.value_or("")) + ',' +
           std::to_string(p.top_count) + ',' + format_real(p.pcs) + '\n';
  }
  return out;
}

std::string seminal_csv(const SeminalResult& s) {
  std::string co_leaders;
  for (const auto& id : s.co_leaders) co_leaders += (co_leaders.empty() ? "" : " ") + id;
  return "peak_year,patent_id,peak_pcs,peak_top_count,co_leaders\n" + std::to_string(s.peak_year) + ',' +
         csv_field(s.patent_id) + ',' + format_real(s.peak_pcs) + ',' + std::to_string(s.peak_top_count) +
         ',' + csv_field(co_leaders) + '\n';
}

std::string diffusion_csv(const DiffusionProfile& profile) {
  std::string out = "year,country,citing_patents\n";
  for (const auto& [cell, count] : profile.cells)
    out += std::to_string(cell.first) + ',' + csv_field(cell.second) + ',' + std::to_string(count) + '\n';
  return out;
}

std::string snapshots_csv(const std::vector<SnapshotSummary>& summaries) {
  std::string out = "id,created_at,page_count,query_text\n";
  for (const auto& s : summaries)
    out += s.id + ',' + csv_field(s.created_at) + ',' + std::to_string(s.page_count) + ',' +
           csv_field(s.query_text) + '\n';
  return out;
}

std::string spectrum_table(const Analysis& a) {
  std::ostringstream out;
  out << "patents: " << a.retrieval.patents.size() << "  unique references: " << a.table.distinct_cited()
      << "  dropped (no year): " << a.table.edges_dropped_missing_year << '\n';
  if (!a.spectrum) return out.str() + "no signal: no cited references with a grant year\n";
  TextTable table({"year", "c_total", "median5", "f", "top_patent_id", "top_count", "pcs"});
  for (const auto& p : a.spectrum->points)
    table.add({std::to_string(p.year), std::to_string(p.c_total), format_real(p.median5), format_real(p.f),
               p.top_patent_id.value_or("-"), std::to_string(p.top_count), format_real(p.pcs)});
  return out.str() + table.str();
}

std::string seminal_table(const Analysis& a) {
  if (!a.seminal) return "no signal: broaden the query\n";
  const auto& s = *a.seminal;
  std::ostringstream out;
  out << "seminal patent: US" << s.patent_id << "  (peak year " << s.peak_year << ", pcs "
      << format_real(s.peak_pcs) << ", " << s.peak_top_count << " references)\n";
  if (a.seminal_patent && (a.seminal_patent->title || a.seminal_patent->grant_date))
    out << "  " << a.seminal_patent->title.value_or("(untitled)") << "  granted "
        << a.seminal_patent->grant_date.value_or("?") << '\n';
  if (s.co_leaders.size() > 1) {
    out << "tied in peak year:";
    for (const auto& id : s.co_leaders) out << " US" << id;
    out << '\n';
  }
  if (!s.runner_up_years.empty()) {
    TextTable table({"runner-up year", "pcs"});
    for (const auto& [year, pcs] : s.runner_up_years) table.add({std::to_string(year), format_real(pcs)});
    out << table.str();
  }
  return out.str();
}

std::string diffusion_table(const DiffusionProfile& profile, const ProfileSummary& summary) {
  std::ostringstream out;
  out << "patents citing US" << profile.target_patent_id << ": " << profile.citing_patents
      << "  inventor instances: " << profile.inventor_instances << '\n';
  TextTable table({"country", "inventors", "share", "citing_patents", "first_year", "last_year"});
  for (const auto& row : summary.countries)
    table.add({row.country, std::to_string(row.inventors), format_real(row.inventor_share),
               std::to_string(row.citing_patents), row.first_year ? std::to_string(*row.first_year) : "-",
               row.last_year ? std::to_string(*row.last_year) : "-"});
  out << table.str();
  if (!summary.applicant_shares.empty()) {
    TextTable applicants({"applicant country", "share"});
    for (const auto& [country, share] : summary.applicant_shares) applicants.add({country, format_real(share)});
    out << applicants.str();
  }
  return out.str();
}

std::string snapshots_table(const std::vector<SnapshotSummary>& summaries) {
  TextTable table({"id", "created_at", "pages", "query"});
  for (const auto& s : summaries) {
    auto query = s.query_text.size() > 60 ? s.query_text.substr(0, 57) + "..." : s.query_text;
    table.add({s.id.substr(0, 16), s.created_at, std::to_string(s.page_count), query});
  }
  return table.str();
}

}  // namespace pcs
