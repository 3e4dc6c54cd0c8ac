#pragma once

#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "pcs/analysis.hpp"
#include "pcs/diffusion.hpp"
#include "pcs/snapshot_store.hpp"

namespace pcs {

enum class OutputFormat { json, csv, table };

// Throws Error{invalid_query} for anything but json, csv or table.
OutputFormat parse_output_format(std::string_view name);

// Shortest text that reads back to the same double.
std::string format_real(double value);
// RFC 4180 quoting when the field needs it.
std::string csv_field(std::string_view field);
// Compact, sorted-key JSON plus a trailing newline.
std::string canonical(const nlohmann::json& doc);

nlohmann::json to_json(const SpectrumPoint& point);
nlohmann::json to_json(const Spectrum& spectrum);
nlohmann::json to_json(const SeminalResult& seminal);
nlohmann::json to_json(const DiffusionProfile& profile);
nlohmann::json to_json(const ProfileSummary& summary);
nlohmann::json to_json(const SnapshotSummary& summary);

// Retrieval counts shown next to every result: patents, distinct cited
// patents, edge counters and the provider provenance.
nlohmann::json provenance_json(const Analysis& analysis);

// {"spectrum", "seminal", "seminal_patent", "no_signal", "provenance"};
// spectrum, seminal and seminal_patent are null on no-signal.
nlohmann::json analysis_json(const Analysis& analysis);

// {"profile", "summary", "provenance"}
nlohmann::json diffusion_json(const DiffusionProfile& profile, const ProfileSummary& summary,
                              const Provenance& provenance);

// year,c_total,median5,f,top_patent_id,top_count,pcs
std::string spectrum_csv(const Spectrum& spectrum);
std::string seminal_csv(const SeminalResult& seminal);
// year,country,citing_patents
std::string diffusion_csv(const DiffusionProfile& profile);
std::string snapshots_csv(const std::vector<SnapshotSummary>& summaries);

std::string spectrum_table(const Analysis& analysis);
std::string seminal_table(const Analysis& analysis);
std::string diffusion_table(const DiffusionProfile& profile, const ProfileSummary& summary);
std::string snapshots_table(const std::vector<SnapshotSummary>& summaries);

}  // namespace pcs
