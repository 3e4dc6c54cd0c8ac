#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "pcs/citation_table.hpp"

namespace pcs {

struct SpectrumPoint {
  int year = 0;
  std::int64_t c_total = 0;  // references to patents granted in `year`
  double median5 = 0.0;      // median of the in-range part of [year-2, year+2]
  double f = 0.0;            // c_total - median5, signed
  std::optional<PatentId> top_patent_id;
  std::int64_t top_count = 0;
  std::vector<PatentId> top_ties;  // every id sharing top_count, ascending
  double pcs = 0.0;                // f * top_count / c_total, 0 when c_total == 0

  friend bool operator==(const SpectrumPoint&, const SpectrumPoint&) = default;
};

// Dense, strictly ascending by year; gap years carry c_total == 0.
struct Spectrum {
  std::vector<SpectrumPoint> points;
  std::string query_provenance;

  const SpectrumPoint* find(int year) const;

  friend bool operator==(const Spectrum&, const Spectrum&) = default;
};

struct SeminalResult {
  int peak_year = 0;
  PatentId patent_id;
  double peak_pcs = 0.0;
  std::int64_t peak_top_count = 0;
  std::vector<std::pair<int, double>> runner_up_years;
  std::vector<PatentId> co_leaders;

  friend bool operator==(const SeminalResult&, const SeminalResult&) = default;
};

// Median of series[index-2 .. index+2] clipped to the series bounds: five
// values in the interior, four next to an end, three at an end (fewer when
// the series itself is shorter). Even-sized windows average the two middles.
double windowed_median(std::span<const std::int64_t> series, std::size_t index);

// Throws Error{empty_input} for a table with no bucketed edges.
Spectrum compute_spectrum(const CitationTable& table, std::string provenance = {});

inline constexpr std::size_t kDefaultRunnerUps = 5;

// Peak = argmax pcs over years with c_total > 0, earliest year on ties.
// Throws Error{no_signal} when no year carries any citation.
SeminalResult select_seminal(const Spectrum& spectrum,
                             std::size_t runner_ups = kDefaultRunnerUps);

}  // namespace pcs
