#include "pcs/spectrum.hpp"

#include <algorithm>
#include <array>

#include "pcs/errors.hpp"

namespace pcs {

const SpectrumPoint* Spectrum::find(int year) const {
  if (points.empty()) return nullptr;
  const auto offset = static_cast<std::int64_t>(year) - points.front().year;
  if (offset < 0 || offset >= static_cast<std::int64_t>(points.size())) return nullptr;
  return &points[static_cast<std::size_t>(offset)];
}

double windowed_median(std::span<const std::int64_t> series, std::size_t index) {
  if (index >= series.size())
    throw Error(ErrorCode::invalid_input, "median window index outside the series");
  const std::size_t first = index >= 2 ? index - 2 : 0;
  const std::size_t last = std::min(index + 2, series.size() - 1);
  std::array<std::int64_t, 5> window{};
  const std::size_t n = last - first + 1;
  std::copy_n(series.begin() + static_cast<std::ptrdiff_t>(first), n, window.begin());
  auto* mid = window.begin() + n / 2;
  std::nth_element(window.begin(), mid, window.begin() + n);
  if (n % 2 == 1) return static_cast<double>(*mid);
  const auto lower = *std::max_element(window.begin(), mid);
  return (static_cast<double>(lower) + static_cast<double>(*mid)) / 2.0;
}

Spectrum compute_spectrum(const CitationTable& table, std::string provenance) {
  if (table.empty())
    throw Error(ErrorCode::empty_input,
                "no citations with a known grant year; nothing to build a spectrum from");

  const int first_year = table.buckets.begin()->first;
  const int last_year = table.buckets.rbegin()->first;
  const auto years = static_cast<std::size_t>(last_year - first_year + 1);

  Spectrum spectrum;
  spectrum.query_provenance = std::move(provenance);
  spectrum.points.resize(years);
  std::vector<std::int64_t> totals(years, 0);

  for (std::size_t i = 0; i < years; ++i) {
    auto& point = spectrum.points[i];
    point.year = first_year + static_cast<int>(i);
    const auto bucket = table.buckets.find(point.year);
    if (bucket == table.buckets.end()) continue;
    for (const auto& [id, count] : bucket->second) {
      point.c_total += count;
      if (count > point.top_count) {
        point.top_count = count;
        point.top_ties.assign({id});
      } else if (count == point.top_count) {
        point.top_ties.push_back(id);  // map order keeps ties ascending
      }
    }
    point.top_patent_id = point.top_ties.front();
    totals[i] = point.c_total;
  }

  for (std::size_t i = 0; i < years; ++i) {
    auto& point = spectrum.points[i];
    point.median5 = windowed_median(totals, i);
    point.f = static_cast<double>(point.c_total) - point.median5;
    point.pcs = point.c_total == 0
                    ? 0.0
                    : point.f * static_cast<double>(point.top_count) /
                          static_cast<double>(point.c_total);
  }
  return spectrum;
}

SeminalResult select_seminal(const Spectrum& spectrum, std::size_t runner_ups) {
  std::vector<const SpectrumPoint*> candidates;
  for (const auto& point : spectrum.points)
    if (point.c_total > 0) candidates.push_back(&point);
  if (candidates.empty())
    throw Error(ErrorCode::no_signal,
                "the spectrum has no cited references; broaden the query");

  // Points are ascending by year, so a stable sort breaks pcs ties by year.
  std::stable_sort(candidates.begin(), candidates.end(),
                   [](const SpectrumPoint* a, const SpectrumPoint* b) { return a->pcs > b->pcs; });

  const SpectrumPoint& peak = *candidates.front();
  SeminalResult result;
  result.peak_year = peak.year;
  result.patent_id = *peak.top_patent_id;
  result.peak_pcs = peak.pcs;
  result.peak_top_count = peak.top_count;
  result.co_leaders = peak.top_ties;
  for (std::size_t i = 1; i < candidates.size() && result.runner_up_years.size() < runner_ups; ++i)
    result.runner_up_years.emplace_back(candidates[i]->year, candidates[i]->pcs);
  return result;
}

}  // namespace pcs
