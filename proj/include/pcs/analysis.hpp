#pragma once

#include <optional>

#include "pcs/citation_table.hpp"
#include "pcs/patent_record.hpp"
#include "pcs/spectrum.hpp"

namespace pcs {

// Everything computed from one retrieval. `seminal` is empty when the
// spectrum carries no signal (no citations with a known grant year).
struct Analysis {
  RetrievalResult retrieval;
  CitationTable table;
  std::optional<Spectrum> spectrum;
  std::optional<SeminalResult> seminal;
  // Title and grant date of the seminal patent as the citing records report
  // them.
  std::optional<CitedReference> seminal_patent;

  bool no_signal() const noexcept { return !seminal.has_value(); }
};

// Grant date and title of `id`, from its own record when retrieved, else from
// the references citing it.
std::optional<CitedReference> describe_cited(const RetrievalResult& retrieval, const PatentId& id);

Analysis analyze(RetrievalResult retrieval, std::size_t runner_ups = kDefaultRunnerUps);

}  // namespace pcs
