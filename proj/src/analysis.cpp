#include "pcs/analysis.hpp"

#include "pcs/errors.hpp"

namespace pcs {

std::optional<CitedReference> describe_cited(const RetrievalResult& retrieval, const PatentId& id) {
  std::optional<CitedReference> found;
  for (const auto& patent : retrieval.patents) {
    if (patent.patent_id == id)
      return CitedReference{id, patent.grant_date.empty() ? std::nullopt : std::optional(patent.grant_date),
                            patent.title.empty() ? std::nullopt : std::optional(patent.title)};
    for (const auto& ref : patent.cited) {
      if (ref.patent_id != id) continue;
      if (!found) found = ref;
      if (!found->title && ref.title) found->title = ref.title;
      if (!found->grant_date && ref.grant_date) found->grant_date = ref.grant_date;
    }
  }
  return found;
}

Analysis analyze(RetrievalResult retrieval, std::size_t runner_ups) {
  Analysis analysis;
  analysis.table = build_citation_table(retrieval.citations);
  if (!analysis.table.empty()) {
    analysis.spectrum = compute_spectrum(analysis.table, retrieval.provenance.request_hash);
    analysis.seminal = select_seminal(*analysis.spectrum, runner_ups);
    analysis.seminal_patent = describe_cited(retrieval, analysis.seminal->patent_id);
  }
  analysis.retrieval = std::move(retrieval);
  return analysis;
}

}  // namespace pcs
