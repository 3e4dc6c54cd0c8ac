#include "pcs/patent_record.hpp"

#include <algorithm>
#include <cctype>
#include <set>

#include "pcs/errors.hpp"

namespace pcs {

using nlohmann::json;

std::optional<int> year_of(std::string_view iso_date) {
  if (iso_date.size() < 4) return std::nullopt;
  int year = 0;
  for (std::size_t i = 0; i < 4; ++i) {
    if (!std::isdigit(static_cast<unsigned char>(iso_date[i]))) return std::nullopt;
    year = year * 10 + (iso_date[i] - '0');
  }
  if (iso_date.size() > 4 && iso_date[4] != '-') return std::nullopt;
  if (year == 0) return std::nullopt;
  return year;
}

std::optional<int> PatentRecord::grant_year() const { return year_of(grant_date); }

bool PatentRecord::cites(const PatentId& target) const {
  return std::any_of(cited.begin(), cited.end(),
                     [&](const CitedReference& ref) { return ref.patent_id == target; });
}

std::vector<CitationRecord> derive_citations(const std::vector<PatentRecord>& patents) {
  std::vector<CitationRecord> out;
  std::set<std::pair<std::string_view, std::string_view>> seen;
  for (const auto& patent : patents) {
    for (const auto& ref : patent.cited) {
      if (ref.patent_id == patent.patent_id) continue;
      if (!seen.emplace(patent.patent_id, ref.patent_id).second) continue;
      std::optional<int> year;
      if (ref.grant_date) year = year_of(*ref.grant_date);
      out.push_back({patent.patent_id, ref.patent_id, year});
    }
  }
  return out;
}

namespace {

json optional_string(const std::optional<std::string>& s) { return s ? json(*s) : json(nullptr); }

std::optional<std::string> read_optional_string(const json& doc, const char* key) {
  auto it = doc.find(key);
  if (it == doc.end() || !it->is_string() || it->get_ref<const std::string&>().empty())
    return std::nullopt;
  return it->get<std::string>();
}

json to_json(const Person& p) { return json{{"name", p.name}, {"country", optional_string(p.country)}}; }

Person person_from_json(const json& doc) {
  return {doc.at("name").get<std::string>(), read_optional_string(doc, "country")};
}

std::string string_or_empty(const json& doc, const char* key) {
  auto it = doc.find(key);
  if (it == doc.end() || !it->is_string()) return {};
  return it->get<std::string>();
}

}  // namespace

json to_json(const PatentRecord& r) {
  json inventors = json::array(), assignees = json::array(), cited = json::array();
  for (const auto& p : r.inventors) inventors.push_back(to_json(p));
  for (const auto& p : r.assignees) assignees.push_back(to_json(p));
  for (const auto& c : r.cited)
    cited.push_back(json{{"patent_id", c.patent_id},
                         {"grant_date", optional_string(c.grant_date)},
                         {"title", optional_string(c.title)}});
  return json{{"patent_id", r.patent_id},
              {"title", r.title},
              {"grant_date", r.grant_date},
              {"inventors", std::move(inventors)},
              {"assignees", std::move(assignees)},
              {"cpc_subgroups", r.cpc_subgroups},
              {"cited", std::move(cited)}};
}

PatentRecord patent_from_json(const json& doc) {
  PatentRecord r;
  r.patent_id = doc.at("patent_id").get<std::string>();
  r.title = doc.at("title").get<std::string>();
  r.grant_date = doc.at("grant_date").get<std::string>();
  for (const auto& p : doc.at("inventors")) r.inventors.push_back(person_from_json(p));
  for (const auto& p : doc.at("assignees")) r.assignees.push_back(person_from_json(p));
  r.cpc_subgroups = doc.at("cpc_subgroups").get<std::vector<std::string>>();
  for (const auto& c : doc.at("cited"))
    r.cited.push_back({c.at("patent_id").get<std::string>(), read_optional_string(c, "grant_date"),
                       read_optional_string(c, "title")});
  return r;
}

json to_json(const Provenance& p) {
  return json{{"request_hash", p.request_hash}, {"endpoint", p.endpoint},
              {"timestamp", p.timestamp},       {"page_count", p.page_count},
              {"total_reported", p.total_reported}, {"warnings", p.warnings}};
}

Provenance provenance_from_json(const json& doc) {
  Provenance p;
  p.request_hash = doc.at("request_hash").get<std::string>();
  p.endpoint = doc.at("endpoint").get<std::string>();
  p.timestamp = doc.at("timestamp").get<std::string>();
  p.page_count = doc.at("page_count").get<int>();
  p.total_reported = doc.at("total_reported").get<std::int64_t>();
  p.warnings = doc.at("warnings").get<std::vector<std::string>>();
  return p;
}

json to_json(const RetrievalResult& r) {
  json patents = json::array(), citations = json::array();
  for (const auto& p : r.patents) patents.push_back(to_json(p));
  for (const auto& c : r.citations) {
    citations.push_back(json{{"citing_id", c.citing_id},
                             {"cited_id", c.cited_id},
                             {"cited_grant_year", c.cited_grant_year ? json(*c.cited_grant_year)
                                                                     : json(nullptr)}});
  }
  return json{{"patents", std::move(patents)},
              {"citations", std::move(citations)},
              {"provenance", to_json(r.provenance)}};
}

RetrievalResult retrieval_from_json(const json& doc) {
  try {
    RetrievalResult r;
    for (const auto& p : doc.at("patents")) r.patents.push_back(patent_from_json(p));
    for (const auto& c : doc.at("citations")) {
      CitationRecord record{c.at("citing_id").get<std::string>(), c.at("cited_id").get<std::string>(),
                            std::nullopt};
      if (!c.at("cited_grant_year").is_null()) record.cited_grant_year = c.at("cited_grant_year").get<int>();
      r.citations.push_back(std::move(record));
    }
    r.provenance = provenance_from_json(doc.at("provenance"));
    return r;
  } catch (const json::exception& e) {
    throw Error(ErrorCode::corruption, std::string("unreadable retrieval result: ") + e.what());
  }
}

namespace {

template <typename Key>
void push_unique(std::vector<Key>& items, Key item) {
  if (std::find(items.begin(), items.end(), item) == items.end()) items.push_back(std::move(item));
}

std::string join_name(const json& doc, const char* first, const char* last) {
  auto a = string_or_empty(doc, first);
  auto b = string_or_empty(doc, last);
  if (a.empty()) return b;
  if (b.empty()) return a;
  return a + " " + b;
}

const json& list_or_empty(const json& doc, const char* key) {
  static const json empty = json::array();
  auto it = doc.find(key);
  return it != doc.end() && it->is_array() ? *it : empty;
}

PatentRecord patent_from_provider(const json& doc) {
  PatentRecord r;
  r.patent_id = normalize_patent_id(string_or_empty(doc, "patent_number"));
  if (r.patent_id.empty()) throw Error(ErrorCode::corruption, "provider record without patent_number");
  r.title = string_or_empty(doc, "patent_title");
  r.grant_date = string_or_empty(doc, "patent_date");
  for (const auto& inv : list_or_empty(doc, "inventors")) {
    push_unique(r.inventors, Person{join_name(inv, "inventor_first_name", "inventor_last_name"),
                                    read_optional_string(inv, "inventor_country")});
  }
  for (const auto& as : list_or_empty(doc, "assignees")) {
    auto name = string_or_empty(as, "assignee_organization");
    if (name.empty()) name = join_name(as, "assignee_first_name", "assignee_last_name");
    Person person{std::move(name), read_optional_string(as, "assignee_country")};
    if (person.name.empty() && !person.country) continue;
    push_unique(r.assignees, std::move(person));
  }
  for (const auto& cpc : list_or_empty(doc, "cpcs")) {
    auto id = string_or_empty(cpc, "cpc_subgroup_id");
    if (!id.empty()) push_unique(r.cpc_subgroups, std::move(id));
  }
  for (const auto& cited : list_or_empty(doc, "cited_patents")) {
    auto id = normalize_patent_id(string_or_empty(cited, "cited_patent_number"));
    if (id.empty() || r.cites(id)) continue;
    r.cited.push_back({std::move(id), read_optional_string(cited, "cited_patent_date"),
                       read_optional_string(cited, "cited_patent_title")});
  }
  return r;
}

}  // namespace

ProviderPage parse_provider_page(std::string_view body) {
  try {
    const auto doc = json::parse(body.begin(), body.end());
    ProviderPage page;
    if (const auto& patents = doc.at("patents"); patents.is_array())
      for (const auto& p : patents) page.patents.push_back(patent_from_provider(p));
    page.count = doc.value("count", static_cast<std::int64_t>(page.patents.size()));
    page.total = doc.value("total_patent_count", page.count);
    return page;
  } catch (const json::exception& e) {
    throw Error(ErrorCode::corruption, std::string("unreadable provider response: ") + e.what());
  }
}

}  // namespace pcs
