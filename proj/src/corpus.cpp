// Copyright 2026 The Casewall Authors
//
//    Licensed under the Apache License, Version 2.0 (the "License");
//    you may not use this file except in compliance with the License.
//    You may obtain a copy of the License at
//
//        http://www.apache.org/licenses/LICENSE-2.0
//
//    Unless required by applicable law or agreed to in writing, software
//    distributed under the License is distributed on an "AS IS" BASIS,
//    WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
//    See the License for the specific language governing permissions and
//    limitations under the License.

#include "casewall/corpus.hpp"

#include <algorithm>
#include <fstream>
#include <iterator>
#include <sstream>
#include <unordered_set>

#include <json.hpp>

#include "casewall/text.hpp"

namespace casewall {

namespace fs = std::filesystem;
using ordered_json = nlohmann::ordered_json;

namespace {

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  return std::string(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

void write_file(const fs::path& path, std::string_view bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw CorpusError("cannot write " + path.string(), "");
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
}

template <typename T>
T field(const ordered_json& j, const char* key, const std::string& owner) {
  auto it = j.find(key);
  if (it == j.end()) throw CorpusError(owner + ": missing field '" + key + "'", owner);
  try {
    return it->get<T>();
  } catch (const nlohmann::json::exception&) {
    throw CorpusError(owner + ": field '" + key + "' has the wrong type", owner);
  }
}

template <typename Range, typename Key>
void require_unique(const Range& items, Key key, const char* what) {
  std::unordered_set<std::string> seen;
  for (const auto& item : items) {
    const std::string& id = key(item);
    if (id.empty()) throw CorpusError(std::string("empty ") + what, id);
    if (!seen.insert(id).second) throw CorpusError(std::string("duplicate ") + what + ": " + id, id);
  }
}

}  // namespace

Corpus::Corpus(CorpusManifest manifest, std::vector<Document> documents)
    : manifest_(std::move(manifest)), documents_(std::move(documents)) {
  validate(manifest_, documents_);
}

const Document* Corpus::find_document(std::string_view doc_id) const {
  auto it = std::find_if(documents_.begin(), documents_.end(),
                         [&](const Document& d) { return d.doc_id == doc_id; });
  return it == documents_.end() ? nullptr : &*it;
}

const PersonEntry* Corpus::find_person(std::string_view entity_id) const {
  const auto& g = manifest_.gazetteer;
  auto it = std::find_if(g.begin(), g.end(), [&](const PersonEntry& p) { return p.entity_id == entity_id; });
  return it == g.end() ? nullptr : &*it;
}

std::string manifest_to_text(const CorpusManifest& m) {
  ordered_json j;
  j["version"] = m.version;
  j["corpus_id"] = m.corpus_id;
  j["cases"] = ordered_json::array();
  for (const auto& c : m.cases) {
    j["cases"].push_back({{"case_id", c.case_id}, {"title", c.title}, {"is_cold", c.is_cold}});
  }
  j["documents"] = ordered_json::array();
  for (const auto& d : m.documents) {
    j["documents"].push_back({{"doc_id", d.doc_id},
                              {"case_id", d.case_id},
                              {"title", d.title},
                              {"file", d.file},
                              {"assigned_role", std::string(to_string(d.assigned_role))}});
  }
  j["gazetteer"] = ordered_json::array();
  for (const auto& p : m.gazetteer) {
    j["gazetteer"].push_back(
        {{"entity_id", p.entity_id}, {"canonical_name", p.canonical_name}, {"aliases", p.aliases}});
  }
  j["clues"] = ordered_json::array();
  for (const auto& c : m.clues) {
    j["clues"].push_back(
        {{"clue_id", c.clue_id}, {"description", c.description}, {"keyword_sets", c.keyword_sets}});
  }
  j["solution"] = m.solution;
  return j.dump(2) + "\n";
}

CorpusManifest manifest_from_text(std::string_view text) {
  ordered_json j;
  try {
    j = ordered_json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw CorpusError(std::string("manifest is not valid JSON: ") + e.what(), "");
  }
  if (!j.is_object()) throw CorpusError("manifest must be an object", "");

  CorpusManifest m;
  m.version = field<int>(j, "version", "manifest");
  if (m.version != kManifestVersion)
    throw CorpusError("unsupported manifest version " + std::to_string(m.version), "");
  m.corpus_id = field<std::string>(j, "corpus_id", "manifest");

  for (const auto& c : field<ordered_json>(j, "cases", "manifest")) {
    CaseDescriptor cd;
    cd.case_id = field<std::string>(c, "case_id", "case");
    cd.title = field<std::string>(c, "title", cd.case_id);
    cd.is_cold = field<bool>(c, "is_cold", cd.case_id);
    m.cases.push_back(std::move(cd));
  }
  for (const auto& d : field<ordered_json>(j, "documents", "manifest")) {
    DocumentDescriptor dd;
    dd.doc_id = field<std::string>(d, "doc_id", "document");
    dd.case_id = field<std::string>(d, "case_id", dd.doc_id);
    dd.title = field<std::string>(d, "title", dd.doc_id);
    dd.file = d.contains("file") ? field<std::string>(d, "file", dd.doc_id) : "docs/" + dd.doc_id + ".txt";
    const auto role = field<std::string>(d, "assigned_role", dd.doc_id);
    auto parsed = parse_assignment(role);
    if (!parsed) throw CorpusError(dd.doc_id + ": unknown assigned_role '" + role + "'", dd.doc_id);
    dd.assigned_role = *parsed;
    m.documents.push_back(std::move(dd));
  }
  for (const auto& p : field<ordered_json>(j, "gazetteer", "manifest")) {
    PersonEntry pe;
    pe.entity_id = field<std::string>(p, "entity_id", "person");
    pe.canonical_name = field<std::string>(p, "canonical_name", pe.entity_id);
    if (p.contains("aliases")) pe.aliases = field<std::vector<std::string>>(p, "aliases", pe.entity_id);
    m.gazetteer.push_back(std::move(pe));
  }
  for (const auto& c : field<ordered_json>(j, "clues", "manifest")) {
    ClueDescriptor cd;
    cd.clue_id = field<std::string>(c, "clue_id", "clue");
    cd.description = field<std::string>(c, "description", cd.clue_id);
    cd.keyword_sets = field<std::vector<std::vector<std::string>>>(c, "keyword_sets", cd.clue_id);
    m.clues.push_back(std::move(cd));
  }
  m.solution = field<std::string>(j, "solution", "manifest");
  return m;
}

void validate(const CorpusManifest& m, const std::vector<Document>& documents) {
  if (m.corpus_id.empty()) throw CorpusError("empty corpus_id", "");
  require_unique(m.cases, [](const CaseDescriptor& c) -> const std::string& { return c.case_id; }, "case_id");
  require_unique(m.documents, [](const DocumentDescriptor& d) -> const std::string& { return d.doc_id; },
                 "doc_id");
  require_unique(m.gazetteer, [](const PersonEntry& p) -> const std::string& { return p.entity_id; },
                 "entity_id");
  require_unique(m.clues, [](const ClueDescriptor& c) -> const std::string& { return c.clue_id; }, "clue_id");

  std::unordered_set<std::string> case_ids;
  for (const auto& c : m.cases) case_ids.insert(c.case_id);
  for (const auto& d : m.documents) {
    if (!case_ids.contains(d.case_id))
      throw CorpusError("document " + d.doc_id + " references unknown case " + d.case_id, d.doc_id);
  }

  // Names resolve to exactly one person, so they must be unique across the
  // whole gazetteer, not only within one entry.
  auto word_edges = [](const std::string& n) { return text::is_word_byte(n.front()) && text::is_word_byte(n.back()); };
  std::unordered_set<std::string> names;
  for (const auto& p : m.gazetteer) {
    const auto canonical = text::normalize_name(p.canonical_name);
    if (canonical.empty()) throw CorpusError("person " + p.entity_id + " has an empty name", p.entity_id);
    if (!word_edges(canonical))
      throw CorpusError("name of " + p.entity_id + " must start and end with a letter or digit", p.entity_id);
    if (!names.insert(canonical).second)
      throw CorpusError("name '" + p.canonical_name + "' is used by more than one person", p.entity_id);
    for (const auto& alias : p.aliases) {
      const auto a = text::normalize_name(alias);
      if (a.empty() || !word_edges(a))
        throw CorpusError("person " + p.entity_id + " has an empty or malformed alias", p.entity_id);
      if (!names.insert(a).second)
        throw CorpusError("alias '" + alias + "' of " + p.entity_id + " is not unique", p.entity_id);
    }
  }
  if (std::none_of(m.gazetteer.begin(), m.gazetteer.end(),
                   [&](const PersonEntry& p) { return p.entity_id == m.solution; }))
    throw CorpusError("solution references unknown entity " + m.solution, m.solution);

  for (const auto& c : m.clues) {
    if (c.keyword_sets.empty()) throw CorpusError("clue " + c.clue_id + " has no keyword sets", c.clue_id);
    for (const auto& set : c.keyword_sets) {
      if (set.empty()) throw CorpusError("clue " + c.clue_id + " has an empty keyword set", c.clue_id);
    }
  }

  if (documents.size() != m.documents.size()) throw CorpusError("document list does not match manifest", "");
  for (std::size_t i = 0; i < documents.size(); ++i) {
    const auto& d = documents[i];
    const auto& dd = m.documents[i];
    if (d.doc_id != dd.doc_id || d.case_id != dd.case_id || d.title != dd.title ||
        d.assigned_role != dd.assigned_role)
      throw CorpusError("document " + d.doc_id + " does not match its manifest entry", d.doc_id);
    if (d.body.empty()) throw CorpusError("document " + d.doc_id + " is empty", d.doc_id);
  }
}

Corpus load_corpus(const fs::path& root) {
  const auto manifest_path = root / kManifestFileName;
  if (!fs::is_regular_file(manifest_path)) throw CorpusError("manifest not found", "");
  auto manifest = manifest_from_text(read_file(manifest_path));

  std::vector<Document> documents;
  documents.reserve(manifest.documents.size());
  for (const auto& dd : manifest.documents) {
    const auto path = root / dd.file;
    if (!fs::is_regular_file(path))
      throw CorpusError("document file for " + dd.doc_id + " not found: " + dd.file, dd.doc_id);
    documents.push_back({dd.doc_id, dd.case_id, dd.title, read_file(path), dd.assigned_role});
  }
  return Corpus(std::move(manifest), std::move(documents));
}

void save_corpus(const Corpus& corpus, const fs::path& root) {
  fs::create_directories(root);
  write_file(root / kManifestFileName, manifest_to_text(corpus.manifest()));
  const auto& descriptors = corpus.manifest().documents;
  for (std::size_t i = 0; i < descriptors.size(); ++i) {
    const auto path = root / descriptors[i].file;
    fs::create_directories(path.parent_path());
    write_file(path, corpus.documents()[i].body);
  }
}

bool role_can_read(Assignment assignment, Role role) {
  switch (assignment) {
    case Assignment::Both: return true;
    case Assignment::AnalystA: return role == Role::AnalystA;
    case Assignment::AnalystB: return role == Role::AnalystB;
  }
  return false;
}

std::vector<Document> documents_for_role(const Corpus& corpus, Role role) {
  std::vector<Document> out;
  for (const auto& d : corpus.documents()) {
    if (role_can_read(d.assigned_role, role)) out.push_back(d);
  }
  return out;
}

std::vector<Document> documents_for_role(const Corpus& corpus, std::string_view role) {
  return documents_for_role(corpus, require_role(role));
}

std::set<std::string> clue_coverage(const Corpus& corpus, const std::vector<std::string>& shared_texts) {
  std::string joined;
  for (const auto& t : shared_texts) {
    joined += t;
    joined += '\n';
  }
  std::set<std::string> covered;
  for (const auto& clue : corpus.manifest().clues) {
    const bool hit = std::any_of(clue.keyword_sets.begin(), clue.keyword_sets.end(), [&](const auto& set) {
      return std::all_of(set.begin(), set.end(),
                         [&](const std::string& kw) { return text::contains_word(joined, kw); });
    });
    if (hit) covered.insert(clue.clue_id);
  }
  return covered;
}

}  // namespace casewall
