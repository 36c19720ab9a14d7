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

#pragma once

#include <filesystem>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "casewall/types.hpp"

namespace casewall {

struct CaseDescriptor {
  std::string case_id;
  std::string title;
  bool is_cold = false;

  bool operator==(const CaseDescriptor&) const = default;
};

struct DocumentDescriptor {
  std::string doc_id;
  std::string case_id;
  std::string title;
  std::string file;  // relative to the corpus root
  Assignment assigned_role = Assignment::Both;

  bool operator==(const DocumentDescriptor&) const = default;
};

struct PersonEntry {
  std::string entity_id;
  std::string canonical_name;
  std::vector<std::string> aliases;

  bool operator==(const PersonEntry&) const = default;
};

/// A clue counts as surfaced when every keyword of any one set appears in
/// the shared text.
struct ClueDescriptor {
  std::string clue_id;
  std::string description;
  std::vector<std::vector<std::string>> keyword_sets;

  bool operator==(const ClueDescriptor&) const = default;
};

struct CorpusManifest {
  int version = 1;
  std::string corpus_id;
  std::vector<CaseDescriptor> cases;
  std::vector<DocumentDescriptor> documents;
  std::vector<PersonEntry> gazetteer;
  std::vector<ClueDescriptor> clues;
  std::string solution;  // entity_id of the culprit

  bool operator==(const CorpusManifest&) const = default;
};

struct Document {
  std::string doc_id;
  std::string case_id;
  std::string title;
  std::string body;
  Assignment assigned_role = Assignment::Both;

  bool operator==(const Document&) const = default;
};

/// Thrown by load/validate. `offending_id` names the id that failed, or is
/// empty for whole-corpus problems such as a missing manifest.
class CorpusError : public Error {
 public:
  CorpusError(std::string message, std::string offending_id)
      : Error(std::move(message)), offending_id_(std::move(offending_id)) {}

  const std::string& offending_id() const { return offending_id_; }

 private:
  std::string offending_id_;
};

/// Immutable after load. Documents are kept in manifest order.
class Corpus {
 public:
  Corpus(CorpusManifest manifest, std::vector<Document> documents);

  const CorpusManifest& manifest() const { return manifest_; }
  const std::string& id() const { return manifest_.corpus_id; }
  const std::vector<Document>& documents() const { return documents_; }

  const Document* find_document(std::string_view doc_id) const;
  const PersonEntry* find_person(std::string_view entity_id) const;

 private:
  CorpusManifest manifest_;
  std::vector<Document> documents_;
};

inline constexpr std::string_view kManifestFileName = "manifest.json";
inline constexpr int kManifestVersion = 1;

/// Reads `<root>/manifest.json` and every referenced document file, then
/// validates. Throws CorpusError.
Corpus load_corpus(const std::filesystem::path& root);

/// Writes the manifest and document files under `root`. The output of
/// load_corpus(save_corpus(c)) compares equal to `c`, and saving a loaded
/// corpus reproduces the files byte for byte when they were written by this
/// function.
void save_corpus(const Corpus& corpus, const std::filesystem::path& root);

/// Checks every manifest invariant. Throws CorpusError naming the id.
void validate(const CorpusManifest& manifest, const std::vector<Document>& documents);

std::string manifest_to_text(const CorpusManifest& manifest);
CorpusManifest manifest_from_text(std::string_view text);

/// Documents visible to `role`: those assigned to it plus those marked both.
std::vector<Document> documents_for_role(const Corpus& corpus, Role role);
/// Overload taking the wire spelling; throws Error on an unknown role.
std::vector<Document> documents_for_role(const Corpus& corpus, std::string_view role);

bool role_can_read(Assignment assignment, Role role);

/// Clues whose keyword sets are fully present (case-insensitive, whole-word)
/// somewhere in the concatenation of `shared_texts`.
std::set<std::string> clue_coverage(const Corpus& corpus,
                                    const std::vector<std::string>& shared_texts);

}  // namespace casewall
