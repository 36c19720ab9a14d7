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

// Person-name mention detection.
//
// Extraction runs in three passes over one text:
//
//  1. Registry names. Every canonical name and alias is matched
//     case-insensitively on word boundaries. Matches are taken left to right,
//     longest first at each start, and never overlap.
//  2. Capitalized runs. Remaining capitalized words (see
//     text::is_capitalized_word) separated only by spaces/tabs form runs.
//     Leading filler words (articles, pronouns, titles, weekdays, months; see
//     is_run_filler) are stripped. If the run then starts a sentence (only
//     spaces/tabs between it and the text start or one of . ! ? newline) its
//     first word is also dropped when the run has three or more words, or
//     has two words and the second is a known name part.
//  3. What is left: a run of two or more words is a candidate new person
//     (heuristic mode only); a single word is resolved as a partial name
//     and yields a mention only when exactly one person owns that word.

#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "casewall/corpus.hpp"
#include "casewall/text.hpp"
#include "casewall/types.hpp"

namespace casewall {

enum class EntityOrigin { Gazetteer, Heuristic };

std::string_view to_string(EntityOrigin origin);
std::optional<EntityOrigin> parse_origin(std::string_view text);

struct PersonEntity {
  std::string entity_id;
  std::string canonical_name;
  std::vector<std::string> aliases;
  EntityOrigin origin = EntityOrigin::Gazetteer;

  bool operator==(const PersonEntity&) const = default;
};

/// Known persons for one session. Append-only; ids are stable once issued.
class EntityRegistry {
 public:
  EntityRegistry() = default;

  static EntityRegistry from_gazetteer(const std::vector<PersonEntry>& gazetteer);

  const std::vector<PersonEntity>& entities() const { return entities_; }
  std::size_t size() const { return entities_.size(); }
  bool empty() const { return entities_.empty(); }

  const PersonEntity* find(std::string_view entity_id) const;

  /// Entity owning a full name or alias (any case, any spacing).
  std::optional<std::string> lookup_name(std::string_view name) const;

  /// Ids of entities whose name or alias contains `word` as a whole word.
  const std::vector<std::string>& owners_of_word(std::string_view word) const;

  /// Appends an entity. Its names must not collide with existing ones.
  void add(PersonEntity entity);

  bool operator==(const EntityRegistry& other) const { return entities_ == other.entities_; }

  struct NameEntry {
    std::string name;  // normalized
    std::size_t entity_index;
  };
  /// Names indexed by their normalized first word, longest name first.
  const std::vector<NameEntry>* names_starting_with(std::string_view first_word) const;

 private:
  void index(std::size_t entity_index, const std::string& name);

  std::vector<PersonEntity> entities_;
  std::unordered_map<std::string, std::size_t> by_id_;
  std::unordered_map<std::string, std::size_t> by_name_;
  std::unordered_map<std::string, std::vector<NameEntry>> by_first_word_;
  std::unordered_map<std::string, std::vector<std::string>> by_word_;
};

struct ExtractorConfig {
  bool capitalized_heuristic = true;
  bool partial_names = true;

  /// Registry names only: no runs, no partial names.
  static ExtractorConfig strict_gazetteer() { return {false, false}; }

  bool operator==(const ExtractorConfig&) const = default;
};

struct Mention {
  std::string entity_id;
  text::Span span;
  std::string surface;
  /// Set for capitalized runs that no registry name covers. `entity_id` is
  /// then the id register_entity would issue and `new_name` the display name.
  bool candidate_new = false;
  std::string new_name;

  bool operator==(const Mention&) const = default;
};

/// One detected mention inside the shared workspace.
struct MentionEvent {
  std::string entity_id;
  Channel channel = Channel::Sticky;
  std::string artifact_id;
  text::Span span;
  std::string surface_text;

  bool operator==(const MentionEvent&) const = default;
};

/// Builds the registry indexes once and scans any number of texts.
class MentionExtractor {
 public:
  MentionExtractor(const EntityRegistry& registry, ExtractorConfig config);

  std::vector<Mention> extract(std::string_view text) const;

 private:
  const EntityRegistry& registry_;
  ExtractorConfig config_;
};

std::vector<Mention> extract_mentions(std::string_view text, const EntityRegistry& registry,
                                      const ExtractorConfig& config = {});

struct PartialMatch {
  enum class Kind { Unique, Ambiguous, None };
  Kind kind = Kind::None;
  std::string entity_id;  // set for Unique

  static PartialMatch none() { return {}; }
  bool operator==(const PartialMatch&) const = default;
};

PartialMatch resolve_partial_name(std::string_view token, const EntityRegistry& registry);

struct Registration {
  std::string entity_id;
  bool created = false;
};

/// Returns the existing id when `name` matches a known name or alias (any
/// case); otherwise appends a new entity with a deterministic id. Throws
/// Error on an empty name.
Registration register_entity(EntityRegistry& registry, std::string_view name, EntityOrigin origin);

/// Deterministic id for a person first seen in free text.
std::string heuristic_entity_id(std::string_view name);

/// Words stripped from the front of a capitalized run (lowercase input).
bool is_run_filler(std::string_view lowercase_word);

}  // namespace casewall
