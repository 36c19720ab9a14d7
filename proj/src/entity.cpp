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

#include "casewall/entity.hpp"

#include <algorithm>
#include <iterator>
#include <cstdio>

namespace casewall {

namespace {

constexpr std::string_view kRunFiller[] = {
    "a",        "an",       "the",       "this",    "that",     "these",   "those",   "he",
    "she",      "they",     "we",        "it",      "his",      "her",     "their",   "our",
    "my",       "your",     "and",       "but",     "or",       "so",      "if",      "then",
    "when",     "while",    "after",     "before",  "on",       "in",      "at",      "of",
    "for",      "to",       "from",      "with",    "by",       "mr",      "mrs",     "ms",
    "dr",       "detective", "officer",  "sergeant", "inspector", "agent", "monday",  "tuesday",
    "wednesday", "thursday", "friday",   "saturday", "sunday",  "january", "february", "april",
    "june",     "july",     "september", "october", "november", "december",
};
// "March", "May" and "August" are ordinary words or names too often to strip.

bool is_blank(char c) { return c == ' ' || c == '\t'; }

bool sentence_initial(std::string_view text, std::size_t begin) {
  std::size_t i = begin;
  while (i > 0 && is_blank(text[i - 1])) --i;
  if (i == 0) return true;
  const char c = text[i - 1];
  return c == '.' || c == '!' || c == '?' || c == '\n' || c == '\r';
}

const std::vector<std::string> kNoOwners;

}  // namespace

std::string_view to_string(EntityOrigin origin) {
  return origin == EntityOrigin::Gazetteer ? "gazetteer" : "heuristic";
}

std::optional<EntityOrigin> parse_origin(std::string_view text) {
  if (text == "gazetteer") return EntityOrigin::Gazetteer;
  if (text == "heuristic") return EntityOrigin::Heuristic;
  return std::nullopt;
}

bool is_run_filler(std::string_view lowercase_word) {
  return std::find(std::begin(kRunFiller), std::end(kRunFiller), lowercase_word) != std::end(kRunFiller);
}

// --- registry ---------------------------------------------------------------

EntityRegistry EntityRegistry::from_gazetteer(const std::vector<PersonEntry>& gazetteer) {
  EntityRegistry registry;
  for (const auto& p : gazetteer) {
    registry.add({p.entity_id, p.canonical_name, p.aliases, EntityOrigin::Gazetteer});
  }
  return registry;
}

const PersonEntity* EntityRegistry::find(std::string_view entity_id) const {
  auto it = by_id_.find(std::string(entity_id));
  return it == by_id_.end() ? nullptr : &entities_[it->second];
}

std::optional<std::string> EntityRegistry::lookup_name(std::string_view name) const {
  auto it = by_name_.find(text::normalize_name(name));
  if (it == by_name_.end()) return std::nullopt;
  return entities_[it->second].entity_id;
}

const std::vector<std::string>& EntityRegistry::owners_of_word(std::string_view word) const {
  auto it = by_word_.find(text::to_lower(word));
  return it == by_word_.end() ? kNoOwners : it->second;
}

const std::vector<EntityRegistry::NameEntry>* EntityRegistry::names_starting_with(
    std::string_view first_word) const {
  auto it = by_first_word_.find(text::to_lower(first_word));
  return it == by_first_word_.end() ? nullptr : &it->second;
}

void EntityRegistry::add(PersonEntity entity) {
  if (entity.entity_id.empty() || text::normalize_name(entity.canonical_name).empty())
    throw Error("entity needs an id and a name");
  if (by_id_.contains(entity.entity_id)) throw Error("duplicate entity id " + entity.entity_id);
  std::vector<std::string> names{text::normalize_name(entity.canonical_name)};
  for (const auto& a : entity.aliases) names.push_back(text::normalize_name(a));
  for (std::size_t i = 0; i < names.size(); ++i) {
    if (names[i].empty() || by_name_.contains(names[i]) ||
        std::find(names.begin(), names.begin() + static_cast<std::ptrdiff_t>(i), names[i]) !=
            names.begin() + static_cast<std::ptrdiff_t>(i))
      throw Error("name '" + names[i] + "' is already registered");
  }

  const std::size_t idx = entities_.size();
  by_id_.emplace(entity.entity_id, idx);
  entities_.push_back(std::move(entity));
  for (const auto& n : names) index(idx, n);
}

void EntityRegistry::index(std::size_t entity_index, const std::string& name) {
  by_name_.emplace(name, entity_index);
  const auto spans = text::words(name);
  if (spans.empty()) return;

  auto& bucket = by_first_word_[name.substr(spans.front().begin, spans.front().size())];
  NameEntry entry{name, entity_index};
  auto pos = std::find_if(bucket.begin(), bucket.end(),
                          [&](const NameEntry& e) { return e.name.size() < name.size(); });
  bucket.insert(pos, std::move(entry));

  const auto& id = entities_[entity_index].entity_id;
  for (const auto& s : spans) {
    auto& owners = by_word_[name.substr(s.begin, s.size())];
    if (std::find(owners.begin(), owners.end(), id) == owners.end()) owners.push_back(id);
  }
}

// --- extraction -------------------------------------------------------------

MentionExtractor::MentionExtractor(const EntityRegistry& registry, ExtractorConfig config)
    : registry_(registry), config_(config) {}

std::vector<Mention> MentionExtractor::extract(std::string_view text) const {
  std::vector<Mention> out;
  const auto ws = text::words(text);
  std::vector<bool> covered(ws.size(), false);

  // Pass 1: registry names, leftmost then longest.
  for (std::size_t i = 0; i < ws.size();) {
    const auto* bucket = registry_.names_starting_with(text.substr(ws[i].begin, ws[i].size()));
    const EntityRegistry::NameEntry* hit = nullptr;
    if (bucket) {
      for (const auto& entry : *bucket) {
        const std::size_t end = ws[i].begin + entry.name.size();
        if (text::matches_at(text, ws[i].begin, entry.name) && text::on_word_boundary(text, ws[i].begin, end)) {
          hit = &entry;
          break;
        }
      }
    }
    if (!hit) {
      ++i;
      continue;
    }
    const text::Span span{ws[i].begin, ws[i].begin + hit->name.size()};
    out.push_back({registry_.entities()[hit->entity_index].entity_id, span,
                   std::string(text.substr(span.begin, span.size())), false, {}});
    while (i < ws.size() && ws[i].begin < span.end) covered[i++] = true;
  }

  if (!config_.capitalized_heuristic && !config_.partial_names) return out;

  // Pass 2: runs of uncovered capitalized words.
  auto capitalized = [&](std::size_t i) {
    return !covered[i] && text::is_capitalized_word(text.substr(ws[i].begin, ws[i].size()));
  };
  auto joined_by_blanks = [&](std::size_t a, std::size_t b) {
    for (std::size_t k = ws[a].end; k < ws[b].begin; ++k) {
      if (!is_blank(text[k])) return false;
    }
    return true;
  };
  auto known_part = [&](std::size_t i) {
    return !registry_.owners_of_word(text.substr(ws[i].begin, ws[i].size())).empty();
  };

  std::vector<Mention> extra;
  for (std::size_t i = 0; i < ws.size();) {
    if (!capitalized(i)) {
      ++i;
      continue;
    }
    std::size_t j = i + 1;
    while (j < ws.size() && capitalized(j) && joined_by_blanks(j - 1, j)) ++j;
    const std::size_t run_end = j;

    std::size_t first = i;
    while (first < run_end && is_run_filler(text::to_lower(text.substr(ws[first].begin, ws[first].size()))))
      ++first;
    const std::size_t len = run_end - first;
    if (len >= 2 && sentence_initial(text, ws[first].begin) && (len >= 3 || known_part(first + 1))) ++first;

    if (run_end - first >= 2) {
      if (config_.capitalized_heuristic) {
        const text::Span span{ws[first].begin, ws[run_end - 1].end};
        std::string surface(text.substr(span.begin, span.size()));
        Mention m{{}, span, surface, false, {}};
        if (auto id = registry_.lookup_name(surface)) {
          m.entity_id = *id;
        } else {
          m.candidate_new = true;
          m.new_name = surface;
          for (auto& c : m.new_name) {
            if (c == '\t') c = ' ';
          }
          m.entity_id = heuristic_entity_id(text::normalize_name(surface));
        }
        extra.push_back(std::move(m));
      }
    } else if (run_end - first == 1 && config_.partial_names) {
      auto word = text.substr(ws[first].begin, ws[first].size());
      auto match = resolve_partial_name(word, registry_);
      if (match.kind == PartialMatch::Kind::Unique) extra.push_back({match.entity_id, ws[first], std::string(word), false, {}});
    }
    i = run_end;
  }

  if (!extra.empty()) {
    out.insert(out.end(), std::make_move_iterator(extra.begin()), std::make_move_iterator(extra.end()));
    std::sort(out.begin(), out.end(), [](const Mention& a, const Mention& b) { return a.span.begin < b.span.begin; });
  }
  return out;
}

std::vector<Mention> extract_mentions(std::string_view text, const EntityRegistry& registry,
                                      const ExtractorConfig& config) {
  return MentionExtractor(registry, config).extract(text);
}

PartialMatch resolve_partial_name(std::string_view token, const EntityRegistry& registry) {
  const auto& owners = registry.owners_of_word(token);
  if (owners.empty()) return PartialMatch::none();
  if (owners.size() > 1) return {PartialMatch::Kind::Ambiguous, {}};
  return {PartialMatch::Kind::Unique, owners.front()};
}

std::string heuristic_entity_id(std::string_view name) {
  std::uint64_t h = 14695981039346656037ULL;
  for (char c : name) {
    h ^= static_cast<unsigned char>(c);
    h *= 1099511628211ULL;
  }
  char buf[19];
  std::snprintf(buf, sizeof buf, "h-%016llx", static_cast<unsigned long long>(h));
  return buf;
}

Registration register_entity(EntityRegistry& registry, std::string_view name, EntityOrigin origin) {
  const auto normalized = text::normalize_name(name);
  if (normalized.empty()) throw Error("cannot register an empty name");
  if (auto id = registry.lookup_name(normalized)) return {*id, false};

  // Keep the caller's casing for display, with whitespace collapsed.
  std::string display;
  bool space = false;
  for (char c : name) {
    if (c == ' ' || c == '\t' || c == '\n' || c == '\r') {
      space = !display.empty();
      continue;
    }
    if (space) display.push_back(' ');
    space = false;
    display.push_back(c);
  }

  std::string id = heuristic_entity_id(normalized);
  for (int suffix = 2; registry.find(id); ++suffix) id = heuristic_entity_id(normalized) + "-" + std::to_string(suffix);
  registry.add({id, display, {}, origin});
  return {id, true};
}

}  // namespace casewall
