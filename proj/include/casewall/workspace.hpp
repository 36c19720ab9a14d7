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

// Shared Analysis Space state and the reducer that folds operations into it.
//
// Ids are derived from the sequence number of the operation that created the
// item ("s-7" is the sticky created by seq 7), so every replica that applies
// the same log names things identically.

#pragma once

#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "casewall/corpus.hpp"
#include "casewall/entity.hpp"
#include "casewall/operation.hpp"
#include "casewall/text.hpp"
#include "casewall/types.hpp"

namespace casewall {

struct Sticky {
  std::string sticky_id;
  Role author = Role::AnalystA;
  std::string text;
  double x = 0.0;
  double y = 0.0;
  std::optional<std::string> source_annotation_id;
  std::optional<std::string> pile_id;

  bool operator==(const Sticky&) const = default;
};

struct StickyLink {
  std::string link_id;
  std::string from;
  std::string to;
  Role author = Role::AnalystA;

  bool operator==(const StickyLink&) const = default;
};

struct Annotation {
  std::string annotation_id;
  Role author = Role::AnalystA;
  std::string doc_id;
  text::Span span;
  std::string note;

  bool operator==(const Annotation&) const = default;
};

struct ChatMessage {
  std::string message_id;
  Role author = Role::AnalystA;
  std::string text;
  Seq seq = 0;

  bool operator==(const ChatMessage&) const = default;
};

struct Evidence {
  std::string evidence_id;
  Role author = Role::AnalystA;
  std::string text;

  bool operator==(const Evidence&) const = default;
};

/// Every field records who last wrote it so the UI can tint by author.
struct HypothesisEntry {
  std::string hypothesis_id;
  Role author = Role::AnalystA;
  std::string text;
  Role text_author = Role::AnalystA;
  std::vector<Evidence> confirming;
  std::vector<Evidence> disconfirming;
  HypothesisStatus status = HypothesisStatus::Open;
  std::optional<Role> status_author;
  std::string status_comment;
  std::optional<Role> comment_author;

  bool operator==(const HypothesisEntry&) const = default;
};

struct MapMarker {
  std::string marker_id;
  Role author = Role::AnalystA;
  std::string label;
  double x = 0.0;
  double y = 0.0;
  std::optional<std::string> doc_id;

  bool operator==(const MapMarker&) const = default;
};

struct TimelineEvent {
  std::string event_id;
  Role author = Role::AnalystA;
  std::string label;
  double timestamp = 0.0;
  std::optional<std::string> doc_id;

  bool operator==(const TimelineEvent&) const = default;
};

struct WorkspaceState {
  std::vector<Sticky> stickies;
  std::vector<StickyLink> links;
  std::vector<Annotation> annotations;
  std::vector<ChatMessage> chat;
  std::vector<HypothesisEntry> hypotheses;
  std::vector<MapMarker> markers;
  std::vector<TimelineEvent> timeline;

  EntityRegistry registry;
  /// Entities in the order they were first mentioned.
  std::vector<std::string> mention_order;
  /// Entity named last in any hypothesis field.
  std::optional<std::string> last_hypothesis_mention;
  /// Stickies auto-placed from annotations so far; drives spawn offsets.
  std::size_t spawned_stickies = 0;
  Seq applied_seq = 0;

  /// Empty workspace whose registry holds the corpus gazetteer.
  static WorkspaceState initial(const Corpus& corpus);

  const Sticky* find_sticky(std::string_view id) const;
  const HypothesisEntry* find_hypothesis(std::string_view id) const;

  bool operator==(const WorkspaceState&) const = default;
};

struct SpawnColumn {
  double x = -240.0;
  double y0 = 0.0;
  double dy = 60.0;
};

/// Everything the reducer needs besides the state itself.
struct ReducerContext {
  const Corpus* corpus = nullptr;  // annotations are rejected without one
  ExtractorConfig extractor;
  SpawnColumn spawn;
  bool allow_cross_author_edit = true;
};

struct Rejection {
  std::string op_id;
  std::string reason;

  bool operator==(const Rejection&) const = default;
};

struct ApplyResult {
  std::optional<Rejection> rejection;
  /// Mentions found in the text this operation created or changed.
  std::vector<MentionEvent> mentions;

  bool accepted() const { return !rejection.has_value(); }
};

/// Thrown when an operation's seq is not applied_seq + 1. This is a fault in
/// the caller's sequencing, not a content problem.
class SequenceError : public Error {
 public:
  SequenceError(Seq expected, std::optional<Seq> got);
  Seq expected() const { return expected_; }

 private:
  Seq expected_;
};

/// Applies one sequenced operation in place. A rejected operation leaves
/// `state` untouched, including applied_seq.
ApplyResult apply_in_place(WorkspaceState& state, const Operation& op, const ReducerContext& ctx);

struct ApplyOutcome {
  WorkspaceState state;
  ApplyResult result;
};

/// Value-returning form of apply_in_place.
ApplyOutcome apply(const WorkspaceState& state, const Operation& op, const ReducerContext& ctx);

/// Sticky text produced for an annotation: the note followed by the quoted span.
std::string annotation_sticky_text(std::string_view note, std::string_view quote);

struct SharedText {
  Channel channel = Channel::Sticky;
  std::string artifact_id;  // sticky, message or hypothesis id
  std::string field;        // "text", "confirming:<id>", "disconfirming:<id>", "comment"
  std::string text;

  bool operator==(const SharedText&) const = default;
};

/// All current shared text: stickies, then chat, then hypothesis fields, each
/// in creation order.
std::vector<SharedText> shared_texts(const WorkspaceState& state);

/// Plain text form of shared_texts, for clue coverage.
std::vector<std::string> shared_text_strings(const WorkspaceState& state);

nlohmann::json state_to_json(const WorkspaceState& state);
/// Throws Error on malformed input.
WorkspaceState state_from_json(const nlohmann::json& j);

/// Canonical serialization: stable key order, no insignificant whitespace.
std::string snapshot_text(const WorkspaceState& state);
/// SHA-256 of snapshot_text, lowercase hex.
std::string state_hash(const WorkspaceState& state);

}  // namespace casewall
