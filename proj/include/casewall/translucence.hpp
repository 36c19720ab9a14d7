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

// Suspect visualization derived from workspace state.
//
// The avatar strip starts as four unnamed silhouettes. Once a person is
// named anywhere in the Analysis Space (stickies, chat, hypothesis fields)
// they get an avatar, in order of first mention, followed by a short tail of
// unnamed silhouettes. Each avatar darkens with its mention count, and the
// person named most recently in a hypothesis field is highlighted.
//
// Counts are recomputed from the current text, so editing a name out of a
// sticky lightens that avatar again.

#pragma once

#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "casewall/entity.hpp"
#include "casewall/workspace.hpp"

namespace casewall {

inline constexpr int kInitialPlaceholders = 4;

struct ChannelCounts {
  int sticky = 0;
  int chat = 0;
  int hypothesis = 0;

  int total() const { return sticky + chat + hypothesis; }
  int& operator[](Channel channel);
  int operator[](Channel channel) const;

  bool operator==(const ChannelCounts&) const = default;
};

struct AvatarState {
  std::optional<std::string> entity_id;  // absent for placeholders
  std::string display_name;
  ChannelCounts counts;
  int total_mentions = 0;
  double shade = 0.0;
  bool last_hypothesis_highlight = false;

  bool operator==(const AvatarState&) const = default;
};

struct VisualizationState {
  std::vector<AvatarState> named_avatars;  // first-mention order
  int placeholder_count = kInitialPlaceholders;

  const AvatarState* find(std::string_view entity_id) const;
  const AvatarState* highlighted() const;

  bool operator==(const VisualizationState&) const = default;
};

struct VisualizationConfig {
  int shade_cap = 10;
  int trailing_placeholders = 2;  // shown after the named avatars, at least 1
  ExtractorConfig extractor;      // must match the reducer's
};

/// Per-entity, per-channel mention counts over shared_texts(state).
std::map<std::string, ChannelCounts> mention_counts(const WorkspaceState& state, const ExtractorConfig& extractor);

/// Throws Error when the config is out of range.
VisualizationState derive_visualization(const WorkspaceState& state, const VisualizationConfig& config = {});

/// min(total, cap) / cap. Throws Error when cap < 1.
double shade_function(int total_mentions, int cap);

struct AttentionDistribution {
  std::vector<std::pair<std::string, double>> fractions;  // avatar order
  /// Normalized Shannon entropy in [0, 1]; absent with no named avatars.
  std::optional<double> entropy;
};

AttentionDistribution attention_distribution(const VisualizationState& visualization);

/// Change between two visualizations: the full avatar order plus only the
/// avatars that are new or differ.
struct VisualizationDelta {
  std::vector<std::string> order;
  std::vector<AvatarState> upserts;
  int placeholder_count = kInitialPlaceholders;

  bool operator==(const VisualizationDelta&) const = default;
};

VisualizationDelta diff(const VisualizationState& before, const VisualizationState& after);
/// Throws Error when the delta names an avatar neither side knows.
VisualizationState apply_delta(const VisualizationState& before, const VisualizationDelta& delta);

nlohmann::json to_json(const AvatarState& avatar);
nlohmann::json to_json(const VisualizationState& visualization);
nlohmann::json to_json(const VisualizationDelta& delta);
AvatarState avatar_from_json(const nlohmann::json& j);
VisualizationState visualization_from_json(const nlohmann::json& j);
VisualizationDelta delta_from_json(const nlohmann::json& j);

}  // namespace casewall
