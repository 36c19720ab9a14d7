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

#include "casewall/translucence.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_map>
#include <unordered_set>

namespace casewall {

using json = nlohmann::json;

int& ChannelCounts::operator[](Channel channel) {
  switch (channel) {
    case Channel::Sticky: return sticky;
    case Channel::Chat: return chat;
    case Channel::Hypothesis: return hypothesis;
  }
  return sticky;
}

int ChannelCounts::operator[](Channel channel) const { return const_cast<ChannelCounts&>(*this)[channel]; }

const AvatarState* VisualizationState::find(std::string_view entity_id) const {
  auto it = std::find_if(named_avatars.begin(), named_avatars.end(),
                         [&](const AvatarState& a) { return a.entity_id && *a.entity_id == entity_id; });
  return it == named_avatars.end() ? nullptr : &*it;
}

const AvatarState* VisualizationState::highlighted() const {
  auto it = std::find_if(named_avatars.begin(), named_avatars.end(),
                         [](const AvatarState& a) { return a.last_hypothesis_highlight; });
  return it == named_avatars.end() ? nullptr : &*it;
}

std::map<std::string, ChannelCounts> mention_counts(const WorkspaceState& state, const ExtractorConfig& extractor) {
  std::map<std::string, ChannelCounts> counts;
  const MentionExtractor scan(state.registry, extractor);
  for (const auto& t : shared_texts(state)) {
    for (const auto& m : scan.extract(t.text)) {
      // Candidates are only counted once the reducer has registered them.
      if (m.candidate_new && !state.registry.find(m.entity_id)) continue;
      ++counts[m.entity_id][t.channel];
    }
  }
  return counts;
}

double shade_function(int total_mentions, int cap) {
  if (cap < 1) throw Error("shade cap must be at least 1");
  const int clamped = std::clamp(total_mentions, 0, cap);
  return static_cast<double>(clamped) / static_cast<double>(cap);
}

VisualizationState derive_visualization(const WorkspaceState& state, const VisualizationConfig& config) {
  if (config.trailing_placeholders < 1) throw Error("at least one trailing placeholder is required");
  if (config.shade_cap < 1) throw Error("shade cap must be at least 1");

  const auto counts = mention_counts(state, config.extractor);

  // First-mention order, then any entity the reducer never saw first-hand
  // (possible once the registry has grown) in order of appearance.
  std::vector<std::string> order;
  std::unordered_set<std::string> placed;
  for (const auto& id : state.mention_order) {
    if (counts.contains(id) && placed.insert(id).second) order.push_back(id);
  }
  if (order.size() < counts.size()) {
    const MentionExtractor scan(state.registry, config.extractor);
    for (const auto& t : shared_texts(state)) {
      for (const auto& m : scan.extract(t.text)) {
        if (counts.contains(m.entity_id) && placed.insert(m.entity_id).second) order.push_back(m.entity_id);
      }
    }
  }

  VisualizationState viz;
  for (const auto& id : order) {
    const auto& c = counts.at(id);
    AvatarState a;
    a.entity_id = id;
    const auto* entity = state.registry.find(id);
    a.display_name = entity ? entity->canonical_name : id;
    a.counts = c;
    a.total_mentions = c.total();
    a.shade = shade_function(a.total_mentions, config.shade_cap);
    a.last_hypothesis_highlight = state.last_hypothesis_mention && *state.last_hypothesis_mention == id;
    viz.named_avatars.push_back(std::move(a));
  }
  viz.placeholder_count = viz.named_avatars.empty() ? kInitialPlaceholders : config.trailing_placeholders;
  return viz;
}

AttentionDistribution attention_distribution(const VisualizationState& visualization) {
  AttentionDistribution out;
  const auto& avatars = visualization.named_avatars;
  if (avatars.empty()) return out;

  double total = 0.0;
  for (const auto& a : avatars) total += a.total_mentions;
  double h = 0.0;
  for (const auto& a : avatars) {
    const double f = total > 0.0 ? a.total_mentions / total : 0.0;
    out.fractions.emplace_back(a.entity_id.value_or(""), f);
    if (f > 0.0) h -= f * std::log(f);
  }
  const auto n = avatars.size();
  out.entropy = n > 1 ? std::clamp(h / std::log(static_cast<double>(n)), 0.0, 1.0) : 0.0;
  return out;
}

VisualizationDelta diff(const VisualizationState& before, const VisualizationState& after) {
  VisualizationDelta d;
  d.placeholder_count = after.placeholder_count;
  for (const auto& a : after.named_avatars) {
    d.order.push_back(*a.entity_id);
    const auto* old = before.find(*a.entity_id);
    if (!old || !(*old == a)) d.upserts.push_back(a);
  }
  return d;
}

VisualizationState apply_delta(const VisualizationState& before, const VisualizationDelta& delta) {
  std::unordered_map<std::string, const AvatarState*> upserts;
  for (const auto& a : delta.upserts) {
    if (!a.entity_id) throw Error("visualization delta carries an avatar without an entity");
    upserts.emplace(*a.entity_id, &a);
  }
  VisualizationState out;
  out.placeholder_count = delta.placeholder_count;
  for (const auto& id : delta.order) {
    if (auto it = upserts.find(id); it != upserts.end()) {
      out.named_avatars.push_back(*it->second);
    } else if (const auto* old = before.find(id)) {
      out.named_avatars.push_back(*old);
    } else {
      throw Error("visualization delta references unknown avatar " + id);
    }
  }
  return out;
}

json to_json(const AvatarState& a) {
  return {{"entity_id", a.entity_id ? json(*a.entity_id) : json(nullptr)},
          {"display_name", a.display_name},
          {"counts", {{"sticky", a.counts.sticky}, {"chat", a.counts.chat}, {"hypothesis", a.counts.hypothesis}}},
          {"total_mentions", a.total_mentions},
          {"shade", a.shade},
          {"last_hypothesis_highlight", a.last_hypothesis_highlight}};
}

json to_json(const VisualizationState& v) {
  json avatars = json::array();
  for (const auto& a : v.named_avatars) avatars.push_back(to_json(a));
  return {{"named_avatars", std::move(avatars)}, {"placeholder_count", v.placeholder_count}};
}

json to_json(const VisualizationDelta& d) {
  json upserts = json::array();
  for (const auto& a : d.upserts) upserts.push_back(to_json(a));
  return {{"order", d.order}, {"upserts", std::move(upserts)}, {"placeholder_count", d.placeholder_count}};
}

AvatarState avatar_from_json(const json& j) {
  try {
    AvatarState a;
    if (!j.at("entity_id").is_null()) a.entity_id = j.at("entity_id").get<std::string>();
    a.display_name = j.at("display_name").get<std::string>();
    const auto& c = j.at("counts");
    a.counts = {c.at("sticky").get<int>(), c.at("chat").get<int>(), c.at("hypothesis").get<int>()};
    a.total_mentions = j.at("total_mentions").get<int>();
    a.shade = j.at("shade").get<double>();
    a.last_hypothesis_highlight = j.at("last_hypothesis_highlight").get<bool>();
    return a;
  } catch (const json::exception& e) {
    throw Error(std::string("malformed avatar: ") + e.what());
  }
}

VisualizationState visualization_from_json(const json& j) {
  try {
    VisualizationState v;
    for (const auto& a : j.at("named_avatars")) v.named_avatars.push_back(avatar_from_json(a));
    v.placeholder_count = j.at("placeholder_count").get<int>();
    return v;
  } catch (const json::exception& e) {
    throw Error(std::string("malformed visualization: ") + e.what());
  }
}

VisualizationDelta delta_from_json(const json& j) {
  try {
    VisualizationDelta d;
    d.order = j.at("order").get<std::vector<std::string>>();
    for (const auto& a : j.at("upserts")) d.upserts.push_back(avatar_from_json(a));
    d.placeholder_count = j.at("placeholder_count").get<int>();
    return d;
  } catch (const json::exception& e) {
    throw Error(std::string("malformed visualization delta: ") + e.what());
  }
}

}  // namespace casewall
