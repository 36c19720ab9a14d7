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

#include "casewall/operation.hpp"

#include <type_traits>
#include <utility>

namespace casewall {

using json = nlohmann::json;

namespace {

template <typename T>
T get(const json& j, const char* key) {
  auto it = j.find(key);
  if (it == j.end()) throw MalformedOperation(std::string("missing field '") + key + "'");
  if constexpr (std::is_same_v<T, double>) {
    if (!it->is_number()) throw MalformedOperation(std::string("field '") + key + "' must be a number");
  } else if constexpr (std::is_same_v<T, std::size_t> || std::is_same_v<T, Seq>) {
    if (!it->is_number_unsigned()) throw MalformedOperation(std::string("field '") + key + "' must be unsigned");
  } else if constexpr (std::is_same_v<T, std::string>) {
    if (!it->is_string()) throw MalformedOperation(std::string("field '") + key + "' must be a string");
  }
  try {
    return it->get<T>();
  } catch (const json::exception&) {
    throw MalformedOperation(std::string("field '") + key + "' has the wrong type");
  }
}

std::string get_or_empty(const json& j, const char* key) {
  return j.contains(key) ? get<std::string>(j, key) : std::string();
}

template <typename T>
constexpr std::string_view kind_of();

#define CASEWALL_KIND(T) \
  template <>            \
  constexpr std::string_view kind_of<op::T>() { return #T; }
CASEWALL_KIND(CreateSticky)
CASEWALL_KIND(EditSticky)
CASEWALL_KIND(MoveSticky)
CASEWALL_KIND(LinkStickies)
CASEWALL_KIND(PileStickies)
CASEWALL_KIND(DeleteSticky)
CASEWALL_KIND(PostChat)
CASEWALL_KIND(CreateAnnotation)
CASEWALL_KIND(CreateHypothesis)
CASEWALL_KIND(EditHypothesisText)
CASEWALL_KIND(AddConfirming)
CASEWALL_KIND(AddDisconfirming)
CASEWALL_KIND(SetHypothesisStatus)
CASEWALL_KIND(SetStatusComment)
CASEWALL_KIND(AddMapMarker)
CASEWALL_KIND(AddTimelineEvent)
#undef CASEWALL_KIND

json encode(const op::CreateSticky& p) { return {{"text", p.text}, {"x", p.x}, {"y", p.y}}; }
json encode(const op::EditSticky& p) { return {{"sticky_id", p.sticky_id}, {"text", p.text}}; }
json encode(const op::MoveSticky& p) { return {{"sticky_id", p.sticky_id}, {"x", p.x}, {"y", p.y}}; }
json encode(const op::LinkStickies& p) { return {{"from", p.from}, {"to", p.to}}; }
json encode(const op::PileStickies& p) { return {{"sticky_ids", p.sticky_ids}, {"pile_id", p.pile_id}}; }
json encode(const op::DeleteSticky& p) { return {{"sticky_id", p.sticky_id}}; }
json encode(const op::PostChat& p) { return {{"text", p.text}}; }
json encode(const op::CreateAnnotation& p) {
  return {{"doc_id", p.doc_id}, {"start", p.start}, {"end", p.end}, {"note", p.note}};
}
json encode(const op::CreateHypothesis& p) { return {{"text", p.text}}; }
json encode(const op::EditHypothesisText& p) { return {{"hypothesis_id", p.hypothesis_id}, {"text", p.text}}; }
json encode(const op::AddConfirming& p) { return {{"hypothesis_id", p.hypothesis_id}, {"text", p.text}}; }
json encode(const op::AddDisconfirming& p) { return {{"hypothesis_id", p.hypothesis_id}, {"text", p.text}}; }
json encode(const op::SetHypothesisStatus& p) {
  return {{"hypothesis_id", p.hypothesis_id}, {"status", std::string(to_string(p.status))}};
}
json encode(const op::SetStatusComment& p) { return {{"hypothesis_id", p.hypothesis_id}, {"text", p.text}}; }
json encode(const op::AddMapMarker& p) { return {{"label", p.label}, {"x", p.x}, {"y", p.y}, {"doc_id", p.doc_id}}; }
json encode(const op::AddTimelineEvent& p) {
  return {{"label", p.label}, {"timestamp", p.timestamp}, {"doc_id", p.doc_id}};
}

Payload decode(std::string_view kind, const json& j) {
  if (!j.is_object()) throw MalformedOperation("payload must be an object");
  if (kind == "CreateSticky") return op::CreateSticky{get<std::string>(j, "text"), get<double>(j, "x"), get<double>(j, "y")};
  if (kind == "EditSticky") return op::EditSticky{get<std::string>(j, "sticky_id"), get<std::string>(j, "text")};
  if (kind == "MoveSticky")
    return op::MoveSticky{get<std::string>(j, "sticky_id"), get<double>(j, "x"), get<double>(j, "y")};
  if (kind == "LinkStickies") return op::LinkStickies{get<std::string>(j, "from"), get<std::string>(j, "to")};
  if (kind == "PileStickies")
    return op::PileStickies{get<std::vector<std::string>>(j, "sticky_ids"), get_or_empty(j, "pile_id")};
  if (kind == "DeleteSticky") return op::DeleteSticky{get<std::string>(j, "sticky_id")};
  if (kind == "PostChat") return op::PostChat{get<std::string>(j, "text")};
  if (kind == "CreateAnnotation")
    return op::CreateAnnotation{get<std::string>(j, "doc_id"), get<std::size_t>(j, "start"),
                                get<std::size_t>(j, "end"), get_or_empty(j, "note")};
  if (kind == "CreateHypothesis") return op::CreateHypothesis{get<std::string>(j, "text")};
  if (kind == "EditHypothesisText")
    return op::EditHypothesisText{get<std::string>(j, "hypothesis_id"), get<std::string>(j, "text")};
  if (kind == "AddConfirming") return op::AddConfirming{get<std::string>(j, "hypothesis_id"), get<std::string>(j, "text")};
  if (kind == "AddDisconfirming")
    return op::AddDisconfirming{get<std::string>(j, "hypothesis_id"), get<std::string>(j, "text")};
  if (kind == "SetHypothesisStatus") {
    const auto status_text = get<std::string>(j, "status");
    auto status = parse_status(status_text);
    if (!status) throw MalformedOperation("unknown hypothesis status '" + status_text + "'");
    return op::SetHypothesisStatus{get<std::string>(j, "hypothesis_id"), *status};
  }
  if (kind == "SetStatusComment")
    return op::SetStatusComment{get<std::string>(j, "hypothesis_id"), get_or_empty(j, "text")};
  if (kind == "AddMapMarker")
    return op::AddMapMarker{get<std::string>(j, "label"), get<double>(j, "x"), get<double>(j, "y"),
                            get_or_empty(j, "doc_id")};
  if (kind == "AddTimelineEvent")
    return op::AddTimelineEvent{get<std::string>(j, "label"), get<double>(j, "timestamp"), get_or_empty(j, "doc_id")};
  throw MalformedOperation("unknown operation kind '" + std::string(kind) + "'");
}

}  // namespace

std::string_view to_string(HypothesisStatus status) {
  switch (status) {
    case HypothesisStatus::Open: return "open";
    case HypothesisStatus::Accepted: return "accepted";
    case HypothesisStatus::Rejected: return "rejected";
    case HypothesisStatus::NeedsMoreInfo: return "needs_more_info";
  }
  return "open";
}

std::optional<HypothesisStatus> parse_status(std::string_view text) {
  if (text == "open") return HypothesisStatus::Open;
  if (text == "accepted") return HypothesisStatus::Accepted;
  if (text == "rejected") return HypothesisStatus::Rejected;
  if (text == "needs_more_info") return HypothesisStatus::NeedsMoreInfo;
  return std::nullopt;
}

std::string_view kind_name(const Payload& payload) {
  return std::visit([](const auto& p) { return kind_of<std::decay_t<decltype(p)>>(); }, payload);
}

const std::vector<std::string_view>& all_kind_names() {
  static const std::vector<std::string_view> names = [] {
    std::vector<std::string_view> out;
    [&]<std::size_t... I>(std::index_sequence<I...>) {
      (out.push_back(kind_of<std::variant_alternative_t<I, Payload>>()), ...);
    }(std::make_index_sequence<kOperationKindCount>{});
    return out;
  }();
  return names;
}

bool is_hypothesis_kind(const Payload& payload) {
  return std::holds_alternative<op::CreateHypothesis>(payload) ||
         std::holds_alternative<op::EditHypothesisText>(payload) ||
         std::holds_alternative<op::AddConfirming>(payload) ||
         std::holds_alternative<op::AddDisconfirming>(payload) ||
         std::holds_alternative<op::SetHypothesisStatus>(payload) ||
         std::holds_alternative<op::SetStatusComment>(payload);
}

json payload_to_json(const Payload& payload) {
  return std::visit([](const auto& p) { return encode(p); }, payload);
}

Payload payload_from_json(std::string_view kind, const json& payload) { return decode(kind, payload); }

json to_json(const Operation& op) {
  json j{{"op_id", op.op_id},
         {"session_id", op.session_id},
         {"actor", std::string(to_string(op.actor))},
         {"kind", std::string(kind_name(op.payload))},
         {"payload", payload_to_json(op.payload)},
         {"client_time", op.client_time}};
  if (op.seq) j["seq"] = *op.seq;
  return j;
}

Operation operation_from_json(const json& j) {
  if (!j.is_object()) throw MalformedOperation("operation must be an object");
  Operation op;
  op.op_id = get<std::string>(j, "op_id");
  if (op.op_id.empty()) throw MalformedOperation("empty op_id");
  op.session_id = get_or_empty(j, "session_id");
  const auto actor = get<std::string>(j, "actor");
  auto role = parse_role(actor);
  if (!role) throw MalformedOperation("unknown actor '" + actor + "'");
  op.actor = *role;
  const auto kind = get<std::string>(j, "kind");
  auto it = j.find("payload");
  if (it == j.end()) throw MalformedOperation("missing field 'payload'");
  op.payload = decode(kind, *it);
  if (j.contains("client_time")) op.client_time = get<double>(j, "client_time");
  if (j.contains("seq") && !j["seq"].is_null()) op.seq = get<Seq>(j, "seq");
  return op;
}

}  // namespace casewall
