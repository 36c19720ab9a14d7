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

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include <json.hpp>

#include "casewall/types.hpp"

namespace casewall {

enum class HypothesisStatus { Open, Accepted, Rejected, NeedsMoreInfo };

std::string_view to_string(HypothesisStatus status);
std::optional<HypothesisStatus> parse_status(std::string_view text);

namespace op {

struct CreateSticky {
  std::string text;
  double x = 0.0;
  double y = 0.0;
  bool operator==(const CreateSticky&) const = default;
};
struct EditSticky {
  std::string sticky_id;
  std::string text;
  bool operator==(const EditSticky&) const = default;
};
struct MoveSticky {
  std::string sticky_id;
  double x = 0.0;
  double y = 0.0;
  bool operator==(const MoveSticky&) const = default;
};
struct LinkStickies {
  std::string from;
  std::string to;
  bool operator==(const LinkStickies&) const = default;
};
/// An empty pile_id clears pile membership.
struct PileStickies {
  std::vector<std::string> sticky_ids;
  std::string pile_id;
  bool operator==(const PileStickies&) const = default;
};
struct DeleteSticky {
  std::string sticky_id;
  bool operator==(const DeleteSticky&) const = default;
};
struct PostChat {
  std::string text;
  bool operator==(const PostChat&) const = default;
};
/// Byte offsets into the document body, end exclusive.
struct CreateAnnotation {
  std::string doc_id;
  std::size_t start = 0;
  std::size_t end = 0;
  std::string note;
  bool operator==(const CreateAnnotation&) const = default;
};
struct CreateHypothesis {
  std::string text;
  bool operator==(const CreateHypothesis&) const = default;
};
struct EditHypothesisText {
  std::string hypothesis_id;
  std::string text;
  bool operator==(const EditHypothesisText&) const = default;
};
struct AddConfirming {
  std::string hypothesis_id;
  std::string text;
  bool operator==(const AddConfirming&) const = default;
};
struct AddDisconfirming {
  std::string hypothesis_id;
  std::string text;
  bool operator==(const AddDisconfirming&) const = default;
};
struct SetHypothesisStatus {
  std::string hypothesis_id;
  HypothesisStatus status = HypothesisStatus::Open;
  bool operator==(const SetHypothesisStatus&) const = default;
};
/// Empty text clears the comment.
struct SetStatusComment {
  std::string hypothesis_id;
  std::string text;
  bool operator==(const SetStatusComment&) const = default;
};
struct AddMapMarker {
  std::string label;
  double x = 0.0;
  double y = 0.0;
  std::string doc_id;  // optional reference, empty for none
  bool operator==(const AddMapMarker&) const = default;
};
struct AddTimelineEvent {
  std::string label;
  double timestamp = 0.0;
  std::string doc_id;
  bool operator==(const AddTimelineEvent&) const = default;
};

}  // namespace op

using Payload = std::variant<op::CreateSticky, op::EditSticky, op::MoveSticky, op::LinkStickies, op::PileStickies,
                             op::DeleteSticky, op::PostChat, op::CreateAnnotation, op::CreateHypothesis,
                             op::EditHypothesisText, op::AddConfirming, op::AddDisconfirming,
                             op::SetHypothesisStatus, op::SetStatusComment, op::AddMapMarker, op::AddTimelineEvent>;

inline constexpr std::size_t kOperationKindCount = std::variant_size_v<Payload>;

std::string_view kind_name(const Payload& payload);
/// Names of every operation kind, in variant order.
const std::vector<std::string_view>& all_kind_names();

/// Kinds that only exist in the translucence condition.
bool is_hypothesis_kind(const Payload& payload);

struct Operation {
  std::string op_id;
  std::string session_id;
  Role actor = Role::AnalystA;
  Payload payload;
  double client_time = 0.0;
  std::optional<Seq> seq;  // absent until the server sequences it

  bool operator==(const Operation&) const = default;
};

/// A submitted operation that does not parse.
class MalformedOperation : public Error {
 public:
  using Error::Error;
};

nlohmann::json to_json(const Operation& op);
/// Unknown fields are ignored. Throws MalformedOperation.
Operation operation_from_json(const nlohmann::json& j);

nlohmann::json payload_to_json(const Payload& payload);
/// Throws MalformedOperation.
Payload payload_from_json(std::string_view kind, const nlohmann::json& payload);

}  // namespace casewall
