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

// Live-connection messages. One JSON object per WebSocket text frame, each
// carrying "type" and "v". Unknown fields are ignored on decode.

#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <variant>

#include <json.hpp>

#include "casewall/operation.hpp"
#include "casewall/sync.hpp"
#include "casewall/translucence.hpp"
#include "casewall/types.hpp"
#include "casewall/workspace.hpp"

namespace casewall::wire {

inline constexpr int kWireVersion = 1;
inline constexpr int kTimerMinutes = 50;

// client -> server

struct Hello {
  std::string session;
  Role role = Role::AnalystA;
  std::optional<std::string> token;  // from an HTTP join; absent joins here

  bool operator==(const Hello&) const = default;
};

struct Submit {
  Operation op;

  bool operator==(const Submit&) const = default;
};

// server -> client

struct SnapshotMsg {
  WorkspaceState state;
  Seq seq = 0;
  std::string state_hash;
  Condition condition = Condition::Translucence;
  std::optional<VisualizationState> visualization;
  int timer_minutes = kTimerMinutes;  // advisory only
  std::optional<std::string> token;   // set when hello joined implicitly

  bool operator==(const SnapshotMsg&) const = default;
};

struct Accept {
  Operation op;
  Seq seq = 0;
  std::optional<VisualizationDelta> viz_delta;
  std::string state_hash;

  bool operator==(const Accept&) const = default;
};

struct Reject {
  std::string op_id;
  std::string reason;

  bool operator==(const Reject&) const = default;
};

struct Duplicate {
  std::string op_id;
  Seq seq = 0;

  bool operator==(const Duplicate&) const = default;
};

struct PeerJoined {
  Role role = Role::AnalystA;

  bool operator==(const PeerJoined&) const = default;
};

struct PeerLeft {
  Role role = Role::AnalystA;

  bool operator==(const PeerLeft&) const = default;
};

struct ErrorMsg {
  std::string message;

  bool operator==(const ErrorMsg&) const = default;
};

using Message = std::variant<Hello, Submit, SnapshotMsg, Accept, Reject, Duplicate, PeerJoined, PeerLeft, ErrorMsg>;

class WireError : public Error {
 public:
  using Error::Error;
};

std::string_view type_name(const Message& message);

nlohmann::json to_json(const Message& message);
std::string encode(const Message& message);

/// Throws WireError on bad JSON, unknown type, unsupported version or a
/// malformed body.
Message from_json(const nlohmann::json& j);
Message decode(std::string_view text);

SnapshotMsg snapshot_message(const Snapshot& snapshot, Condition condition);
Accept accept_message(const Broadcast& broadcast);
/// Reply to a submit: Reject or Duplicate, or nullopt when accepted (the
/// submitter then sees the Accept broadcast like every other member).
std::optional<Message> verdict_message(const std::string& op_id, const Verdict& verdict);

}  // namespace casewall::wire
