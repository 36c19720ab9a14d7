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

#include "casewall/wire.hpp"

namespace casewall::wire {

using json = nlohmann::json;

namespace {

template <class... Fs>
struct Overload : Fs... {
  using Fs::operator()...;
};
template <class... Fs>
Overload(Fs...) -> Overload<Fs...>;

json envelope(std::string_view type) { return json{{"type", type}, {"v", kWireVersion}}; }

Role role_field(const json& j, const char* key) {
  auto role = parse_role(j.at(key).get<std::string>());
  if (!role) throw WireError(std::string("unknown role in '") + key + "'");
  return *role;
}

}  // namespace

std::string_view type_name(const Message& message) {
  return std::visit(Overload{
                        [](const Hello&) { return std::string_view("hello"); },
                        [](const Submit&) { return std::string_view("submit"); },
                        [](const SnapshotMsg&) { return std::string_view("snapshot"); },
                        [](const Accept&) { return std::string_view("accept"); },
                        [](const Reject&) { return std::string_view("reject"); },
                        [](const Duplicate&) { return std::string_view("duplicate"); },
                        [](const PeerJoined&) { return std::string_view("peer_joined"); },
                        [](const PeerLeft&) { return std::string_view("peer_left"); },
                        [](const ErrorMsg&) { return std::string_view("error"); },
                    },
                    message);
}

json to_json(const Message& message) {
  json j = envelope(type_name(message));
  std::visit(Overload{
                 [&](const Hello& m) {
                   j["session"] = m.session;
                   j["role"] = to_string(m.role);
                   if (m.token) j["token"] = *m.token;
                 },
                 [&](const Submit& m) { j["op"] = casewall::to_json(m.op); },
                 [&](const SnapshotMsg& m) {
                   j["state"] = state_to_json(m.state);
                   j["seq"] = m.seq;
                   j["state_hash"] = m.state_hash;
                   j["condition"] = to_string(m.condition);
                   j["visualization"] = m.visualization ? casewall::to_json(*m.visualization) : json(nullptr);
                   j["timer_minutes"] = m.timer_minutes;
                   if (m.token) j["token"] = *m.token;
                 },
                 [&](const Accept& m) {
                   j["op"] = casewall::to_json(m.op);
                   j["seq"] = m.seq;
                   j["viz_delta"] = m.viz_delta ? casewall::to_json(*m.viz_delta) : json(nullptr);
                   j["state_hash"] = m.state_hash;
                 },
                 [&](const Reject& m) {
                   j["op_id"] = m.op_id;
                   j["reason"] = m.reason;
                 },
                 [&](const Duplicate& m) {
                   j["op_id"] = m.op_id;
                   j["seq"] = m.seq;
                 },
                 [&](const PeerJoined& m) { j["role"] = to_string(m.role); },
                 [&](const PeerLeft& m) { j["role"] = to_string(m.role); },
                 [&](const ErrorMsg& m) { j["message"] = m.message; },
             },
             message);
  return j;
}

std::string encode(const Message& message) { return to_json(message).dump(); }

Message from_json(const json& j) {
  if (!j.is_object()) throw WireError("message must be a JSON object");
  std::string type;
  try {
    type = j.at("type").get<std::string>();
  } catch (const json::exception&) {
    throw WireError("message has no 'type'");
  }
  if (j.contains("v") && (!j["v"].is_number_integer() || j["v"].get<int>() != kWireVersion))
    throw WireError("unsupported message version");

  try {
    if (type == "hello") {
      Hello m{j.at("session").get<std::string>(), role_field(j, "role"), std::nullopt};
      if (j.contains("token") && !j["token"].is_null()) m.token = j["token"].get<std::string>();
      return m;
    }
    if (type == "submit") return Submit{operation_from_json(j.at("op"))};
    if (type == "snapshot") {
      SnapshotMsg m;
      m.state = state_from_json(j.at("state"));
      m.seq = j.at("seq").get<Seq>();
      m.state_hash = j.at("state_hash").get<std::string>();
      auto c = parse_condition(j.at("condition").get<std::string>());
      if (!c) throw WireError("unknown condition");
      m.condition = *c;
      if (j.contains("visualization") && !j["visualization"].is_null())
        m.visualization = visualization_from_json(j["visualization"]);
      m.timer_minutes = j.value("timer_minutes", kTimerMinutes);
      if (j.contains("token") && !j["token"].is_null()) m.token = j["token"].get<std::string>();
      return m;
    }
    if (type == "accept") {
      Accept m;
      m.op = operation_from_json(j.at("op"));
      m.seq = j.at("seq").get<Seq>();
      if (j.contains("viz_delta") && !j["viz_delta"].is_null()) m.viz_delta = delta_from_json(j["viz_delta"]);
      m.state_hash = j.at("state_hash").get<std::string>();
      return m;
    }
    if (type == "reject") return Reject{j.at("op_id").get<std::string>(), j.at("reason").get<std::string>()};
    if (type == "duplicate") return Duplicate{j.at("op_id").get<std::string>(), j.at("seq").get<Seq>()};
    if (type == "peer_joined") return PeerJoined{role_field(j, "role")};
    if (type == "peer_left") return PeerLeft{role_field(j, "role")};
    if (type == "error") return ErrorMsg{j.at("message").get<std::string>()};
  } catch (const WireError&) {
    throw;
  } catch (const json::exception& e) {
    throw WireError("malformed " + type + " message: " + e.what());
  } catch (const Error& e) {
    throw WireError("malformed " + type + " message: " + e.what());
  }
  throw WireError("unknown message type '" + type + "'");
}

Message decode(std::string_view text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception&) {
    throw WireError("message is not valid JSON");
  }
  return from_json(j);
}

SnapshotMsg snapshot_message(const Snapshot& snapshot, Condition condition) {
  SnapshotMsg m;
  m.state = snapshot.state;
  m.seq = snapshot.applied_seq;
  m.state_hash = snapshot.state_hash;
  m.condition = condition;
  m.visualization = snapshot.visualization;
  return m;
}

Accept accept_message(const Broadcast& broadcast) {
  return Accept{broadcast.op, broadcast.op.seq.value_or(0), broadcast.viz_delta, broadcast.state_hash};
}

std::optional<Message> verdict_message(const std::string& op_id, const Verdict& verdict) {
  switch (verdict.kind) {
    case Verdict::Kind::Accepted: return std::nullopt;
    case Verdict::Kind::Rejected: return Reject{op_id, verdict.reason};
    case Verdict::Kind::Duplicate: return Duplicate{op_id, verdict.seq};
  }
  return std::nullopt;
}

}  // namespace casewall::wire
