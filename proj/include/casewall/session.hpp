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

// Session registry: corpora, sessions, roles and live connections.
//
// Transport-free. The HTTP/WebSocket server is a thin adapter over this
// class, and tests drive it directly.
//
// A role is held by whoever joined it, identified by a bearer token, until
// they leave or their live connection closes. Sessions with a data directory
// survive restarts; memberships do not.

#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "casewall/corpus.hpp"
#include "casewall/graph.hpp"
#include "casewall/sync.hpp"
#include "casewall/types.hpp"
#include "casewall/wire.hpp"

namespace casewall {

class ServiceError : public Error {
 public:
  enum class Kind { NotFound, Conflict, Forbidden, BadRequest };

  ServiceError(Kind kind, const std::string& message) : Error(message), kind_(kind) {}
  Kind kind() const { return kind_; }

 private:
  Kind kind_;
};

struct MemberStatus {
  Role role = Role::AnalystA;
  bool connected = false;
};

struct SessionInfo {
  std::string session_id;
  std::string corpus_id;
  Condition condition = Condition::Translucence;
  std::int64_t created_at = 0;  // unix seconds
  std::vector<MemberStatus> members;  // occupied roles only
  Seq applied_seq = 0;
};

nlohmann::json to_json(const SessionInfo& info);

struct JoinResult {
  std::string token;
  Role role = Role::AnalystA;
  Condition condition = Condition::Translucence;
  Snapshot snapshot;
  std::vector<Document> documents;  // readable by this role, manifest order
};

struct ServiceOptions {
  std::filesystem::path corpus_root;  // a corpus directory or a directory of them
  std::optional<std::filesystem::path> data_dir;  // absent: in-memory sessions
  AnalysisConfig analysis;
};

class SessionService {
 public:
  using MessageSink = std::function<void(const wire::Message&)>;
  using ConnectionId = std::uint64_t;

  /// Loads every corpus and recovers persisted sessions. Throws CorpusError
  /// or LogError.
  explicit SessionService(ServiceOptions options);
  ~SessionService();

  std::vector<std::string> corpus_ids() const;
  std::shared_ptr<const Corpus> corpus(const std::string& corpus_id) const;

  std::string create_session(const std::string& corpus_id, Condition condition);
  std::vector<SessionInfo> list_sessions() const;
  SessionInfo session_info(const std::string& session_id) const;

  /// Throws Conflict("role occupied") when the role is held.
  JoinResult join(const std::string& session_id, Role role);
  void leave(const std::string& session_id, const std::string& token);

  /// The operation's actor must be the token's role.
  Verdict submit(const std::string& session_id, const std::string& token, Operation op);

  Snapshot snapshot(const std::string& session_id) const;
  /// Documents the token's role may read, manifest order.
  std::vector<Document> documents(const std::string& session_id, const std::string& token) const;
  /// Throws Forbidden for a document assigned only to the other role.
  Document fetch_document(const std::string& session_id, const std::string& token, const std::string& doc_id) const;
  const ConnectionGraph& graph(const std::string& session_id) const;
  std::string export_log(const std::string& session_id) const;
  std::shared_ptr<SessionSequencer> sequencer(const std::string& session_id) const;

  /// Binds a live connection to a joined role. From here on `sink` receives
  /// accept and peer messages; the returned snapshot precedes them all.
  wire::SnapshotMsg connect(const std::string& session_id, const std::string& token, MessageSink sink,
                            ConnectionId& id);
  /// Closing a live connection releases its role.
  void disconnect(ConnectionId id);

 private:
  struct Member {
    Role role;
    std::optional<ConnectionId> connection;
  };
  struct Connection {
    std::string session_id;
    std::string token;
    Role role;
    MessageSink sink;
    SessionSequencer::ListenerId listener = 0;
  };
  struct Session {
    std::string id;
    std::int64_t created_at = 0;
    std::shared_ptr<const Corpus> corpus;
    std::shared_ptr<SessionSequencer> sequencer;
    std::map<std::string, Member> members;  // by token
  };

  Session& session_locked(const std::string& session_id);
  const Session& session_locked(const std::string& session_id) const;
  const Member& member_locked(const Session& session, const std::string& token) const;
  SessionInfo info_locked(const Session& session) const;
  void release_locked(Session& session, const std::string& token);
  void notify_peers_locked(const Session& session, Role about, const wire::Message& message);
  std::unique_ptr<LogStore> store_for(const std::string& session_id, const LogHeader& header) const;
  void recover_sessions();

  ServiceOptions options_;
  std::map<std::string, std::shared_ptr<const Corpus>> corpora_;
  std::map<std::string, ConnectionGraph> graphs_;  // by corpus id

  mutable std::mutex mu_;
  std::map<std::string, Session> sessions_;
  std::map<ConnectionId, Connection> connections_;
  ConnectionId next_connection_ = 1;
};

std::string random_hex(std::size_t bytes);

}  // namespace casewall
