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

#include "casewall/session.hpp"

#include <openssl/rand.h>

#include <algorithm>
#include <chrono>
#include <fstream>
#include <iterator>

namespace casewall {

using json = nlohmann::json;
namespace fs = std::filesystem;

namespace {

using Kind = ServiceError::Kind;

std::int64_t now_seconds() {
  return std::chrono::duration_cast<std::chrono::seconds>(std::chrono::system_clock::now().time_since_epoch())
      .count();
}

fs::path sessions_dir(const fs::path& data_dir) { return data_dir / "sessions"; }
fs::path meta_path(const fs::path& dir) { return dir / "session.json"; }

}  // namespace

std::string random_hex(std::size_t bytes) {
  std::vector<unsigned char> buf(bytes);
  if (RAND_bytes(buf.data(), static_cast<int>(buf.size())) != 1) throw Error("random source failed");
  static constexpr char kHex[] = "0123456789abcdef";
  std::string out;
  out.reserve(bytes * 2);
  for (auto b : buf) {
    out.push_back(kHex[b >> 4]);
    out.push_back(kHex[b & 0xf]);
  }
  return out;
}

json to_json(const SessionInfo& info) {
  json members = json::array();
  for (const auto& m : info.members) members.push_back({{"role", to_string(m.role)}, {"connected", m.connected}});
  return {{"session_id", info.session_id},
          {"corpus_id", info.corpus_id},
          {"condition", to_string(info.condition)},
          {"created_at", info.created_at},
          {"members", std::move(members)},
          {"applied_seq", info.applied_seq},
          {"timer_minutes", wire::kTimerMinutes}};
}

SessionService::SessionService(ServiceOptions options) : options_(std::move(options)) {
  auto add = [&](const fs::path& dir) {
    auto corpus = std::make_shared<const Corpus>(load_corpus(dir));
    if (corpora_.contains(corpus->id())) throw CorpusError("duplicate corpus id", corpus->id());
    graphs_.emplace(corpus->id(), corpus_graph(*corpus));
    corpora_.emplace(corpus->id(), std::move(corpus));
  };
  const auto& root = options_.corpus_root;
  if (fs::exists(root / "manifest.json")) {
    add(root);
  } else if (fs::is_directory(root)) {
    std::vector<fs::path> dirs;
    for (const auto& e : fs::directory_iterator(root))
      if (e.is_directory() && fs::exists(e.path() / "manifest.json")) dirs.push_back(e.path());
    std::sort(dirs.begin(), dirs.end());
    for (const auto& d : dirs) add(d);
  }
  if (corpora_.empty()) throw CorpusError("no corpus found under " + root.string(), "");
  if (options_.data_dir) recover_sessions();
}

SessionService::~SessionService() = default;

void SessionService::recover_sessions() {
  const auto dir = sessions_dir(*options_.data_dir);
  if (!fs::exists(dir)) return;
  for (const auto& e : fs::directory_iterator(dir)) {
    if (!e.is_directory() || !fs::exists(FileLogStore::log_path(e.path()))) continue;
    auto log = FileLogStore::load(e.path());
    auto it = corpora_.find(log.header.corpus_id);
    if (it == corpora_.end())
      throw LogError("session " + log.header.session_id + " needs unknown corpus " + log.header.corpus_id);
    Session s;
    s.id = log.header.session_id;
    s.corpus = it->second;
    if (std::ifstream meta(meta_path(e.path())); meta) {
      try {
        s.created_at = json::parse(meta).value("created_at", std::int64_t{0});
      } catch (const json::exception&) {
        s.created_at = 0;
      }
    }
    auto header = log.header;
    s.sequencer = SessionSequencer::restore(std::move(log), s.corpus, options_.analysis,
                                            std::make_unique<FileLogStore>(e.path(), header));
    sessions_.emplace(s.id, std::move(s));
  }
}

std::unique_ptr<LogStore> SessionService::store_for(const std::string& session_id, const LogHeader& header) const {
  if (!options_.data_dir) return nullptr;
  const auto dir = sessions_dir(*options_.data_dir) / session_id;
  return std::make_unique<FileLogStore>(dir, header);
}

std::vector<std::string> SessionService::corpus_ids() const {
  std::vector<std::string> ids;
  for (const auto& [id, _] : corpora_) ids.push_back(id);
  return ids;
}

std::shared_ptr<const Corpus> SessionService::corpus(const std::string& corpus_id) const {
  auto it = corpora_.find(corpus_id);
  if (it == corpora_.end()) throw ServiceError(Kind::NotFound, "unknown corpus " + corpus_id);
  return it->second;
}

std::string SessionService::create_session(const std::string& corpus_id, Condition condition) {
  auto c = corpus(corpus_id);
  std::lock_guard lock(mu_);
  std::string id;
  do {
    id = random_hex(8);
  } while (sessions_.contains(id));

  Session s;
  s.id = id;
  s.created_at = now_seconds();
  s.corpus = c;
  LogHeader header{id, corpus_id, condition};
  auto store = store_for(id, header);
  if (options_.data_dir) {
    std::ofstream meta(meta_path(sessions_dir(*options_.data_dir) / id));
    meta << json{{"created_at", s.created_at}}.dump() << "\n";
  }
  s.sequencer = std::make_shared<SessionSequencer>(header, c, options_.analysis, std::move(store));
  sessions_.emplace(id, std::move(s));
  return id;
}

SessionService::Session& SessionService::session_locked(const std::string& session_id) {
  auto it = sessions_.find(session_id);
  if (it == sessions_.end()) throw ServiceError(Kind::NotFound, "unknown session " + session_id);
  return it->second;
}

const SessionService::Session& SessionService::session_locked(const std::string& session_id) const {
  return const_cast<SessionService*>(this)->session_locked(session_id);
}

const SessionService::Member& SessionService::member_locked(const Session& session, const std::string& token) const {
  auto it = session.members.find(token);
  if (it == session.members.end()) throw ServiceError(Kind::Forbidden, "not a member of this session");
  return it->second;
}

SessionInfo SessionService::info_locked(const Session& session) const {
  SessionInfo info;
  info.session_id = session.id;
  info.corpus_id = session.corpus->id();
  info.condition = session.sequencer->condition();
  info.created_at = session.created_at;
  for (const auto& [_, m] : session.members) info.members.push_back({m.role, m.connection.has_value()});
  std::sort(info.members.begin(), info.members.end(),
            [](const MemberStatus& a, const MemberStatus& b) { return a.role < b.role; });
  info.applied_seq = session.sequencer->applied_seq();
  return info;
}

std::vector<SessionInfo> SessionService::list_sessions() const {
  std::lock_guard lock(mu_);
  std::vector<SessionInfo> out;
  for (const auto& [_, s] : sessions_) out.push_back(info_locked(s));
  std::sort(out.begin(), out.end(), [](const SessionInfo& a, const SessionInfo& b) {
    return a.created_at != b.created_at ? a.created_at < b.created_at : a.session_id < b.session_id;
  });
  return out;
}

SessionInfo SessionService::session_info(const std::string& session_id) const {
  std::lock_guard lock(mu_);
  return info_locked(session_locked(session_id));
}

void SessionService::notify_peers_locked(const Session& session, Role about, const wire::Message& message) {
  for (auto& [_, c] : connections_) {
    if (c.session_id == session.id && c.role != about) c.sink(message);
  }
}

JoinResult SessionService::join(const std::string& session_id, Role role) {
  std::lock_guard lock(mu_);
  auto& s = session_locked(session_id);
  for (const auto& [_, m] : s.members)
    if (m.role == role) throw ServiceError(Kind::Conflict, "role occupied");

  std::string token;
  do {
    token = random_hex(16);
  } while (s.members.contains(token));
  s.members.emplace(token, Member{role, std::nullopt});
  notify_peers_locked(s, role, wire::PeerJoined{role});

  JoinResult r;
  r.token = token;
  r.role = role;
  r.condition = s.sequencer->condition();
  r.snapshot = s.sequencer->snapshot();
  r.documents = documents_for_role(*s.corpus, role);
  return r;
}

void SessionService::release_locked(Session& session, const std::string& token) {
  auto it = session.members.find(token);
  if (it == session.members.end()) return;
  const Role role = it->second.role;
  if (it->second.connection) {
    if (auto c = connections_.find(*it->second.connection); c != connections_.end()) {
      session.sequencer->detach(c->second.listener);
      connections_.erase(c);
    }
  }
  session.members.erase(it);
  notify_peers_locked(session, role, wire::PeerLeft{role});
}

void SessionService::leave(const std::string& session_id, const std::string& token) {
  std::lock_guard lock(mu_);
  auto& s = session_locked(session_id);
  member_locked(s, token);
  release_locked(s, token);
}

Verdict SessionService::submit(const std::string& session_id, const std::string& token, Operation op) {
  std::shared_ptr<SessionSequencer> seq;
  {
    std::lock_guard lock(mu_);
    const auto& s = session_locked(session_id);
    const auto& m = member_locked(s, token);
    if (op.actor != m.role) throw ServiceError(Kind::Forbidden, "actor is not this member's role");
    seq = s.sequencer;
  }
  return seq->submit(std::move(op));
}

Snapshot SessionService::snapshot(const std::string& session_id) const { return sequencer(session_id)->snapshot(); }

std::shared_ptr<SessionSequencer> SessionService::sequencer(const std::string& session_id) const {
  std::lock_guard lock(mu_);
  return session_locked(session_id).sequencer;
}

std::vector<Document> SessionService::documents(const std::string& session_id, const std::string& token) const {
  std::lock_guard lock(mu_);
  const auto& s = session_locked(session_id);
  return documents_for_role(*s.corpus, member_locked(s, token).role);
}

Document SessionService::fetch_document(const std::string& session_id, const std::string& token,
                                        const std::string& doc_id) const {
  std::lock_guard lock(mu_);
  const auto& s = session_locked(session_id);
  const auto& m = member_locked(s, token);
  const auto* doc = s.corpus->find_document(doc_id);
  if (!doc) throw ServiceError(Kind::NotFound, "unknown document " + doc_id);
  if (!role_can_read(doc->assigned_role, m.role))
    throw ServiceError(Kind::Forbidden, "document not assigned to this analyst");
  return *doc;
}

const ConnectionGraph& SessionService::graph(const std::string& session_id) const {
  std::lock_guard lock(mu_);
  return graphs_.at(session_locked(session_id).corpus->id());
}

std::string SessionService::export_log(const std::string& session_id) const {
  return sequencer(session_id)->export_log();
}

wire::SnapshotMsg SessionService::connect(const std::string& session_id, const std::string& token, MessageSink sink,
                                          ConnectionId& id) {
  std::lock_guard lock(mu_);
  auto& s = session_locked(session_id);
  auto it = s.members.find(token);
  if (it == s.members.end()) throw ServiceError(Kind::Forbidden, "not a member of this session");
  if (it->second.connection) throw ServiceError(Kind::Conflict, "role already connected");

  id = next_connection_++;
  Connection c{session_id, token, it->second.role, sink, 0};
  auto listener = [sink](const Broadcast& b) { sink(wire::accept_message(b)); };
  const auto snap = s.sequencer->attach(c.listener, listener);
  it->second.connection = id;
  connections_.emplace(id, std::move(c));
  return wire::snapshot_message(snap, s.sequencer->condition());
}

void SessionService::disconnect(ConnectionId id) {
  std::lock_guard lock(mu_);
  auto it = connections_.find(id);
  if (it == connections_.end()) return;
  const auto session_id = it->second.session_id;
  const auto token = it->second.token;
  auto s = sessions_.find(session_id);
  if (s == sessions_.end()) {
    connections_.erase(it);
    return;
  }
  release_locked(s->second, token);
}

}  // namespace casewall
