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

#include "casewall/sync.hpp"

#include <fcntl.h>
#include <unistd.h>

#include <cerrno>
#include <cstring>
#include <fstream>
#include <iterator>
#include <sstream>

namespace casewall {

using json = nlohmann::json;
namespace fs = std::filesystem;

ReducerContext AnalysisConfig::reducer_context(const Corpus* corpus) const {
  ReducerContext ctx;
  ctx.corpus = corpus;
  ctx.extractor = extractor;
  ctx.allow_cross_author_edit = allow_cross_author_edit;
  return ctx;
}

VisualizationConfig AnalysisConfig::visualization_config() const {
  return {shade_cap, trailing_placeholders, extractor};
}

// --- log text -------------------------------------------------------------------

std::string log_header_line(const LogHeader& header) {
  json j{{"format", kLogFormat},
         {"version", kLogVersion},
         {"session_id", header.session_id},
         {"corpus_id", header.corpus_id},
         {"condition", std::string(to_string(header.condition))}};
  return j.dump() + "\n";
}

std::string log_operation_line(const Operation& op) { return to_json(op).dump() + "\n"; }

std::string log_to_text(const LogHeader& header, const std::vector<Operation>& operations) {
  std::string out = log_header_line(header);
  for (const auto& op : operations) out += log_operation_line(op);
  return out;
}

namespace {

LogHeader parse_header(const std::string& line) {
  json j;
  try {
    j = json::parse(line);
  } catch (const json::exception&) {
    throw LogError("log header is not valid JSON");
  }
  if (!j.is_object() || j.value("format", "") != kLogFormat) throw LogError("not a session log (bad header)");
  if (j.value("version", 0) != kLogVersion) throw LogError("unsupported log version");
  LogHeader h;
  try {
    h.session_id = j.at("session_id").get<std::string>();
    h.corpus_id = j.at("corpus_id").get<std::string>();
    auto c = parse_condition(j.at("condition").get<std::string>());
    if (!c) throw LogError("unknown condition in log header");
    h.condition = *c;
  } catch (const json::exception&) {
    throw LogError("log header is missing fields");
  }
  return h;
}

/// Splits into complete lines; `torn` receives a trailing fragment without a newline.
std::vector<std::string> split_lines(const std::string& text, std::string& torn) {
  std::vector<std::string> lines;
  std::size_t start = 0;
  while (start < text.size()) {
    const auto nl = text.find('\n', start);
    if (nl == std::string::npos) {
      torn = text.substr(start);
      break;
    }
    lines.push_back(text.substr(start, nl - start));
    start = nl + 1;
  }
  return lines;
}

bool blank(const std::string& s) { return s.find_first_not_of(" \t\r") == std::string::npos; }

void write_all(int fd, std::string_view bytes) {
  while (!bytes.empty()) {
    const auto n = ::write(fd, bytes.data(), bytes.size());
    if (n < 0) {
      if (errno == EINTR) continue;
      throw Error(std::string("log write failed: ") + std::strerror(errno));
    }
    bytes.remove_prefix(static_cast<std::size_t>(n));
  }
  if (::fsync(fd) != 0) throw Error(std::string("log fsync failed: ") + std::strerror(errno));
}

int open_append(const fs::path& path) {
  const int fd = ::open(path.c_str(), O_WRONLY | O_APPEND | O_CREAT | O_CLOEXEC, 0644);
  if (fd < 0) throw Error("cannot open " + path.string() + ": " + std::strerror(errno));
  return fd;
}

/// Drops bytes after the last newline, left behind by an interrupted append.
void truncate_torn_tail(const fs::path& path) {
  if (!fs::exists(path)) return;
  std::ifstream in(path, std::ios::binary);
  std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  if (text.empty() || text.back() == '\n') return;
  const auto nl = text.rfind('\n');
  fs::resize_file(path, nl == std::string::npos ? 0 : nl + 1);
}

std::string read_text(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw LogError("cannot read " + path.string());
  return std::string((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
}

}  // namespace

SessionLog parse_log(std::istream& in, bool tolerate_torn_tail) {
  const std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  std::string torn;
  auto lines = split_lines(text, torn);
  if (!torn.empty() && !blank(torn)) {
    if (!tolerate_torn_tail) lines.push_back(torn);
  }
  if (lines.empty()) throw LogError("empty log (missing header)");

  SessionLog log;
  log.header = parse_header(lines.front());
  for (std::size_t i = 1; i < lines.size(); ++i) {
    if (blank(lines[i])) continue;
    try {
      auto op = operation_from_json(json::parse(lines[i]));
      if (!op.seq) throw LogError("log line " + std::to_string(i + 1) + " has no seq");
      log.operations.push_back(std::move(op));
    } catch (const json::exception&) {
      throw LogError("log line " + std::to_string(i + 1) + " is not valid JSON");
    } catch (const MalformedOperation& e) {
      throw LogError("log line " + std::to_string(i + 1) + ": " + e.what());
    }
  }
  check_dense(log.operations);
  return log;
}

SessionLog read_log_file(const fs::path& path, bool tolerate_torn_tail) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw LogError("cannot read log " + path.string());
  return parse_log(in, tolerate_torn_tail);
}

void check_dense(const std::vector<Operation>& operations, Seq first) {
  Seq expected = first;
  for (const auto& op : operations) {
    if (!op.seq || *op.seq > expected) throw LogError("missing seq " + std::to_string(expected));
    if (*op.seq < expected)
      throw LogError("seq " + std::to_string(*op.seq) + " repeated or out of order (expected " +
                     std::to_string(expected) + ")");
    ++expected;
  }
}

WorkspaceState replay(const std::vector<Operation>& operations, WorkspaceState initial, const ReducerContext& ctx) {
  check_dense(operations, initial.applied_seq + 1);
  for (const auto& op : operations) {
    const auto result = apply_in_place(initial, op, ctx);
    if (!result.accepted())
      throw LogError("logged operation seq " + std::to_string(*op.seq) + " does not apply: " + result.rejection->reason);
  }
  return initial;
}

WorkspaceState replay(const std::vector<Operation>& operations, const Corpus& corpus, const AnalysisConfig& config) {
  return replay(operations, WorkspaceState::initial(corpus), config.reducer_context(&corpus));
}

// --- file store -----------------------------------------------------------------

FileLogStore::FileLogStore(fs::path dir, const LogHeader& header) : dir_(std::move(dir)) {
  fs::create_directories(dir_);
  const auto log = log_path(dir_);
  const bool fresh = !fs::exists(log) || fs::file_size(log) == 0;
  if (!fresh) {
    truncate_torn_tail(log);
    truncate_torn_tail(rejections_path(dir_));
  }
  log_fd_ = open_append(log);
  rejections_fd_ = open_append(rejections_path(dir_));
  if (fresh) write_all(log_fd_, log_header_line(header));
}

FileLogStore::~FileLogStore() {
  if (log_fd_ >= 0) ::close(log_fd_);
  if (rejections_fd_ >= 0) ::close(rejections_fd_);
}

void FileLogStore::append(const Operation& op) { write_all(log_fd_, log_operation_line(op)); }

void FileLogStore::append_rejection(const Rejection& rejection) {
  write_all(rejections_fd_, json{{"op_id", rejection.op_id}, {"reason", rejection.reason}}.dump() + "\n");
}

SessionLog FileLogStore::load(const fs::path& dir) {
  auto log = read_log_file(log_path(dir), true);
  const auto rej = rejections_path(dir);
  if (fs::exists(rej)) {
    std::string torn;
    for (const auto& line : split_lines(read_text(rej), torn)) {
      if (blank(line)) continue;
      try {
        auto j = json::parse(line);
        log.rejections.push_back({j.at("op_id").get<std::string>(), j.at("reason").get<std::string>()});
      } catch (const json::exception&) {
        throw LogError("malformed rejection record in " + rej.string());
      }
    }
  }
  return log;
}

// --- sequencer --------------------------------------------------------------------

SessionSequencer::SessionSequencer(LogHeader header, std::shared_ptr<const Corpus> corpus, AnalysisConfig config,
                                   std::unique_ptr<LogStore> store)
    : header_(std::move(header)),
      corpus_(std::move(corpus)),
      config_(config),
      ctx_(config_.reducer_context(corpus_.get())),
      store_(std::move(store)),
      state_(WorkspaceState::initial(*corpus_)),
      visualization_(derive_visualization(state_, config_.visualization_config())) {
  if (header_.corpus_id != corpus_->id()) throw Error("session corpus does not match the loaded corpus");
}

std::unique_ptr<SessionSequencer> SessionSequencer::restore(SessionLog log, std::shared_ptr<const Corpus> corpus,
                                                            AnalysisConfig config, std::unique_ptr<LogStore> store) {
  auto s = std::make_unique<SessionSequencer>(log.header, std::move(corpus), config, std::move(store));
  s->state_ = replay(log.operations, std::move(s->state_), s->ctx_);
  s->visualization_ = derive_visualization(s->state_, s->config_.visualization_config());
  for (const auto& op : log.operations) s->verdicts_[op.op_id] = Verdict::accepted(*op.seq);
  for (const auto& r : log.rejections) s->verdicts_.emplace(r.op_id, Verdict::rejected(r.reason));
  s->log_ = std::move(log.operations);
  s->rejections_ = std::move(log.rejections);
  return s;
}

Verdict SessionSequencer::submit(Operation op) {
  std::lock_guard lock(mu_);
  if (auto it = verdicts_.find(op.op_id); it != verdicts_.end()) {
    if (it->second.kind == Verdict::Kind::Accepted) return Verdict::duplicate(it->second.seq);
    Verdict v = it->second;
    v.repeated = true;
    return v;
  }

  op.session_id = header_.session_id;
  op.seq = state_.applied_seq + 1;

  auto record_rejection = [&](std::string reason) {
    Rejection r{op.op_id, reason};
    if (store_) store_->append_rejection(r);
    rejections_.push_back(r);
    verdicts_[op.op_id] = Verdict::rejected(reason);
    return Verdict::rejected(std::move(reason));
  };

  if (header_.condition == Condition::Standard && is_hypothesis_kind(op.payload))
    return record_rejection(std::string(kDisabledInCondition));

  const auto result = apply_in_place(state_, op, ctx_);
  if (!result.accepted()) return record_rejection(result.rejection->reason);

  if (store_) {
    try {
      store_->append(op);
    } catch (...) {
      state_ = replay(log_, WorkspaceState::initial(*corpus_), ctx_);
      throw;
    }
  }
  log_.push_back(op);
  verdicts_[op.op_id] = Verdict::accepted(*op.seq);

  Broadcast b{op, std::nullopt, state_hash(state_)};
  if (header_.condition == Condition::Translucence) {
    auto viz = derive_visualization(state_, config_.visualization_config());
    b.viz_delta = diff(visualization_, viz);
    visualization_ = std::move(viz);
  }
  for (auto& [_, listener] : listeners_) {
    try {
      listener(b);
    } catch (...) {
      // A failing listener must not stall the session; it is the
      // connection's job to notice and detach.
    }
  }
  return Verdict::accepted(*op.seq);
}

Snapshot SessionSequencer::snapshot_locked() const {
  Snapshot s{state_, state_.applied_seq, state_hash(state_), std::nullopt};
  if (header_.condition == Condition::Translucence) s.visualization = visualization_;
  return s;
}

Snapshot SessionSequencer::snapshot() const {
  std::lock_guard lock(mu_);
  return snapshot_locked();
}

Snapshot SessionSequencer::attach(ListenerId& id, Listener listener) {
  std::lock_guard lock(mu_);
  id = next_listener_++;
  listeners_.emplace(id, std::move(listener));
  return snapshot_locked();
}

void SessionSequencer::detach(ListenerId id) {
  std::lock_guard lock(mu_);
  listeners_.erase(id);
}

std::vector<Operation> SessionSequencer::operations() const {
  std::lock_guard lock(mu_);
  return log_;
}

std::vector<Rejection> SessionSequencer::rejections() const {
  std::lock_guard lock(mu_);
  return rejections_;
}

std::string SessionSequencer::export_log() const {
  std::lock_guard lock(mu_);
  return log_to_text(header_, log_);
}

Seq SessionSequencer::applied_seq() const {
  std::lock_guard lock(mu_);
  return state_.applied_seq;
}

}  // namespace casewall
