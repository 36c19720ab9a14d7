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

// Server-ordered operation log.
//
// Clients submit operations; one sequencer per session validates, numbers,
// applies, persists and broadcasts them, in that order, one at a time. The
// log on disk is one JSON object per line: a header line followed by every
// accepted operation in seq order.

#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <istream>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "casewall/corpus.hpp"
#include "casewall/operation.hpp"
#include "casewall/translucence.hpp"
#include "casewall/workspace.hpp"

namespace casewall {

/// Tunables shared by the reducer and the visualization.
struct AnalysisConfig {
  ExtractorConfig extractor;
  int shade_cap = 10;
  int trailing_placeholders = 2;
  bool allow_cross_author_edit = true;

  ReducerContext reducer_context(const Corpus* corpus) const;
  VisualizationConfig visualization_config() const;
};

// --- log file -----------------------------------------------------------------

inline constexpr int kLogVersion = 1;
inline constexpr std::string_view kLogFormat = "casewall-log";

struct LogHeader {
  std::string session_id;
  std::string corpus_id;
  Condition condition = Condition::Translucence;

  bool operator==(const LogHeader&) const = default;
};

struct SessionLog {
  LogHeader header;
  std::vector<Operation> operations;  // accepted, dense seq from 1
  std::vector<Rejection> rejections;
};

class LogError : public Error {
 public:
  using Error::Error;
};

std::string log_header_line(const LogHeader& header);
std::string log_operation_line(const Operation& op);
/// Whole log as text: header line then one line per operation.
std::string log_to_text(const LogHeader& header, const std::vector<Operation>& operations);

/// Parses a log. With `tolerate_torn_tail`, a final line without a newline
/// that fails to parse is dropped (an interrupted append). Throws LogError.
SessionLog parse_log(std::istream& in, bool tolerate_torn_tail = false);
SessionLog read_log_file(const std::filesystem::path& path, bool tolerate_torn_tail = false);

/// Checks seq density from `first`: throws LogError("missing seq N") at the
/// first gap.
void check_dense(const std::vector<Operation>& operations, Seq first = 1);

/// Folds `operations` onto `initial`. Throws LogError on a seq gap or when a
/// logged operation does not apply.
WorkspaceState replay(const std::vector<Operation>& operations, WorkspaceState initial, const ReducerContext& ctx);

/// Corpus-initial state folded with the log.
WorkspaceState replay(const std::vector<Operation>& operations, const Corpus& corpus, const AnalysisConfig& config = {});

// --- persistence --------------------------------------------------------------

/// Durable append-only storage for one session.
class LogStore {
 public:
  virtual ~LogStore() = default;
  /// Must be durable before returning.
  virtual void append(const Operation& op) = 0;
  virtual void append_rejection(const Rejection& rejection) = 0;
};

/// `<dir>/log.ndjson` plus `<dir>/rejections.ndjson`, each write fsync'ed.
class FileLogStore : public LogStore {
 public:
  /// Creates the directory and writes the header if the log is new.
  FileLogStore(std::filesystem::path dir, const LogHeader& header);
  ~FileLogStore() override;
  FileLogStore(const FileLogStore&) = delete;
  FileLogStore& operator=(const FileLogStore&) = delete;

  void append(const Operation& op) override;
  void append_rejection(const Rejection& rejection) override;

  const std::filesystem::path& dir() const { return dir_; }

  static std::filesystem::path log_path(const std::filesystem::path& dir) { return dir / "log.ndjson"; }
  static std::filesystem::path rejections_path(const std::filesystem::path& dir) { return dir / "rejections.ndjson"; }

  /// Reads a session directory back, dropping a torn final line.
  static SessionLog load(const std::filesystem::path& dir);

 private:
  std::filesystem::path dir_;
  int log_fd_ = -1;
  int rejections_fd_ = -1;
};

// --- sequencer ----------------------------------------------------------------

struct Verdict {
  enum class Kind { Accepted, Rejected, Duplicate };
  Kind kind = Kind::Accepted;
  Seq seq = 0;         // Accepted / Duplicate
  std::string reason;  // Rejected
  bool repeated = false;  // verdict replayed for a known op_id

  static Verdict accepted(Seq s) { return {Kind::Accepted, s, {}, false}; }
  static Verdict rejected(std::string r) { return {Kind::Rejected, 0, std::move(r), false}; }
  static Verdict duplicate(Seq s) { return {Kind::Duplicate, s, {}, true}; }
};

/// What every connected member receives for one accepted operation.
struct Broadcast {
  Operation op;  // seq set
  std::optional<VisualizationDelta> viz_delta;  // translucence condition only
  std::string state_hash;
};

struct Snapshot {
  WorkspaceState state;
  Seq applied_seq = 0;
  std::string state_hash;
  std::optional<VisualizationState> visualization;  // translucence condition only
};

inline constexpr std::string_view kDisabledInCondition = "disabled in condition";

class SessionSequencer {
 public:
  using Listener = std::function<void(const Broadcast&)>;
  using ListenerId = std::uint64_t;

  SessionSequencer(LogHeader header, std::shared_ptr<const Corpus> corpus, AnalysisConfig config,
                   std::unique_ptr<LogStore> store = nullptr);

  /// Rebuilds a sequencer from a persisted log.
  static std::unique_ptr<SessionSequencer> restore(SessionLog log, std::shared_ptr<const Corpus> corpus,
                                                   AnalysisConfig config, std::unique_ptr<LogStore> store);

  /// Idempotent on op_id. Accepted operations are durable before this
  /// returns and have been delivered to every listener in seq order.
  Verdict submit(Operation op);

  Snapshot snapshot() const;

  /// Registers a listener and returns the snapshot it starts from; the
  /// listener then sees every operation after that snapshot exactly once.
  Snapshot attach(ListenerId& id, Listener listener);
  void detach(ListenerId id);

  const LogHeader& header() const { return header_; }
  Condition condition() const { return header_.condition; }
  std::vector<Operation> operations() const;
  std::vector<Rejection> rejections() const;
  std::string export_log() const;
  Seq applied_seq() const;

 private:
  Snapshot snapshot_locked() const;

  LogHeader header_;
  std::shared_ptr<const Corpus> corpus_;
  AnalysisConfig config_;
  ReducerContext ctx_;
  std::unique_ptr<LogStore> store_;

  mutable std::mutex mu_;
  WorkspaceState state_;
  VisualizationState visualization_;
  std::vector<Operation> log_;
  std::vector<Rejection> rejections_;
  std::map<std::string, Verdict> verdicts_;
  std::map<ListenerId, Listener> listeners_;
  ListenerId next_listener_ = 1;
};

}  // namespace casewall
