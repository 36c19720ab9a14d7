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

// Offline analysis of a recorded session log.
//
// The visualization is derived after every operation whatever the session's
// condition, so logs from both conditions yield comparable attention metrics.

#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "casewall/corpus.hpp"
#include "casewall/sync.hpp"
#include "casewall/translucence.hpp"

namespace casewall {

struct ReplayOptions {
  std::size_t sample_every = 1;  // trajectory keeps seq 0, every k-th op and the last op
  AnalysisConfig analysis;
};

struct EntityTotals {
  std::string entity_id;
  std::string display_name;
  ChannelCounts counts;

  bool operator==(const EntityTotals&) const = default;
};

struct SessionMetrics {
  std::size_t operations = 0;
  std::vector<EntityTotals> entities;  // final state, by entity id
  std::vector<std::optional<double>> entropy_series;  // one per op; empty strip gives nullopt
  std::map<std::string, int> hypotheses_by_status;    // every status, zero included
  int confirming = 0;
  int disconfirming = 0;
  std::set<std::string> clues_covered;  // on the final shared text
  bool culprit_mentioned = false;       // any mention of the solution entity, ever

  bool operator==(const SessionMetrics&) const = default;
};

struct TrajectoryPoint {
  Seq seq = 0;
  std::string kind;  // operation kind, "start" at seq 0
  VisualizationState visualization;
  std::optional<double> entropy;

  bool operator==(const TrajectoryPoint&) const = default;
};

struct ReplayReport {
  LogHeader header;
  SessionMetrics metrics;
  std::vector<TrajectoryPoint> trajectory;
  WorkspaceState final_state;
  std::string final_hash;
};

/// The log's corpus id differs from the corpus.
class CorpusMismatch : public Error {
 public:
  using Error::Error;
};

/// Throws CorpusMismatch, or LogError when the log does not replay.
ReplayReport run_replay(const SessionLog& log, const Corpus& corpus, const ReplayOptions& options = {});

nlohmann::json report_to_json(const ReplayReport& report);
std::string report_text(const ReplayReport& report);  // report.json contents
std::string summary_text(const ReplayReport& report);
std::string trajectory_text(const ReplayReport& report);  // NDJSON, one point per line
nlohmann::json trajectory_point_to_json(const TrajectoryPoint& point);

}  // namespace casewall
