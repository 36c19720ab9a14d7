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

#include "casewall/replay.hpp"

#include <cstdio>
#include <sstream>

namespace casewall {

using json = nlohmann::json;

namespace {

json optional_number(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

json counts_json(const ChannelCounts& c) {
  return {{"sticky", c.sticky}, {"chat", c.chat}, {"hypothesis", c.hypothesis}, {"total", c.total()}};
}

}  // namespace

ReplayReport run_replay(const SessionLog& log, const Corpus& corpus, const ReplayOptions& options) {
  if (log.header.corpus_id != corpus.id())
    throw CorpusMismatch("log was recorded on corpus '" + log.header.corpus_id + "' but the corpus is '" +
                         corpus.id() + "'");
  if (options.sample_every == 0) throw Error("sample interval must be at least 1");
  check_dense(log.operations);

  const auto ctx = options.analysis.reducer_context(&corpus);
  const auto viz_config = options.analysis.visualization_config();
  const auto& solution = corpus.manifest().solution;

  ReplayReport report;
  report.header = log.header;
  WorkspaceState state = WorkspaceState::initial(corpus);

  auto sample = [&](Seq seq, std::string kind, VisualizationState viz, std::optional<double> entropy) {
    report.trajectory.push_back({seq, std::move(kind), std::move(viz), entropy});
  };
  {
    auto viz = derive_visualization(state, viz_config);
    const auto entropy = attention_distribution(viz).entropy;
    sample(0, "start", std::move(viz), entropy);
  }

  auto& m = report.metrics;
  for (std::size_t i = 0; i < log.operations.size(); ++i) {
    const auto& op = log.operations[i];
    const auto result = apply_in_place(state, op, ctx);
    if (!result.accepted())
      throw LogError("logged operation seq " + std::to_string(*op.seq) + " does not apply: " + result.rejection->reason);
    for (const auto& e : result.mentions)
      if (e.entity_id == solution) m.culprit_mentioned = true;

    auto viz = derive_visualization(state, viz_config);
    const auto entropy = attention_distribution(viz).entropy;
    m.entropy_series.push_back(entropy);
    const bool last = i + 1 == log.operations.size();
    if (*op.seq % options.sample_every == 0 || last) sample(*op.seq, std::string(kind_name(op.payload)), std::move(viz), entropy);
  }
  m.operations = log.operations.size();

  for (const auto& [id, counts] : mention_counts(state, options.analysis.extractor)) {
    const auto* entity = state.registry.find(id);
    m.entities.push_back({id, entity ? entity->canonical_name : id, counts});
  }
  for (auto s : {HypothesisStatus::Open, HypothesisStatus::Accepted, HypothesisStatus::Rejected,
                 HypothesisStatus::NeedsMoreInfo})
    m.hypotheses_by_status[std::string(to_string(s))] = 0;
  for (const auto& h : state.hypotheses) {
    ++m.hypotheses_by_status[std::string(to_string(h.status))];
    m.confirming += static_cast<int>(h.confirming.size());
    m.disconfirming += static_cast<int>(h.disconfirming.size());
  }
  m.clues_covered = clue_coverage(corpus, shared_text_strings(state));

  report.final_hash = state_hash(state);
  report.final_state = std::move(state);
  return report;
}

json report_to_json(const ReplayReport& report) {
  const auto& m = report.metrics;
  json entities = json::array();
  for (const auto& e : m.entities)
    entities.push_back({{"entity_id", e.entity_id}, {"display_name", e.display_name}, {"counts", counts_json(e.counts)}});
  json entropy = json::array();
  for (const auto& v : m.entropy_series) entropy.push_back(optional_number(v));
  return {{"session_id", report.header.session_id},
          {"corpus_id", report.header.corpus_id},
          {"condition", to_string(report.header.condition)},
          {"operations", m.operations},
          {"final_state_hash", report.final_hash},
          {"mentions", std::move(entities)},
          {"attention_entropy", std::move(entropy)},
          {"hypotheses_by_status", m.hypotheses_by_status},
          {"evidence", {{"confirming", m.confirming}, {"disconfirming", m.disconfirming}}},
          {"clues_covered", m.clues_covered},
          {"culprit_mentioned", m.culprit_mentioned}};
}

std::string report_text(const ReplayReport& report) { return report_to_json(report).dump(2) + "\n"; }

std::string summary_text(const ReplayReport& report) {
  const auto& m = report.metrics;
  std::ostringstream out;
  out << "session " << report.header.session_id << " on corpus " << report.header.corpus_id << " ("
      << to_string(report.header.condition) << ")\n";
  out << "operations: " << m.operations << "\n";
  out << "final state hash: " << report.final_hash << "\n";
  out << "mentions:\n";
  if (m.entities.empty()) out << "  (none)\n";
  for (const auto& e : m.entities) {
    out << "  " << e.entity_id << " " << e.display_name << ": " << e.counts.total() << " (sticky " << e.counts.sticky
        << ", chat " << e.counts.chat << ", hypothesis " << e.counts.hypothesis << ")\n";
  }
  out << "hypotheses:";
  for (const auto& [status, n] : m.hypotheses_by_status) out << " " << status << "=" << n;
  out << "\n";
  out << "evidence: confirming=" << m.confirming << " disconfirming=" << m.disconfirming << "\n";
  out << "clues covered:";
  if (m.clues_covered.empty()) out << " (none)";
  for (const auto& c : m.clues_covered) out << " " << c;
  out << "\n";
  out << "culprit mentioned: " << (m.culprit_mentioned ? "yes" : "no") << "\n";
  out << "final attention entropy: ";
  if (m.entropy_series.empty() || !m.entropy_series.back()) {
    out << "n/a\n";
  } else {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.4f", *m.entropy_series.back());
    out << buf << "\n";
  }
  return out.str();
}

json trajectory_point_to_json(const TrajectoryPoint& p) {
  return {{"seq", p.seq}, {"kind", p.kind}, {"visualization", to_json(p.visualization)}, {"entropy", optional_number(p.entropy)}};
}

std::string trajectory_text(const ReplayReport& report) {
  std::string out;
  for (const auto& p : report.trajectory) out += trajectory_point_to_json(p).dump() + "\n";
  return out;
}

}  // namespace casewall
