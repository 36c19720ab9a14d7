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

// casewall_replay: replays a session log against its corpus and writes
//
//   <out>/report.json       metrics
//   <out>/summary.txt       the same, for people (also printed to stdout)
//   <out>/trajectory.ndjson with --trajectory
//   <out>/state.json        with --dump-state
//
// Exit codes: 0 ok, 1 usage, 2 corpus error, 3 malformed log, 4 log and
// corpus disagree, 5 I/O.

#include <filesystem>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>

#include "casewall/replay.hpp"

namespace fs = std::filesystem;

namespace {

enum Exit { kOk = 0, kUsage = 1, kCorpus = 2, kLog = 3, kMismatch = 4, kIo = 5 };

bool write_file(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  out << text;
  return static_cast<bool>(out);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Replay a recorded casewall session log"};
  std::string log_path, corpus_path, out_dir = "replay_out";
  bool trajectory = false, dump_state = false, strict = false, quiet = false;
  std::size_t sample_every = 1;
  app.add_option("--log", log_path, "session log (NDJSON)")->required();
  app.add_option("--corpus", corpus_path, "corpus directory holding manifest.json")->required();
  app.add_flag("--trajectory", trajectory, "write the per-op visualization trajectory");
  app.add_flag("--dump-state", dump_state, "write the final workspace state");
  app.add_option("--sample-every", sample_every, "keep every k-th op in the trajectory")->check(CLI::PositiveNumber);
  app.add_option("--out", out_dir, "output directory");
  app.add_flag("--strict-gazetteer", strict, "only count gazetteer names; no partial or new-name matching");
  app.add_flag("--quiet", quiet, "do not print the summary");
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kOk : kUsage;
  }

  std::optional<casewall::Corpus> corpus;
  try {
    corpus.emplace(casewall::load_corpus(corpus_path));
  } catch (const casewall::CorpusError& e) {
    std::cerr << "casewall_replay: corpus error: " << e.what();
    if (!e.offending_id().empty()) std::cerr << " (" << e.offending_id() << ")";
    std::cerr << "\n";
    return kCorpus;
  } catch (const std::exception& e) {
    std::cerr << "casewall_replay: corpus error: " << e.what() << "\n";
    return kCorpus;
  }

  casewall::ReplayOptions options;
  options.sample_every = sample_every;
  if (strict) options.analysis.extractor = casewall::ExtractorConfig::strict_gazetteer();

  if (!fs::is_regular_file(log_path)) {
    std::cerr << "casewall_replay: cannot read log " << log_path << "\n";
    return kIo;
  }
  casewall::ReplayReport report;
  try {
    const auto log = casewall::read_log_file(log_path);
    report = casewall::run_replay(log, *corpus, options);
  } catch (const casewall::CorpusMismatch& e) {
    std::cerr << "casewall_replay: " << e.what() << "\n";
    return kMismatch;
  } catch (const std::exception& e) {
    std::cerr << "casewall_replay: malformed log: " << e.what() << "\n";
    return kLog;
  }

  std::error_code ec;
  fs::create_directories(out_dir, ec);
  const fs::path out(out_dir);
  const auto summary = casewall::summary_text(report);
  bool ok = !ec && write_file(out / "report.json", casewall::report_text(report)) &&
            write_file(out / "summary.txt", summary);
  if (ok && trajectory) ok = write_file(out / "trajectory.ndjson", casewall::trajectory_text(report));
  if (ok && dump_state) ok = write_file(out / "state.json", casewall::snapshot_text(report.final_state) + "\n");
  if (!ok) {
    std::cerr << "casewall_replay: cannot write outputs under " << out_dir << "\n";
    return kIo;
  }
  if (!quiet) std::cout << summary;
  return kOk;
}
