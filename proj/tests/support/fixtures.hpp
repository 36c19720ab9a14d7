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

#include <filesystem>
#include <fstream>
#include <memory>
#include <sstream>
#include <string>

#include "casewall/corpus.hpp"
#include "casewall/operation.hpp"

namespace casewall::testing {

inline std::filesystem::path mini_corpus_dir() { return CASEWALL_MINI_CORPUS; }
inline std::filesystem::path test_data_dir() { return CASEWALL_TEST_DATA; }
inline std::filesystem::path transcripts_dir() { return CASEWALL_TRANSCRIPTS; }
inline std::filesystem::path server_binary() { return CASEWALL_SERVER_BIN; }
inline std::filesystem::path replay_binary() { return CASEWALL_REPLAY_BIN; }

inline std::shared_ptr<const Corpus> mini_corpus() {
  static const auto corpus = std::make_shared<const Corpus>(load_corpus(mini_corpus_dir()));
  return corpus;
}

inline std::string read_text(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline Operation make_op(std::string op_id, Role actor, Payload payload, std::optional<Seq> seq = std::nullopt) {
  Operation op;
  op.op_id = std::move(op_id);
  op.session_id = "test";
  op.actor = actor;
  op.payload = std::move(payload);
  op.seq = seq;
  return op;
}

/// Byte range of the first occurrence of `quote` in a document body.
inline std::pair<std::size_t, std::size_t> span_of(const Corpus& corpus, const std::string& doc_id,
                                                   const std::string& quote) {
  const auto& body = corpus.find_document(doc_id)->body;
  const auto at = body.find(quote);
  return {at, at + quote.size()};
}

}  // namespace casewall::testing
