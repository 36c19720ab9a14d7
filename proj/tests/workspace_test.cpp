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

#include <cmath>
#include <limits>

#include <gtest/gtest.h>

#include "casewall/sync.hpp"
#include "casewall/workspace.hpp"
#include "fixtures.hpp"
#include "generators.hpp"
#include "oracles.hpp"

namespace casewall {
namespace {

using testing::make_op;

class Reducer : public ::testing::Test {
 protected:
  Reducer() : corpus_(*testing::mini_corpus()), state_(WorkspaceState::initial(corpus_)) {
    ctx_ = AnalysisConfig{}.reducer_context(&corpus_);
  }

  ApplyResult run(Role actor, Payload payload) {
    const auto seq = state_.applied_seq + 1;
    return apply_in_place(state_, make_op("op-" + std::to_string(++counter_), actor, std::move(payload), seq), ctx_);
  }
  ApplyResult run(Payload payload) { return run(Role::AnalystA, std::move(payload)); }

  void expect_rejected(Payload payload, const std::string& reason, Role actor = Role::AnalystA) {
    const auto before = state_hash(state_);
    const auto r = run(actor, std::move(payload));
    ASSERT_FALSE(r.accepted());
    EXPECT_EQ(r.rejection->reason, reason);
    EXPECT_EQ(state_hash(state_), before);
  }

  const Corpus& corpus_;
  WorkspaceState state_;
  ReducerContext ctx_;
  int counter_ = 0;
};

TEST_F(Reducer, CreateStickyRecordsMention) {
  const auto r = run(op::CreateSticky{"Rathbone seen at dock", 10, 10});
  ASSERT_TRUE(r.accepted());
  ASSERT_EQ(state_.stickies.size(), 1u);
  EXPECT_EQ(state_.stickies[0].sticky_id, "s-1");
  EXPECT_EQ(state_.stickies[0].x, 10);
  // Oracle: the same text scanned independently.
  const auto want = testing::oracle_scan("Rathbone seen at dock", testing::oracle_people(state_.registry));
  ASSERT_EQ(want.size(), 1u);
  ASSERT_EQ(r.mentions.size(), 1u);
  EXPECT_EQ(r.mentions[0].entity_id, want[0].entity_id);
  EXPECT_EQ(r.mentions[0].entity_id, "p1");
  EXPECT_EQ(r.mentions[0].channel, Channel::Sticky);
  EXPECT_EQ(r.mentions[0].artifact_id, "s-1");
  EXPECT_EQ(state_.mention_order, (std::vector<std::string>{"p1"}));
  EXPECT_EQ(state_.applied_seq, 1u);
}

TEST_F(Reducer, ContentRejectionsLeaveStateUnchanged) {
  run(op::CreateSticky{"one", 0, 0});
  expect_rejected(op::EditSticky{"s-99", "x"}, "unknown sticky");
  expect_rejected(op::CreateSticky{" \t\n", 0, 0}, "empty text");
  expect_rejected(op::CreateSticky{"x", std::numeric_limits<double>::infinity(), 0}, "non-finite position");
  expect_rejected(op::MoveSticky{"s-1", 0, std::nan("")}, "non-finite position");
  expect_rejected(op::LinkStickies{"s-1", "s-1"}, "self link");
  expect_rejected(op::PileStickies{{}, "p"}, "no stickies to pile");
  expect_rejected(op::PileStickies{{"s-1", "s-7"}, "p"}, "unknown sticky");
  expect_rejected(op::DeleteSticky{"s-7"}, "unknown sticky");
  expect_rejected(op::PostChat{""}, "empty text");
  expect_rejected(op::CreateAnnotation{"d9", 0, 1, ""}, "unknown document");
  expect_rejected(op::CreateAnnotation{"d4", 0, 1, ""}, "document not assigned to this analyst");
  expect_rejected(op::CreateAnnotation{"d1", 5, 5, ""}, "span out of range");
  expect_rejected(op::CreateAnnotation{"d1", 0, 100000, ""}, "span out of range");
  expect_rejected(op::CreateHypothesis{""}, "empty text");
  expect_rejected(op::AddConfirming{"hyp-1", "x"}, "unknown hypothesis");
  expect_rejected(op::SetHypothesisStatus{"hyp-1", HypothesisStatus::Rejected}, "unknown hypothesis");
  expect_rejected(op::AddMapMarker{"", 0, 0, ""}, "empty label");
  expect_rejected(op::AddMapMarker{"dock", 0, 0, "d9"}, "unknown document");
  expect_rejected(op::AddTimelineEvent{"t", std::nan(""), ""}, "non-finite timestamp");
  EXPECT_EQ(state_.applied_seq, 1u);
}

TEST_F(Reducer, OutOfOrderSeqIsAProtocolFault) {
  EXPECT_THROW(apply_in_place(state_, make_op("x", Role::AnalystA, op::PostChat{"hi"}, 2), ctx_), SequenceError);
  EXPECT_THROW(apply_in_place(state_, make_op("x", Role::AnalystA, op::PostChat{"hi"}), ctx_), SequenceError);
  run(op::PostChat{"hi"});
  EXPECT_THROW(apply_in_place(state_, make_op("x", Role::AnalystA, op::PostChat{"hi"}, 1), ctx_), SequenceError);
}

TEST_F(Reducer, HypothesisLedger) {
  run(op::CreateHypothesis{"Gramming did it"});
  const auto* h = state_.find_hypothesis("hyp-1");
  ASSERT_NE(h, nullptr);
  EXPECT_EQ(h->status, HypothesisStatus::Open);
  run(Role::AnalystB, op::SetHypothesisStatus{"hyp-1", HypothesisStatus::Rejected});
  h = state_.find_hypothesis("hyp-1");
  EXPECT_EQ(h->status, HypothesisStatus::Rejected);
  EXPECT_EQ(h->status_author, Role::AnalystB);
  run(Role::AnalystB, op::AddConfirming{"hyp-1", "gloves"});
  run(Role::AnalystA, op::AddDisconfirming{"hyp-1", "alibi"});
  h = state_.find_hypothesis("hyp-1");
  ASSERT_EQ(h->confirming.size(), 1u);
  EXPECT_EQ(h->confirming[0].evidence_id, "ev-3");
  EXPECT_EQ(h->confirming[0].author, Role::AnalystB);
  EXPECT_EQ(h->disconfirming[0].author, Role::AnalystA);
  run(Role::AnalystB, op::EditHypothesisText{"hyp-1", "Rathbone did it"});
  h = state_.find_hypothesis("hyp-1");
  EXPECT_EQ(h->author, Role::AnalystA);
  EXPECT_EQ(h->text_author, Role::AnalystB);
  EXPECT_EQ(state_.last_hypothesis_mention, "p1");
  run(op::SetStatusComment{"hyp-1", "see Stokes"});
  EXPECT_EQ(state_.last_hypothesis_mention, "p2");
  run(op::SetStatusComment{"hyp-1", ""});
  EXPECT_EQ(state_.find_hypothesis("hyp-1")->status_comment, "");
  EXPECT_EQ(state_.last_hypothesis_mention, "p2");
}

TEST_F(Reducer, AnnotationSpawnsSticky) {
  const auto [b, e] = testing::span_of(corpus_, "d1", "Dennis Rathbone");
  const auto r = run(op::CreateAnnotation{"d1", b, e, "no alibi"});
  ASSERT_TRUE(r.accepted());
  ASSERT_EQ(state_.annotations.size(), 1u);
  ASSERT_EQ(state_.stickies.size(), 1u);
  const auto& s = state_.stickies[0];
  EXPECT_EQ(s.source_annotation_id, "a-1");
  EXPECT_NE(s.text.find("no alibi"), std::string::npos);
  EXPECT_NE(s.text.find("\"Dennis Rathbone\""), std::string::npos);
  ASSERT_EQ(r.mentions.size(), 1u);
  EXPECT_EQ(r.mentions[0].entity_id, "p1");
  EXPECT_EQ(s.x, -240.0);
  EXPECT_EQ(s.y, 0.0);

  const auto [b2, e2] = testing::span_of(corpus_, "d1", "cannery loading dock");
  const auto r2 = run(op::CreateAnnotation{"d1", b2, e2, ""});
  EXPECT_TRUE(r2.mentions.empty());
  ASSERT_EQ(state_.stickies.size(), 2u);
  EXPECT_EQ(state_.stickies[1].text, "\"cannery loading dock\"");
  EXPECT_NE(state_.stickies[1].sticky_id, state_.stickies[0].sticky_id);
  EXPECT_EQ(state_.stickies[1].y, 60.0);
}

TEST_F(Reducer, BothRoleDocumentsAreAnnotatableByEither) {
  auto m = corpus_.manifest();
  auto docs = corpus_.documents();
  m.documents[0].assigned_role = Assignment::Both;
  docs[0].assigned_role = Assignment::Both;
  const Corpus both(m, docs);
  auto ctx = AnalysisConfig{}.reducer_context(&both);
  auto s = WorkspaceState::initial(both);
  EXPECT_TRUE(apply_in_place(s, make_op("o", Role::AnalystB, op::CreateAnnotation{"d1", 0, 6, ""}, 1), ctx).accepted());
}

TEST_F(Reducer, LinksAndPiles) {
  for (int i = 0; i < 3; ++i) run(op::CreateSticky{"s" + std::to_string(i), 0, 0});
  EXPECT_TRUE(run(op::LinkStickies{"s-1", "s-2"}).accepted());
  expect_rejected(op::LinkStickies{"s-2", "s-1"}, "stickies already linked");
  EXPECT_TRUE(run(op::PileStickies{{"s-1", "s-2", "s-3"}, "p1"}).accepted());
  for (const auto& s : state_.stickies) EXPECT_EQ(s.pile_id, "p1");
  EXPECT_TRUE(run(op::PileStickies{{"s-2"}, ""}).accepted());
  EXPECT_FALSE(state_.find_sticky("s-2")->pile_id);
  EXPECT_EQ(state_.find_sticky("s-1")->pile_id, "p1");
  EXPECT_TRUE(run(op::DeleteSticky{"s-2"}).accepted());
  EXPECT_TRUE(state_.links.empty());
  expect_rejected(op::LinkStickies{"s-1", "s-2"}, "unknown sticky");
}

TEST_F(Reducer, CrossAuthorEditAllowedByDefault) {
  run(Role::AnalystA, op::CreateSticky{"mine", 0, 0});
  EXPECT_TRUE(run(Role::AnalystB, op::EditSticky{"s-1", "ours"}).accepted());
  EXPECT_EQ(state_.stickies[0].author, Role::AnalystA);

  ctx_.allow_cross_author_edit = false;
  expect_rejected(op::EditSticky{"s-1", "theirs"}, "sticky belongs to the other analyst", Role::AnalystB);
  expect_rejected(op::DeleteSticky{"s-1"}, "sticky belongs to the other analyst", Role::AnalystB);
}

TEST_F(Reducer, SharedTexts) {
  EXPECT_TRUE(shared_texts(state_).empty());
  run(op::PostChat{"hello"});
  run(op::CreateSticky{"first", 0, 0});
  auto t = shared_texts(state_);
  ASSERT_EQ(t.size(), 2u);
  EXPECT_EQ(t[0].channel, Channel::Sticky);
  EXPECT_EQ(t[1].channel, Channel::Chat);
  run(op::EditSticky{"s-2", "second"});
  t = shared_texts(state_);
  EXPECT_EQ(t[0].text, "second");
  for (const auto& x : t) EXPECT_NE(x.text, "first");
  run(op::CreateHypothesis{"h"});
  run(op::AddConfirming{"hyp-4", "c"});
  run(op::AddDisconfirming{"hyp-4", "d"});
  run(op::SetStatusComment{"hyp-4", "note"});
  t = shared_texts(state_);
  ASSERT_EQ(t.size(), 6u);
  EXPECT_EQ(t[2].field, "text");
  EXPECT_EQ(t[3].field, "confirming:ev-5");
  EXPECT_EQ(t[4].field, "disconfirming:ev-6");
  EXPECT_EQ(t[5].field, "comment");
}

TEST_F(Reducer, ChatIsImmutable) {
  run(op::PostChat{"Rathbone lied"});
  const auto chat = state_.chat;
  testing::Rng rng(8);
  for (int i = 0; i < 300; ++i) {
    auto op = testing::random_operation(rng, state_, corpus_, Role::AnalystB, "r" + std::to_string(i));
    if (std::holds_alternative<op::PostChat>(op.payload)) continue;
    op.seq = state_.applied_seq + 1;
    apply_in_place(state_, op, ctx_);
  }
  EXPECT_EQ(std::vector<ChatMessage>(state_.chat.begin(), state_.chat.begin() + 1), chat);
}

TEST_F(Reducer, SnapshotJsonRoundTrip) {
  testing::Rng rng(77);
  const auto g = testing::random_log(rng, corpus_, 300);
  const auto j = state_to_json(g.final_state);
  EXPECT_EQ(state_from_json(j), g.final_state);
  EXPECT_EQ(snapshot_text(state_from_json(nlohmann::json::parse(snapshot_text(g.final_state)))),
            snapshot_text(g.final_state));
  EXPECT_EQ(state_hash(g.final_state).size(), 64u);
}

TEST_F(Reducer, ReferentialIntegrityUnderRandomOps) {
  testing::Rng rng(99);
  for (int trial = 0; trial < 20; ++trial) {
    const auto g = testing::random_log(rng, corpus_, 200);
    const auto& s = g.final_state;
    for (const auto& l : s.links) {
      EXPECT_TRUE(s.find_sticky(l.from));
      EXPECT_TRUE(s.find_sticky(l.to));
      EXPECT_NE(l.from, l.to);
    }
    for (const auto& a : s.annotations) {
      const auto* d = corpus_.find_document(a.doc_id);
      ASSERT_TRUE(d);
      EXPECT_LT(a.span.begin, a.span.end);
      EXPECT_LE(a.span.end, d->body.size());
    }
    for (const auto& h : s.hypotheses) {
      for (const auto& e : h.confirming) EXPECT_FALSE(e.text.empty());
      for (const auto& e : h.disconfirming) EXPECT_FALSE(e.text.empty());
    }
    for (const auto& st : s.stickies) {
      EXPECT_TRUE(std::isfinite(st.x) && std::isfinite(st.y));
      EXPECT_FALSE(st.text.empty());
    }
  }
}

}  // namespace
}  // namespace casewall
