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

#include <gtest/gtest.h>

#include "casewall/sync.hpp"
#include "casewall/translucence.hpp"
#include "fixtures.hpp"
#include "generators.hpp"
#include "oracles.hpp"

namespace casewall {
namespace {

using testing::make_op;

struct Session {
  const Corpus& corpus = *testing::mini_corpus();
  WorkspaceState state = WorkspaceState::initial(corpus);
  ReducerContext ctx = AnalysisConfig{}.reducer_context(&corpus);
  std::vector<Operation> log;

  void run(Role actor, Payload payload) {
    auto op = make_op("op-" + std::to_string(log.size() + 1), actor, std::move(payload), state.applied_seq + 1);
    ASSERT_TRUE(apply_in_place(state, op, ctx).accepted());
    log.push_back(op);
  }
};

TEST(Visualization, EmptyWorkspaceShowsFourSilhouettes) {
  const auto v = derive_visualization(WorkspaceState::initial(*testing::mini_corpus()));
  EXPECT_TRUE(v.named_avatars.empty());
  EXPECT_EQ(v.placeholder_count, 4);
  EXPECT_EQ(v.highlighted(), nullptr);
}

TEST(Visualization, FirstNamedSuspect) {
  Session s;
  s.run(Role::AnalystA, op::CreateSticky{"Dennis Rathbone was there", 0, 0});
  const auto v = derive_visualization(s.state);
  ASSERT_EQ(v.named_avatars.size(), 1u);
  const auto& a = v.named_avatars[0];
  EXPECT_EQ(a.entity_id, "p1");
  EXPECT_EQ(a.display_name, "Dennis Rathbone");
  EXPECT_EQ(a.counts, (ChannelCounts{1, 0, 0}));
  EXPECT_EQ(a.total_mentions, 1);
  EXPECT_DOUBLE_EQ(a.shade, 0.1);
  EXPECT_FALSE(a.last_hypothesis_highlight);
  EXPECT_EQ(v.placeholder_count, 2);
}

TEST(Visualization, TwelveOperationSessionMatchesOracle) {
  Session s;
  s.run(Role::AnalystA, op::CreateSticky{"Rathbone had the gate key", 0, 0});
  s.run(Role::AnalystB, op::PostChat{"Steve Gramming drove the blue van"});
  s.run(Role::AnalystA, op::PostChat{"Marilyn Stokes worked with Janet Mills"});
  s.run(Role::AnalystB, op::CreateHypothesis{"Gramming killed Janet Mills"});
  s.run(Role::AnalystA, op::AddConfirming{"hyp-4", "gloves match Gramming"});
  s.run(Role::AnalystA, op::CreateSticky{"Was Paula Vance at the inn?", 10, 10});
  s.run(Role::AnalystB, op::EditSticky{"s-1", "Gramming had the gate key"});
  s.run(Role::AnalystB, op::AddDisconfirming{"hyp-4", "Lou Harper saw Denny Rathbone"});
  s.run(Role::AnalystA, op::PostChat{"paula vance again"});
  s.run(Role::AnalystA, op::SetHypothesisStatus{"hyp-4", HypothesisStatus::NeedsMoreInfo});
  s.run(Role::AnalystB, op::SetStatusComment{"hyp-4", "ask Stokes"});
  s.run(Role::AnalystA, op::DeleteSticky{"s-6"});

  const auto v = derive_visualization(s.state);
  const auto want = testing::oracle_counts(s.state);
  const auto fold = testing::oracle_fold(s.log, s.corpus);

  std::vector<std::string> order;
  for (const auto& a : v.named_avatars) order.push_back(*a.entity_id);
  EXPECT_EQ(order, fold.mention_order);
  for (const auto& a : v.named_avatars) {
    const auto it = want.find(*a.entity_id);
    const std::array<int, 3> got{a.counts.sticky, a.counts.chat, a.counts.hypothesis};
    const std::array<int, 3> none{0, 0, 0};
    EXPECT_EQ(got, it == want.end() ? none : it->second) << *a.entity_id;
  }
  EXPECT_EQ(want.size(), 6u);  // p1 p2 p3 p4 p7 and the new name
  ASSERT_NE(v.highlighted(), nullptr);
  EXPECT_EQ(v.highlighted()->entity_id, fold.last_hypothesis_mention);
  EXPECT_EQ(v.highlighted()->entity_id, "p2");

  // Hand tally for the culprit: chat 1, hypothesis text 1, confirming 1,
  // edited sticky 1.
  EXPECT_EQ(v.find("p3")->counts, (ChannelCounts{1, 1, 2}));
  // The deleted sticky took one of Paula Vance's two mentions with it.
  EXPECT_EQ(order.size(), 6u);
  const auto& vance = v.named_avatars[4];
  EXPECT_EQ(vance.display_name, "Paula Vance");
  EXPECT_EQ(vance.counts, (ChannelCounts{0, 1, 0}));
  EXPECT_EQ(order.back(), "p4");
}

TEST(Visualization, AvatarsFollowCurrentText) {
  Session s;
  s.run(Role::AnalystA, op::CreateSticky{"Rathbone saw Rathbone", 0, 0});
  s.run(Role::AnalystB, op::PostChat{"Gramming too"});
  EXPECT_EQ(derive_visualization(s.state).find("p1")->total_mentions, 2);
  s.run(Role::AnalystA, op::EditSticky{"s-1", "Rathbone"});
  EXPECT_EQ(derive_visualization(s.state).find("p1")->shade, 0.1);
  // Editing the last mention away removes the avatar; the rest keep order.
  s.run(Role::AnalystA, op::EditSticky{"s-1", "nobody"});
  auto v = derive_visualization(s.state);
  EXPECT_EQ(v.find("p1"), nullptr);
  ASSERT_EQ(v.named_avatars.size(), 1u);
  EXPECT_EQ(v.named_avatars[0].entity_id, "p3");
  // Naming them again puts them back in first-mention position.
  s.run(Role::AnalystA, op::PostChat{"Rathbone again"});
  v = derive_visualization(s.state);
  ASSERT_EQ(v.named_avatars.size(), 2u);
  EXPECT_EQ(v.named_avatars[0].entity_id, "p1");
  s.run(Role::AnalystA, op::DeleteSticky{"s-1"});
  EXPECT_EQ(derive_visualization(s.state).placeholder_count, 2);
}

TEST(Visualization, HighlightNeedsALiveMention) {
  Session s;
  s.run(Role::AnalystA, op::CreateHypothesis{"Rathbone did it"});
  EXPECT_EQ(derive_visualization(s.state).highlighted()->entity_id, "p1");
  s.run(Role::AnalystA, op::EditHypothesisText{"hyp-1", "someone did it"});
  const auto v = derive_visualization(s.state);
  EXPECT_EQ(v.highlighted(), nullptr);
  EXPECT_TRUE(v.named_avatars.empty());
  EXPECT_EQ(v.placeholder_count, 4);
}

TEST(Shade, Examples) {
  EXPECT_EQ(shade_function(0, 10), 0.0);
  EXPECT_EQ(shade_function(10, 10), 1.0);
  EXPECT_EQ(shade_function(25, 10), 1.0);
  EXPECT_DOUBLE_EQ(shade_function(3, 10), 0.3);
  EXPECT_THROW(shade_function(3, 0), Error);
  VisualizationConfig bad;
  bad.shade_cap = 0;
  EXPECT_THROW(derive_visualization(WorkspaceState{}, bad), Error);
  bad = {};
  bad.trailing_placeholders = 0;
  EXPECT_THROW(derive_visualization(WorkspaceState{}, bad), Error);
}

TEST(Shade, MonotoneAndBounded) {
  for (int cap = 1; cap <= 20; ++cap) {
    double last = -1.0;
    for (int n = 0; n <= 50; ++n) {
      const double s = shade_function(n, cap);
      EXPECT_GE(s, last);
      EXPECT_GE(s, 0.0);
      EXPECT_LE(s, 1.0);
      last = s;
    }
  }
}

VisualizationState strip(const std::vector<int>& totals) {
  VisualizationState v;
  for (std::size_t i = 0; i < totals.size(); ++i) {
    AvatarState a;
    a.entity_id = "e" + std::to_string(i);
    a.total_mentions = totals[i];
    v.named_avatars.push_back(a);
  }
  return v;
}

TEST(Entropy, Examples) {
  EXPECT_FALSE(attention_distribution(VisualizationState{}).entropy);
  EXPECT_NEAR(*attention_distribution(strip({5, 5})).entropy, 1.0, 1e-12);
  EXPECT_EQ(*attention_distribution(strip({7})).entropy, 0.0);
  const double p[] = {0.5, 0.375, 0.125};
  double h = 0.0;
  for (double x : p) h -= x * std::log(x);
  const auto d = attention_distribution(strip({4, 3, 1}));
  EXPECT_NEAR(*d.entropy, h / std::log(3.0), 1e-12);
  ASSERT_EQ(d.fractions.size(), 3u);
  EXPECT_DOUBLE_EQ(d.fractions[1].second, 0.375);
}

TEST(Entropy, BoundedOnRandomStrips) {
  testing::Rng rng(4);
  for (int trial = 0; trial < 500; ++trial) {
    std::vector<int> totals(rng.between(1, 8));
    for (auto& t : totals) t = rng.between(0, 30);
    const auto e = attention_distribution(strip(totals)).entropy;
    ASSERT_TRUE(e);
    EXPECT_GE(*e, 0.0);
    EXPECT_LE(*e, 1.0 + 1e-12);
  }
}

TEST(Delta, ApplyingDiffReproducesTheTarget) {
  testing::Rng rng(21);
  const auto& corpus = *testing::mini_corpus();
  for (int trial = 0; trial < 20; ++trial) {
    const auto g = testing::random_log(rng, corpus, 150);
    auto state = WorkspaceState::initial(corpus);
    const auto ctx = AnalysisConfig{}.reducer_context(&corpus);
    auto before = derive_visualization(state);
    auto replica = before;
    for (const auto& op : g.accepted) {
      apply_in_place(state, op, ctx);
      const auto after = derive_visualization(state);
      const auto d = diff(before, after);
      for (const auto& u : d.upserts) {
        const auto* old = before.find(*u.entity_id);
        EXPECT_TRUE(old == nullptr || !(*old == u));
      }
      replica = apply_delta(replica, delta_from_json(to_json(d)));
      ASSERT_EQ(replica, after);
      before = after;
    }
  }
}

TEST(Delta, UnknownAvatarInOrderFails) {
  VisualizationDelta d;
  d.order = {"p9"};
  EXPECT_THROW(apply_delta(VisualizationState{}, d), Error);
}

TEST(VisualizationJson, RoundTrip) {
  testing::Rng rng(22);
  const auto g = testing::random_log(rng, *testing::mini_corpus(), 200);
  const auto v = derive_visualization(g.final_state);
  EXPECT_EQ(visualization_from_json(nlohmann::json::parse(to_json(v).dump())), v);
  EXPECT_THROW(visualization_from_json(nlohmann::json::array()), Error);
}

}  // namespace
}  // namespace casewall
