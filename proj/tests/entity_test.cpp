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

#include <regex>

#include <gtest/gtest.h>

#include "casewall/entity.hpp"
#include "fixtures.hpp"
#include "generators.hpp"
#include "oracles.hpp"

namespace casewall {
namespace {

EntityRegistry mini_registry() { return EntityRegistry::from_gazetteer(testing::mini_corpus()->manifest().gazetteer); }

std::string surface_of(std::string_view text, const Mention& m) {
  return std::string(text.substr(m.span.begin, m.span.size()));
}

TEST(Extract, FullNameSpan) {
  const auto reg = mini_registry();
  const std::string t = "Dennis Rathbone left at 9pm";
  const auto ms = extract_mentions(t, reg);
  ASSERT_EQ(ms.size(), 1u);
  EXPECT_EQ(ms[0].entity_id, "p1");
  EXPECT_EQ(ms[0].span, (text::Span{0, 15}));
  EXPECT_EQ(ms[0].surface, "Dennis Rathbone");
}

TEST(Extract, EmptyText) { EXPECT_TRUE(extract_mentions("", mini_registry()).empty()); }

TEST(Extract, EveryOccurrenceCounts) {
  const std::string t = "I suspect Marilyn Stokes and Marilyn Stokes only";
  const auto ms = extract_mentions(t, mini_registry());
  ASSERT_EQ(ms.size(), 2u);
  EXPECT_EQ(ms[0].entity_id, "p2");
  EXPECT_EQ(ms[1].entity_id, "p2");
  EXPECT_NE(ms[0].span, ms[1].span);
}

TEST(Extract, CapitalizedBigramIsCandidate) {
  const EntityRegistry empty;
  const std::string t = "Met Paula Vance today";
  const auto ms = extract_mentions(t, empty);
  ASSERT_EQ(ms.size(), 1u);
  EXPECT_TRUE(ms[0].candidate_new);
  EXPECT_EQ(ms[0].new_name, "Paula Vance");
  EXPECT_EQ(surface_of(t, ms[0]), "Paula Vance");

  // Independent check: the only run of two or more capitalized words.
  const std::regex run("\\b[A-Z][a-z]+(?:[ \\t]+[A-Z][a-z]+)+\\b");
  std::vector<std::string> runs;
  for (std::sregex_iterator it(t.begin(), t.end(), run), end; it != end; ++it) runs.push_back(it->str());
  ASSERT_EQ(runs.size(), 1u);
  // "Met" opens the sentence and is dropped from a three-word run.
  EXPECT_EQ(runs[0], "Met Paula Vance");
}

TEST(Extract, CaseInsensitiveLongestFirst) {
  const auto reg = mini_registry();
  const auto ms = extract_mentions("saw DENNY rathbone and steven gramming", reg, ExtractorConfig::strict_gazetteer());
  ASSERT_EQ(ms.size(), 2u);
  EXPECT_EQ(ms[0].entity_id, "p1");
  EXPECT_EQ(ms[1].entity_id, "p3");
  EXPECT_EQ(ms[1].surface, "steven gramming");
}

TEST(Extract, WordBoundaries) {
  const auto ms = extract_mentions("xDennis Rathbone and Janet Millsy", mini_registry(), ExtractorConfig::strict_gazetteer());
  EXPECT_TRUE(ms.empty());
}

TEST(Extract, NamesNeedSingleSpacesButRunsDoNot) {
  const auto reg = mini_registry();
  EXPECT_TRUE(extract_mentions("saw dennis  rathbone", reg, ExtractorConfig::strict_gazetteer()).empty());
  const auto ms = extract_mentions("saw Dennis  Rathbone", reg);
  ASSERT_EQ(ms.size(), 1u);
  EXPECT_EQ(ms[0].entity_id, "p1");
  EXPECT_FALSE(ms[0].candidate_new);
}

TEST(Extract, PartialNamesResolveOnlyWhenUnique) {
  const auto reg = mini_registry();
  auto ms = extract_mentions("was Rathbone there with marilyn or Marilyn?", reg);
  ASSERT_EQ(ms.size(), 1u);
  EXPECT_EQ(ms[0].entity_id, "p1");
  EXPECT_TRUE(extract_mentions("was Rathbone there", reg, ExtractorConfig::strict_gazetteer()).empty());
}

TEST(Extract, FillersAndSentenceStart) {
  const auto reg = mini_registry();
  // Filler words are stripped from the front of a run.
  auto ms = extract_mentions("Detective Rathbone", reg);
  ASSERT_EQ(ms.size(), 1u);
  EXPECT_EQ(ms[0].entity_id, "p1");
  // A sentence-opening word before a known surname is not part of the name.
  ms = extract_mentions("Was Rathbone near the van?", reg);
  ASSERT_EQ(ms.size(), 1u);
  EXPECT_EQ(ms[0].entity_id, "p1");
  // Mid-sentence the same pair is a new name.
  ms = extract_mentions("we met Paula Rathbone", reg);
  ASSERT_EQ(ms.size(), 1u);
  EXPECT_TRUE(ms[0].candidate_new);
  EXPECT_EQ(ms[0].new_name, "Paula Rathbone");
}

TEST(Extract, RunsStopAtPunctuationAndNewlines) {
  const EntityRegistry empty;
  auto ms = extract_mentions("we met Paula, Vance", empty);
  EXPECT_TRUE(ms.empty());
  ms = extract_mentions("we met Paula\nVance", empty);
  EXPECT_TRUE(ms.empty());
  ms = extract_mentions("we met Paula\tVance", empty);
  ASSERT_EQ(ms.size(), 1u);
  EXPECT_EQ(ms[0].new_name, "Paula Vance");
}

TEST(PartialName, Resolution) {
  const auto reg = mini_registry();
  EXPECT_EQ(resolve_partial_name("Rathbone", reg), (PartialMatch{PartialMatch::Kind::Unique, "p1"}));
  EXPECT_EQ(resolve_partial_name("Marilyn", reg).kind, PartialMatch::Kind::Ambiguous);
  EXPECT_EQ(resolve_partial_name("Zebra", reg).kind, PartialMatch::Kind::None);
  // Alias words count too.
  EXPECT_EQ(resolve_partial_name("Denny", reg).entity_id, "p1");
  EXPECT_EQ(resolve_partial_name("Lou", reg).entity_id, "p4");
}

TEST(PartialName, OnlyRathboneKnown) {
  EntityRegistry reg;
  reg.add({"x1", "Dennis Rathbone", {}, EntityOrigin::Gazetteer});
  EXPECT_EQ(resolve_partial_name("Rathbone", reg).entity_id, "x1");
}

TEST(Register, ExistingNameIsIdentity) {
  auto reg = mini_registry();
  const auto before = reg;
  const auto r = register_entity(reg, "dennis rathbone", EntityOrigin::Heuristic);
  EXPECT_EQ(r.entity_id, "p1");
  EXPECT_FALSE(r.created);
  EXPECT_EQ(reg, before);
}

TEST(Register, NewNameIsHeuristicAndIdempotent) {
  auto reg = mini_registry();
  const auto a = register_entity(reg, "Paula Vance", EntityOrigin::Heuristic);
  EXPECT_TRUE(a.created);
  ASSERT_NE(reg.find(a.entity_id), nullptr);
  EXPECT_EQ(reg.find(a.entity_id)->origin, EntityOrigin::Heuristic);
  EXPECT_EQ(reg.find(a.entity_id)->canonical_name, "Paula Vance");
  const auto b = register_entity(reg, "PAULA   vance", EntityOrigin::Heuristic);
  EXPECT_EQ(a.entity_id, b.entity_id);
  EXPECT_FALSE(b.created);
  EXPECT_EQ(reg.size(), 9u);
  // Ids are a function of the normalized name alone.
  EntityRegistry other;
  EXPECT_EQ(register_entity(other, "paula vance", EntityOrigin::Heuristic).entity_id, a.entity_id);
  EXPECT_THROW(register_entity(reg, "  ", EntityOrigin::Heuristic), Error);
}

TEST(Register, RejectsCollidingNames) {
  auto reg = mini_registry();
  EXPECT_THROW(reg.add({"p9", "Lou Harper", {}, EntityOrigin::Gazetteer}), Error);
  EXPECT_THROW(reg.add({"p1", "Someone Else", {}, EntityOrigin::Gazetteer}), Error);
}

TEST(ExtractProperty, MatchesOracleInGazetteerMode) {
  testing::Rng rng(101);
  const auto reg = mini_registry();
  const auto people = testing::oracle_people(reg);
  for (int i = 0; i < 500; ++i) {
    const auto t = testing::random_text(rng, reg, 20);
    std::map<std::string, int> got, want;
    for (const auto& m : extract_mentions(t, reg, ExtractorConfig::strict_gazetteer())) ++got[m.entity_id];
    for (const auto& m : testing::oracle_scan(t, people, false, false)) ++want[m.entity_id];
    ASSERT_EQ(got, want) << "text: " << t;
  }
}

TEST(ExtractProperty, MatchesOracleWithRunsAndPartials) {
  testing::Rng rng(202);
  auto reg = mini_registry();
  register_entity(reg, "Tom Baker", EntityOrigin::Heuristic);
  const auto people = testing::oracle_people(reg);
  for (int i = 0; i < 500; ++i) {
    const auto t = testing::random_text(rng, reg, 20);
    const auto got = extract_mentions(t, reg);
    const auto want = testing::oracle_scan(t, people, true, true);
    ASSERT_EQ(got.size(), want.size()) << "text: " << t;
    for (std::size_t k = 0; k < got.size(); ++k) {
      EXPECT_EQ(got[k].span.begin, want[k].begin) << t;
      EXPECT_EQ(got[k].span.end, want[k].end) << t;
      EXPECT_EQ(got[k].surface, t.substr(want[k].begin, want[k].end - want[k].begin));
      if (want[k].entity_id.empty()) {
        EXPECT_TRUE(got[k].candidate_new) << t;
        EXPECT_EQ(text::normalize_name(got[k].new_name), text::normalize_name(want[k].candidate_name)) << t;
      } else {
        EXPECT_FALSE(got[k].candidate_new) << t;
        EXPECT_EQ(got[k].entity_id, want[k].entity_id) << t;
      }
    }
  }
}

TEST(ExtractProperty, DeterministicAndSpansInBounds) {
  testing::Rng rng(303);
  const auto reg = mini_registry();
  for (int i = 0; i < 300; ++i) {
    const auto t = testing::random_text(rng, reg, 20);
    const auto a = extract_mentions(t, reg);
    EXPECT_EQ(a, extract_mentions(t, reg));
    std::size_t last_end = 0;
    for (const auto& m : a) {
      EXPECT_LE(m.span.end, t.size());
      EXPECT_LT(m.span.begin, m.span.end);
      EXPECT_GE(m.span.begin, last_end) << "overlap in " << t;
      EXPECT_EQ(m.surface, surface_of(t, m));
      last_end = m.span.end;
    }
  }
}

}  // namespace
}  // namespace casewall
