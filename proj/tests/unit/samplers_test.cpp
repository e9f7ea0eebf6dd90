/*
 * Copyright 2026 The viewbpr Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *   http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include <viewbpr/model.hpp>
#include <viewbpr/samplers.hpp>

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <set>

#include "oracles.hpp"

namespace viewbpr {
namespace {

constexpr int kDraws = 100000;

TEST(UniformTriple, ForcedOutcome) {
  const auto d = oracle::make_dataset(2, {{0}});
  Rng rng(1);
  for (int k = 0; k < 100; ++k) {
    EXPECT_EQ(sample_uniform_triple(d, rng), (Triple{0, 0, 1}));
  }
}

TEST(UniformTriple, UserFrequenciesAreUniform) {
  const auto d = oracle::make_dataset(20, {{0, 1}, {2, 3}, {4, 5}, {6, 7}});
  Rng rng(2);
  std::vector<int> hits(4, 0);
  for (int k = 0; k < kDraws; ++k) ++hits[sample_uniform_triple(d, rng).user];
  for (int h : hits) EXPECT_NEAR(h / double(kDraws), 0.25, 0.01);
}

TEST(UniformTriple, NegativeNeverPurchasedButViewsAreEligible) {
  const auto d = oracle::make_dataset(6, {{0, 1, 2}}, {{3}});
  Rng rng(3);
  int viewed_negatives = 0;
  for (int k = 0; k < kDraws; ++k) {
    const auto t = sample_uniform_triple(d, rng);
    ASSERT_FALSE(d.is_purchased(0, t.neg));
    ASSERT_TRUE(d.is_purchased(0, t.pos));
    viewed_negatives += t.neg == 3;
  }
  EXPECT_NEAR(viewed_negatives / double(kDraws), 1.0 / 3.0, 0.01);
}

TEST(UniformTriple, UnobservedPoolExcludesViews) {
  const auto d = oracle::make_dataset(6, {{0, 1, 2}}, {{3}});
  Rng rng(4);
  for (int k = 0; k < 10000; ++k) {
    ASSERT_TRUE(d.is_unobserved(0, sample_uniform_triple(d, rng, NegativePool::Unobserved).neg));
  }
}

TEST(DrawNegative, DenseUserFallsBackToRankSelection) {
  // 999 of 1000 items purchased: rejection almost always fails.
  std::vector<ItemIndex> bought;
  for (ItemIndex i = 0; i < 1000; ++i) {
    if (i != 617) bought.push_back(i);
  }
  const auto d = oracle::make_dataset(1000, {bought});
  Rng rng(5);
  for (int k = 0; k < 20; ++k) {
    EXPECT_EQ(draw_negative(d, 0, NegativePool::NotPurchased, rng), 617u);
  }
}

TEST(DrawNegative, RankSelectionIsUniform) {
  // Two free items among many purchases; both must come up evenly.
  std::vector<ItemIndex> bought;
  for (ItemIndex i = 0; i < 2000; ++i) {
    if (i != 5 && i != 1500) bought.push_back(i);
  }
  const auto d = oracle::make_dataset(2000, {bought});
  Rng rng(6);
  int first = 0;
  const int draws = 20000;
  for (int k = 0; k < draws; ++k) {
    const auto j = draw_negative(d, 0, NegativePool::NotPurchased, rng);
    ASSERT_TRUE(j == 5 || j == 1500);
    first += j == 5;
  }
  EXPECT_NEAR(first / double(draws), 0.5, 0.02);
}

// ----- reduced spaces --------------------------------------------------------

TEST(ReducedSpaces, QuarterOfHundredItems) {
  const auto d = oracle::make_dataset(100, {{5}});
  Rng rng(7);
  const auto s = build_reduced_spaces(d, 0.25, rng);
  const auto space = s.of(0);
  ASSERT_EQ(space.size(), 25u);
  EXPECT_EQ(std::set<ItemIndex>(space.begin(), space.end()).size(), 25u);
  EXPECT_EQ(std::count(space.begin(), space.end(), 5u), 0);
}

TEST(ReducedSpaces, FullRatioIsTheWholeNegativeSet) {
  const auto d = oracle::make_dataset(10, {{2, 7}}, {{4}});
  Rng rng(8);
  const auto s = build_reduced_spaces(d, 1.0, rng);
  const std::vector<ItemIndex> expected{0, 1, 3, 4, 5, 6, 8, 9};
  EXPECT_EQ(std::vector<ItemIndex>(s.of(0).begin(), s.of(0).end()), expected);
}

TEST(ReducedSpaces, LargeCatalogAtRatioTwoToMinusSix) {
  EXPECT_EQ(reduced_space_size(119012, std::ldexp(1.0, -6)), 1859u);
  EXPECT_EQ(reduced_space_size(10, 0.01), 1u);
  EXPECT_EQ(reduced_space_size(64, 0.25), 16u);
}

TEST(ReducedSpaces, InfeasibleRatioNamesTheUser) {
  const auto d = oracle::make_dataset(4, {{0}, {0, 1, 2}});
  Rng rng(9);
  try {
    build_reduced_spaces(d, 0.5, rng);
    FAIL() << "expected an infeasible-ratio error";
  } catch (const InfeasibleRatioError& e) {
    EXPECT_NE(std::string(e.what()).find("user 1"), std::string::npos);
  }
}

TEST(ReducedSpaces, DeterministicGivenSeed) {
  Rng data_rng(10);
  const auto d = oracle::random_dataset(data_rng, 20, 200, 3, 10, 5);
  Rng a(11), b(11);
  EXPECT_EQ(build_reduced_spaces(d, 0.1, a), build_reduced_spaces(d, 0.1, b));
}

TEST(ReducedSpaces, UnionGrowsAcrossSeeds) {
  const auto d = oracle::make_dataset(200, {{0, 1, 2}});
  std::set<ItemIndex> seen;
  std::size_t previous = 0;
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    Rng rng(seed);
    const auto s = build_reduced_spaces(d, 0.05, rng);
    seen.insert(s.of(0).begin(), s.of(0).end());
    EXPECT_GT(seen.size(), previous);
    previous = seen.size();
  }
}

TEST(ReducedSpaces, UnobservedPoolSkipsViews) {
  const auto d = oracle::make_dataset(8, {{0}}, {{1, 2}});
  Rng rng(12);
  const auto s = build_reduced_spaces(d, 0.5, rng, NegativePool::Unobserved);
  for (auto j : s.of(0)) EXPECT_TRUE(d.is_unobserved(0, j));
}

TEST(ReducedTriple, SingletonSpaceIsForced) {
  const auto d = oracle::make_dataset(50, {{0, 1}});
  Rng rng(13);
  const auto s = build_reduced_spaces(d, 0.01, rng);
  ASSERT_EQ(s.of(0).size(), 1u);
  for (int k = 0; k < 100; ++k) EXPECT_EQ(sample_reduced_triple(d, s, rng).neg, s.of(0)[0]);
}

TEST(ReducedTriple, NegativesStayInsideTheSpaceAndAreUniform) {
  const auto d = oracle::make_dataset(100, {{3, 4}});
  Rng rng(14);
  const auto s = build_reduced_spaces(d, 0.1, rng);
  ASSERT_EQ(s.of(0).size(), 10u);
  std::map<ItemIndex, int> hits;
  for (int k = 0; k < kDraws; ++k) {
    const auto t = sample_reduced_triple(d, s, rng);
    ASSERT_TRUE(std::binary_search(s.of(0).begin(), s.of(0).end(), t.neg));
    ++hits[t.neg];
  }
  for (const auto& [item, h] : hits) EXPECT_NEAR(h / double(kDraws), 0.1, 0.01) << item;
}

// ----- DNS ------------------------------------------------------------------

TEST(DnsTriple, SingleCandidateReproducesUniform) {
  Rng data_rng(15);
  const auto d = oracle::random_dataset(data_rng, 10, 40, 2, 6, 4);
  const auto m = init_model(10, 40, 4, 1);
  Rng a(16), b(16);
  for (int k = 0; k < 1000; ++k) {
    ASSERT_EQ(sample_dns_triple(d, m, 1, a), sample_uniform_triple(d, b));
  }
}

TEST(DnsTriple, PicksHighestScoringCandidate) {
  // Candidates a=1, b=2, c=3 scoring 0.1, 0.9, 0.5; with enough draws the
  // winner is always b whenever b was among them, and b is the max overall.
  FactorModel m;
  m.users = Matrix(1, 1, 1.0);
  m.items = Matrix(4, 1);
  m.items(1, 0) = 0.1;
  m.items(2, 0) = 0.9;
  m.items(3, 0) = 0.5;
  const auto d = oracle::make_dataset(4, {{0}});
  Rng rng(17);
  for (int k = 0; k < 200; ++k) EXPECT_EQ(sample_dns_triple(d, m, 50, rng).neg, 2u);
}

TEST(DnsTriple, EqualScoresMatchExhaustiveEnumeration) {
  // N = 5, item 0 purchased, pool {1, 2, 3, 4}, X = 2.
  const auto d = oracle::make_dataset(5, {{0}});
  FactorModel m;
  m.users = Matrix(1, 2, 0.0);
  m.items = Matrix(5, 2, 0.0);
  const auto expected = oracle::dns_equal_score_distribution({1, 2, 3, 4}, 2);
  Rng rng(18);
  std::map<ItemIndex, int> hits;
  for (int k = 0; k < kDraws; ++k) ++hits[sample_dns_triple(d, m, 2, rng).neg];
  for (const auto& [item, p] : expected) {
    EXPECT_NEAR(hits[item] / double(kDraws), p, 0.01) << item;
  }
  EXPECT_DOUBLE_EQ(expected.at(1), 7.0 / 16.0);
}

// ----- biased pairs ----------------------------------------------------------

FeedbackDataset all_kinds_feasible() {
  return oracle::make_dataset(10, {{0, 1}, {2}, {3, 4}}, {{5, 6}, {7}, {8}});
}

TEST(BiasedPair, PointMassOnPurchasedVsViewed) {
  const auto d = all_kinds_feasible();
  Rng rng(19);
  for (int k = 0; k < 2000; ++k) {
    const auto p = sample_biased_pair(d, {1.0, 0.0, 0.0}, rng);
    ASSERT_EQ(p.kind, PairKind::PurchasedVsViewed);
    ASSERT_TRUE(d.is_purchased(p.user, p.pos));
    ASSERT_TRUE(d.is_viewed(p.user, p.neg));
  }
}

TEST(BiasedPair, KindFrequenciesFollowOmega) {
  const auto d = all_kinds_feasible();
  Rng rng(20);
  std::array<int, 3> hits{};
  for (int k = 0; k < kDraws; ++k) {
    const auto p = sample_biased_pair(d, {0.3, 0.3, 0.4}, rng);
    ++hits[static_cast<std::size_t>(p.kind)];
    ASSERT_NE(p.pos, p.neg);
  }
  EXPECT_NEAR(hits[0] / double(kDraws), 0.3, 0.01);
  EXPECT_NEAR(hits[1] / double(kDraws), 0.3, 0.01);
  EXPECT_NEAR(hits[2] / double(kDraws), 0.4, 0.01);
}

TEST(BiasedPair, MembershipMatchesKind) {
  Rng data_rng(21);
  const auto d = oracle::random_dataset(data_rng, 15, 30, 1, 5, 5);
  Rng rng(22);
  for (int k = 0; k < 20000; ++k) {
    const auto p = sample_biased_pair(d, {0.3, 0.3, 0.4}, rng);
    switch (p.kind) {
      case PairKind::PurchasedVsViewed:
        ASSERT_TRUE(d.is_purchased(p.user, p.pos) && d.is_viewed(p.user, p.neg));
        break;
      case PairKind::PurchasedVsUnobserved:
        ASSERT_TRUE(d.is_purchased(p.user, p.pos) && d.is_unobserved(p.user, p.neg));
        break;
      case PairKind::ViewedVsUnobserved:
        ASSERT_TRUE(d.is_viewed(p.user, p.pos) && d.is_unobserved(p.user, p.neg));
        break;
    }
  }
}

TEST(BiasedPair, UsersWithoutViewsRenormalizeAndKeepUniformMarginal) {
  const auto d = oracle::make_dataset(6, {{0}, {1}}, {{2}, {}});
  Rng rng(23);
  int user1 = 0;
  for (int k = 0; k < kDraws; ++k) {
    const auto p = sample_biased_pair(d, {0.3, 0.3, 0.4}, rng);
    if (p.user == 1) {
      ++user1;
      ASSERT_EQ(p.kind, PairKind::PurchasedVsUnobserved);
    }
  }
  EXPECT_NEAR(user1 / double(kDraws), 0.5, 0.01);
}

TEST(BiasedPair, PurchaseVersusUnobservedMatchesUniformTriple) {
  const auto d = oracle::make_dataset(6, {{0, 1}, {2}, {3, 4}}, {{2}, {5}, {}});
  Rng a(24), b(25);
  std::map<std::tuple<int, int, int>, int> biased, uniform;
  for (int k = 0; k < kDraws; ++k) {
    const auto p = sample_biased_pair(d, {0.0, 1.0, 0.0}, a);
    ASSERT_EQ(p.kind, PairKind::PurchasedVsUnobserved);
    ++biased[{p.user, p.pos, p.neg}];
    const auto t = sample_uniform_triple(d, b, NegativePool::Unobserved);
    ++uniform[{t.user, t.pos, t.neg}];
  }
  for (const auto& [cell, n] : uniform) {
    EXPECT_NEAR(biased[cell] / double(kDraws), n / double(kDraws), 0.01);
  }
  for (const auto& [cell, n] : biased) EXPECT_TRUE(uniform.count(cell));
}

// ----- quads -----------------------------------------------------------------

TEST(Quad, ForcedOutcome) {
  const auto d = oracle::make_dataset(3, {{0}}, {{1}});
  Rng rng(26);
  for (int k = 0; k < 100; ++k) EXPECT_EQ(sample_quad(d, rng), (QuadExample{0, 0, 1, 2}));
}

TEST(Quad, MembershipAndEligibility) {
  const auto d = oracle::make_dataset(12, {{0, 1}, {2}, {3, 4}, {5}}, {{6, 7}, {}, {8}, {}});
  Rng rng(27);
  std::array<int, 4> users{};
  for (int k = 0; k < kDraws; ++k) {
    const auto q = sample_quad(d, rng);
    ++users[q.user];
    ASSERT_TRUE(d.is_purchased(q.user, q.purchased));
    ASSERT_TRUE(d.is_viewed(q.user, q.viewed));
    ASSERT_TRUE(d.is_unobserved(q.user, q.unobserved));
  }
  EXPECT_EQ(users[1], 0);
  EXPECT_EQ(users[3], 0);
  EXPECT_NEAR(users[0] / double(kDraws), 0.5, 0.01);
}

TEST(Quad, NoViewsAnywhereIsALogicError) {
  const auto d = oracle::make_dataset(3, {{0}});
  Rng rng(28);
  EXPECT_THROW(sample_quad(d, rng), std::logic_error);
}

TEST(Samplers, FixedSeedGivesIdenticalSequences) {
  Rng data_rng(29);
  const auto d = oracle::random_dataset(data_rng, 10, 30, 2, 5, 4);
  Rng a(30), b(30);
  for (int k = 0; k < 500; ++k) {
    ASSERT_EQ(sample_quad(d, a), sample_quad(d, b));
    ASSERT_EQ(sample_biased_pair(d, {0.3, 0.3, 0.4}, a),
              sample_biased_pair(d, {0.3, 0.3, 0.4}, b));
  }
}

}  // namespace
}  // namespace viewbpr
