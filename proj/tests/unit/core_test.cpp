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

#include <viewbpr/core.hpp>

#include <gtest/gtest.h>

#include "oracles.hpp"

namespace viewbpr {
namespace {

TEST(FeedbackDataset, SortsItemsAndKeepsTimestampsAligned) {
  FeedbackDataset d(1, 5, {{{3, 30}, {1, 10}, {4, 40}}}, {{{2, 20}}});
  const auto p = d.purchased(0);
  ASSERT_EQ(p.size(), 3u);
  EXPECT_EQ(p[0], 1u);
  EXPECT_EQ(p[1], 3u);
  EXPECT_EQ(p[2], 4u);
  EXPECT_EQ(d.purchase_timestamps(0)[1], 30);
  EXPECT_EQ(d.purchase_time(0, 4), 40);
  EXPECT_EQ(d.view_time(0, 2), 20);
  EXPECT_FALSE(d.purchase_time(0, 2).has_value());
  EXPECT_TRUE(d.is_purchased(0, 3));
  EXPECT_TRUE(d.is_viewed(0, 2));
  EXPECT_TRUE(d.is_unobserved(0, 0));
  EXPECT_EQ(d.total_purchases(), 3u);
  EXPECT_EQ(d.total_views(), 1u);
}

TEST(FeedbackDataset, ListsUsersWithViews) {
  const auto d = oracle::make_dataset(6, {{0}, {1}, {2}}, {{3}, {}, {4, 5}});
  const auto users = d.users_with_views();
  ASSERT_EQ(users.size(), 2u);
  EXPECT_EQ(users[0], 0u);
  EXPECT_EQ(users[1], 2u);
}

TEST(ValidateDataset, OverlapNamesUserAndItem) {
  const auto d = oracle::make_dataset(2, {{1}}, {{1}});
  const auto v = validate_dataset(d);
  ASSERT_EQ(v.size(), 1u);
  EXPECT_EQ(v[0].kind, ViolationKind::PurchasedAndViewed);
  EXPECT_EQ(v[0].user, 0u);
  EXPECT_EQ(v[0].item, 1u);
}

TEST(ValidateDataset, ValidDatasetHasNoViolations) {
  const auto d = oracle::make_dataset(3, {{1}}, {{2}});
  EXPECT_TRUE(validate_dataset(d).empty());
}

TEST(ValidateDataset, EmptyPurchaseSetNamesUser) {
  const auto d = oracle::make_dataset(3, {{0}, {}}, {{}, {1}});
  const auto v = validate_dataset(d);
  ASSERT_EQ(v.size(), 1u);
  EXPECT_EQ(v[0].kind, ViolationKind::NoPurchases);
  EXPECT_EQ(v[0].user, 1u);
}

TEST(ValidateDataset, ReportsOutOfRangeDuplicatesAndNegativeTimes) {
  FeedbackDataset d(1, 3, {{{0, 1}, {0, 2}, {7, 3}}}, {{{1, -5}}});
  const auto v = validate_dataset(d);
  auto has = [&](ViolationKind k) {
    return std::any_of(v.begin(), v.end(), [k](const Violation& x) { return x.kind == k; });
  };
  EXPECT_TRUE(has(ViolationKind::ItemOutOfRange));
  EXPECT_TRUE(has(ViolationKind::DuplicateItem));
  EXPECT_TRUE(has(ViolationKind::NegativeTimestamp));
}

TEST(ValidateDataset, IsIdempotent) {
  const auto d = oracle::make_dataset(2, {{1}, {}}, {{1}});
  const auto a = validate_dataset(d);
  const auto b = validate_dataset(d);
  ASSERT_EQ(a.size(), b.size());
  for (std::size_t k = 0; k < a.size(); ++k) {
    EXPECT_EQ(a[k].kind, b[k].kind);
    EXPECT_EQ(a[k].message, b[k].message);
  }
}

TEST(SamplerConfig, RejectsBadValues) {
  SamplerConfig c;
  EXPECT_NO_THROW(c.validate());
  c.gamma = 0.0;
  EXPECT_THROW(c.validate(), ConfigError);
  c.gamma = 1.5;
  EXPECT_THROW(c.validate(), ConfigError);
  c = {};
  c.omega = {0.5, 0.5, 0.5};
  EXPECT_THROW(c.validate(), ConfigError);
  c.omega = {-0.1, 0.6, 0.5};
  EXPECT_THROW(c.validate(), ConfigError);
  c = {};
  c.dns_candidates = 0;
  EXPECT_THROW(c.validate(), ConfigError);
}

TEST(SamplerConfig, PoolDependsOnSampler) {
  SamplerConfig c;
  EXPECT_EQ(c.negative_pool(), NegativePool::NotPurchased);
  c.kind = SamplerKind::TripleView;
  EXPECT_EQ(c.negative_pool(), NegativePool::Unobserved);
  c.kind = SamplerKind::BiasedView;
  EXPECT_EQ(c.negative_pool(), NegativePool::Unobserved);
}

TEST(WeightingConfig, RejectsBadValues) {
  WeightingConfig w;
  EXPECT_NO_THROW(w.validate());
  w.alpha = 1.2;
  EXPECT_THROW(w.validate(), ConfigError);
  w = {};
  w.mode = WeightingMode::PerUser;
  w.beta = 0.0;
  EXPECT_THROW(w.validate(), ConfigError);
  w.beta = 0.5;
  w.session_gap = 0;
  EXPECT_THROW(w.validate(), ConfigError);
}

TEST(TrainConfig, RejectsBadValues) {
  TrainConfig t;
  EXPECT_NO_THROW(t.validate());
  EXPECT_EQ(t.factors, 32u);
  EXPECT_EQ(t.eval_k, 100u);
  t.learning_rate = 0.0;
  EXPECT_THROW(t.validate(), ConfigError);
  t = {};
  t.regularization = -1.0;
  EXPECT_THROW(t.validate(), ConfigError);
  t = {};
  t.factors = 0;
  EXPECT_THROW(t.validate(), ConfigError);
}

TEST(DeriveSeed, StreamsDiffer) {
  EXPECT_NE(derive_seed(1, 0), derive_seed(1, 1));
  EXPECT_NE(derive_seed(1, 0), derive_seed(2, 0));
  EXPECT_EQ(derive_seed(7, 3), derive_seed(7, 3));
}

}  // namespace
}  // namespace viewbpr
