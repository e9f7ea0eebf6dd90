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

#pragma once

#include <viewbpr/core.hpp>

#include <functional>

namespace viewbpr {

/**
 * Leave-one-out split. `test[u]` is the latest purchase of u and
 * `validation[u]` a uniformly drawn other purchase; `train` keeps the
 * remaining purchases and every view.
 */
struct Splits {
  FeedbackDataset train;
  std::vector<ItemIndex> validation;
  std::vector<ItemIndex> test;

  bool operator==(const Splits&) const = default;
};

/// Latest purchase is the test item (ties: highest item index). Needs at
/// least three purchases per user, otherwise throws SplitError.
Splits split_leave_one_out(const FeedbackDataset& dataset, Rng& rng);

/// 1-based rank position of the held-out item, or nullopt for a miss.
using RankPosition = std::optional<std::size_t>;

double hr_at_k(RankPosition position, std::size_t k);

/// 1 / log2(p + 1) for a hit at p <= k, 0 otherwise.
double ndcg_at_k(RankPosition position, std::size_t k);

struct Metrics {
  double hr = 0.0;
  double ndcg = 0.0;
};

/// Per-user score of an item; must be safe to call for any valid (u, i).
using Scorer = std::function<double(UserIndex, ItemIndex)>;

/// Position of the test item among the top-k candidates of user u, where
/// candidates are all items except u's training and validation purchases.
RankPosition test_position(const Splits& splits, UserIndex u, const Scorer& scorer,
                           std::size_t k);

/// HR@k and NDCG@k averaged over users (summed in user order).
Metrics evaluate(const Splits& splits, const Scorer& scorer, std::size_t k);
Metrics evaluate(const FactorModel& model, const Splits& splits, std::size_t k = 100);

/// Training purchase count per item.
std::vector<double> popularity_baseline(const FeedbackDataset& train);
Metrics evaluate_popularity(const Splits& splits, std::size_t k = 100);

struct CurvePoint {
  double x = 0.0;  // fraction of items, most popular first
  double y = 0.0;  // fraction of interactions they carry
};

/// Per-item interaction counts of one behavior.
std::vector<std::size_t> item_counts(const FeedbackDataset& dataset, Behavior behavior);

/// Cumulative share of the top x fraction of items, read from the piecewise
/// linear curve through (r / N, share of top r items).
double cumulative_share(std::span<const std::size_t> sorted_desc, double x);

/**
 * Popularity skewness curve. Points are the grid 0.001, 0.01, 0.1, 0.2, ...,
 * 1.0, plus every breakpoint r / N when N <= breakpoint_limit, sorted by x.
 * Throws std::invalid_argument when all counts are zero.
 */
std::vector<CurvePoint> skewness_curve(std::vector<std::size_t> counts,
                                       std::size_t breakpoint_limit = 1000);

}  // namespace viewbpr
