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

/// Zero-mean Gaussian factors with standard deviation `scale`; P is filled
/// before Q from one engine seeded with `seed`.
FactorModel init_model(std::size_t num_users, std::size_t num_items,
                       std::size_t factors, std::uint64_t seed,
                       double scale = 0.01);

double dot(std::span<const double> a, std::span<const double> b);

/// p_u . q_i. Throws std::out_of_range on a bad index.
double predict(const FactorModel& model, UserIndex u, ItemIndex i);

struct ScoredItem {
  ItemIndex item = 0;
  double score = 0.0;

  bool operator==(const ScoredItem&) const = default;
};

/// Ranking order: higher score first, lower item index on ties.
inline bool ranks_before(const ScoredItem& a, const ScoredItem& b) {
  return a.score > b.score || (a.score == b.score && a.item < b.item);
}

/**
 * The k best items of [0, num_items) under `score`, skipping those listed in
 * `excluded` (sorted ascending). Uses a bounded heap, so the cost is
 * O(N log k). Returns fewer than k entries when there are not enough
 * candidates.
 */
std::vector<ScoredItem> select_top_k(std::size_t num_items,
                                     const std::function<double(ItemIndex)>& score,
                                     std::span<const ItemIndex> excluded,
                                     std::size_t k);

std::vector<ScoredItem> rank_items(const FactorModel& model, UserIndex u,
                                   std::span<const ItemIndex> excluded,
                                   std::size_t k);

}  // namespace viewbpr
