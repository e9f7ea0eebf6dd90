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

namespace viewbpr {

/// (u, i, j): u prefers i over j.
struct Triple {
  UserIndex user = 0;
  ItemIndex pos = 0;
  ItemIndex neg = 0;

  bool operator==(const Triple&) const = default;
};

enum class PairKind { PurchasedVsViewed, PurchasedVsUnobserved, ViewedVsUnobserved };

const char* to_string(PairKind kind);

struct PairExample {
  UserIndex user = 0;
  ItemIndex pos = 0;
  ItemIndex neg = 0;
  PairKind kind = PairKind::PurchasedVsUnobserved;

  Triple triple() const { return {user, pos, neg}; }
  bool operator==(const PairExample&) const = default;
};

/// (u, i, v, j): purchased i, viewed v, unobserved j.
struct QuadExample {
  UserIndex user = 0;
  ItemIndex purchased = 0;
  ItemIndex viewed = 0;
  ItemIndex unobserved = 0;

  bool operator==(const QuadExample&) const = default;
};

/// Number of items outside the pool-excluded set of user u.
std::size_t negative_pool_size(const FeedbackDataset& dataset, UserIndex u,
                               NegativePool pool);

bool in_negative_pool(const FeedbackDataset& dataset, UserIndex u, ItemIndex i,
                      NegativePool pool);

/**
 * Uniform draw from the negative pool of u. Tries rejection sampling first
 * (cheap on sparse data) and after 100 rejected attempts selects directly by
 * rank among the non-excluded items. Throws std::logic_error on an empty pool.
 */
ItemIndex draw_negative(const FeedbackDataset& dataset, UserIndex u,
                        NegativePool pool, Rng& rng);

/// u uniform over users, i uniform over S_u, j uniform over the pool.
Triple sample_uniform_triple(const FeedbackDataset& dataset, Rng& rng,
                             NegativePool pool = NegativePool::NotPurchased);

/// Fixed per-user negative candidate lists, sorted ascending.
class ReducedSpaces {
 public:
  ReducedSpaces() = default;
  explicit ReducedSpaces(std::vector<std::vector<ItemIndex>> spaces)
      : spaces_(std::move(spaces)) {}

  std::span<const ItemIndex> of(UserIndex u) const { return spaces_[u]; }
  std::size_t num_users() const { return spaces_.size(); }

  bool operator==(const ReducedSpaces&) const = default;

 private:
  std::vector<std::vector<ItemIndex>> spaces_;
};

/// max(1, floor(gamma * N)).
std::size_t reduced_space_size(std::size_t num_items, double gamma);

/**
 * Draws, for every user, reduced_space_size(N, gamma) distinct items without
 * replacement from the user's negative pool. Throws InfeasibleRatioError when
 * a user's pool is smaller than that. gamma = 1 keeps the whole pool and
 * draws nothing.
 */
ReducedSpaces build_reduced_spaces(const FeedbackDataset& dataset, double gamma,
                                   Rng& rng,
                                   NegativePool pool = NegativePool::NotPurchased);

Triple sample_reduced_triple(const FeedbackDataset& dataset,
                             const ReducedSpaces& spaces, Rng& rng);

/// Hardest of `candidates` uniform negatives under the current model; ties go
/// to the lowest item index.
Triple sample_dns_triple(const FeedbackDataset& dataset, const FactorModel& model,
                         std::size_t candidates, Rng& rng,
                         NegativePool pool = NegativePool::NotPurchased);

/**
 * Picks a pair kind with probabilities omega = (i,v), (i,j), (v,j),
 * renormalized over the kinds feasible for the drawn user, then draws each
 * member uniformly from its set. Negatives come from the unobserved pool.
 */
PairExample sample_biased_pair(const FeedbackDataset& dataset,
                               const std::array<double, 3>& omega, Rng& rng);

/// u uniform over users with views, then i, v, j uniform in S_u, V_u, R_u.
QuadExample sample_quad(const FeedbackDataset& dataset, Rng& rng);

}  // namespace viewbpr
