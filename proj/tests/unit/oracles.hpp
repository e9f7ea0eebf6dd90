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

// Independent reference implementations used by the unit and acceptance
// suites. None of them call into the library code they are checking; they
// trade speed for obviousness.

#pragma once

#include <viewbpr/core.hpp>
#include <viewbpr/eval.hpp>
#include <viewbpr/ingest.hpp>
#include <viewbpr/samplers.hpp>

#include <map>
#include <set>
#include <string>
#include <vector>

namespace viewbpr::oracle {

// ----- fixtures ------------------------------------------------------------

/// Dataset from item lists; timestamps are the position in each list.
FeedbackDataset make_dataset(std::size_t num_items,
                             const std::vector<std::vector<ItemIndex>>& purchases,
                             const std::vector<std::vector<ItemIndex>>& views = {});

/// Random valid dataset: each user gets purchases in [min_p, max_p] and up to
/// max_v views, with distinct random timestamps.
FeedbackDataset random_dataset(Rng& rng, std::size_t num_users, std::size_t num_items,
                               std::size_t min_purchases, std::size_t max_purchases,
                               std::size_t max_views);

/// Random model with entries uniform in [-scale, scale].
FactorModel random_model(Rng& rng, std::size_t num_users, std::size_t num_items,
                         std::size_t factors, double scale = 1.0);

struct PlantedData {
  FeedbackDataset dataset;
  FactorModel truth;
};

/// Ground-truth factors; per user the top `purchases` items by true score
/// are bought (with `swaps` of them exchanged for random lower-tier items)
/// and the next `views` items are viewed.
PlantedData planted_dataset(std::uint64_t seed, std::size_t num_users, std::size_t num_items,
                            std::size_t factors, std::size_t purchases, std::size_t views,
                            std::size_t swaps);

// ----- numerics ------------------------------------------------------------

long double sigmoid_ld(long double x);
long double naive_dot(const std::vector<double>& a, const std::vector<double>& b);

/// Pairwise loss plus (reg / 2) * squared norms of the three touched rows.
long double pair_objective(const FactorModel& m, const Triple& t, double reg);
/// Three-relation loss plus (reg / 2) * squared norms of the four touched rows.
long double quad_objective(const FactorModel& m, const QuadExample& q, double alpha,
                           double reg);

/// Central-difference ascent direction (minus the gradient of the objective)
/// for one factor entry; `row_is_user` selects P or Q.
double fd_ascent_pair(FactorModel m, const Triple& t, double reg, bool row_is_user,
                      std::size_t row, std::size_t col, double h = 1e-5);
double fd_ascent_quad(FactorModel m, const QuadExample& q, double alpha, double reg,
                      bool row_is_user, std::size_t row, std::size_t col, double h = 1e-5);

/// |a - b| <= rel * max(|a|, |b|) or |a - b| <= abs_floor.
bool close(double a, double b, double rel, double abs_floor = 1e-9);

// ----- ingest ----------------------------------------------------------------

/// Survivors of the activity filter, found by enumerating every pair of user
/// and item subsets and taking the union of the qualifying ones. Inputs must
/// have at most 6 distinct users and items and no duplicate purchases.
std::vector<Interaction> brute_force_activity_filter(const std::vector<Interaction>& events,
                                                     std::size_t min_user,
                                                     std::size_t min_item);

struct Counts {
  std::size_t purchases = 0;
  std::size_t views = 0;
  std::size_t users = 0;
  std::size_t items = 0;
  double purchase_sparsity = 0.0;
  double view_sparsity = 0.0;
};

/// Table-style counts recomputed straight from a list of clean events.
Counts count_events(const std::vector<Interaction>& events);

// ----- evaluation ------------------------------------------------------------

struct BruteMetrics {
  double hr = 0.0;
  double ndcg = 0.0;
};

/// Full score table, full sort of each user's candidates, then HR/NDCG.
BruteMetrics brute_force_evaluate(const FactorModel& model, const Splits& splits,
                                  std::size_t k);

// ----- samplers ----------------------------------------------------------------

/// Exact distribution of the DNS negative when every score is equal: all
/// ordered candidate tuples of length x over `pool`, each equally likely,
/// resolved to the lowest index.
std::map<ItemIndex, double> dns_equal_score_distribution(const std::vector<ItemIndex>& pool,
                                                         std::size_t x);

}  // namespace viewbpr::oracle
