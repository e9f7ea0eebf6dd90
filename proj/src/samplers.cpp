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

#include <viewbpr/samplers.hpp>

#include <viewbpr/model.hpp>

#include <algorithm>
#include <cmath>
#include <unordered_set>

namespace viewbpr {

namespace {

constexpr int kMaxRejections = 100;

template <typename T>
T uniform_below(T n, Rng& rng) {
  return std::uniform_int_distribution<T>(0, n - 1)(rng);
}

template <typename T>
T pick(std::span<const T> values, Rng& rng) {
  return values[uniform_below<std::size_t>(values.size(), rng)];
}

UserIndex draw_user(const FeedbackDataset& dataset, Rng& rng) {
  return static_cast<UserIndex>(uniform_below<std::size_t>(dataset.num_users(), rng));
}

// Sorted, duplicate-free list of the items excluded from u's pool.
std::vector<ItemIndex> excluded_items(const FeedbackDataset& dataset, UserIndex u,
                                      NegativePool pool) {
  const auto bought = dataset.purchased(u);
  std::vector<ItemIndex> out(bought.begin(), bought.end());
  if (pool == NegativePool::Unobserved) {
    const auto seen = dataset.viewed(u);
    std::vector<ItemIndex> merged;
    merged.reserve(out.size() + seen.size());
    std::set_union(out.begin(), out.end(), seen.begin(), seen.end(),
                   std::back_inserter(merged));
    out = std::move(merged);
  }
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

// The rank-th (0-based) item not in `excluded`. The number of free items
// below excluded[p] is excluded[p] - p, which never decreases in p.
ItemIndex nth_free_item(std::span<const ItemIndex> excluded, std::size_t rank) {
  std::size_t lo = 0;
  std::size_t hi = excluded.size();
  while (lo < hi) {
    const auto mid = lo + (hi - lo) / 2;
    if (excluded[mid] - mid <= rank) {
      lo = mid + 1;
    } else {
      hi = mid;
    }
  }
  return static_cast<ItemIndex>(rank + lo);
}

}  // namespace

const char* to_string(PairKind kind) {
  switch (kind) {
    case PairKind::PurchasedVsViewed:
      return "purchased-vs-viewed";
    case PairKind::PurchasedVsUnobserved:
      return "purchased-vs-unobserved";
    case PairKind::ViewedVsUnobserved:
      return "viewed-vs-unobserved";
  }
  return "?";
}

std::size_t negative_pool_size(const FeedbackDataset& dataset, UserIndex u,
                               NegativePool pool) {
  return dataset.num_items() - excluded_items(dataset, u, pool).size();
}

bool in_negative_pool(const FeedbackDataset& dataset, UserIndex u, ItemIndex i,
                      NegativePool pool) {
  if (dataset.is_purchased(u, i)) {
    return false;
  }
  return pool == NegativePool::NotPurchased || !dataset.is_viewed(u, i);
}

ItemIndex draw_negative(const FeedbackDataset& dataset, UserIndex u,
                        NegativePool pool, Rng& rng) {
  const auto n = dataset.num_items();
  for (int attempt = 0; attempt < kMaxRejections; ++attempt) {
    const auto j = static_cast<ItemIndex>(uniform_below<std::size_t>(n, rng));
    if (in_negative_pool(dataset, u, j, pool)) {
      return j;
    }
  }
  // Dense user: select by rank among the free items instead.
  const auto excluded = excluded_items(dataset, u, pool);
  if (excluded.size() >= n) {
    throw std::logic_error("user " + std::to_string(u) +
                           " has no negative candidates");
  }
  return nth_free_item(excluded, uniform_below<std::size_t>(n - excluded.size(), rng));
}

Triple sample_uniform_triple(const FeedbackDataset& dataset, Rng& rng,
                             NegativePool pool) {
  const auto u = draw_user(dataset, rng);
  const auto i = pick(dataset.purchased(u), rng);
  const auto j = draw_negative(dataset, u, pool, rng);
  return {u, i, j};
}

std::size_t reduced_space_size(std::size_t num_items, double gamma) {
  const auto scaled =
      static_cast<std::size_t>(std::floor(gamma * static_cast<double>(num_items)));
  return std::max<std::size_t>(1, scaled);
}

ReducedSpaces build_reduced_spaces(const FeedbackDataset& dataset, double gamma,
                                   Rng& rng, NegativePool pool) {
  if (!(gamma > 0.0 && gamma <= 1.0)) {
    throw ConfigError("gamma must lie in (0, 1]");
  }
  const auto n = dataset.num_items();
  const auto size = reduced_space_size(n, gamma);
  std::vector<std::vector<ItemIndex>> spaces(dataset.num_users());
  for (UserIndex u = 0; u < dataset.num_users(); ++u) {
    const auto excluded = excluded_items(dataset, u, pool);
    const auto free = n - excluded.size();
    if (gamma == 1.0) {
      for (std::size_t rank = 0; rank < free; ++rank) {
        spaces[u].push_back(nth_free_item(excluded, rank));
      }
      continue;
    }
    if (size > free) {
      throw InfeasibleRatioError(
          "reduced space of " + std::to_string(size) + " items is infeasible for user " +
          std::to_string(u) + ", who has only " + std::to_string(free) +
          " negative candidates");
    }
    // Floyd's sampling of `size` distinct ranks out of `free`.
    std::unordered_set<std::size_t> chosen;
    chosen.reserve(size * 2);
    for (std::size_t t = free - size; t < free; ++t) {
      const auto r = uniform_below<std::size_t>(t + 1, rng);
      if (!chosen.insert(r).second) {
        chosen.insert(t);
      }
    }
    auto& space = spaces[u];
    space.reserve(size);
    for (auto rank : chosen) {
      space.push_back(nth_free_item(excluded, rank));
    }
    std::sort(space.begin(), space.end());
  }
  return ReducedSpaces(std::move(spaces));
}

Triple sample_reduced_triple(const FeedbackDataset& dataset,
                             const ReducedSpaces& spaces, Rng& rng) {
  const auto u = draw_user(dataset, rng);
  const auto i = pick(dataset.purchased(u), rng);
  const auto j = pick(spaces.of(u), rng);
  return {u, i, j};
}

Triple sample_dns_triple(const FeedbackDataset& dataset, const FactorModel& model,
                         std::size_t candidates, Rng& rng, NegativePool pool) {
  if (candidates < 1) {
    throw std::invalid_argument("DNS needs at least one candidate");
  }
  const auto u = draw_user(dataset, rng);
  const auto i = pick(dataset.purchased(u), rng);
  ScoredItem best{0, 0.0};
  for (std::size_t c = 0; c < candidates; ++c) {
    const auto j = draw_negative(dataset, u, pool, rng);
    const ScoredItem cand{j, predict(model, u, j)};
    if (c == 0 || ranks_before(cand, best)) {
      best = cand;
    }
  }
  return {u, i, best.item};
}

PairExample sample_biased_pair(const FeedbackDataset& dataset,
                               const std::array<double, 3>& omega, Rng& rng) {
  const auto u = draw_user(dataset, rng);
  const bool has_views = !dataset.viewed(u).empty();
  const bool has_unobserved =
      negative_pool_size(dataset, u, NegativePool::Unobserved) > 0;

  const std::array<bool, 3> feasible{has_views, has_unobserved,
                                     has_views && has_unobserved};
  std::array<double, 3> weight{};
  double total = 0.0;
  for (std::size_t k = 0; k < 3; ++k) {
    weight[k] = feasible[k] ? omega[k] : 0.0;
    total += weight[k];
  }
  std::size_t kind = 1;
  if (total > 0.0) {
    const double r = std::uniform_real_distribution<double>(0.0, total)(rng);
    double cumulative = 0.0;
    for (std::size_t k = 0; k < 3; ++k) {
      if (weight[k] <= 0.0) {
        continue;
      }
      kind = k;
      cumulative += weight[k];
      if (r < cumulative) {
        break;
      }
    }
  } else if (!has_unobserved) {
    // Every feasible kind carries zero weight; (i, j) is the fallback.
    throw std::logic_error("no feasible pair kind for user " + std::to_string(u));
  }

  PairExample ex;
  ex.user = u;
  switch (kind) {
    case 0:
      ex.kind = PairKind::PurchasedVsViewed;
      ex.pos = pick(dataset.purchased(u), rng);
      ex.neg = pick(dataset.viewed(u), rng);
      break;
    case 1:
      ex.kind = PairKind::PurchasedVsUnobserved;
      ex.pos = pick(dataset.purchased(u), rng);
      ex.neg = draw_negative(dataset, u, NegativePool::Unobserved, rng);
      break;
    default:
      ex.kind = PairKind::ViewedVsUnobserved;
      ex.pos = pick(dataset.viewed(u), rng);
      ex.neg = draw_negative(dataset, u, NegativePool::Unobserved, rng);
      break;
  }
  return ex;
}

QuadExample sample_quad(const FeedbackDataset& dataset, Rng& rng) {
  const auto eligible = dataset.users_with_views();
  if (eligible.empty()) {
    throw std::logic_error("no user has viewed items");
  }
  const auto u = pick(eligible, rng);
  QuadExample ex;
  ex.user = u;
  ex.purchased = pick(dataset.purchased(u), rng);
  ex.viewed = pick(dataset.viewed(u), rng);
  ex.unobserved = draw_negative(dataset, u, NegativePool::Unobserved, rng);
  return ex;
}

}  // namespace viewbpr
