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

#include <algorithm>
#include <cmath>
#include <sstream>

namespace viewbpr {

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) {
  std::uint64_t z = seed + (stream + 1) * 0x9E3779B97F4A7C15ULL;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

const char* to_string(Behavior behavior) {
  return behavior == Behavior::Purchase ? "purchase" : "view";
}

namespace {

void split_sorted(std::vector<TimedItem> entries,
                  std::vector<ItemIndex>& items,
                  std::vector<Timestamp>& stamps) {
  std::stable_sort(entries.begin(), entries.end(),
                   [](const TimedItem& a, const TimedItem& b) {
                     return a.item < b.item;
                   });
  items.reserve(entries.size());
  stamps.reserve(entries.size());
  for (const auto& e : entries) {
    items.push_back(e.item);
    stamps.push_back(e.timestamp);
  }
}

bool contains(std::span<const ItemIndex> sorted, ItemIndex i) {
  return std::binary_search(sorted.begin(), sorted.end(), i);
}

std::optional<Timestamp> lookup(std::span<const ItemIndex> sorted,
                                std::span<const Timestamp> stamps,
                                ItemIndex i) {
  auto it = std::lower_bound(sorted.begin(), sorted.end(), i);
  if (it == sorted.end() || *it != i) {
    return std::nullopt;
  }
  return stamps[static_cast<std::size_t>(it - sorted.begin())];
}

std::vector<TimedItem> zip(std::span<const ItemIndex> items,
                           std::span<const Timestamp> stamps) {
  std::vector<TimedItem> out;
  out.reserve(items.size());
  for (std::size_t k = 0; k < items.size(); ++k) {
    out.push_back({items[k], stamps[k]});
  }
  return out;
}

}  // namespace

FeedbackDataset::FeedbackDataset(std::size_t num_users, std::size_t num_items,
                                 std::vector<std::vector<TimedItem>> purchases,
                                 std::vector<std::vector<TimedItem>> views,
                                 bool timestamps_day_granular)
    : num_items_(num_items), day_granular_(timestamps_day_granular) {
  purchases.resize(num_users);
  views.resize(num_users);
  purchased_.resize(num_users);
  purchase_ts_.resize(num_users);
  viewed_.resize(num_users);
  view_ts_.resize(num_users);
  for (std::size_t u = 0; u < num_users; ++u) {
    split_sorted(std::move(purchases[u]), purchased_[u], purchase_ts_[u]);
    split_sorted(std::move(views[u]), viewed_[u], view_ts_[u]);
    total_purchases_ += purchased_[u].size();
    total_views_ += viewed_[u].size();
    if (!viewed_[u].empty()) {
      users_with_views_.push_back(static_cast<UserIndex>(u));
    }
  }
}

bool FeedbackDataset::is_purchased(UserIndex u, ItemIndex i) const {
  return contains(purchased_[u], i);
}

bool FeedbackDataset::is_viewed(UserIndex u, ItemIndex i) const {
  return contains(viewed_[u], i);
}

std::optional<Timestamp> FeedbackDataset::purchase_time(UserIndex u,
                                                        ItemIndex i) const {
  return lookup(purchased_[u], purchase_ts_[u], i);
}

std::optional<Timestamp> FeedbackDataset::view_time(UserIndex u,
                                                    ItemIndex i) const {
  return lookup(viewed_[u], view_ts_[u], i);
}

std::vector<TimedItem> FeedbackDataset::purchase_entries(UserIndex u) const {
  return zip(purchased_[u], purchase_ts_[u]);
}

std::vector<TimedItem> FeedbackDataset::view_entries(UserIndex u) const {
  return zip(viewed_[u], view_ts_[u]);
}

std::vector<Violation> validate_dataset(const FeedbackDataset& dataset) {
  std::vector<Violation> out;
  auto report = [&out](ViolationKind kind, UserIndex u,
                       std::optional<ItemIndex> item, const std::string& what) {
    std::ostringstream msg;
    msg << what << " (user " << u;
    if (item) {
      msg << ", item " << *item;
    }
    msg << ")";
    out.push_back({kind, u, item, msg.str()});
  };

  const auto n = dataset.num_items();
  for (UserIndex u = 0; u < dataset.num_users(); ++u) {
    const auto bought = dataset.purchased(u);
    const auto seen = dataset.viewed(u);
    if (bought.empty()) {
      report(ViolationKind::NoPurchases, u, std::nullopt,
             "user has no purchases");
    }
    for (const auto& [items, stamps, label] :
         {std::tuple{bought, dataset.purchase_timestamps(u), "purchased"},
          std::tuple{seen, dataset.view_timestamps(u), "viewed"}}) {
      for (std::size_t k = 0; k < items.size(); ++k) {
        if (items[k] >= n) {
          report(ViolationKind::ItemOutOfRange, u, items[k],
                 std::string(label) + " item index out of range");
        }
        if (k > 0 && items[k] == items[k - 1]) {
          report(ViolationKind::DuplicateItem, u, items[k],
                 std::string(label) + " item listed twice");
        }
        if (stamps[k] < 0) {
          report(ViolationKind::NegativeTimestamp, u, items[k],
                 "negative timestamp");
        }
      }
    }
    // Both lists are sorted, so a merge walk finds the overlap.
    std::size_t a = 0;
    std::size_t b = 0;
    while (a < bought.size() && b < seen.size()) {
      if (bought[a] < seen[b]) {
        ++a;
      } else if (seen[b] < bought[a]) {
        ++b;
      } else {
        report(ViolationKind::PurchasedAndViewed, u, bought[a],
               "item is both purchased and viewed");
        ++a;
        ++b;
      }
    }
  }
  return out;
}

bool FactorModel::all_finite() const {
  auto finite = [](std::span<const double> values) {
    return std::all_of(values.begin(), values.end(),
                       [](double x) { return std::isfinite(x); });
  };
  return finite(users.data()) && finite(items.data());
}

void SamplerConfig::validate() const {
  if (!(gamma > 0.0 && gamma <= 1.0)) {
    throw ConfigError("gamma must lie in (0, 1], got " +
                      std::to_string(gamma));
  }
  double sum = 0.0;
  for (double w : omega) {
    if (!(w >= 0.0) || !std::isfinite(w)) {
      throw ConfigError("omega entries must be non-negative");
    }
    sum += w;
  }
  if (std::abs(sum - 1.0) > 1e-9) {
    throw ConfigError("omega entries must sum to 1");
  }
  if (dns_candidates < 1) {
    throw ConfigError("dns candidate count must be at least 1");
  }
}

NegativePool SamplerConfig::negative_pool() const {
  switch (kind) {
    case SamplerKind::Uniform:
    case SamplerKind::ReducedSpace:
    case SamplerKind::DNS:
      return purchase_only_pool;
    case SamplerKind::BiasedView:
    case SamplerKind::TripleView:
      return NegativePool::Unobserved;
  }
  return NegativePool::Unobserved;
}

void WeightingConfig::validate() const {
  if (mode == WeightingMode::Global) {
    if (!(alpha >= 0.0 && alpha <= 1.0)) {
      throw ConfigError("alpha must lie in [0, 1]");
    }
  } else {
    if (!(beta > 0.0) || !std::isfinite(beta)) {
      throw ConfigError("beta must be positive");
    }
    if (session_gap <= 0) {
      throw ConfigError("session gap must be positive");
    }
  }
}

void TrainConfig::validate() const {
  if (!(learning_rate > 0.0) || !std::isfinite(learning_rate)) {
    throw ConfigError("learning rate must be positive");
  }
  if (!(regularization >= 0.0) || !std::isfinite(regularization)) {
    throw ConfigError("regularization must be non-negative");
  }
  if (factors < 1) {
    throw ConfigError("factor count must be at least 1");
  }
  if (!(init_scale > 0.0)) {
    throw ConfigError("init scale must be positive");
  }
  if (max_epochs < 1) {
    throw ConfigError("max epochs must be at least 1");
  }
  if (eval_k < 1) {
    throw ConfigError("evaluation cutoff must be at least 1");
  }
}

const char* to_string(SamplerKind kind) {
  switch (kind) {
    case SamplerKind::Uniform:
      return "uniform";
    case SamplerKind::ReducedSpace:
      return "reduced";
    case SamplerKind::DNS:
      return "dns";
    case SamplerKind::BiasedView:
      return "biased";
    case SamplerKind::TripleView:
      return "triple";
  }
  return "?";
}

const char* to_string(WeightingMode mode) {
  return mode == WeightingMode::Global ? "global" : "per-user";
}

const char* to_string(LearningRateMode mode) {
  return mode == LearningRateMode::Fixed ? "fixed" : "adagrad";
}

const char* to_string(NegativePool pool) {
  return pool == NegativePool::NotPurchased ? "not-purchased" : "unobserved";
}

}  // namespace viewbpr
