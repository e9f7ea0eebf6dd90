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

#include <viewbpr/eval.hpp>

#include <viewbpr/model.hpp>

#include <algorithm>
#include <cmath>
#include <numeric>

namespace viewbpr {

Splits split_leave_one_out(const FeedbackDataset& dataset, Rng& rng) {
  const auto m = dataset.num_users();
  Splits out;
  out.validation.resize(m);
  out.test.resize(m);
  std::vector<std::vector<TimedItem>> train(m);
  std::vector<std::vector<TimedItem>> views(m);
  for (UserIndex u = 0; u < m; ++u) {
    auto entries = dataset.purchase_entries(u);
    if (entries.size() < 3) {
      throw SplitError("user " + std::to_string(u) + " has " +
                       std::to_string(entries.size()) +
                       " purchase(s); leave-one-out needs at least 3");
    }
    const auto latest = std::max_element(
        entries.begin(), entries.end(), [](const TimedItem& a, const TimedItem& b) {
          return std::tie(a.timestamp, a.item) < std::tie(b.timestamp, b.item);
        });
    out.test[u] = latest->item;
    entries.erase(latest);
    const auto pick =
        std::uniform_int_distribution<std::size_t>(0, entries.size() - 1)(rng);
    out.validation[u] = entries[pick].item;
    entries.erase(entries.begin() + static_cast<std::ptrdiff_t>(pick));
    train[u] = std::move(entries);
    views[u] = dataset.view_entries(u);
  }
  out.train = FeedbackDataset(m, dataset.num_items(), std::move(train),
                              std::move(views), dataset.timestamps_day_granular());
  return out;
}

double hr_at_k(RankPosition position, std::size_t k) {
  return position && *position >= 1 && *position <= k ? 1.0 : 0.0;
}

double ndcg_at_k(RankPosition position, std::size_t k) {
  if (!position || *position < 1 || *position > k) {
    return 0.0;
  }
  return 1.0 / std::log2(static_cast<double>(*position) + 1.0);
}

RankPosition test_position(const Splits& splits, UserIndex u, const Scorer& scorer,
                           std::size_t k) {
  const auto bought = splits.train.purchased(u);
  std::vector<ItemIndex> excluded(bought.begin(), bought.end());
  excluded.insert(std::upper_bound(excluded.begin(), excluded.end(),
                                   splits.validation[u]),
                  splits.validation[u]);
  const auto top = select_top_k(
      splits.train.num_items(), [&](ItemIndex i) { return scorer(u, i); },
      excluded, k);
  for (std::size_t p = 0; p < top.size(); ++p) {
    if (top[p].item == splits.test[u]) {
      return p + 1;
    }
  }
  return std::nullopt;
}

Metrics evaluate(const Splits& splits, const Scorer& scorer, std::size_t k) {
  Metrics sum;
  const auto m = splits.train.num_users();
  if (m == 0) {
    return sum;
  }
  for (UserIndex u = 0; u < m; ++u) {
    const auto position = test_position(splits, u, scorer, k);
    sum.hr += hr_at_k(position, k);
    sum.ndcg += ndcg_at_k(position, k);
  }
  sum.hr /= static_cast<double>(m);
  sum.ndcg /= static_cast<double>(m);
  return sum;
}

Metrics evaluate(const FactorModel& model, const Splits& splits, std::size_t k) {
  if (model.num_users() != splits.train.num_users() ||
      model.num_items() != splits.train.num_items()) {
    throw ConfigError("model dimensions do not match the dataset");
  }
  return evaluate(
      splits,
      [&model](UserIndex u, ItemIndex i) {
        return dot(model.users.row(u), model.items.row(i));
      },
      k);
}

std::vector<double> popularity_baseline(const FeedbackDataset& train) {
  std::vector<double> counts(train.num_items(), 0.0);
  for (UserIndex u = 0; u < train.num_users(); ++u) {
    for (auto i : train.purchased(u)) {
      counts[i] += 1.0;
    }
  }
  return counts;
}

Metrics evaluate_popularity(const Splits& splits, std::size_t k) {
  const auto counts = popularity_baseline(splits.train);
  return evaluate(
      splits, [&counts](UserIndex, ItemIndex i) { return counts[i]; }, k);
}

std::vector<std::size_t> item_counts(const FeedbackDataset& dataset,
                                     Behavior behavior) {
  std::vector<std::size_t> counts(dataset.num_items(), 0);
  for (UserIndex u = 0; u < dataset.num_users(); ++u) {
    const auto items =
        behavior == Behavior::Purchase ? dataset.purchased(u) : dataset.viewed(u);
    for (auto i : items) {
      ++counts[i];
    }
  }
  return counts;
}

double cumulative_share(std::span<const std::size_t> sorted_desc, double x) {
  const auto n = sorted_desc.size();
  const double total = static_cast<double>(
      std::accumulate(sorted_desc.begin(), sorted_desc.end(), std::size_t{0}));
  if (n == 0 || total == 0.0) {
    throw std::invalid_argument("skewness needs at least one interaction");
  }
  double position = std::clamp(x, 0.0, 1.0) * static_cast<double>(n);
  if (std::abs(position - std::round(position)) < 1e-9) {
    position = std::round(position);
  }
  const auto whole = std::min(n, static_cast<std::size_t>(std::floor(position)));
  double covered = 0.0;
  for (std::size_t r = 0; r < whole; ++r) {
    covered += static_cast<double>(sorted_desc[r]);
  }
  if (whole < n) {
    covered += (position - static_cast<double>(whole)) *
               static_cast<double>(sorted_desc[whole]);
  }
  return covered / total;
}

std::vector<CurvePoint> skewness_curve(std::vector<std::size_t> counts,
                                       std::size_t breakpoint_limit) {
  std::sort(counts.begin(), counts.end(), std::greater<>());
  const auto n = counts.size();
  std::vector<double> xs{0.001, 0.01};
  for (int tenth = 1; tenth <= 10; ++tenth) {
    xs.push_back(tenth / 10.0);
  }
  if (n <= breakpoint_limit) {
    for (std::size_t r = 1; r <= n; ++r) {
      xs.push_back(static_cast<double>(r) / static_cast<double>(n));
    }
  }
  std::sort(xs.begin(), xs.end());
  // 3/10 and 60/200 may differ in the last bit; keep one of them.
  xs.erase(std::unique(xs.begin(), xs.end(),
                       [](double a, double b) { return b - a < 1e-12; }),
           xs.end());

  std::vector<CurvePoint> curve;
  curve.reserve(xs.size());
  for (double x : xs) {
    curve.push_back({x, cumulative_share(counts, x)});
  }
  return curve;
}

}  // namespace viewbpr
