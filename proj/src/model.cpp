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

#include <algorithm>
#include <queue>

namespace viewbpr {

FactorModel init_model(std::size_t num_users, std::size_t num_items,
                       std::size_t factors, std::uint64_t seed, double scale) {
  if (num_users == 0 || num_items == 0 || factors == 0) {
    throw std::invalid_argument("model dimensions must be positive");
  }
  if (!(scale > 0.0)) {
    throw std::invalid_argument("init scale must be positive");
  }
  FactorModel model{Matrix(num_users, factors), Matrix(num_items, factors), seed};
  Rng rng(seed);
  std::normal_distribution<double> gauss(0.0, scale);
  for (double& x : model.users.data()) {
    x = gauss(rng);
  }
  for (double& x : model.items.data()) {
    x = gauss(rng);
  }
  return model;
}

double dot(std::span<const double> a, std::span<const double> b) {
  double sum = 0.0;
  for (std::size_t f = 0; f < a.size(); ++f) {
    sum += a[f] * b[f];
  }
  return sum;
}

double predict(const FactorModel& model, UserIndex u, ItemIndex i) {
  if (u >= model.num_users()) {
    throw std::out_of_range("user index " + std::to_string(u) + " out of range");
  }
  if (i >= model.num_items()) {
    throw std::out_of_range("item index " + std::to_string(i) + " out of range");
  }
  return dot(model.users.row(u), model.items.row(i));
}

std::vector<ScoredItem> select_top_k(std::size_t num_items,
                                     const std::function<double(ItemIndex)>& score,
                                     std::span<const ItemIndex> excluded,
                                     std::size_t k) {
  if (k == 0) {
    throw std::invalid_argument("k must be at least 1");
  }
  // Heap top is the worst item kept so far.
  std::priority_queue<ScoredItem, std::vector<ScoredItem>, decltype(&ranks_before)>
      heap(&ranks_before);
  auto next_excluded = excluded.begin();
  for (ItemIndex i = 0; i < num_items; ++i) {
    while (next_excluded != excluded.end() && *next_excluded < i) {
      ++next_excluded;
    }
    if (next_excluded != excluded.end() && *next_excluded == i) {
      continue;
    }
    const ScoredItem candidate{i, score(i)};
    if (heap.size() < k) {
      heap.push(candidate);
    } else if (ranks_before(candidate, heap.top())) {
      heap.pop();
      heap.push(candidate);
    }
  }
  std::vector<ScoredItem> out;
  out.reserve(heap.size());
  while (!heap.empty()) {
    out.push_back(heap.top());
    heap.pop();
  }
  std::reverse(out.begin(), out.end());
  return out;
}

std::vector<ScoredItem> rank_items(const FactorModel& model, UserIndex u,
                                   std::span<const ItemIndex> excluded,
                                   std::size_t k) {
  if (u >= model.num_users()) {
    throw std::out_of_range("user index " + std::to_string(u) + " out of range");
  }
  const auto p = model.users.row(u);
  return select_top_k(
      model.num_items(),
      [&](ItemIndex i) { return dot(p, model.items.row(i)); }, excluded, k);
}

}  // namespace viewbpr
