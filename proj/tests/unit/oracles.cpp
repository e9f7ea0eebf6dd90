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

#include "oracles.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace viewbpr::oracle {

FeedbackDataset make_dataset(std::size_t num_items,
                             const std::vector<std::vector<ItemIndex>>& purchases,
                             const std::vector<std::vector<ItemIndex>>& views) {
  std::vector<std::vector<TimedItem>> p(purchases.size());
  std::vector<std::vector<TimedItem>> v(purchases.size());
  for (std::size_t u = 0; u < purchases.size(); ++u) {
    for (std::size_t k = 0; k < purchases[u].size(); ++k) {
      p[u].push_back({purchases[u][k], static_cast<Timestamp>(k)});
    }
    if (u < views.size()) {
      for (std::size_t k = 0; k < views[u].size(); ++k) {
        v[u].push_back({views[u][k], static_cast<Timestamp>(k)});
      }
    }
  }
  return FeedbackDataset(purchases.size(), num_items, std::move(p), std::move(v));
}

FeedbackDataset random_dataset(Rng& rng, std::size_t num_users, std::size_t num_items,
                               std::size_t min_purchases, std::size_t max_purchases,
                               std::size_t max_views) {
  std::vector<std::vector<TimedItem>> p(num_users);
  std::vector<std::vector<TimedItem>> v(num_users);
  std::vector<ItemIndex> items(num_items);
  std::iota(items.begin(), items.end(), 0);
  std::uniform_int_distribution<std::size_t> np(min_purchases, max_purchases);
  std::uniform_int_distribution<std::size_t> nv(0, max_views);
  for (std::size_t u = 0; u < num_users; ++u) {
    std::shuffle(items.begin(), items.end(), rng);
    const auto a = std::min(np(rng), num_items - 1);
    const auto b = std::min(nv(rng), num_items - 1 - a);
    std::vector<Timestamp> stamps(a + b);
    std::iota(stamps.begin(), stamps.end(), 1);
    std::shuffle(stamps.begin(), stamps.end(), rng);
    for (std::size_t k = 0; k < a; ++k) {
      p[u].push_back({items[k], stamps[k] * 100});
    }
    for (std::size_t k = 0; k < b; ++k) {
      v[u].push_back({items[a + k], stamps[a + k] * 100});
    }
  }
  return FeedbackDataset(num_users, num_items, std::move(p), std::move(v));
}

FactorModel random_model(Rng& rng, std::size_t num_users, std::size_t num_items,
                         std::size_t factors, double scale) {
  std::uniform_real_distribution<double> d(-scale, scale);
  FactorModel m;
  m.users = Matrix(num_users, factors);
  m.items = Matrix(num_items, factors);
  for (auto& x : m.users.data()) x = d(rng);
  for (auto& x : m.items.data()) x = d(rng);
  return m;
}

PlantedData planted_dataset(std::uint64_t seed, std::size_t num_users, std::size_t num_items,
                            std::size_t factors, std::size_t purchases, std::size_t views,
                            std::size_t swaps) {
  Rng rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  PlantedData out;
  out.truth.users = Matrix(num_users, factors);
  out.truth.items = Matrix(num_items, factors);
  for (auto& x : out.truth.users.data()) x = gauss(rng);
  for (auto& x : out.truth.items.data()) x = gauss(rng);

  std::vector<std::vector<TimedItem>> p(num_users);
  std::vector<std::vector<TimedItem>> v(num_users);
  for (std::size_t u = 0; u < num_users; ++u) {
    std::vector<std::pair<double, ItemIndex>> scored;
    for (std::size_t i = 0; i < num_items; ++i) {
      double s = 0.0;
      for (std::size_t f = 0; f < factors; ++f) {
        s += out.truth.users(u, f) * out.truth.items(i, f);
      }
      scored.emplace_back(-s, static_cast<ItemIndex>(i));
    }
    std::sort(scored.begin(), scored.end());
    std::vector<ItemIndex> order;
    for (const auto& [s, i] : scored) order.push_back(i);

    // Swap noise: exchange some purchases with items from the unobserved tail.
    std::uniform_int_distribution<std::size_t> head(0, purchases - 1);
    std::uniform_int_distribution<std::size_t> tail(purchases + views, num_items - 1);
    for (std::size_t s = 0; s < swaps; ++s) {
      std::swap(order[head(rng)], order[tail(rng)]);
    }
    std::vector<Timestamp> stamps(purchases + views);
    std::iota(stamps.begin(), stamps.end(), 1);
    std::shuffle(stamps.begin(), stamps.end(), rng);
    for (std::size_t k = 0; k < purchases; ++k) {
      p[u].push_back({order[k], stamps[k] * 60});
    }
    for (std::size_t k = 0; k < views; ++k) {
      v[u].push_back({order[purchases + k], stamps[purchases + k] * 60});
    }
  }
  out.dataset = FeedbackDataset(num_users, num_items, std::move(p), std::move(v));
  return out;
}

long double sigmoid_ld(long double x) { return 1.0L / (1.0L + std::exp(-x)); }

long double naive_dot(const std::vector<double>& a, const std::vector<double>& b) {
  long double s = 0.0L;
  for (std::size_t k = 0; k < a.size(); ++k) {
    s += static_cast<long double>(a[k]) * static_cast<long double>(b[k]);
  }
  return s;
}

namespace {

std::vector<double> row_of(const Matrix& m, std::size_t r) {
  std::vector<double> out(m.cols());
  for (std::size_t c = 0; c < m.cols(); ++c) out[c] = m(r, c);
  return out;
}

long double score(const FactorModel& m, std::size_t u, std::size_t i) {
  return naive_dot(row_of(m.users, u), row_of(m.items, i));
}

long double sq_norm(const Matrix& m, std::size_t r) {
  const auto v = row_of(m, r);
  return naive_dot(v, v);
}

long double nls(long double x) { return -std::log(sigmoid_ld(x)); }

}  // namespace

long double pair_objective(const FactorModel& m, const Triple& t, double reg) {
  const auto x = score(m, t.user, t.pos) - score(m, t.user, t.neg);
  return nls(x) + 0.5L * reg *
                      (sq_norm(m.users, t.user) + sq_norm(m.items, t.pos) +
                       sq_norm(m.items, t.neg));
}

long double quad_objective(const FactorModel& m, const QuadExample& q, double alpha,
                           double reg) {
  const auto ri = score(m, q.user, q.purchased);
  const auto rv = score(m, q.user, q.viewed);
  const auto rj = score(m, q.user, q.unobserved);
  return nls(ri - rj) + alpha * nls(ri - rv) + (1.0L - alpha) * nls(rv - rj) +
         0.5L * reg *
             (sq_norm(m.users, q.user) + sq_norm(m.items, q.purchased) +
              sq_norm(m.items, q.viewed) + sq_norm(m.items, q.unobserved));
}

namespace {

template <typename Objective>
double central_difference(FactorModel& m, bool row_is_user, std::size_t row,
                          std::size_t col, double h, Objective f) {
  double& x = row_is_user ? m.users(row, col) : m.items(row, col);
  const double saved = x;
  x = saved + h;
  const long double up = f(m);
  x = saved - h;
  const long double down = f(m);
  x = saved;
  return static_cast<double>(-(up - down) / (2.0L * h));
}

}  // namespace

double fd_ascent_pair(FactorModel m, const Triple& t, double reg, bool row_is_user,
                      std::size_t row, std::size_t col, double h) {
  return central_difference(m, row_is_user, row, col, h,
                            [&](const FactorModel& mm) { return pair_objective(mm, t, reg); });
}

double fd_ascent_quad(FactorModel m, const QuadExample& q, double alpha, double reg,
                      bool row_is_user, std::size_t row, std::size_t col, double h) {
  return central_difference(m, row_is_user, row, col, h, [&](const FactorModel& mm) {
    return quad_objective(mm, q, alpha, reg);
  });
}

bool close(double a, double b, double rel, double abs_floor) {
  const double diff = std::abs(a - b);
  return diff <= abs_floor || diff <= rel * std::max(std::abs(a), std::abs(b));
}

std::vector<Interaction> brute_force_activity_filter(const std::vector<Interaction>& events,
                                                     std::size_t min_user,
                                                     std::size_t min_item) {
  std::vector<std::string> users;
  std::vector<std::string> items;
  for (const auto& e : events) {
    if (std::find(users.begin(), users.end(), e.user) == users.end()) users.push_back(e.user);
    if (std::find(items.begin(), items.end(), e.item) == items.end()) items.push_back(e.item);
  }
  if (users.size() > 6 || items.size() > 6) {
    throw std::invalid_argument("brute-force filter supports at most 6 users and items");
  }
  auto index = [](const std::vector<std::string>& v, const std::string& s) {
    return static_cast<std::size_t>(std::find(v.begin(), v.end(), s) - v.begin());
  };

  // A pair of subsets qualifies when every member meets its threshold using
  // only purchases inside the pair. Qualifying pairs are closed under union,
  // so the union of all of them is the largest one.
  unsigned keep_users = 0;
  unsigned keep_items = 0;
  const unsigned nu = 1u << users.size();
  const unsigned ni = 1u << items.size();
  for (unsigned us = 0; us < nu; ++us) {
    for (unsigned is = 0; is < ni; ++is) {
      std::vector<std::size_t> uc(users.size(), 0);
      std::vector<std::size_t> ic(items.size(), 0);
      for (const auto& e : events) {
        const auto u = index(users, e.user);
        const auto i = index(items, e.item);
        if (e.behavior == Behavior::Purchase && (us >> u & 1u) && (is >> i & 1u)) {
          ++uc[u];
          ++ic[i];
        }
      }
      bool ok = true;
      for (std::size_t u = 0; u < users.size(); ++u) {
        if ((us >> u & 1u) && uc[u] < min_user) ok = false;
      }
      for (std::size_t i = 0; i < items.size(); ++i) {
        if ((is >> i & 1u) && ic[i] < min_item) ok = false;
      }
      if (ok) {
        keep_users |= us;
        keep_items |= is;
      }
    }
  }
  std::vector<Interaction> out;
  for (const auto& e : events) {
    if ((keep_users >> index(users, e.user) & 1u) && (keep_items >> index(items, e.item) & 1u)) {
      out.push_back(e);
    }
  }
  return out;
}

Counts count_events(const std::vector<Interaction>& events) {
  std::set<std::string> users;
  std::set<std::string> items;
  std::set<std::pair<std::string, std::string>> bought;
  std::set<std::pair<std::string, std::string>> seen;
  for (const auto& e : events) {
    users.insert(e.user);
    items.insert(e.item);
    (e.behavior == Behavior::Purchase ? bought : seen).insert({e.user, e.item});
  }
  Counts c;
  c.purchases = bought.size();
  c.views = seen.size();
  c.users = users.size();
  c.items = items.size();
  const double cells = static_cast<double>(c.users) * static_cast<double>(c.items);
  c.purchase_sparsity = 1.0 - static_cast<double>(c.purchases) / cells;
  c.view_sparsity = 1.0 - static_cast<double>(c.views) / cells;
  return c;
}

BruteMetrics brute_force_evaluate(const FactorModel& model, const Splits& splits,
                                  std::size_t k) {
  const auto m = splits.train.num_users();
  const auto n = splits.train.num_items();
  // Same double-precision sum in user order as any exact evaluator must use.
  double hr = 0.0;
  double ndcg = 0.0;
  for (std::size_t u = 0; u < m; ++u) {
    std::vector<std::pair<double, ItemIndex>> table;
    for (std::size_t i = 0; i < n; ++i) {
      const auto item = static_cast<ItemIndex>(i);
      const auto bought = splits.train.purchased(static_cast<UserIndex>(u));
      const bool in_train = std::find(bought.begin(), bought.end(), item) != bought.end();
      if (in_train || item == splits.validation[u]) continue;
      double s = 0.0;
      for (std::size_t f = 0; f < model.factors(); ++f) {
        s += model.users(u, f) * model.items(i, f);
      }
      table.emplace_back(s, item);
    }
    std::sort(table.begin(), table.end(), [](const auto& a, const auto& b) {
      return a.first > b.first || (a.first == b.first && a.second < b.second);
    });
    for (std::size_t pos = 0; pos < table.size(); ++pos) {
      if (table[pos].second == splits.test[u]) {
        const std::size_t p = pos + 1;
        if (p <= k) {
          hr += 1.0;
          ndcg += 1.0 / std::log2(static_cast<double>(p) + 1.0);
        }
        break;
      }
    }
  }
  return {hr / static_cast<double>(m), ndcg / static_cast<double>(m)};
}

std::map<ItemIndex, double> dns_equal_score_distribution(const std::vector<ItemIndex>& pool,
                                                         std::size_t x) {
  std::map<ItemIndex, double> out;
  const std::size_t n = pool.size();
  std::size_t total = 1;
  for (std::size_t r = 0; r < x; ++r) total *= n;
  for (std::size_t code = 0; code < total; ++code) {
    std::size_t c = code;
    ItemIndex best = pool[c % n];
    for (std::size_t r = 0; r < x; ++r) {
      best = std::min(best, pool[c % n]);
      c /= n;
    }
    out[best] += 1.0 / static_cast<double>(total);
  }
  return out;
}

}  // namespace viewbpr::oracle
