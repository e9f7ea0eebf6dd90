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

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <random>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace viewbpr {

using UserIndex = std::uint32_t;
using ItemIndex = std::uint32_t;
using Timestamp = std::int64_t;

// All randomness in the toolkit flows through this engine so that a run is a
// pure function of its seed.
using Rng = std::mt19937_64;

/// Independent seed for a named sub-stream of a run (splitmix64 mix).
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream);

// ---------------------------------------------------------------------------
// Errors
// ---------------------------------------------------------------------------

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

class ParseError : public Error {
 public:
  using Error::Error;
};

class EmptyDatasetError : public Error {
 public:
  using Error::Error;
};

class GranularityError : public Error {
 public:
  using Error::Error;
};

class InfeasibleRatioError : public Error {
 public:
  using Error::Error;
};

class SplitError : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

class DivergenceError : public Error {
 public:
  using Error::Error;
};

// ---------------------------------------------------------------------------
// Raw events
// ---------------------------------------------------------------------------

enum class Behavior { Purchase, View };

const char* to_string(Behavior behavior);

/// One row of a raw interaction log, keyed by external (opaque) ids.
struct Interaction {
  std::string user;
  std::string item;
  Behavior behavior = Behavior::View;
  Timestamp timestamp = 0;

  bool operator==(const Interaction&) const = default;
};

// ---------------------------------------------------------------------------
// FeedbackDataset
// ---------------------------------------------------------------------------

/// An item index paired with the timestamp of the interaction that put it in
/// a user's purchased or viewed set.
struct TimedItem {
  ItemIndex item = 0;
  Timestamp timestamp = 0;

  bool operator==(const TimedItem&) const = default;
};

/**
 * Dense-indexed implicit feedback for M users and N items.
 *
 * For each user u the purchased set S_u and viewed set V_u are stored sorted
 * by item index with their timestamps kept in parallel. The unobserved set
 * R_u (everything outside S_u and V_u) is never materialized.
 *
 * The container is immutable once built. It does not reject inputs that
 * break the dataset invariants; use validate_dataset() to inspect them.
 */
class FeedbackDataset {
 public:
  FeedbackDataset() = default;
  FeedbackDataset(std::size_t num_users, std::size_t num_items,
                  std::vector<std::vector<TimedItem>> purchases,
                  std::vector<std::vector<TimedItem>> views,
                  bool timestamps_day_granular = false);

  std::size_t num_users() const { return purchased_.size(); }
  std::size_t num_items() const { return num_items_; }
  bool timestamps_day_granular() const { return day_granular_; }

  std::span<const ItemIndex> purchased(UserIndex u) const {
    return purchased_[u];
  }
  std::span<const ItemIndex> viewed(UserIndex u) const { return viewed_[u]; }
  std::span<const Timestamp> purchase_timestamps(UserIndex u) const {
    return purchase_ts_[u];
  }
  std::span<const Timestamp> view_timestamps(UserIndex u) const {
    return view_ts_[u];
  }

  bool is_purchased(UserIndex u, ItemIndex i) const;
  bool is_viewed(UserIndex u, ItemIndex i) const;
  bool is_unobserved(UserIndex u, ItemIndex i) const {
    return !is_purchased(u, i) && !is_viewed(u, i);
  }

  std::optional<Timestamp> purchase_time(UserIndex u, ItemIndex i) const;
  std::optional<Timestamp> view_time(UserIndex u, ItemIndex i) const;

  std::size_t total_purchases() const { return total_purchases_; }
  std::size_t total_views() const { return total_views_; }

  /// Users with at least one viewed item, ascending.
  std::span<const UserIndex> users_with_views() const {
    return users_with_views_;
  }

  /// Purchased (or viewed) entries of user u with timestamps.
  std::vector<TimedItem> purchase_entries(UserIndex u) const;
  std::vector<TimedItem> view_entries(UserIndex u) const;

  bool operator==(const FeedbackDataset&) const = default;

 private:
  std::size_t num_items_ = 0;
  bool day_granular_ = false;
  std::vector<std::vector<ItemIndex>> purchased_;
  std::vector<std::vector<Timestamp>> purchase_ts_;
  std::vector<std::vector<ItemIndex>> viewed_;
  std::vector<std::vector<Timestamp>> view_ts_;
  std::vector<UserIndex> users_with_views_;
  std::size_t total_purchases_ = 0;
  std::size_t total_views_ = 0;
};

enum class ViolationKind {
  ItemOutOfRange,
  DuplicateItem,
  PurchasedAndViewed,
  NoPurchases,
  NegativeTimestamp,
};

struct Violation {
  ViolationKind kind;
  UserIndex user = 0;
  std::optional<ItemIndex> item;
  std::string message;
};

/// Returns one entry per broken invariant; empty iff the dataset is valid.
std::vector<Violation> validate_dataset(const FeedbackDataset& dataset);

// ---------------------------------------------------------------------------
// Factor model
// ---------------------------------------------------------------------------

/// Row-major dense matrix with row views.
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }

  std::span<double> row(std::size_t r) {
    return {data_.data() + r * cols_, cols_};
  }
  std::span<const double> row(std::size_t r) const {
    return {data_.data() + r * cols_, cols_};
  }
  double& operator()(std::size_t r, std::size_t c) {
    return data_[r * cols_ + c];
  }
  double operator()(std::size_t r, std::size_t c) const {
    return data_[r * cols_ + c];
  }

  std::span<double> data() { return data_; }
  std::span<const double> data() const { return data_; }

  bool operator==(const Matrix&) const = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

/// User factors P (M x K) and item factors Q (N x K).
struct FactorModel {
  Matrix users;
  Matrix items;
  std::uint64_t seed = 0;

  std::size_t num_users() const { return users.rows(); }
  std::size_t num_items() const { return items.rows(); }
  std::size_t factors() const { return users.cols(); }

  bool all_finite() const;

  bool operator==(const FactorModel&) const = default;
};

// ---------------------------------------------------------------------------
// Configuration
// ---------------------------------------------------------------------------

enum class SamplerKind { Uniform, ReducedSpace, DNS, BiasedView, TripleView };

/// Which items count as negatives for a user.
enum class NegativePool {
  NotPurchased,  // everything outside S_u, views included
  Unobserved,    // everything outside S_u and V_u
};

struct SamplerConfig {
  SamplerKind kind = SamplerKind::Uniform;
  double gamma = 1.0;
  std::array<double, 3> omega{0.3, 0.3, 0.4};
  std::size_t dns_candidates = 10;
  // Pool for the purchase-only samplers (Uniform, ReducedSpace, DNS). The
  // view-aware samplers always draw negatives from the unobserved set.
  NegativePool purchase_only_pool = NegativePool::NotPurchased;
  // Users without views contribute a plain (i, j) update under TripleView.
  bool quad_pair_fallback = false;

  /// Throws ConfigError when an invariant is broken.
  void validate() const;
  NegativePool negative_pool() const;
};

enum class WeightingMode { Global, PerUser };

struct WeightingConfig {
  WeightingMode mode = WeightingMode::Global;
  double alpha = 0.7;
  double beta = 0.5;
  Timestamp session_gap = 3600;

  void validate() const;
};

enum class LearningRateMode { Fixed, Adagrad };

struct TrainConfig {
  double learning_rate = 0.05;
  LearningRateMode lr_mode = LearningRateMode::Fixed;
  double regularization = 0.01;
  std::size_t factors = 32;
  double init_scale = 0.01;
  std::size_t max_epochs = 50;
  std::size_t patience = 0;
  std::uint64_t seed = 42;
  // 0 selects the number of training purchases.
  std::size_t steps_per_epoch = 0;
  // Cutoff for the per-epoch HR/NDCG columns of the report.
  std::size_t eval_k = 100;

  void validate() const;
};

const char* to_string(SamplerKind kind);
const char* to_string(WeightingMode mode);
const char* to_string(LearningRateMode mode);
const char* to_string(NegativePool pool);

}  // namespace viewbpr
