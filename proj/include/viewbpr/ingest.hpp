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

#include <iosfwd>
#include <set>
#include <string>
#include <unordered_map>
#include <vector>

namespace viewbpr {

// ---------------------------------------------------------------------------
// Parsing
// ---------------------------------------------------------------------------

struct ParseOptions {
  // Strict mode aborts on the first batch of malformed lines; lenient mode
  // skips them and reports their line numbers.
  bool strict = true;
  char delimiter = ',';
};

struct ParseResult {
  std::vector<Interaction> events;
  std::vector<std::size_t> malformed_lines;  // 1-based
  // True when timestamps were given as calendar dates (YYYY-MM-DD) instead
  // of epoch seconds.
  bool day_granular = false;
};

/**
 * Reads `user_id,item_id,behavior,timestamp` records. A first line naming
 * exactly those columns is treated as a header. The behavior token is
 * `purchase` or `view` (any case). The timestamp is either non-negative
 * epoch seconds or a YYYY-MM-DD date, in which case the whole log is flagged
 * as day-granular. Mixing the two forms is a parse error.
 */
ParseResult parse_interactions(std::istream& in, const ParseOptions& options = {});
ParseResult read_interactions(const std::string& path,
                              const ParseOptions& options = {});

// ---------------------------------------------------------------------------
// Preprocessing
// ---------------------------------------------------------------------------

/// Keeps one purchase per (user, item): the earliest one. Views untouched.
std::vector<Interaction> dedup_purchases(const std::vector<Interaction>& events);

/// Drops every view on a (user, item) pair that was also purchased.
std::vector<Interaction> remove_leaked_views(
    const std::vector<Interaction>& events);

struct ActivityThresholds {
  std::size_t min_user_purchases = 12;
  std::size_t min_item_purchases = 16;
};

/**
 * Removes users and items below the purchase thresholds, repeating until no
 * violator remains. Every event of a removed user or item is dropped.
 * Throws EmptyDatasetError when no purchase survives.
 */
std::vector<Interaction> filter_activity(const std::vector<Interaction>& events,
                                         const ActivityThresholds& thresholds = {});

/// Bijective map between external ids and dense indices.
class IdMap {
 public:
  std::uint32_t get_or_add(const std::string& id);
  std::optional<std::uint32_t> find(const std::string& id) const;
  const std::string& external(std::uint32_t index) const { return ids_.at(index); }
  std::size_t size() const { return ids_.size(); }
  const std::vector<std::string>& ids() const { return ids_; }

  bool operator==(const IdMap& other) const { return ids_ == other.ids_; }

 private:
  std::vector<std::string> ids_;
  std::unordered_map<std::string, std::uint32_t> index_;
};

struct IndexedDataset {
  FeedbackDataset dataset;
  IdMap users;
  IdMap items;
};

/**
 * Assigns dense indices in first-appearance order and fills S_u, V_u. A
 * repeated (user, item, behavior) keeps its earliest timestamp.
 */
IndexedDataset build_dataset(const std::vector<Interaction>& events,
                             bool timestamps_day_granular = false);

struct PreprocessSummary {
  std::size_t purchases = 0;
  std::size_t views = 0;
  std::size_t users = 0;
  std::size_t items = 0;
  double purchase_sparsity = 0.0;
  double view_sparsity = 0.0;
};

PreprocessSummary summarize(const FeedbackDataset& dataset);

/// dedup -> leak filter -> activity filter -> build.
IndexedDataset preprocess(const std::vector<Interaction>& events,
                          const ActivityThresholds& thresholds,
                          bool timestamps_day_granular = false);

// ---------------------------------------------------------------------------
// Sessions and user-aware weights
// ---------------------------------------------------------------------------

struct UserEvent {
  ItemIndex item = 0;
  Behavior behavior = Behavior::View;
  Timestamp timestamp = 0;
};

struct Session {
  UserIndex user = 0;
  Timestamp start = 0;
  Timestamp end = 0;
  std::set<ItemIndex> viewed;
  std::set<ItemIndex> purchased;
};

/// Purchases and views of u merged and sorted by (timestamp, item, behavior).
std::vector<UserEvent> user_timeline(const FeedbackDataset& dataset, UserIndex u);

/**
 * Splits a time-sorted event list into sessions. A new session starts exactly
 * when the gap to the previous event exceeds `gap`; a gap equal to `gap` stays
 * in the same session. Throws GranularityError when timestamps are only known
 * to the day.
 */
std::vector<Session> extract_sessions(UserIndex user,
                                      std::span<const UserEvent> events,
                                      Timestamp gap, bool day_granular = false);

/**
 * Session-averaged view/purchase ratio. Sessions without purchases are left
 * out of the mean; when none has a purchase the global ratio
 * total_views / total_purchases is used instead.
 */
double view_purchase_ratio(std::span<const Session> sessions,
                           std::size_t total_views, std::size_t total_purchases);

/// A^beta / (A^beta + 1).
double user_weight(double ratio, double beta);

struct UserWeights {
  std::vector<double> ratio;
  std::vector<double> weight;
};

UserWeights compute_user_weights(const FeedbackDataset& dataset, double beta,
                                 Timestamp session_gap);

}  // namespace viewbpr
