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

#include <viewbpr/ingest.hpp>

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>
#include <unordered_set>

namespace viewbpr {

namespace {

constexpr Timestamp kSecondsPerDay = 86400;

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) {
    s.remove_prefix(1);
  }
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' ||
                        s.back() == '\r' || s.back() == '\n')) {
    s.remove_suffix(1);
  }
  return s;
}

std::string lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(), [](unsigned char c) {
    return static_cast<char>(std::tolower(c));
  });
  return out;
}

std::vector<std::string_view> split(std::string_view line, char delim) {
  std::vector<std::string_view> fields;
  std::size_t start = 0;
  while (true) {
    auto pos = line.find(delim, start);
    if (pos == std::string_view::npos) {
      fields.push_back(trim(line.substr(start)));
      break;
    }
    fields.push_back(trim(line.substr(start, pos - start)));
    start = pos + 1;
  }
  return fields;
}

template <typename T>
bool parse_number(std::string_view s, T& out) {
  if (s.empty()) {
    return false;
  }
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  return ec == std::errc{} && ptr == s.data() + s.size();
}

// YYYY-MM-DD -> seconds at midnight UTC.
std::optional<Timestamp> parse_date(std::string_view s) {
  if (s.size() != 10 || s[4] != '-' || s[7] != '-') {
    return std::nullopt;
  }
  int y = 0;
  unsigned m = 0;
  unsigned d = 0;
  if (!parse_number(s.substr(0, 4), y) || !parse_number(s.substr(5, 2), m) ||
      !parse_number(s.substr(8, 2), d)) {
    return std::nullopt;
  }
  using namespace std::chrono;
  const year_month_day ymd{year{y}, month{m}, day{d}};
  if (!ymd.ok()) {
    return std::nullopt;
  }
  const auto days = sys_days{ymd}.time_since_epoch().count();
  if (days < 0) {
    return std::nullopt;
  }
  return static_cast<Timestamp>(days) * kSecondsPerDay;
}

bool is_header(const std::vector<std::string_view>& fields) {
  static const std::array<std::string_view, 4> names{"user_id", "item_id",
                                                     "behavior", "timestamp"};
  if (fields.size() != names.size()) {
    return false;
  }
  for (std::size_t k = 0; k < names.size(); ++k) {
    if (lower(fields[k]) != names[k]) {
      return false;
    }
  }
  return true;
}

// Interned (user, item) key used by the preprocessing passes.
struct PairKey {
  std::uint32_t user;
  std::uint32_t item;
  bool operator==(const PairKey&) const = default;
};

struct PairKeyHash {
  std::size_t operator()(const PairKey& k) const {
    return std::hash<std::uint64_t>{}((std::uint64_t{k.user} << 32) | k.item);
  }
};

struct Interned {
  IdMap users;
  IdMap items;
  std::vector<PairKey> keys;
};

Interned intern(const std::vector<Interaction>& events) {
  Interned out;
  out.keys.reserve(events.size());
  for (const auto& e : events) {
    out.keys.push_back({out.users.get_or_add(e.user), out.items.get_or_add(e.item)});
  }
  return out;
}

}  // namespace

ParseResult parse_interactions(std::istream& in, const ParseOptions& options) {
  ParseResult result;
  std::string line;
  std::size_t line_no = 0;
  std::optional<bool> dates;  // set by the first parsed timestamp
  while (std::getline(in, line)) {
    ++line_no;
    const auto body = trim(line);
    if (body.empty()) {
      continue;
    }
    const auto fields = split(body, options.delimiter);
    if (line_no == 1 && is_header(fields)) {
      continue;
    }
    bool ok = fields.size() == 4 && !fields[0].empty() && !fields[1].empty();
    Interaction event;
    if (ok) {
      event.user = std::string(fields[0]);
      event.item = std::string(fields[1]);
      const auto token = lower(fields[2]);
      if (token == "purchase") {
        event.behavior = Behavior::Purchase;
      } else if (token == "view") {
        event.behavior = Behavior::View;
      } else {
        ok = false;
      }
    }
    if (ok) {
      Timestamp ts = 0;
      if (parse_number(fields[3], ts) && ts >= 0) {
        ok = !dates.value_or(false);
        dates = dates.value_or(false);
        event.timestamp = ts;
      } else if (auto date = parse_date(fields[3])) {
        ok = dates.value_or(true);
        dates = dates.value_or(true);
        event.timestamp = *date;
      } else {
        ok = false;
      }
    }
    if (ok) {
      result.events.push_back(std::move(event));
    } else {
      result.malformed_lines.push_back(line_no);
    }
  }
  if (in.bad()) {
    throw IoError("error while reading interaction stream");
  }
  result.day_granular = dates.value_or(false);
  if (options.strict && !result.malformed_lines.empty()) {
    std::ostringstream msg;
    msg << result.malformed_lines.size() << " malformed line(s); first: ";
    const auto shown = std::min<std::size_t>(10, result.malformed_lines.size());
    for (std::size_t k = 0; k < shown; ++k) {
      msg << (k ? ", " : "") << result.malformed_lines[k];
    }
    throw ParseError(msg.str());
  }
  return result;
}

ParseResult read_interactions(const std::string& path, const ParseOptions& options) {
  std::ifstream in(path);
  if (!in) {
    throw IoError("cannot open interaction log: " + path);
  }
  try {
    return parse_interactions(in, options);
  } catch (const ParseError& e) {
    throw ParseError(path + ": " + e.what());
  }
}

std::vector<Interaction> dedup_purchases(const std::vector<Interaction>& events) {
  const auto interned = intern(events);
  // Position of the surviving purchase per pair: earliest timestamp, first
  // occurrence on ties.
  std::unordered_map<PairKey, std::size_t, PairKeyHash> keep;
  for (std::size_t k = 0; k < events.size(); ++k) {
    if (events[k].behavior != Behavior::Purchase) {
      continue;
    }
    auto [it, inserted] = keep.try_emplace(interned.keys[k], k);
    if (!inserted && events[k].timestamp < events[it->second].timestamp) {
      it->second = k;
    }
  }
  std::vector<Interaction> out;
  out.reserve(events.size());
  for (std::size_t k = 0; k < events.size(); ++k) {
    if (events[k].behavior == Behavior::Purchase &&
        keep.at(interned.keys[k]) != k) {
      continue;
    }
    out.push_back(events[k]);
  }
  return out;
}

std::vector<Interaction> remove_leaked_views(const std::vector<Interaction>& events) {
  const auto interned = intern(events);
  std::unordered_set<PairKey, PairKeyHash> bought;
  for (std::size_t k = 0; k < events.size(); ++k) {
    if (events[k].behavior == Behavior::Purchase) {
      bought.insert(interned.keys[k]);
    }
  }
  std::vector<Interaction> out;
  out.reserve(events.size());
  for (std::size_t k = 0; k < events.size(); ++k) {
    if (events[k].behavior == Behavior::View && bought.contains(interned.keys[k])) {
      continue;
    }
    out.push_back(events[k]);
  }
  return out;
}

std::vector<Interaction> filter_activity(const std::vector<Interaction>& events,
                                         const ActivityThresholds& thresholds) {
  const auto interned = intern(events);
  std::vector<char> user_alive(interned.users.size(), 1);
  std::vector<char> item_alive(interned.items.size(), 1);
  std::vector<std::size_t> user_count(user_alive.size());
  std::vector<std::size_t> item_count(item_alive.size());

  // Each round removes every current violator at once; the surviving set is
  // the largest one meeting both thresholds, independent of removal order.
  bool changed = true;
  while (changed) {
    std::fill(user_count.begin(), user_count.end(), 0);
    std::fill(item_count.begin(), item_count.end(), 0);
    for (std::size_t k = 0; k < events.size(); ++k) {
      const auto& key = interned.keys[k];
      if (events[k].behavior == Behavior::Purchase && user_alive[key.user] &&
          item_alive[key.item]) {
        ++user_count[key.user];
        ++item_count[key.item];
      }
    }
    changed = false;
    for (std::size_t u = 0; u < user_alive.size(); ++u) {
      if (user_alive[u] && user_count[u] < thresholds.min_user_purchases) {
        user_alive[u] = 0;
        changed = true;
      }
    }
    for (std::size_t i = 0; i < item_alive.size(); ++i) {
      if (item_alive[i] && item_count[i] < thresholds.min_item_purchases) {
        item_alive[i] = 0;
        changed = true;
      }
    }
  }

  std::vector<Interaction> out;
  bool any_purchase = false;
  for (std::size_t k = 0; k < events.size(); ++k) {
    const auto& key = interned.keys[k];
    if (user_alive[key.user] && item_alive[key.item]) {
      any_purchase = any_purchase || events[k].behavior == Behavior::Purchase;
      out.push_back(events[k]);
    }
  }
  if (!any_purchase) {
    throw EmptyDatasetError("no purchases survive the activity filter (min " +
                            std::to_string(thresholds.min_user_purchases) +
                            " per user, " +
                            std::to_string(thresholds.min_item_purchases) +
                            " per item)");
  }
  return out;
}

std::uint32_t IdMap::get_or_add(const std::string& id) {
  auto [it, inserted] =
      index_.try_emplace(id, static_cast<std::uint32_t>(ids_.size()));
  if (inserted) {
    ids_.push_back(id);
  }
  return it->second;
}

std::optional<std::uint32_t> IdMap::find(const std::string& id) const {
  auto it = index_.find(id);
  if (it == index_.end()) {
    return std::nullopt;
  }
  return it->second;
}

IndexedDataset build_dataset(const std::vector<Interaction>& events,
                             bool timestamps_day_granular) {
  IndexedDataset out;
  // Earliest timestamp per (user, item) and behavior, ordered for stable
  // output.
  std::map<std::pair<UserIndex, ItemIndex>, Timestamp> purchases;
  std::map<std::pair<UserIndex, ItemIndex>, Timestamp> views;
  for (const auto& e : events) {
    const auto u = out.users.get_or_add(e.user);
    const auto i = out.items.get_or_add(e.item);
    auto& target = e.behavior == Behavior::Purchase ? purchases : views;
    auto [it, inserted] = target.try_emplace({u, i}, e.timestamp);
    if (!inserted) {
      it->second = std::min(it->second, e.timestamp);
    }
  }
  const auto m = out.users.size();
  std::vector<std::vector<TimedItem>> bought(m);
  std::vector<std::vector<TimedItem>> seen(m);
  for (const auto& [key, ts] : purchases) {
    bought[key.first].push_back({key.second, ts});
  }
  for (const auto& [key, ts] : views) {
    seen[key.first].push_back({key.second, ts});
  }
  out.dataset = FeedbackDataset(m, out.items.size(), std::move(bought),
                                std::move(seen), timestamps_day_granular);
  return out;
}

PreprocessSummary summarize(const FeedbackDataset& dataset) {
  PreprocessSummary s;
  s.purchases = dataset.total_purchases();
  s.views = dataset.total_views();
  s.users = dataset.num_users();
  s.items = dataset.num_items();
  const double cells = static_cast<double>(s.users) * static_cast<double>(s.items);
  if (cells > 0) {
    s.purchase_sparsity = 1.0 - static_cast<double>(s.purchases) / cells;
    s.view_sparsity = 1.0 - static_cast<double>(s.views) / cells;
  }
  return s;
}

IndexedDataset preprocess(const std::vector<Interaction>& events,
                          const ActivityThresholds& thresholds,
                          bool timestamps_day_granular) {
  auto cleaned = filter_activity(remove_leaked_views(dedup_purchases(events)),
                                 thresholds);
  return build_dataset(cleaned, timestamps_day_granular);
}

std::vector<UserEvent> user_timeline(const FeedbackDataset& dataset, UserIndex u) {
  std::vector<UserEvent> out;
  const auto bought = dataset.purchased(u);
  const auto bought_ts = dataset.purchase_timestamps(u);
  const auto seen = dataset.viewed(u);
  const auto seen_ts = dataset.view_timestamps(u);
  out.reserve(bought.size() + seen.size());
  for (std::size_t k = 0; k < bought.size(); ++k) {
    out.push_back({bought[k], Behavior::Purchase, bought_ts[k]});
  }
  for (std::size_t k = 0; k < seen.size(); ++k) {
    out.push_back({seen[k], Behavior::View, seen_ts[k]});
  }
  std::sort(out.begin(), out.end(), [](const UserEvent& a, const UserEvent& b) {
    return std::tie(a.timestamp, a.item, a.behavior) <
           std::tie(b.timestamp, b.item, b.behavior);
  });
  return out;
}

std::vector<Session> extract_sessions(UserIndex user,
                                      std::span<const UserEvent> events,
                                      Timestamp gap, bool day_granular) {
  if (day_granular) {
    throw GranularityError(
        "session extraction needs sub-day timestamps; this dataset only "
        "records dates");
  }
  if (gap <= 0) {
    throw std::invalid_argument("session gap must be positive");
  }
  std::vector<Session> sessions;
  for (std::size_t k = 0; k < events.size(); ++k) {
    const auto& e = events[k];
    if (k > 0 && e.timestamp < events[k - 1].timestamp) {
      throw std::invalid_argument("events must be sorted by timestamp");
    }
    if (sessions.empty() || e.timestamp - sessions.back().end > gap) {
      Session s;
      s.user = user;
      s.start = e.timestamp;
      sessions.push_back(std::move(s));
    }
    auto& current = sessions.back();
    current.end = e.timestamp;
    (e.behavior == Behavior::Purchase ? current.purchased : current.viewed)
        .insert(e.item);
  }
  return sessions;
}

double view_purchase_ratio(std::span<const Session> sessions,
                           std::size_t total_views, std::size_t total_purchases) {
  if (total_purchases == 0) {
    throw std::invalid_argument("view/purchase ratio undefined without purchases");
  }
  double sum = 0.0;
  std::size_t counted = 0;
  for (const auto& s : sessions) {
    if (s.purchased.empty()) {
      continue;
    }
    sum += static_cast<double>(s.viewed.size()) /
           static_cast<double>(s.purchased.size());
    ++counted;
  }
  if (counted == 0) {
    return static_cast<double>(total_views) / static_cast<double>(total_purchases);
  }
  return sum / static_cast<double>(counted);
}

double user_weight(double ratio, double beta) {
  const double powered = std::pow(ratio, beta);
  return powered / (powered + 1.0);
}

UserWeights compute_user_weights(const FeedbackDataset& dataset, double beta,
                                 Timestamp session_gap) {
  if (dataset.timestamps_day_granular()) {
    throw GranularityError(
        "per-user weighting needs sub-day timestamps; this dataset only "
        "records dates");
  }
  UserWeights out;
  out.ratio.resize(dataset.num_users());
  out.weight.resize(dataset.num_users());
  for (UserIndex u = 0; u < dataset.num_users(); ++u) {
    const auto timeline = user_timeline(dataset, u);
    const auto sessions = extract_sessions(u, timeline, session_gap);
    out.ratio[u] = view_purchase_ratio(sessions, dataset.viewed(u).size(),
                                       dataset.purchased(u).size());
    out.weight[u] = user_weight(out.ratio[u], beta);
  }
  return out;
}

}  // namespace viewbpr
