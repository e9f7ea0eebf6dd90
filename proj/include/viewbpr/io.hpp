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

#include <viewbpr/eval.hpp>
#include <viewbpr/ingest.hpp>
#include <viewbpr/train.hpp>

#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

namespace viewbpr {

// Every file starts with a "# viewbpr-<kind> v<version>" line.
inline constexpr int kSnapshotVersion = 1;
inline constexpr int kModelVersion = 1;
inline constexpr int kReportVersion = 1;
inline constexpr int kMetricsVersion = 1;
inline constexpr int kCurveVersion = 1;

/// Shortest decimal text that reads back to the same double.
std::string format_double(double x);
double parse_double(std::string_view text);

// Dataset snapshot: tab-separated sections for the id maps and every
// purchase and view with its timestamp.
void write_snapshot(std::ostream& out, const IndexedDataset& data);
IndexedDataset read_snapshot(std::istream& in);
void save_snapshot(const std::string& path, const IndexedDataset& data);
IndexedDataset load_snapshot(const std::string& path);

// Model checkpoint: header line, "M N K seed" line, then the rows of P and
// Q, one row per line.
void write_model(std::ostream& out, const FactorModel& model);
FactorModel read_model(std::istream& in);
void save_model(const std::string& path, const FactorModel& model);
FactorModel load_model(const std::string& path);

/// Ordered key/value pairs echoed into report headers.
using ConfigEcho = std::vector<std::pair<std::string, std::string>>;

// Training report: header, "# key=value" config echo, a column header row,
// one row per epoch, and a trailing "# best_epoch=" line. Wall-clock seconds
// are only written when `with_timing` is set, so that reports of equal runs
// are byte-identical.
void write_report(std::ostream& out, const TrainReport& report,
                  const ConfigEcho& config, bool with_timing = false);
TrainReport read_report(std::istream& in);
void save_report(const std::string& path, const TrainReport& report,
                 const ConfigEcho& config, bool with_timing = false);
TrainReport load_report(const std::string& path);

struct MetricsRow {
  std::string label;
  std::size_t k = 0;
  Metrics metrics;
};

void write_metrics(std::ostream& out, const std::vector<MetricsRow>& rows);
void save_metrics(const std::string& path, const std::vector<MetricsRow>& rows);

void write_curve(std::ostream& out, Behavior behavior,
                 const std::vector<CurvePoint>& curve);
void save_curve(const std::string& path, Behavior behavior,
                const std::vector<CurvePoint>& curve);

}  // namespace viewbpr
