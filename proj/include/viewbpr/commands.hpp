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

#include <viewbpr/run_config.hpp>

#include <iosfwd>
#include <string>
#include <vector>

namespace viewbpr {

// Command bodies behind the CLI. Each reads and writes the files named in
// the config, prints a short human summary to `out` and throws a viewbpr
// Error on failure.

/// Seed stream used for the leave-one-out split, shared by train and evaluate.
inline constexpr std::uint64_t kSplitStream = 4;

Splits make_splits(const FeedbackDataset& dataset, std::uint64_t seed);

PreprocessSummary cmd_preprocess(const RunConfig& config, std::ostream& out);
TrainReport cmd_train(const RunConfig& config, std::ostream& out);
std::vector<MetricsRow> cmd_evaluate(const RunConfig& config, std::ostream& out);
void cmd_stats(const RunConfig& config, std::ostream& out);

struct SweepRun {
  std::string value;
  std::string directory;
  TrainReport report;
};

/// Trains once per value of `field`, each run in its own subdirectory of
/// config.sweep_dir, and writes a summary table next to them.
std::vector<SweepRun> cmd_sweep(const RunConfig& config, const std::string& field,
                                const std::vector<std::string>& values, std::ostream& out);

}  // namespace viewbpr
