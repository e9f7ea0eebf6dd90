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
#include <viewbpr/ingest.hpp>
#include <viewbpr/io.hpp>

#include <iosfwd>
#include <map>
#include <string>
#include <utility>
#include <vector>

namespace viewbpr {

/**
 * Everything one experiment needs. Settings are flat `key = value` pairs;
 * later sources override earlier ones in the order
 * defaults < config file < VIEWBPR_* environment < command-line flags.
 */
struct RunConfig {
  std::string raw_log;
  std::string dataset = "dataset.tsv";
  std::string model = "model.txt";
  std::string report = "report.tsv";
  std::string metrics = "metrics.tsv";
  std::string stats_dir = ".";
  std::string sweep_dir = "sweep";
  bool lenient = false;
  ActivityThresholds thresholds;
  SamplerConfig sampler;
  WeightingConfig weighting;
  TrainConfig train;
  std::string baseline;  // empty or "popularity"
  bool report_timing = false;

  /// Every effective setting, in a fixed order, as it would be written in a
  /// config file.
  ConfigEcho echo() const;
};

using Setting = std::pair<std::string, std::string>;

/// Known setting keys, in echo order.
const std::vector<std::string>& setting_keys();

/// Applies one setting; throws ConfigError for an unknown key or bad value.
void apply_setting(RunConfig& config, const std::string& key, const std::string& value);

/// Parses `key = value` lines; '#' starts a comment.
std::vector<Setting> parse_config_text(std::istream& in);
std::vector<Setting> read_config_file(const std::string& path);

/// VIEWBPR_<KEY> entries of an environment map, as settings.
std::vector<Setting> environment_settings(const std::map<std::string, std::string>& env);

inline constexpr const char* kEnvPrefix = "VIEWBPR_";

/// Layers the sources and validates the result.
RunConfig resolve_config(const std::vector<Setting>& file,
                         const std::vector<Setting>& environment,
                         const std::vector<Setting>& flags);

SamplerKind parse_sampler_kind(const std::string& text);
WeightingMode parse_weighting_mode(const std::string& text);
LearningRateMode parse_lr_mode(const std::string& text);
NegativePool parse_negative_pool(const std::string& text);

}  // namespace viewbpr
