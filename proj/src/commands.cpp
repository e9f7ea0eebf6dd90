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

#include <viewbpr/commands.hpp>

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <ostream>

namespace viewbpr {

namespace fs = std::filesystem;

namespace {

std::string percent(double fraction) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f%%", 100.0 * fraction);
  return buf;
}

std::string fixed4(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4f", x);
  return buf;
}

void ensure_parent(const std::string& path) {
  const auto parent = fs::path(path).parent_path();
  if (!parent.empty()) {
    std::error_code ec;
    fs::create_directories(parent, ec);
    if (ec) {
      throw IoError("cannot create directory " + parent.string() + ": " + ec.message());
    }
  }
}

std::string directory_name(const std::string& field, const std::string& value) {
  std::string out = field + "-";
  for (char c : value) {
    const bool keep = std::isalnum(static_cast<unsigned char>(c)) || c == '.' || c == '-' ||
                      c == '_';
    out.push_back(keep ? c : '_');
  }
  return out;
}

}  // namespace

Splits make_splits(const FeedbackDataset& dataset, std::uint64_t seed) {
  Rng rng(derive_seed(seed, kSplitStream));
  return split_leave_one_out(dataset, rng);
}

PreprocessSummary cmd_preprocess(const RunConfig& config, std::ostream& out) {
  if (config.raw_log.empty()) {
    throw ConfigError("preprocess needs an input log (raw_log)");
  }
  ParseOptions options;
  options.strict = !config.lenient;
  const auto parsed = read_interactions(config.raw_log, options);
  if (!parsed.malformed_lines.empty()) {
    out << "skipped " << parsed.malformed_lines.size() << " malformed line(s)\n";
  }
  const auto data = preprocess(parsed.events, config.thresholds, parsed.day_granular);
  ensure_parent(config.dataset);
  save_snapshot(config.dataset, data);

  const auto summary = summarize(data.dataset);
  out << "Purchase#\tView#\tUser#\tItem#\tSparsity (purchase/view)\n"
      << summary.purchases << '\t' << summary.views << '\t' << summary.users << '\t'
      << summary.items << '\t' << percent(summary.purchase_sparsity) << '/'
      << percent(summary.view_sparsity) << '\n'
      << "wrote " << config.dataset << '\n';
  return summary;
}

TrainReport cmd_train(const RunConfig& config, std::ostream& out) {
  const auto data = load_snapshot(config.dataset);
  const auto splits = make_splits(data.dataset, config.train.seed);

  TrainHooks hooks;
  hooks.on_epoch = [&out](const FactorModel&, const EpochRecord& row) {
    out << "epoch " << row.epoch << " train_loss=" << fixed4(row.train_loss)
        << " validation_loss=" << fixed4(row.validation_loss) << " hr=" << fixed4(row.hr)
        << " ndcg=" << fixed4(row.ndcg) << '\n';
  };
  auto result = run_training(splits, config.sampler, config.weighting, config.train, hooks);

  ensure_parent(config.model);
  save_model(config.model, result.model);
  ensure_parent(config.report);
  save_report(config.report, result.report, config.echo(), config.report_timing);

  const auto& best = result.report.best();
  out << "best epoch " << best.epoch << ": HR@" << result.report.k << '=' << fixed4(best.hr)
      << " NDCG@" << result.report.k << '=' << fixed4(best.ndcg) << '\n'
      << "wrote " << config.model << " and " << config.report << '\n';
  return result.report;
}

std::vector<MetricsRow> cmd_evaluate(const RunConfig& config, std::ostream& out) {
  const auto data = load_snapshot(config.dataset);
  const auto splits = make_splits(data.dataset, config.train.seed);
  const auto k = config.train.eval_k;

  std::vector<MetricsRow> rows;
  const auto model = load_model(config.model);
  rows.push_back({"model", k, evaluate(model, splits, k)});
  if (config.baseline == "popularity") {
    rows.push_back({"popularity", k, evaluate_popularity(splits, k)});
  }

  out << "model\tk\thr\tndcg\n";
  for (const auto& row : rows) {
    out << row.label << '\t' << row.k << '\t' << fixed4(row.metrics.hr) << '\t'
        << fixed4(row.metrics.ndcg) << '\n';
  }
  ensure_parent(config.metrics);
  save_metrics(config.metrics, rows);
  out << "wrote " << config.metrics << '\n';
  return rows;
}

void cmd_stats(const RunConfig& config, std::ostream& out) {
  const auto data = load_snapshot(config.dataset);
  std::error_code ec;
  fs::create_directories(config.stats_dir, ec);
  if (ec) {
    throw IoError("cannot create directory " + config.stats_dir + ": " + ec.message());
  }
  for (auto behavior : {Behavior::Purchase, Behavior::View}) {
    const auto curve = skewness_curve(item_counts(data.dataset, behavior));
    const auto path =
        (fs::path(config.stats_dir) / (std::string(to_string(behavior)) + "_curve.tsv"))
            .string();
    save_curve(path, behavior, curve);
    out << "wrote " << path << '\n';
  }
}

std::vector<SweepRun> cmd_sweep(const RunConfig& config, const std::string& field,
                                const std::vector<std::string>& values, std::ostream& out) {
  if (values.empty()) {
    throw ConfigError("sweep needs at least one value");
  }
  // Validate every value before spending time on training.
  std::vector<RunConfig> configs;
  for (const auto& value : values) {
    RunConfig run = config;
    apply_setting(run, field, value);
    run.sampler.validate();
    run.weighting.validate();
    run.train.validate();
    const auto dir = fs::path(config.sweep_dir) / directory_name(field, value);
    run.model = (dir / "model.txt").string();
    run.report = (dir / "report.tsv").string();
    configs.push_back(std::move(run));
  }

  std::vector<SweepRun> runs;
  for (std::size_t r = 0; r < configs.size(); ++r) {
    out << "== " << field << '=' << values[r] << '\n';
    auto report = cmd_train(configs[r], out);
    runs.push_back(
        {values[r], fs::path(configs[r].model).parent_path().string(), std::move(report)});
  }

  const auto summary = (fs::path(config.sweep_dir) / "summary.tsv").string();
  std::ofstream file(summary);
  if (!file) {
    throw IoError("cannot write " + summary);
  }
  file << "# viewbpr-sweep v1\n" << field << "\tbest_epoch\thr\tndcg\n";
  for (const auto& run : runs) {
    const auto& best = run.report.best();
    file << run.value << '\t' << best.epoch << '\t' << format_double(best.hr) << '\t'
         << format_double(best.ndcg) << '\n';
  }
  if (!file) {
    throw IoError("cannot write " + summary);
  }
  out << "wrote " << summary << '\n';
  return runs;
}

}  // namespace viewbpr
