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

// viewbpr command-line entry point.

#include <viewbpr/commands.hpp>

#include <CLI11.hpp>

#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

extern char** environ;

namespace {

std::map<std::string, std::string> process_environment() {
  std::map<std::string, std::string> env;
  for (char** e = environ; e != nullptr && *e != nullptr; ++e) {
    const std::string entry = *e;
    const auto eq = entry.find('=');
    if (eq != std::string::npos) {
      env.emplace(entry.substr(0, eq), entry.substr(eq + 1));
    }
  }
  return env;
}

std::vector<std::string> split_values(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream in(text);
  std::string part;
  while (std::getline(in, part, ';')) {
    if (!part.empty()) {
      out.push_back(part);
    }
  }
  return out;
}

struct FlagBinding {
  const char* flag;
  const char* key;
  const char* help;
};

constexpr FlagBinding kValueFlags[] = {
    {"--input", "raw_log", "Raw interaction log (CSV)"},
    {"--dataset", "dataset", "Preprocessed dataset snapshot"},
    {"--model", "model", "Model checkpoint"},
    {"--report", "report", "Training report"},
    {"--metrics", "metrics", "Evaluation metrics table"},
    {"--stats-dir", "stats_dir", "Output directory for skewness curves"},
    {"--sweep-dir", "sweep_dir", "Output directory for sweep runs"},
    {"--min-user-purchases", "min_user_purchases", "Activity threshold for users"},
    {"--min-item-purchases", "min_item_purchases", "Activity threshold for items"},
    {"--seed", "seed", "Master random seed"},
    {"--sampler", "sampler", "uniform, reduced, dns, biased or triple"},
    {"--gamma", "gamma", "Reduced-space ratio in (0, 1]"},
    {"--omega", "omega", "Biased pair weights as F,F,F"},
    {"--dns-x", "dns_x", "Candidate count for dynamic negative sampling"},
    {"--negatives", "negatives", "Negative pool for purchase-only samplers"},
    {"--weighting", "weighting", "global or per-user"},
    {"--alpha", "alpha", "Global purchase/view trade-off in [0, 1]"},
    {"--beta", "beta", "Exponent of the per-user weight"},
    {"--session-gap", "session_gap", "Session split gap in seconds"},
    {"--lr", "lr", "Learning rate"},
    {"--lr-mode", "lr_mode", "fixed or adagrad"},
    {"--reg", "reg", "L2 regularization"},
    {"--factors", "factors", "Latent dimension"},
    {"--epochs", "epochs", "Maximum number of epochs"},
    {"--patience", "patience", "Early-stopping patience"},
    {"--steps", "steps_per_epoch", "SGD steps per epoch (0 = one pass)"},
    {"--k", "k", "Cut-off for HR and NDCG"},
    {"--baseline", "baseline", "Extra baseline to evaluate (popularity)"},
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"viewbpr: pairwise ranking from purchases and views"};
  app.require_subcommand(1);
  app.fallthrough();

  std::string config_path;
  app.add_option("--config", config_path, "Flat key = value config file");

  std::map<std::string, std::string> flag_values;
  for (const auto& binding : kValueFlags) {
    app.add_option_function<std::string>(
        binding.flag,
        [&flag_values, key = binding.key](const std::string& v) { flag_values[key] = v; },
        binding.help);
  }
  app.add_flag_callback("--lenient", [&flag_values] { flag_values["lenient"] = "true"; },
                        "Skip malformed log lines instead of failing");
  app.add_flag_callback("--timing", [&flag_values] { flag_values["report_timing"] = "true"; },
                        "Write per-epoch wall-clock seconds into the report");

  auto* preprocess = app.add_subcommand("preprocess", "Clean a raw log into a dataset snapshot");
  auto* train = app.add_subcommand("train", "Train a model and write a checkpoint and report");
  auto* evaluate = app.add_subcommand("evaluate", "Evaluate a checkpoint on the test split");
  auto* stats = app.add_subcommand("stats", "Write item popularity skewness curves");
  auto* sweep = app.add_subcommand("sweep", "Train once per value of one setting");

  std::string sweep_field;
  std::string sweep_values;
  sweep->add_option("--field", sweep_field, "Setting to vary (e.g. gamma)")->required();
  sweep->add_option("--values", sweep_values, "Values separated by ';'")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    std::vector<viewbpr::Setting> file;
    if (!config_path.empty()) {
      file = viewbpr::read_config_file(config_path);
    }
    const auto env = viewbpr::environment_settings(process_environment());
    std::vector<viewbpr::Setting> flags(flag_values.begin(), flag_values.end());
    const auto config = viewbpr::resolve_config(file, env, flags);

    if (preprocess->parsed()) {
      viewbpr::cmd_preprocess(config, std::cout);
    } else if (train->parsed()) {
      viewbpr::cmd_train(config, std::cout);
    } else if (evaluate->parsed()) {
      viewbpr::cmd_evaluate(config, std::cout);
    } else if (stats->parsed()) {
      viewbpr::cmd_stats(config, std::cout);
    } else if (sweep->parsed()) {
      viewbpr::cmd_sweep(config, sweep_field, split_values(sweep_values), std::cout);
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
