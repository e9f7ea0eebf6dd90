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

#include <viewbpr/run_config.hpp>

#include <algorithm>
#include <charconv>
#include <fstream>
#include <functional>
#include <sstream>

namespace viewbpr {

namespace {

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string::npos) {
    return {};
  }
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return s;
}

template <typename T>
T to_integer(const std::string& key, const std::string& value) {
  T out{};
  auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), out);
  if (ec != std::errc{} || ptr != value.data() + value.size()) {
    throw ConfigError(key + ": expected an integer, got '" + value + "'");
  }
  return out;
}

double to_real(const std::string& key, const std::string& value) {
  try {
    return parse_double(value);
  } catch (const ParseError&) {
    throw ConfigError(key + ": expected a number, got '" + value + "'");
  }
}

bool to_bool(const std::string& key, const std::string& value) {
  const auto v = lower(value);
  if (v == "1" || v == "true" || v == "yes" || v == "on") {
    return true;
  }
  if (v == "0" || v == "false" || v == "no" || v == "off") {
    return false;
  }
  throw ConfigError(key + ": expected a boolean, got '" + value + "'");
}

std::array<double, 3> to_omega(const std::string& key, const std::string& value) {
  std::array<double, 3> out{};
  std::istringstream in(value);
  std::string part;
  std::size_t n = 0;
  while (std::getline(in, part, ',')) {
    if (n == 3) {
      throw ConfigError(key + ": expected three comma-separated numbers");
    }
    out[n++] = to_real(key, trim(part));
  }
  if (n != 3) {
    throw ConfigError(key + ": expected three comma-separated numbers");
  }
  return out;
}

struct Field {
  std::function<void(RunConfig&, const std::string&, const std::string&)> set;
  std::function<std::string(const RunConfig&)> get;
};

using FieldTable = std::vector<std::pair<std::string, Field>>;

const FieldTable& fields() {
  static const FieldTable table = [] {
    FieldTable t;
    auto text = [&t](const char* key, std::string RunConfig::*member) {
      t.push_back({key,
                   {[member](RunConfig& c, const std::string&, const std::string& v) {
                      c.*member = v;
                    },
                    [member](const RunConfig& c) { return c.*member; }}});
    };
    auto add = [&t](const char* key, auto set, auto get) {
      t.push_back({key, {set, get}});
    };
    using S = const std::string&;

    text("raw_log", &RunConfig::raw_log);
    text("dataset", &RunConfig::dataset);
    text("model", &RunConfig::model);
    text("report", &RunConfig::report);
    text("metrics", &RunConfig::metrics);
    text("stats_dir", &RunConfig::stats_dir);
    text("sweep_dir", &RunConfig::sweep_dir);
    add("lenient", [](RunConfig& c, S k, S v) { c.lenient = to_bool(k, v); },
        [](const RunConfig& c) { return std::string(c.lenient ? "true" : "false"); });
    add("min_user_purchases",
        [](RunConfig& c, S k, S v) {
          c.thresholds.min_user_purchases = to_integer<std::size_t>(k, v);
        },
        [](const RunConfig& c) { return std::to_string(c.thresholds.min_user_purchases); });
    add("min_item_purchases",
        [](RunConfig& c, S k, S v) {
          c.thresholds.min_item_purchases = to_integer<std::size_t>(k, v);
        },
        [](const RunConfig& c) { return std::to_string(c.thresholds.min_item_purchases); });
    add("sampler", [](RunConfig& c, S, S v) { c.sampler.kind = parse_sampler_kind(v); },
        [](const RunConfig& c) { return std::string(to_string(c.sampler.kind)); });
    add("gamma", [](RunConfig& c, S k, S v) { c.sampler.gamma = to_real(k, v); },
        [](const RunConfig& c) { return format_double(c.sampler.gamma); });
    add("omega", [](RunConfig& c, S k, S v) { c.sampler.omega = to_omega(k, v); },
        [](const RunConfig& c) {
          return format_double(c.sampler.omega[0]) + "," +
                 format_double(c.sampler.omega[1]) + "," +
                 format_double(c.sampler.omega[2]);
        });
    add("dns_x",
        [](RunConfig& c, S k, S v) {
          c.sampler.dns_candidates = to_integer<std::size_t>(k, v);
        },
        [](const RunConfig& c) { return std::to_string(c.sampler.dns_candidates); });
    add("negatives",
        [](RunConfig& c, S, S v) { c.sampler.purchase_only_pool = parse_negative_pool(v); },
        [](const RunConfig& c) {
          return std::string(to_string(c.sampler.purchase_only_pool));
        });
    add("quad_pair_fallback",
        [](RunConfig& c, S k, S v) { c.sampler.quad_pair_fallback = to_bool(k, v); },
        [](const RunConfig& c) {
          return std::string(c.sampler.quad_pair_fallback ? "true" : "false");
        });
    add("weighting",
        [](RunConfig& c, S, S v) { c.weighting.mode = parse_weighting_mode(v); },
        [](const RunConfig& c) { return std::string(to_string(c.weighting.mode)); });
    add("alpha", [](RunConfig& c, S k, S v) { c.weighting.alpha = to_real(k, v); },
        [](const RunConfig& c) { return format_double(c.weighting.alpha); });
    add("beta", [](RunConfig& c, S k, S v) { c.weighting.beta = to_real(k, v); },
        [](const RunConfig& c) { return format_double(c.weighting.beta); });
    add("session_gap",
        [](RunConfig& c, S k, S v) { c.weighting.session_gap = to_integer<Timestamp>(k, v); },
        [](const RunConfig& c) { return std::to_string(c.weighting.session_gap); });
    add("lr", [](RunConfig& c, S k, S v) { c.train.learning_rate = to_real(k, v); },
        [](const RunConfig& c) { return format_double(c.train.learning_rate); });
    add("lr_mode", [](RunConfig& c, S, S v) { c.train.lr_mode = parse_lr_mode(v); },
        [](const RunConfig& c) { return std::string(to_string(c.train.lr_mode)); });
    add("reg", [](RunConfig& c, S k, S v) { c.train.regularization = to_real(k, v); },
        [](const RunConfig& c) { return format_double(c.train.regularization); });
    add("factors",
        [](RunConfig& c, S k, S v) { c.train.factors = to_integer<std::size_t>(k, v); },
        [](const RunConfig& c) { return std::to_string(c.train.factors); });
    add("init_scale", [](RunConfig& c, S k, S v) { c.train.init_scale = to_real(k, v); },
        [](const RunConfig& c) { return format_double(c.train.init_scale); });
    add("epochs",
        [](RunConfig& c, S k, S v) { c.train.max_epochs = to_integer<std::size_t>(k, v); },
        [](const RunConfig& c) { return std::to_string(c.train.max_epochs); });
    add("patience",
        [](RunConfig& c, S k, S v) { c.train.patience = to_integer<std::size_t>(k, v); },
        [](const RunConfig& c) { return std::to_string(c.train.patience); });
    add("seed",
        [](RunConfig& c, S k, S v) { c.train.seed = to_integer<std::uint64_t>(k, v); },
        [](const RunConfig& c) { return std::to_string(c.train.seed); });
    add("steps_per_epoch",
        [](RunConfig& c, S k, S v) {
          c.train.steps_per_epoch = to_integer<std::size_t>(k, v);
        },
        [](const RunConfig& c) { return std::to_string(c.train.steps_per_epoch); });
    add("k", [](RunConfig& c, S k, S v) { c.train.eval_k = to_integer<std::size_t>(k, v); },
        [](const RunConfig& c) { return std::to_string(c.train.eval_k); });
    add("baseline",
        [](RunConfig& c, S k, S v) {
          const auto b = lower(v);
          if (!b.empty() && b != "popularity" && b != "none") {
            throw ConfigError(k + ": unknown baseline '" + v + "'");
          }
          c.baseline = b == "none" ? "" : b;
        },
        [](const RunConfig& c) { return c.baseline.empty() ? std::string("none") : c.baseline; });
    add("report_timing",
        [](RunConfig& c, S k, S v) { c.report_timing = to_bool(k, v); },
        [](const RunConfig& c) { return std::string(c.report_timing ? "true" : "false"); });
    return t;
  }();
  return table;
}

const Field* find_field(const std::string& key) {
  for (const auto& [name, field] : fields()) {
    if (name == key) {
      return &field;
    }
  }
  return nullptr;
}

}  // namespace

ConfigEcho RunConfig::echo() const {
  ConfigEcho out;
  for (const auto& [name, field] : fields()) {
    out.emplace_back(name, field.get(*this));
  }
  return out;
}

const std::vector<std::string>& setting_keys() {
  static const std::vector<std::string> keys = [] {
    std::vector<std::string> k;
    for (const auto& [name, field] : fields()) {
      k.push_back(name);
    }
    return k;
  }();
  return keys;
}

void apply_setting(RunConfig& config, const std::string& key, const std::string& value) {
  const auto normalized = lower(trim(key));
  std::string canonical = normalized;
  std::replace(canonical.begin(), canonical.end(), '-', '_');
  const auto* field = find_field(canonical);
  if (field == nullptr) {
    throw ConfigError("unknown setting '" + key + "'");
  }
  field->set(config, canonical, trim(value));
}

std::vector<Setting> parse_config_text(std::istream& in) {
  std::vector<Setting> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto hash = line.find('#');
    const auto body = trim(line.substr(0, hash));
    if (body.empty()) {
      continue;
    }
    const auto eq = body.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("config line " + std::to_string(line_no) +
                        ": expected 'key = value'");
    }
    out.emplace_back(trim(body.substr(0, eq)), trim(body.substr(eq + 1)));
  }
  return out;
}

std::vector<Setting> read_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw IoError("cannot read config file " + path);
  }
  try {
    return parse_config_text(in);
  } catch (const ConfigError& e) {
    throw ConfigError(path + ": " + e.what());
  }
}

std::vector<Setting> environment_settings(const std::map<std::string, std::string>& env) {
  std::vector<Setting> out;
  const std::string prefix = kEnvPrefix;
  for (const auto& key : setting_keys()) {
    std::string name = key;
    std::transform(name.begin(), name.end(), name.begin(),
                   [](unsigned char c) { return static_cast<char>(std::toupper(c)); });
    auto it = env.find(prefix + name);
    if (it != env.end()) {
      out.emplace_back(key, it->second);
    }
  }
  return out;
}

RunConfig resolve_config(const std::vector<Setting>& file,
                         const std::vector<Setting>& environment,
                         const std::vector<Setting>& flags) {
  RunConfig config;
  for (const auto* source : {&file, &environment, &flags}) {
    for (const auto& [key, value] : *source) {
      apply_setting(config, key, value);
    }
  }
  config.sampler.validate();
  config.weighting.validate();
  config.train.validate();
  return config;
}

SamplerKind parse_sampler_kind(const std::string& text) {
  const auto t = lower(trim(text));
  if (t == "uniform") return SamplerKind::Uniform;
  if (t == "reduced") return SamplerKind::ReducedSpace;
  if (t == "dns") return SamplerKind::DNS;
  if (t == "biased") return SamplerKind::BiasedView;
  if (t == "triple") return SamplerKind::TripleView;
  throw ConfigError("unknown sampler '" + text +
                    "' (expected uniform, reduced, dns, biased or triple)");
}

WeightingMode parse_weighting_mode(const std::string& text) {
  const auto t = lower(trim(text));
  if (t == "global") return WeightingMode::Global;
  if (t == "per-user" || t == "per_user") return WeightingMode::PerUser;
  throw ConfigError("unknown weighting '" + text + "' (expected global or per-user)");
}

LearningRateMode parse_lr_mode(const std::string& text) {
  const auto t = lower(trim(text));
  if (t == "fixed") return LearningRateMode::Fixed;
  if (t == "adagrad") return LearningRateMode::Adagrad;
  throw ConfigError("unknown learning-rate mode '" + text + "'");
}

NegativePool parse_negative_pool(const std::string& text) {
  const auto t = lower(trim(text));
  if (t == "not-purchased" || t == "not_purchased") return NegativePool::NotPurchased;
  if (t == "unobserved") return NegativePool::Unobserved;
  throw ConfigError("unknown negative pool '" + text +
                    "' (expected not-purchased or unobserved)");
}

}  // namespace viewbpr
