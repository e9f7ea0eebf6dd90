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

#include <viewbpr/io.hpp>

#include <charconv>
#include <fstream>
#include <sstream>

namespace viewbpr {

namespace {

std::string header_line(const char* kind, int version) {
  return std::string("# viewbpr-") + kind + " v" + std::to_string(version);
}

void expect_header(std::istream& in, const char* kind, int version) {
  std::string line;
  if (!std::getline(in, line) || line != header_line(kind, version)) {
    throw ParseError(std::string("not a viewbpr ") + kind + " file (expected '" +
                     header_line(kind, version) + "')");
  }
}

std::vector<std::string> split_tabs(const std::string& line) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = line.find('\t', start);
    out.push_back(line.substr(start, pos - start));
    if (pos == std::string::npos) {
      break;
    }
    start = pos + 1;
  }
  return out;
}

template <typename T>
T parse_int(const std::string& text) {
  T value{};
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc{} || ptr != text.data() + text.size()) {
    throw ParseError("invalid integer '" + text + "'");
  }
  return value;
}

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw IoError("cannot write " + path);
  }
  return out;
}

std::ifstream open_in(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw IoError("cannot read " + path);
  }
  return in;
}

void finish(std::ofstream& out, const std::string& path) {
  out.flush();
  if (!out) {
    throw IoError("error while writing " + path);
  }
}

template <typename Fn>
auto with_path_context(const std::string& path, Fn&& fn) {
  try {
    return fn();
  } catch (const ParseError& e) {
    throw ParseError(path + ": " + e.what());
  }
}

}  // namespace

std::string format_double(double x) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), x);
  if (ec != std::errc{}) {
    throw std::logic_error("double formatting failed");
  }
  return std::string(buf, ptr);
}

double parse_double(std::string_view text) {
  double value = 0.0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc{} || ptr != text.data() + text.size()) {
    throw ParseError("invalid number '" + std::string(text) + "'");
  }
  return value;
}

// ---------------------------------------------------------------------------
// Snapshot
// ---------------------------------------------------------------------------

void write_snapshot(std::ostream& out, const IndexedDataset& data) {
  const auto& d = data.dataset;
  out << header_line("dataset", kSnapshotVersion) << '\n';
  out << "users\t" << d.num_users() << '\n';
  out << "items\t" << d.num_items() << '\n';
  out << "day_granular\t" << (d.timestamps_day_granular() ? 1 : 0) << '\n';
  for (std::size_t u = 0; u < data.users.size(); ++u) {
    out << "U\t" << u << '\t' << data.users.external(static_cast<std::uint32_t>(u))
        << '\n';
  }
  for (std::size_t i = 0; i < data.items.size(); ++i) {
    out << "I\t" << i << '\t' << data.items.external(static_cast<std::uint32_t>(i))
        << '\n';
  }
  for (UserIndex u = 0; u < d.num_users(); ++u) {
    const auto items = d.purchased(u);
    const auto stamps = d.purchase_timestamps(u);
    for (std::size_t k = 0; k < items.size(); ++k) {
      out << "P\t" << u << '\t' << items[k] << '\t' << stamps[k] << '\n';
    }
  }
  for (UserIndex u = 0; u < d.num_users(); ++u) {
    const auto items = d.viewed(u);
    const auto stamps = d.view_timestamps(u);
    for (std::size_t k = 0; k < items.size(); ++k) {
      out << "V\t" << u << '\t' << items[k] << '\t' << stamps[k] << '\n';
    }
  }
}

IndexedDataset read_snapshot(std::istream& in) {
  expect_header(in, "dataset", kSnapshotVersion);
  std::size_t m = 0;
  std::size_t n = 0;
  bool day_granular = false;
  IndexedDataset out;
  std::vector<std::vector<TimedItem>> purchases;
  std::vector<std::vector<TimedItem>> views;
  std::string line;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) {
      continue;
    }
    const auto f = split_tabs(line);
    auto need = [&](std::size_t count) {
      if (f.size() != count) {
        throw ParseError("snapshot line " + std::to_string(line_no) +
                         ": expected " + std::to_string(count) + " fields");
      }
    };
    const auto& tag = f[0];
    if (tag == "users") {
      need(2);
      m = parse_int<std::size_t>(f[1]);
      purchases.resize(m);
      views.resize(m);
    } else if (tag == "items") {
      need(2);
      n = parse_int<std::size_t>(f[1]);
    } else if (tag == "day_granular") {
      need(2);
      day_granular = f[1] == "1";
    } else if (tag == "U" || tag == "I") {
      need(3);
      auto& map = tag == "U" ? out.users : out.items;
      if (parse_int<std::size_t>(f[1]) != map.size() ||
          map.get_or_add(f[2]) + 1 != map.size()) {
        throw ParseError("snapshot line " + std::to_string(line_no) +
                         ": id map is not dense and bijective");
      }
    } else if (tag == "P" || tag == "V") {
      need(4);
      const auto u = parse_int<UserIndex>(f[1]);
      const auto i = parse_int<ItemIndex>(f[2]);
      if (u >= m || i >= n) {
        throw ParseError("snapshot line " + std::to_string(line_no) +
                         ": index out of range");
      }
      (tag == "P" ? purchases : views)[u].push_back({i, parse_int<Timestamp>(f[3])});
    } else {
      throw ParseError("snapshot line " + std::to_string(line_no) +
                       ": unknown record '" + tag + "'");
    }
  }
  if (out.users.size() != m || out.items.size() != n) {
    throw ParseError("snapshot id maps do not match the declared dimensions");
  }
  out.dataset = FeedbackDataset(m, n, std::move(purchases), std::move(views),
                                day_granular);
  return out;
}

void save_snapshot(const std::string& path, const IndexedDataset& data) {
  auto out = open_out(path);
  write_snapshot(out, data);
  finish(out, path);
}

IndexedDataset load_snapshot(const std::string& path) {
  auto in = open_in(path);
  return with_path_context(path, [&] { return read_snapshot(in); });
}

// ---------------------------------------------------------------------------
// Model checkpoint
// ---------------------------------------------------------------------------

void write_model(std::ostream& out, const FactorModel& model) {
  out << header_line("model", kModelVersion) << '\n';
  out << model.num_users() << ' ' << model.num_items() << ' ' << model.factors()
      << ' ' << model.seed << '\n';
  auto write_rows = [&out](const Matrix& m) {
    for (std::size_t r = 0; r < m.rows(); ++r) {
      const auto row = m.row(r);
      for (std::size_t f = 0; f < row.size(); ++f) {
        out << (f ? " " : "") << format_double(row[f]);
      }
      out << '\n';
    }
  };
  write_rows(model.users);
  write_rows(model.items);
}

FactorModel read_model(std::istream& in) {
  expect_header(in, "model", kModelVersion);
  std::string line;
  if (!std::getline(in, line)) {
    throw ParseError("model file is missing its dimension line");
  }
  std::istringstream dims(line);
  std::size_t m = 0;
  std::size_t n = 0;
  std::size_t k = 0;
  std::uint64_t seed = 0;
  if (!(dims >> m >> n >> k >> seed) || m == 0 || n == 0 || k == 0) {
    throw ParseError("model file has an invalid dimension line");
  }
  FactorModel model{Matrix(m, k), Matrix(n, k), seed};
  auto read_rows = [&](Matrix& mat) {
    for (std::size_t r = 0; r < mat.rows(); ++r) {
      if (!std::getline(in, line)) {
        throw ParseError("model file ends early");
      }
      std::size_t f = 0;
      std::size_t start = 0;
      while (start <= line.size() && f < k) {
        auto end = line.find(' ', start);
        if (end == std::string::npos) {
          end = line.size();
        }
        mat(r, f++) = parse_double(std::string_view(line).substr(start, end - start));
        start = end + 1;
      }
      if (f != k || start <= line.size()) {
        throw ParseError("model row " + std::to_string(r) + " has the wrong width");
      }
    }
  };
  read_rows(model.users);
  read_rows(model.items);
  return model;
}

void save_model(const std::string& path, const FactorModel& model) {
  auto out = open_out(path);
  write_model(out, model);
  finish(out, path);
}

FactorModel load_model(const std::string& path) {
  auto in = open_in(path);
  return with_path_context(path, [&] { return read_model(in); });
}

// ---------------------------------------------------------------------------
// Reports
// ---------------------------------------------------------------------------

void write_report(std::ostream& out, const TrainReport& report,
                  const ConfigEcho& config, bool with_timing) {
  out << header_line("report", kReportVersion) << '\n';
  for (const auto& [key, value] : config) {
    out << "# " << key << '=' << value << '\n';
  }
  const auto k = std::to_string(report.k);
  out << "epoch\tsteps\ttrain_loss\tvalidation_loss\thr@" << k << "\tndcg@" << k;
  if (with_timing) {
    out << "\tseconds";
  }
  out << '\n';
  for (const auto& r : report.rows) {
    out << r.epoch << '\t' << r.steps << '\t' << format_double(r.train_loss) << '\t'
        << format_double(r.validation_loss) << '\t' << format_double(r.hr) << '\t'
        << format_double(r.ndcg);
    if (with_timing) {
      out << '\t' << format_double(r.seconds);
    }
    out << '\n';
  }
  out << "# best_epoch=" << report.best_epoch << '\n';
  out << "# stopped_early=" << (report.stopped_early ? "true" : "false") << '\n';
}

TrainReport read_report(std::istream& in) {
  expect_header(in, "report", kReportVersion);
  TrainReport report;
  std::string line;
  bool columns_seen = false;
  while (std::getline(in, line)) {
    if (line.empty()) {
      continue;
    }
    if (line.rfind("# best_epoch=", 0) == 0) {
      report.best_epoch = parse_int<std::size_t>(line.substr(13));
      continue;
    }
    if (line.rfind("# stopped_early=", 0) == 0) {
      report.stopped_early = line.substr(16) == "true";
      continue;
    }
    if (line[0] == '#') {
      continue;
    }
    const auto f = split_tabs(line);
    if (!columns_seen) {
      columns_seen = true;
      if (f.size() < 6 || f[4].rfind("hr@", 0) != 0) {
        throw ParseError("report column header is malformed");
      }
      report.k = parse_int<std::size_t>(f[4].substr(3));
      continue;
    }
    if (f.size() < 6) {
      throw ParseError("report row has too few columns");
    }
    EpochRecord r;
    r.epoch = parse_int<std::size_t>(f[0]);
    r.steps = parse_int<std::size_t>(f[1]);
    r.train_loss = parse_double(f[2]);
    r.validation_loss = parse_double(f[3]);
    r.hr = parse_double(f[4]);
    r.ndcg = parse_double(f[5]);
    if (f.size() > 6) {
      r.seconds = parse_double(f[6]);
    }
    report.rows.push_back(r);
  }
  return report;
}

void save_report(const std::string& path, const TrainReport& report,
                 const ConfigEcho& config, bool with_timing) {
  auto out = open_out(path);
  write_report(out, report, config, with_timing);
  finish(out, path);
}

TrainReport load_report(const std::string& path) {
  auto in = open_in(path);
  return with_path_context(path, [&] { return read_report(in); });
}

void write_metrics(std::ostream& out, const std::vector<MetricsRow>& rows) {
  out << header_line("metrics", kMetricsVersion) << '\n';
  out << "model\tk\thr\tndcg\n";
  for (const auto& r : rows) {
    out << r.label << '\t' << r.k << '\t' << format_double(r.metrics.hr) << '\t'
        << format_double(r.metrics.ndcg) << '\n';
  }
}

void save_metrics(const std::string& path, const std::vector<MetricsRow>& rows) {
  auto out = open_out(path);
  write_metrics(out, rows);
  finish(out, path);
}

void write_curve(std::ostream& out, Behavior behavior,
                 const std::vector<CurvePoint>& curve) {
  out << header_line("skewness", kCurveVersion) << '\n';
  out << "# behavior=" << to_string(behavior) << '\n';
  out << "item_ratio\tinteraction_ratio\n";
  for (const auto& p : curve) {
    out << format_double(p.x) << '\t' << format_double(p.y) << '\n';
  }
}

void save_curve(const std::string& path, Behavior behavior,
                const std::vector<CurvePoint>& curve) {
  auto out = open_out(path);
  write_curve(out, behavior, curve);
  finish(out, path);
}

}  // namespace viewbpr
