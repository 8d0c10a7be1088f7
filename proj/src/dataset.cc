/*
 * Copyright 2026 The Fairbound Authors.
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include "fairbound/dataset.h"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <numeric>
#include <random>
#include <set>
#include <sstream>

#include <fmt/format.h>
#include <spdlog/spdlog.h>

#include "fairbound/error.h"

namespace fairbound {
namespace {

std::string Trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(first, last - first + 1));
}

std::optional<double> ParseNumber(std::string_view s) {
  if (s.empty()) return std::nullopt;
  if (s.front() == '+') s.remove_prefix(1);
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
  if (ec != std::errc() || ptr != s.data() + s.size()) return std::nullopt;
  if (!std::isfinite(value)) return std::nullopt;
  return value;
}

bool IsMissing(const std::string& field) { return field.empty() || field == "?"; }

std::size_t ColumnIndex(const RawTable& table, const std::string& name,
                        const char* role) {
  const auto it = std::find(table.header.begin(), table.header.end(), name);
  if (it == table.header.end()) {
    throw SchemaError(fmt::format("{} column '{}' not found in header", role,
                                  name));
  }
  return static_cast<std::size_t>(it - table.header.begin());
}

// Removes rows that contain a missing field.
RawTable DropMissingRows(const RawTable& table, IngestStats* stats) {
  RawTable kept;
  kept.header = table.header;
  kept.rows.reserve(table.rows.size());
  for (const auto& row : table.rows) {
    if (std::any_of(row.begin(), row.end(), IsMissing)) {
      ++stats->skipped_missing;
      continue;
    }
    kept.rows.push_back(row);
  }
  return kept;
}

const std::vector<std::string>& AdultHeader() {
  static const std::vector<std::string> header = {
      "age",          "workclass",      "fnlwgt",         "education",
      "education-num", "marital-status", "occupation",    "relationship",
      "race",         "sex",            "capital-gain",   "capital-loss",
      "hours-per-week", "native-country", "income"};
  return header;
}

}  // namespace

std::string_view ToString(EtaMethod method) {
  switch (method) {
    case EtaMethod::kNone:
      return "none";
    case EtaMethod::kGroupFrequency:
      return "group-frequency";
    case EtaMethod::kProbabilisticModel:
      return "probabilistic-model";
    case EtaMethod::kUserSupplied:
      return "user-supplied";
  }
  return "unknown";
}

// ---------------------------------------------------------------------------
// Encoder

Encoder Encoder::Fit(const RawTable& table,
                     const std::vector<std::size_t>& columns) {
  Encoder enc;
  enc.source_ = columns;
  for (const std::size_t c : columns) {
    ColumnEncoding col;
    col.name = table.header.at(c);
    bool numeric = !table.rows.empty();
    std::vector<double> values;
    values.reserve(table.rows.size());
    for (const auto& row : table.rows) {
      const auto v = ParseNumber(row[c]);
      if (!v) {
        numeric = false;
        break;
      }
      values.push_back(*v);
    }
    if (numeric) {
      col.kind = ColumnEncoding::Kind::kNumeric;
      const double n = static_cast<double>(values.size());
      const double mean = std::accumulate(values.begin(), values.end(), 0.0) / n;
      double ss = 0.0;
      for (const double v : values) ss += (v - mean) * (v - mean);
      const double sd = std::sqrt(ss / n);
      col.mean = mean;
      col.scale = sd > 0.0 && std::isfinite(sd) ? sd : 1.0;
    } else {
      col.kind = ColumnEncoding::Kind::kCategorical;
      std::set<std::string> levels;
      for (const auto& row : table.rows) levels.insert(row[c]);
      col.categories.assign(levels.begin(), levels.end());
    }
    enc.columns_.push_back(std::move(col));
  }
  return enc;
}

std::vector<std::string> Encoder::FeatureNames() const {
  std::vector<std::string> names;
  for (const auto& col : columns_) {
    if (col.kind == ColumnEncoding::Kind::kNumeric) {
      names.push_back(col.name);
    } else {
      for (const auto& level : col.categories) {
        names.push_back(col.name + "=" + level);
      }
    }
  }
  return names;
}

Eigen::MatrixXd Encoder::Transform(const RawTable& table) const {
  std::size_t width = 0;
  for (const auto& col : columns_) {
    width += col.kind == ColumnEncoding::Kind::kNumeric ? 1 : col.categories.size();
  }
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(
      static_cast<Eigen::Index>(table.rows.size()), static_cast<Eigen::Index>(width));
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    const auto& row = table.rows[r];
    Eigen::Index offset = 0;
    for (std::size_t k = 0; k < columns_.size(); ++k) {
      const ColumnEncoding& col = columns_[k];
      const std::string& field = row.at(source_[k]);
      if (col.kind == ColumnEncoding::Kind::kNumeric) {
        const auto v = ParseNumber(field);
        if (!v) {
          throw SchemaError(fmt::format("column '{}': '{}' is not a number",
                                        col.name, field));
        }
        out(static_cast<Eigen::Index>(r), offset) = (*v - col.mean) / col.scale;
        offset += 1;
      } else {
        const auto it = std::lower_bound(col.categories.begin(),
                                         col.categories.end(), field);
        if (it != col.categories.end() && *it == field) {
          out(static_cast<Eigen::Index>(r),
              offset + (it - col.categories.begin())) = 1.0;
        }
        offset += static_cast<Eigen::Index>(col.categories.size());
      }
    }
  }
  return out;
}

std::string Encoder::Serialize() const {
  std::ostringstream os;
  os << "fairbound-encoding 1\n";
  for (std::size_t k = 0; k < columns_.size(); ++k) {
    const ColumnEncoding& col = columns_[k];
    if (col.kind == ColumnEncoding::Kind::kNumeric) {
      os << fmt::format("numeric\t{}\t{}\t{:.17g}\t{:.17g}\n", source_[k],
                        col.name, col.mean, col.scale);
    } else {
      os << fmt::format("categorical\t{}\t{}\t{}", source_[k], col.name,
                        col.categories.size());
      for (const auto& level : col.categories) os << '\t' << level;
      os << '\n';
    }
  }
  return os.str();
}

Encoder Encoder::Deserialize(const std::string& text) {
  std::istringstream is(text);
  std::string line;
  if (!std::getline(is, line) || line != "fairbound-encoding 1") {
    throw SchemaError("not a fairbound encoding record (bad header line)");
  }
  Encoder enc;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    std::vector<std::string> parts;
    std::size_t start = 0;
    while (true) {
      const auto tab = line.find('\t', start);
      parts.push_back(line.substr(start, tab - start));
      if (tab == std::string::npos) break;
      start = tab + 1;
    }
    if (parts.size() < 4) throw SchemaError("truncated encoding line: " + line);
    ColumnEncoding col;
    col.name = parts[2];
    enc.source_.push_back(std::stoul(parts[1]));
    if (parts[0] == "numeric" && parts.size() == 5) {
      col.kind = ColumnEncoding::Kind::kNumeric;
      col.mean = std::stod(parts[3]);
      col.scale = std::stod(parts[4]);
    } else if (parts[0] == "categorical") {
      col.kind = ColumnEncoding::Kind::kCategorical;
      const std::size_t count = std::stoul(parts[3]);
      if (parts.size() != 4 + count) {
        throw SchemaError("categorical level count mismatch: " + line);
      }
      col.categories.assign(parts.begin() + 4, parts.end());
    } else {
      throw SchemaError("unknown encoding line: " + line);
    }
    enc.columns_.push_back(std::move(col));
  }
  return enc;
}

// ---------------------------------------------------------------------------
// Schema

CsvSchema ParseSchema(const std::string& text) {
  CsvSchema schema;
  std::istringstream is(text);
  std::string line;
  while (std::getline(is, line)) {
    const std::string trimmed = Trim(line);
    if (trimmed.empty() || trimmed.front() == '#') continue;
    const auto eq = trimmed.find('=');
    if (eq == std::string::npos) {
      throw SchemaError(fmt::format("schema line without '=': {}", trimmed));
    }
    const std::string key = Trim(trimmed.substr(0, eq));
    const std::string value = Trim(trimmed.substr(eq + 1));
    if (key == "label_col") {
      schema.label_col = value;
    } else if (key == "sensitive_col") {
      schema.sensitive_col = value;
    } else if (key == "positive_label_value") {
      schema.positive_label_value = value;
    } else if (key == "positive_group_value") {
      schema.positive_group_value = value;
    } else if (key == "eta_col") {
      schema.eta_col = value;
    } else if (key == "header") {
      schema.has_header = value != "false" && value != "0";
    } else if (key == "drop_cols") {
      for (auto& f : SplitCsvLine(value)) {
        if (!f.empty()) schema.drop_cols.push_back(f);
      }
    } else {
      throw SchemaError(fmt::format("unknown schema key '{}'", key));
    }
  }
  for (const auto& [field, name] :
       {std::pair{&schema.label_col, "label_col"},
        std::pair{&schema.sensitive_col, "sensitive_col"},
        std::pair{&schema.positive_label_value, "positive_label_value"},
        std::pair{&schema.positive_group_value, "positive_group_value"}}) {
    if (field->empty()) throw SchemaError(fmt::format("schema is missing {}", name));
  }
  return schema;
}

CsvSchema LoadSchemaFile(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IngestError(fmt::format("cannot open schema file {}", path.string()));
  std::stringstream buffer;
  buffer << in.rdbuf();
  return ParseSchema(buffer.str());
}

// ---------------------------------------------------------------------------
// Dataset

Dataset::Dataset(Eigen::MatrixXd features, std::vector<int> labels,
                 std::vector<Group> sensitive,
                 std::vector<std::string> feature_names)
    : labels_(std::move(labels)),
      sensitive_(std::move(sensitive)),
      names_(std::move(feature_names)) {
  const auto n = static_cast<std::size_t>(features.rows());
  if (labels_.size() != n || sensitive_.size() != n) {
    throw ContractError(fmt::format(
        "dataset shape mismatch: {} feature rows, {} labels, {} groups", n,
        labels_.size(), sensitive_.size()));
  }
  if (names_.size() != static_cast<std::size_t>(features.cols())) {
    throw ContractError(fmt::format("{} feature names for {} columns",
                                    names_.size(), features.cols()));
  }
  for (const int y : labels_) {
    if (y != 1 && y != -1) {
      throw ContractError(fmt::format("label {} is not -1 or +1", y));
    }
  }
  if (n < 2) throw DegenerateGroupError("dataset needs at least 2 rows");
  const auto plus = static_cast<std::size_t>(
      std::count(sensitive_.begin(), sensitive_.end(), Group::kPlus));
  if (plus == 0 || plus == n) {
    throw DegenerateGroupError(fmt::format(
        "only one sensitive group present ({} of {} rows in s+)", plus, n));
  }
  group_rate_ = static_cast<double>(plus) / static_cast<double>(n);
  features_ = std::make_shared<const Eigen::MatrixXd>(std::move(features));
}

std::size_t Dataset::count(Group g) const {
  return static_cast<std::size_t>(
      std::count(sensitive_.begin(), sensitive_.end(), g));
}

std::span<const double> Dataset::eta_hat() const {
  if (!eta_) throw ContractError("eta has not been estimated for this dataset");
  return *eta_;
}

Dataset Dataset::WithEta(std::vector<double> eta, EtaMethod method) const {
  if (eta.size() != size()) {
    throw ContractError(fmt::format("eta has {} entries for {} rows",
                                    eta.size(), size()));
  }
  double sum = 0.0;
  for (const double e : eta) {
    if (!(e >= 0.0 && e <= 1.0)) {
      throw ContractError(fmt::format("eta value {} outside [0, 1]", e));
    }
    sum += e;
  }
  const double mean = sum / static_cast<double>(eta.size());
  if (std::abs(mean - group_rate_) > 1e-6) {
    throw ContractError(fmt::format(
        "mean(eta) = {:.12g} differs from p = {:.12g} by more than 1e-6", mean,
        group_rate_));
  }
  Dataset out = *this;
  out.eta_ = std::move(eta);
  out.eta_method_ = method;
  return out;
}

Dataset Dataset::WithoutEta() const {
  Dataset out = *this;
  out.eta_.reset();
  out.eta_method_ = EtaMethod::kNone;
  return out;
}

Dataset Dataset::WithEncoder(Encoder encoder, IngestStats stats) const {
  Dataset out = *this;
  out.encoder_ = std::move(encoder);
  out.stats_ = stats;
  return out;
}

Dataset Dataset::WithRawEtaColumn(std::vector<double> column) const {
  if (column.size() != size()) {
    throw ContractError("eta column length does not match the dataset");
  }
  Dataset out = *this;
  out.raw_eta_column_ = std::move(column);
  return out;
}

Dataset Dataset::Subset(std::span<const std::size_t> rows) const {
  Eigen::MatrixXd x(static_cast<Eigen::Index>(rows.size()), features_->cols());
  std::vector<int> y;
  std::vector<Group> s;
  std::optional<std::vector<double>> raw_eta;
  if (raw_eta_column_) raw_eta.emplace();
  y.reserve(rows.size());
  s.reserve(rows.size());
  for (std::size_t k = 0; k < rows.size(); ++k) {
    const std::size_t r = rows[k];
    if (r >= size()) throw ContractError("subset row index out of range");
    x.row(static_cast<Eigen::Index>(k)) =
        features_->row(static_cast<Eigen::Index>(r));
    y.push_back(labels_[r]);
    s.push_back(sensitive_[r]);
    if (raw_eta) raw_eta->push_back((*raw_eta_column_)[r]);
  }
  Dataset out(std::move(x), std::move(y), std::move(s), names_);
  out.encoder_ = encoder_;
  out.raw_eta_column_ = std::move(raw_eta);
  return out;
}

std::vector<double> Dataset::GroupIndicator() const {
  std::vector<double> out(size());
  for (std::size_t i = 0; i < size(); ++i) {
    out[i] = sensitive_[i] == Group::kPlus ? 1.0 : 0.0;
  }
  return out;
}

// ---------------------------------------------------------------------------
// Ingestion

std::vector<std::string> SplitCsvLine(const std::string& line) {
  std::vector<std::string> fields;
  std::string current;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (c == '"') {
      if (quoted && i + 1 < line.size() && line[i + 1] == '"') {
        current.push_back('"');
        ++i;
      } else {
        quoted = !quoted;
      }
    } else if (c == ',' && !quoted) {
      fields.push_back(Trim(current));
      current.clear();
    } else {
      current.push_back(c);
    }
  }
  fields.push_back(Trim(current));
  return fields;
}

RawTable ReadCsvTable(const std::filesystem::path& path, bool has_header,
                      IngestStats* stats,
                      const std::vector<std::string>& fixed_header) {
  std::ifstream in(path);
  if (!in) throw IngestError(fmt::format("cannot open {}", path.string()));
  RawTable table;
  if (!has_header) table.header = fixed_header;
  std::string line;
  bool header_pending = has_header;
  while (std::getline(in, line)) {
    const std::string trimmed = Trim(line);
    if (trimmed.empty() || trimmed.front() == '|') continue;
    auto fields = SplitCsvLine(trimmed);
    if (header_pending) {
      table.header = std::move(fields);
      header_pending = false;
      continue;
    }
    if (table.header.empty()) {
      for (std::size_t i = 0; i < fields.size(); ++i) {
        table.header.push_back(std::to_string(i));
      }
    }
    ++stats->rows_read;
    if (fields.size() != table.header.size()) {
      ++stats->skipped_malformed;
      continue;
    }
    table.rows.push_back(std::move(fields));
  }
  return table;
}

Dataset BuildDataset(const RawTable& table, const CsvSchema& schema,
                     IngestStats stats) {
  const std::size_t label_idx = ColumnIndex(table, schema.label_col, "label");
  const std::size_t group_idx =
      ColumnIndex(table, schema.sensitive_col, "sensitive");
  std::optional<std::size_t> eta_idx;
  if (!schema.eta_col.empty()) eta_idx = ColumnIndex(table, schema.eta_col, "eta");
  std::set<std::size_t> excluded = {label_idx, group_idx};
  if (eta_idx) excluded.insert(*eta_idx);
  for (const auto& name : schema.drop_cols) {
    excluded.insert(ColumnIndex(table, name, "drop"));
  }

  RawTable kept = DropMissingRows(table, &stats);
  std::vector<double> eta_column;
  if (eta_idx) {
    RawTable parsed;
    parsed.header = kept.header;
    for (auto& row : kept.rows) {
      const auto v = ParseNumber(row[*eta_idx]);
      if (!v) {
        ++stats.skipped_malformed;
        continue;
      }
      eta_column.push_back(*v);
      parsed.rows.push_back(std::move(row));
    }
    kept = std::move(parsed);
  }
  if (kept.rows.size() < 2) {
    throw IngestError(fmt::format(
        "only {} usable rows after dropping {} malformed and {} with missing "
        "values",
        kept.rows.size(), stats.skipped_malformed, stats.skipped_missing));
  }
  stats.rows_kept = kept.rows.size();

  std::vector<std::size_t> feature_cols;
  for (std::size_t c = 0; c < kept.header.size(); ++c) {
    if (!excluded.count(c)) feature_cols.push_back(c);
  }
  Encoder encoder = Encoder::Fit(kept, feature_cols);
  Eigen::MatrixXd features = encoder.Transform(kept);

  std::vector<int> labels;
  std::vector<Group> groups;
  labels.reserve(kept.rows.size());
  groups.reserve(kept.rows.size());
  for (const auto& row : kept.rows) {
    labels.push_back(row[label_idx] == schema.positive_label_value ? 1 : -1);
    groups.push_back(row[group_idx] == schema.positive_group_value ? Group::kPlus
                                                                   : Group::kMinus);
  }
  Dataset data(std::move(features), std::move(labels), std::move(groups),
               encoder.FeatureNames());
  if (stats.skipped_malformed + stats.skipped_missing > 0) {
    spdlog::info("ingest: kept {} rows, skipped {} malformed and {} with missing values",
                 stats.rows_kept, stats.skipped_malformed, stats.skipped_missing);
  }
  data = data.WithEncoder(std::move(encoder), stats);
  if (eta_idx) data = data.WithRawEtaColumn(std::move(eta_column));
  return data;
}

Dataset LoadCsv(const std::filesystem::path& path, const CsvSchema& schema) {
  IngestStats stats;
  const RawTable table = ReadCsvTable(path, schema.has_header, &stats);
  return BuildDataset(table, schema, stats);
}

Dataset LoadAdult(const std::vector<std::filesystem::path>& paths,
                  const AdultOptions& options) {
  IngestStats stats;
  RawTable all;
  all.header = AdultHeader();
  for (const auto& path : paths) {
    RawTable part =
        ReadCsvTable(path, /*has_header=*/false, &stats, AdultHeader());
    for (auto& row : part.rows) {
      std::string& income = row.back();
      if (!income.empty() && income.back() == '.') income.pop_back();
      all.rows.push_back(std::move(row));
    }
  }
  RawTable kept = DropMissingRows(all, &stats);
  if (kept.rows.empty()) {
    throw IngestError("no usable Adult rows in the given files");
  }
  const std::size_t sex_idx = 9;
  if (options.shuffle_sensitive_seed) {
    std::vector<std::string> sex;
    for (const auto& row : kept.rows) sex.push_back(row[sex_idx]);
    std::mt19937_64 rng(*options.shuffle_sensitive_seed);
    std::shuffle(sex.begin(), sex.end(), rng);
    for (std::size_t r = 0; r < kept.rows.size(); ++r) kept.rows[r][sex_idx] = sex[r];
  }
  if (options.binarize) {
    for (const std::size_t c : {0u, 2u, 4u, 10u, 11u, 12u}) {
      std::vector<double> values;
      for (const auto& row : kept.rows) values.push_back(*ParseNumber(row[c]));
      std::vector<double> sorted = values;
      std::nth_element(sorted.begin(), sorted.begin() + sorted.size() / 2,
                       sorted.end());
      const double median = sorted[sorted.size() / 2];
      for (std::size_t r = 0; r < kept.rows.size(); ++r) {
        kept.rows[r][c] = values[r] > median ? "high" : "low";
      }
    }
  }
  CsvSchema schema;
  schema.label_col = "income";
  schema.sensitive_col = "sex";
  schema.positive_label_value = ">50K";
  schema.positive_group_value = options.positive_group;
  if (options.drop_fnlwgt) schema.drop_cols.push_back("fnlwgt");
  return BuildDataset(kept, schema, stats);
}

Dataset LoadAdult(const std::filesystem::path& path, const AdultOptions& options) {
  return LoadAdult(std::vector<std::filesystem::path>{path}, options);
}

// ---------------------------------------------------------------------------
// Folds

std::vector<FoldIndices> SplitIndices(const Dataset& data, int folds,
                                      std::uint64_t seed, bool* used_fallback) {
  if (folds < 2 || static_cast<std::size_t>(folds) > data.size()) {
    throw ContractError(fmt::format("cannot split {} rows into {} folds",
                                    data.size(), folds));
  }
  const auto k = static_cast<std::size_t>(folds);
  auto cells_by = [&](bool with_label) {
    std::map<std::pair<int, int>, std::vector<std::size_t>> cells;
    for (std::size_t i = 0; i < data.size(); ++i) {
      const int y = with_label ? data.labels()[i] : 0;
      cells[{y, static_cast<int>(data.sensitive()[i])}].push_back(i);
    }
    return cells;
  };
  auto cells = cells_by(true);
  bool fallback = false;
  for (const auto& [key, rows] : cells) {
    if (rows.size() < k) fallback = true;
  }
  if (fallback) {
    spdlog::warn(
        "split: a (label, group) cell has fewer than {} rows; stratifying on "
        "the sensitive attribute only",
        k);
    cells = cells_by(false);
  }
  if (used_fallback) *used_fallback = fallback;

  std::mt19937_64 rng(seed);
  std::vector<std::vector<std::size_t>> test(k);
  std::size_t counter = 0;
  for (auto& [key, rows] : cells) {
    std::shuffle(rows.begin(), rows.end(), rng);
    for (const std::size_t r : rows) test[counter++ % k].push_back(r);
  }
  std::vector<FoldIndices> out(k);
  for (std::size_t f = 0; f < k; ++f) {
    std::sort(test[f].begin(), test[f].end());
    std::vector<bool> in_test(data.size(), false);
    for (const std::size_t r : test[f]) in_test[r] = true;
    for (std::size_t i = 0; i < data.size(); ++i) {
      if (!in_test[i]) out[f].train.push_back(i);
    }
    out[f].test = std::move(test[f]);
  }
  return out;
}

std::vector<std::pair<Dataset, Dataset>> Split(const Dataset& data, int folds,
                                               std::uint64_t seed) {
  std::vector<std::pair<Dataset, Dataset>> out;
  for (const auto& fold : SplitIndices(data, folds, seed)) {
    out.emplace_back(data.Subset(fold.train), data.Subset(fold.test));
  }
  return out;
}

}  // namespace fairbound
