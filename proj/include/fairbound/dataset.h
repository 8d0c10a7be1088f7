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

#ifndef FAIRBOUND_DATASET_H_
#define FAIRBOUND_DATASET_H_

#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

namespace fairbound {

// Sensitive attribute value: kPlus is the non-sensitive group s+, kMinus the
// sensitive group s-.
enum class Group : std::uint8_t { kMinus = 0, kPlus = 1 };

enum class EtaMethod { kNone, kGroupFrequency, kProbabilisticModel, kUserSupplied };
std::string_view ToString(EtaMethod method);

// Raw text table: header names plus rows of trimmed string fields.
struct RawTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
};

struct IngestStats {
  std::size_t rows_read = 0;  // data rows seen (excluding blank/comment lines)
  std::size_t rows_kept = 0;
  std::size_t skipped_malformed = 0;  // wrong field count or unparseable
  std::size_t skipped_missing = 0;    // a '?' or empty field
};

// Per-column encoding: numeric columns are standardized, categorical columns
// are one-hot encoded over their sorted distinct values.
struct ColumnEncoding {
  enum class Kind { kNumeric, kCategorical };
  std::string name;
  Kind kind = Kind::kNumeric;
  double mean = 0.0;
  double scale = 1.0;
  std::vector<std::string> categories;
};

class Encoder {
 public:
  Encoder() = default;

  // Fits one encoding per listed column of `table`.
  static Encoder Fit(const RawTable& table,
                     const std::vector<std::size_t>& columns);

  // Encodes rows laid out like the table the encoder was fitted on. Unknown
  // categories encode as all zeros; an unparseable number throws SchemaError.
  Eigen::MatrixXd Transform(const RawTable& table) const;

  std::vector<std::string> FeatureNames() const;
  const std::vector<ColumnEncoding>& columns() const { return columns_; }
  const std::vector<std::size_t>& source_columns() const { return source_; }

  std::string Serialize() const;
  static Encoder Deserialize(const std::string& text);

 private:
  std::vector<ColumnEncoding> columns_;
  std::vector<std::size_t> source_;
};

// Column mapping for generic CSV ingestion.
struct CsvSchema {
  std::string label_col;
  std::string sensitive_col;
  std::string positive_label_value;
  std::string positive_group_value;
  std::vector<std::string> drop_cols;
  // Optional column holding user-supplied eta values; excluded from features.
  std::string eta_col;
  bool has_header = true;
};

// Reads "key = value" lines: label_col, sensitive_col, positive_label_value,
// positive_group_value, drop_cols (comma list), eta_col, header (true|false).
CsvSchema ParseSchema(const std::string& text);
CsvSchema LoadSchemaFile(const std::filesystem::path& path);

struct AdultOptions {
  std::string positive_group = "Male";
  // fnlwgt is a census sampling weight rather than an attribute.
  bool drop_fnlwgt = true;
  // Bin every numeric attribute at its median so all features are discrete.
  bool binarize = false;
  // When set, permute the sex column with this seed (the Adult* variant).
  std::optional<std::uint64_t> shuffle_sensitive_seed;
};

// Immutable labelled dataset with a binary sensitive attribute. Copies share
// the feature matrix.
class Dataset {
 public:
  // Throws DegenerateGroupError unless N >= 2 and both groups occur, and
  // ContractError on shape mismatches or labels outside {-1, +1}.
  Dataset(Eigen::MatrixXd features, std::vector<int> labels,
          std::vector<Group> sensitive, std::vector<std::string> feature_names);

  std::size_t size() const { return labels_.size(); }
  std::size_t dim() const { return static_cast<std::size_t>(features_->cols()); }

  const Eigen::MatrixXd& features() const { return *features_; }
  std::span<const int> labels() const { return labels_; }
  std::span<const Group> sensitive() const { return sensitive_; }
  const std::vector<std::string>& feature_names() const { return names_; }

  // p = P(S = s+), the fraction of rows in s+.
  double group_rate() const { return group_rate_; }
  std::size_t count(Group g) const;

  bool has_eta() const { return eta_.has_value(); }
  // Throws ContractError when eta has not been estimated.
  std::span<const double> eta_hat() const;
  EtaMethod eta_method() const { return eta_method_; }

  // User-supplied eta column captured at ingestion (not yet validated).
  const std::optional<std::vector<double>>& raw_eta_column() const {
    return raw_eta_column_;
  }

  const std::optional<Encoder>& encoder() const { return encoder_; }
  const IngestStats& stats() const { return stats_; }

  // Returns a copy carrying `eta`. Every entry must lie in [0, 1] and
  // mean(eta) must equal p within 1e-6.
  Dataset WithEta(std::vector<double> eta, EtaMethod method) const;
  Dataset WithoutEta() const;
  Dataset WithEncoder(Encoder encoder, IngestStats stats) const;
  Dataset WithRawEtaColumn(std::vector<double> column) const;

  // Rows in the given order. Eta is dropped (it must be re-estimated for the
  // subset so that its mean matches the subset's p).
  Dataset Subset(std::span<const std::size_t> rows) const;

  // {1 if s+ else 0} per row.
  std::vector<double> GroupIndicator() const;

 private:
  std::shared_ptr<const Eigen::MatrixXd> features_;
  std::vector<int> labels_;
  std::vector<Group> sensitive_;
  std::vector<std::string> names_;
  double group_rate_ = 0.0;
  std::optional<std::vector<double>> eta_;
  EtaMethod eta_method_ = EtaMethod::kNone;
  std::optional<std::vector<double>> raw_eta_column_;
  std::optional<Encoder> encoder_;
  IngestStats stats_;
};

// Splits comma-separated text into trimmed fields. Double quotes group a
// field that contains commas.
std::vector<std::string> SplitCsvLine(const std::string& line);

// Blank lines and lines starting with '|' are ignored. Rows whose width
// differs from the header are counted as malformed and dropped. Without a
// header row, `fixed_header` names the columns (or, when empty, columns are
// named "0", "1", ... after the first row's width).
RawTable ReadCsvTable(const std::filesystem::path& path, bool has_header,
                      IngestStats* stats,
                      const std::vector<std::string>& fixed_header = {});

// Builds a dataset from a raw table: rows with a '?' or empty field are
// dropped and counted; categorical columns are one-hot encoded and numeric
// columns standardized.
Dataset BuildDataset(const RawTable& table, const CsvSchema& schema,
                     IngestStats stats = {});

Dataset LoadCsv(const std::filesystem::path& path, const CsvSchema& schema);

// UCI Adult layout (15 comma-separated fields, '?' for missing). Several
// files (adult.data, adult.test) may be combined; the test file's trailing
// '.' on the income label is accepted.
Dataset LoadAdult(const std::vector<std::filesystem::path>& paths,
                  const AdultOptions& options = {});
Dataset LoadAdult(const std::filesystem::path& path,
                  const AdultOptions& options = {});

struct FoldIndices {
  std::vector<std::size_t> train;
  std::vector<std::size_t> test;
};

// k-fold split stratified on (label, sensitive). Falls back to stratifying
// on the sensitive attribute alone, with a warning, when some (label, group)
// cell has fewer than k rows. Deterministic in `seed`.
std::vector<FoldIndices> SplitIndices(const Dataset& data, int folds,
                                      std::uint64_t seed,
                                      bool* used_fallback = nullptr);
std::vector<std::pair<Dataset, Dataset>> Split(const Dataset& data, int folds,
                                               std::uint64_t seed);

}  // namespace fairbound

#endif  // FAIRBOUND_DATASET_H_
