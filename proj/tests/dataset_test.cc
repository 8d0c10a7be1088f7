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

#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>
#include <string>

#include <gtest/gtest.h>

#include "fairbound/error.h"
#include "fairbound/synthetic.h"

namespace fairbound {
namespace {

namespace fs = std::filesystem;

class TempDir {
 public:
  TempDir() {
    path_ = fs::temp_directory_path() /
            ("fairbound_dataset_" + std::to_string(::getpid()) + "_" +
             std::to_string(counter_++));
    fs::create_directories(path_);
  }
  ~TempDir() { fs::remove_all(path_); }
  fs::path Write(const std::string& name, const std::string& content) const {
    std::ofstream(path_ / name) << content;
    return path_ / name;
  }

 private:
  static inline int counter_ = 0;
  fs::path path_;
};

CsvSchema BasicSchema() {
  return ParseSchema(
      "label_col = y\nsensitive_col = s\npositive_label_value = yes\n"
      "positive_group_value = m\n");
}

TEST(SplitCsvLineTest, QuotesAndWhitespace) {
  const auto f = SplitCsvLine(" a , \"b,c\" ,d");
  ASSERT_EQ(f.size(), 3u);
  EXPECT_EQ(f[0], "a");
  EXPECT_EQ(f[1], "b,c");
  EXPECT_EQ(f[2], "d");
}

TEST(SchemaTest, ParsesAndRejects) {
  const CsvSchema s = ParseSchema(
      "# comment\nlabel_col=y\nsensitive_col=s\npositive_label_value=1\n"
      "positive_group_value=m\ndrop_cols=a,b\neta_col=e\nheader=false\n");
  EXPECT_EQ(s.drop_cols, (std::vector<std::string>{"a", "b"}));
  EXPECT_EQ(s.eta_col, "e");
  EXPECT_FALSE(s.has_header);
  EXPECT_THROW(ParseSchema("label_col=y\n"), SchemaError);
  EXPECT_THROW(ParseSchema("colour=red\n"), SchemaError);
}

TEST(LoadCsvTest, FourRows) {
  TempDir dir;
  const auto path = dir.Write("d.csv", "x,s,y\n1,m,yes\n0,f,no\n1,f,yes\n0,m,no\n");
  const Dataset d = LoadCsv(path, BasicSchema());
  EXPECT_EQ(d.size(), 4u);
  EXPECT_DOUBLE_EQ(d.group_rate(), 0.5);
  EXPECT_EQ(d.labels()[0], 1);
  EXPECT_EQ(d.labels()[1], -1);
  EXPECT_EQ(d.sensitive()[0], Group::kPlus);
  EXPECT_EQ(d.stats().rows_kept, 4u);
}

TEST(LoadCsvTest, SkipsMalformedAndMissing) {
  TempDir dir;
  const auto path =
      dir.Write("d.csv", "x,s,y\n1,m,yes\n0,f\n?,f,yes\n0,m,no\n1,f,no\n");
  const Dataset d = LoadCsv(path, BasicSchema());
  EXPECT_EQ(d.size(), 3u);
  EXPECT_EQ(d.stats().skipped_malformed, 1u);
  EXPECT_EQ(d.stats().skipped_missing, 1u);
}

TEST(LoadCsvTest, SingleGroupIsDegenerate) {
  TempDir dir;
  const auto path = dir.Write("d.csv", "x,s,y\n1,m,yes\n0,m,no\n");
  EXPECT_THROW(LoadCsv(path, BasicSchema()), DegenerateGroupError);
}

TEST(LoadCsvTest, MissingColumnIsSchemaError) {
  TempDir dir;
  const auto path = dir.Write("d.csv", "x,g,y\n1,m,yes\n0,f,no\n");
  EXPECT_THROW(LoadCsv(path, BasicSchema()), SchemaError);
}

TEST(LoadCsvTest, MissingFileIsIngestError) {
  EXPECT_THROW(LoadCsv("/nonexistent/file.csv", BasicSchema()), IngestError);
}

TEST(EncoderTest, OneHotAndStandardize) {
  TempDir dir;
  const auto path = dir.Write(
      "d.csv", "age,color,s,y\n10,red,m,yes\n20,blue,f,no\n30,red,f,yes\n40,green,m,no\n");
  const Dataset d = LoadCsv(path, BasicSchema());
  ASSERT_TRUE(d.encoder().has_value());
  const auto names = d.feature_names();
  EXPECT_EQ(names.size(), 4u);
  EXPECT_NEAR(d.features().col(0).mean(), 0.0, 1e-12);
  const auto& X = d.features();
  for (Eigen::Index i = 0; i < X.rows(); ++i) {
    EXPECT_DOUBLE_EQ(X.row(i).tail(3).sum(), 1.0);
  }
}

TEST(EncoderTest, SerializeRoundTrip) {
  TempDir dir;
  const auto path = dir.Write(
      "d.csv", "age,color,s,y\n10,red,m,yes\n20,\"blue, dark\",f,no\n30,red,f,yes\n");
  const Dataset d = LoadCsv(path, BasicSchema());
  const Encoder& e = *d.encoder();
  const Encoder back = Encoder::Deserialize(e.Serialize());
  EXPECT_EQ(back.Serialize(), e.Serialize());
  EXPECT_EQ(back.FeatureNames(), e.FeatureNames());
  IngestStats stats;
  const RawTable t = ReadCsvTable(path, true, &stats);
  EXPECT_TRUE(back.Transform(t).isApprox(e.Transform(t)));
}

TEST(StudentsTest, TwoHundredRows) {
  const Dataset d = StudentsDataset();
  EXPECT_EQ(d.size(), 200u);
  EXPECT_DOUBLE_EQ(d.group_rate(), 0.5);
  std::set<std::vector<double>> distinct;
  for (Eigen::Index i = 0; i < d.features().rows(); ++i) {
    const Eigen::VectorXd r = d.features().row(i);
    distinct.insert(std::vector<double>(r.data(), r.data() + r.size()));
  }
  EXPECT_EQ(distinct.size(), 2u);
}

TEST(SplitTest, BalancedFoldSizes) {
  Eigen::MatrixXd x = Eigen::MatrixXd::Zero(10, 1);
  std::vector<int> y(10, 1);
  std::vector<Group> s(10, Group::kMinus);
  for (int i = 0; i < 5; ++i) s[i] = Group::kPlus;
  const Dataset d(x, y, s, {"x"});
  const auto folds = SplitIndices(d, 5, 3);
  ASSERT_EQ(folds.size(), 5u);
  std::set<std::size_t> seen;
  for (const auto& f : folds) {
    EXPECT_EQ(f.test.size(), 2u);
    EXPECT_EQ(f.train.size(), 8u);
    seen.insert(f.test.begin(), f.test.end());
  }
  EXPECT_EQ(seen.size(), 10u);
}

TEST(SplitTest, DeterministicPerSeed) {
  const Dataset d = MakeBiasedSynthetic({.rows = 300});
  const auto a = SplitIndices(d, 4, 11);
  const auto b = SplitIndices(d, 4, 11);
  const auto c = SplitIndices(d, 4, 12);
  for (std::size_t f = 0; f < a.size(); ++f) EXPECT_EQ(a[f].test, b[f].test);
  bool differs = false;
  for (std::size_t f = 0; f < a.size(); ++f) differs |= a[f].test != c[f].test;
  EXPECT_TRUE(differs);
}

TEST(SplitTest, FallbackWhenCellTooSmall) {
  Eigen::MatrixXd x = Eigen::MatrixXd::Zero(6, 1);
  const std::vector<int> y = {1, -1, -1, -1, -1, -1};
  const std::vector<Group> s = {Group::kPlus, Group::kPlus, Group::kPlus,
                                Group::kMinus, Group::kMinus, Group::kMinus};
  bool fallback = false;
  SplitIndices(Dataset(x, y, s, {"x"}), 3, 1, &fallback);
  EXPECT_TRUE(fallback);
}

TEST(DatasetTest, ContractChecks) {
  Eigen::MatrixXd x = Eigen::MatrixXd::Zero(2, 1);
  EXPECT_THROW(Dataset(x, {1, 0}, {Group::kPlus, Group::kMinus}, {"x"}), ContractError);
  EXPECT_THROW(Dataset(x, {1}, {Group::kPlus, Group::kMinus}, {"x"}), ContractError);
  const Dataset d(x, {1, -1}, {Group::kPlus, Group::kMinus}, {"x"});
  EXPECT_THROW(d.eta_hat(), ContractError);
  EXPECT_THROW(d.WithEta({0.9, 0.9}, EtaMethod::kUserSupplied), ContractError);
  EXPECT_NO_THROW(d.WithEta({0.7, 0.3}, EtaMethod::kUserSupplied));
}

class AdultTest : public ::testing::Test {
 protected:
  static fs::path Dir() { return FAIRBOUND_ADULT_DIR; }
};

TEST_F(AdultTest, CountsMatchOnePassScan) {
  std::size_t total = 0, kept = 0, male = 0, rich = 0;
  for (const char* name : {"adult.data", "adult.test"}) {
    std::ifstream in(Dir() / name);
    ASSERT_TRUE(in) << name;
    std::string line;
    while (std::getline(in, line)) {
      if (line.empty() || line[0] == '|') continue;
      if (std::count(line.begin(), line.end(), ',') != 14) continue;
      ++total;
      if (line.find('?') != std::string::npos) continue;
      ++kept;
      male += line.find(", Male,") != std::string::npos;
      rich += line.find(">50K") != std::string::npos;
    }
  }
  EXPECT_EQ(total, 48842u);
  const Dataset d = LoadAdult({Dir() / "adult.data", Dir() / "adult.test"});
  EXPECT_EQ(d.stats().rows_read, total);
  EXPECT_EQ(d.size(), kept);
  EXPECT_EQ(d.size() + d.stats().skipped_missing + d.stats().skipped_malformed, total);
  EXPECT_EQ(d.count(Group::kPlus), male);
  std::size_t positives = 0;
  for (const int y : d.labels()) positives += y > 0;
  EXPECT_EQ(positives, rich);
  EXPECT_NEAR(d.group_rate(), static_cast<double>(male) / static_cast<double>(kept),
              1e-15);
}

TEST_F(AdultTest, FoldGroupRatesCloseToGlobal) {
  const Dataset d = LoadAdult(Dir() / "adult.data");
  for (const auto& [train, test] : Split(d, 5, 1)) {
    EXPECT_NEAR(test.group_rate(), d.group_rate(), 0.02);
  }
}

}  // namespace
}  // namespace fairbound
