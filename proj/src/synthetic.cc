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

#include "fairbound/synthetic.h"

#include <cmath>
#include <random>
#include <string>
#include <vector>

#include <fmt/format.h>

#include "fairbound/error.h"

namespace fairbound {
namespace {

// Standard normal quantile at k / levels via bisection on erfc.
std::vector<double> NormalCutPoints(std::size_t levels) {
  std::vector<double> cuts;
  for (std::size_t k = 1; k < levels; ++k) {
    const double target = static_cast<double>(k) / static_cast<double>(levels);
    double lo = -10.0;
    double hi = 10.0;
    for (int it = 0; it < 200; ++it) {
      const double mid = 0.5 * (lo + hi);
      const double cdf = 0.5 * std::erfc(-mid / std::sqrt(2.0));
      (cdf < target ? lo : hi) = mid;
    }
    cuts.push_back(0.5 * (lo + hi));
  }
  return cuts;
}

double Bin(double z, const std::vector<double>& cuts) {
  std::size_t k = 0;
  while (k < cuts.size() && z >= cuts[k]) ++k;
  return static_cast<double>(k) - 0.5 * static_cast<double>(cuts.size());
}

std::vector<std::string> IndexedNames(std::size_t d) {
  std::vector<std::string> names;
  for (std::size_t j = 0; j < d; ++j) names.push_back(fmt::format("x{}", j));
  return names;
}

}  // namespace

RawTable StudentsTable() {
  RawTable t;
  t.header = {"Sex", "GPA", "Admit"};
  const struct {
    const char* sex;
    const char* gpa;
    int count;
  } cells[] = {{"Male", "High", 51},
               {"Male", "Low", 49},
               {"Female", "High", 48},
               {"Female", "Low", 52}};
  for (const auto& c : cells) {
    for (int i = 0; i < c.count; ++i) {
      t.rows.push_back({c.sex, c.gpa, std::string(c.gpa) == "High" ? "Yes" : "No"});
    }
  }
  return t;
}

CsvSchema StudentsSchema() {
  CsvSchema s;
  s.label_col = "Admit";
  s.sensitive_col = "Sex";
  s.positive_label_value = "Yes";
  s.positive_group_value = "Male";
  return s;
}

Dataset StudentsDataset() {
  IngestStats stats;
  stats.rows_read = 200;
  return BuildDataset(StudentsTable(), StudentsSchema(), stats);
}

Dataset MakeBiasedSynthetic(const BiasedSyntheticOptions& o) {
  if (o.rows < 2 || o.features < 1 || o.levels < 2) {
    throw ContractError("biased synthetic: need rows >= 2, features >= 1, levels >= 2");
  }
  if (!(o.group_rate > 0.0 && o.group_rate < 1.0) ||
      !(o.correlation >= 0.0 && o.correlation < 1.0)) {
    throw ContractError("biased synthetic: group_rate in (0,1), correlation in [0,1)");
  }
  std::mt19937_64 rng(o.seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  const std::vector<double> cuts = NormalCutPoints(o.levels);
  const double spread = std::sqrt(1.0 - o.correlation * o.correlation);

  Eigen::MatrixXd x(static_cast<Eigen::Index>(o.rows),
                    static_cast<Eigen::Index>(o.features));
  std::vector<int> labels(o.rows);
  std::vector<Group> sensitive(o.rows);
  const double scale = 0.5 * static_cast<double>(o.levels - 1);
  for (std::size_t i = 0; i < o.rows; ++i) {
    const bool plus = unif(rng) < o.group_rate;
    sensitive[i] = plus ? Group::kPlus : Group::kMinus;
    double logit = 0.0;
    for (std::size_t j = 0; j < o.features; ++j) {
      double z = normal(rng);
      if (j == 0) z = o.correlation * (plus ? 1.0 : -1.0) + spread * z;
      const double v = Bin(z, cuts);
      x(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = v;
      logit += (j == 0 ? 1.5 : 1.0 / static_cast<double>(j)) * v / scale;
    }
    labels[i] = unif(rng) < 1.0 / (1.0 + std::exp(-logit)) ? 1 : -1;
  }
  // A tiny sample could miss one group; force one row of each.
  sensitive[0] = Group::kPlus;
  sensitive[1] = Group::kMinus;
  return Dataset(std::move(x), std::move(labels), std::move(sensitive),
                 IndexedNames(o.features));
}

Dataset MakeRandomDiscrete(const RandomDiscreteOptions& o) {
  if (o.rows < 2 || o.features < 1 || o.levels < 2) {
    throw ContractError("random discrete: need rows >= 2, features >= 1, levels >= 2");
  }
  std::mt19937_64 rng(o.seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  std::uniform_int_distribution<int> level(0, static_cast<int>(o.levels) - 1);

  std::vector<double> coef(o.features);
  for (double& c : coef) c = 1.5 * normal(rng);
  const double offset = 0.5 * normal(rng);

  Eigen::MatrixXd x(static_cast<Eigen::Index>(o.rows),
                    static_cast<Eigen::Index>(o.features));
  std::vector<int> labels(o.rows);
  std::vector<Group> sensitive(o.rows);
  for (std::size_t i = 0; i < o.rows; ++i) {
    double score = offset;
    for (std::size_t j = 0; j < o.features; ++j) {
      const double v = static_cast<double>(level(rng));
      x(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = v;
      score += coef[j] * (v - 0.5 * static_cast<double>(o.levels - 1));
    }
    sensitive[i] = unif(rng) < 1.0 / (1.0 + std::exp(-score)) ? Group::kPlus
                                                             : Group::kMinus;
    labels[i] = unif(rng) < 0.5 ? 1 : -1;
  }
  sensitive[0] = Group::kPlus;
  sensitive[1] = Group::kMinus;
  return Dataset(std::move(x), std::move(labels), std::move(sensitive),
                 IndexedNames(o.features));
}

}  // namespace fairbound
