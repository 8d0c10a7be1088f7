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

#include "fairbound/eta.h"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>

#include <fmt/format.h>

#include "fairbound/error.h"
#include "fairbound/numeric.h"
#include "fairbound/solver.h"

namespace fairbound {
namespace {

double Logit(double x) { return std::log(x) - std::log1p(-x); }
double Sigmoid(double z) {
  return z >= 0.0 ? 1.0 / (1.0 + std::exp(-z)) : std::exp(z) / (1.0 + std::exp(z));
}

std::vector<double> GroupFrequency(const Dataset& data, double smoothing) {
  const Eigen::MatrixXd& x = data.features();
  const std::vector<double> s = data.GroupIndicator();
  const double p = data.group_rate();
  std::map<std::vector<double>, std::pair<double, double>> cells;
  std::vector<std::vector<double>> keys(data.size());
  for (std::size_t i = 0; i < data.size(); ++i) {
    const auto row = x.row(static_cast<Eigen::Index>(i));
    keys[i].reserve(static_cast<std::size_t>(row.size()));
    for (Eigen::Index j = 0; j < row.size(); ++j) keys[i].push_back(row(j));
    auto& cell = cells[keys[i]];
    cell.first += 1.0;
    cell.second += s[i];
  }
  std::vector<double> eta(data.size());
  for (std::size_t i = 0; i < data.size(); ++i) {
    const auto& [count, plus] = cells.at(keys[i]);
    eta[i] = (plus + smoothing * p) / (count + smoothing);
  }
  return eta;
}

std::vector<double> LogisticModel(const Dataset& data, double regularization) {
  std::vector<int> s(data.size());
  for (std::size_t i = 0; i < data.size(); ++i) {
    s[i] = data.sensitive()[i] == Group::kPlus ? 1 : -1;
  }
  MinimizerOptions options;
  options.l2_penalty = regularization;
  const TrainResult fit =
      FitLinear(data.features(), data.feature_names(),
                PhiLossObjective(s, SurrogateKind::kLogistic), {}, options);
  std::vector<double> scores = fit.model.Scores(data.features());
  for (double& v : scores) v = Sigmoid(v);
  return scores;
}

}  // namespace

bool HasDiscreteFeatures(const Dataset& data, std::size_t max_levels) {
  const Eigen::MatrixXd& x = data.features();
  for (Eigen::Index j = 0; j < x.cols(); ++j) {
    std::set<double> levels;
    for (Eigen::Index i = 0; i < x.rows(); ++i) {
      levels.insert(x(i, j));
      if (levels.size() > max_levels) return false;
    }
  }
  return true;
}

std::vector<double> CalibrateMeanOdds(std::vector<double> eta, double p) {
  if (eta.empty()) return eta;
  auto mean_at = [&eta](double shift) {
    double sum = 0.0;
    for (const double e : eta) {
      if (e <= 0.0 || e >= 1.0) {
        sum += e;
      } else {
        sum += Sigmoid(Logit(e) + shift);
      }
    }
    return sum / static_cast<double>(eta.size());
  };
  if (std::abs(mean_at(0.0) - p) <= 1e-12) return eta;
  const double shift =
      BisectIncreasing([&](double c) { return mean_at(c) - p; }, -60.0, 60.0, 1e-15);
  for (double& e : eta) {
    if (e > 0.0 && e < 1.0) e = Sigmoid(Logit(e) + shift);
  }
  return eta;
}

Dataset EstimateEta(const Dataset& data, const EtaEstimator& estimator) {
  if (!(estimator.clip >= 0.0 && estimator.clip < 0.5)) {
    throw ContractError("eta clip must lie in [0, 0.5)");
  }
  if (!(estimator.smoothing >= 0.0)) {
    throw ContractError("eta smoothing must be >= 0");
  }
  std::vector<double> eta;
  switch (estimator.method) {
    case EtaMethod::kGroupFrequency:
      if (!HasDiscreteFeatures(data, estimator.max_levels_per_feature)) {
        throw MethodError(fmt::format(
            "group-frequency eta needs discrete features (at most {} levels per "
            "column); use the probabilistic model",
            estimator.max_levels_per_feature));
      }
      eta = GroupFrequency(data, estimator.smoothing);
      break;
    case EtaMethod::kProbabilisticModel:
      eta = LogisticModel(data, estimator.regularization);
      break;
    case EtaMethod::kUserSupplied:
      if (!data.raw_eta_column()) {
        throw MethodError("no eta column was captured at ingestion");
      }
      eta = *data.raw_eta_column();
      for (const double e : eta) {
        if (!(e >= 0.0 && e <= 1.0)) {
          throw MethodError(fmt::format("supplied eta value {} outside [0, 1]", e));
        }
      }
      break;
    case EtaMethod::kNone:
      throw ContractError("no eta estimation method selected");
  }
  const double lo = estimator.clip;
  const double hi = 1.0 - estimator.clip;
  for (double& e : eta) e = std::clamp(e, lo, hi);
  eta = CalibrateMeanOdds(std::move(eta), data.group_rate());
  return data.WithEta(std::move(eta), estimator.method);
}

}  // namespace fairbound
