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

#ifndef FAIRBOUND_TESTS_TEST_UTIL_H_
#define FAIRBOUND_TESTS_TEST_UTIL_H_

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <random>
#include <vector>

#include <Eigen/Dense>

#include "fairbound/dataset.h"
#include "fairbound/surrogate.h"

namespace fairbound::testing {

// Minimum of a convex function on [lo, hi]: dense grid, then ternary search
// inside the two cells around the best grid point.
inline double GridMin(const std::function<double(double)>& f, double lo, double hi,
                      int cells = 20000) {
  const double step = (hi - lo) / cells;
  int best = 0;
  double best_value = f(lo);
  for (int i = 1; i <= cells; ++i) {
    const double v = f(lo + step * i);
    if (v < best_value) {
      best_value = v;
      best = i;
    }
  }
  double a = lo + step * std::max(0, best - 1);
  double b = lo + step * std::min(cells, best + 1);
  for (int it = 0; it < 200; ++it) {
    const double m1 = a + (b - a) / 3.0;
    const double m2 = b - (b - a) / 3.0;
    if (f(m1) <= f(m2)) {
      b = m2;
    } else {
      a = m1;
    }
  }
  return std::min(best_value, f(0.5 * (a + b)));
}

inline double GridMax(const std::function<double(double)>& f, double lo, double hi) {
  return -GridMin([&](double x) { return -f(x); }, lo, hi);
}

constexpr double kOracleBracket = 30.0;

// Conditional surrogate risk differences at one eta, from the definitions.
inline double KappaCell(const Surrogate& k, double eta, double p, double alpha) {
  return eta / p * k.Value(alpha) + (1.0 - eta) / (1.0 - p) * k.Value(-alpha) - 1.0;
}
inline double DeltaCell(const Surrogate& k, double eta, double p, double alpha) {
  return eta / p * k.Delta(alpha) + (1.0 - eta) / (1.0 - p) * k.Delta(-alpha) - 1.0;
}

inline double OracleHMinus(const Surrogate& k, double eta, double p) {
  return GridMin([&](double a) { return KappaCell(k, eta, p, a); }, -kOracleBracket,
                 kOracleBracket);
}
// Minimum over alpha (eta - p) >= 0.
inline double OracleHCirc(const Surrogate& k, double eta, double p) {
  const auto f = [&](double a) { return KappaCell(k, eta, p, a); };
  return eta >= p ? GridMin(f, 0.0, kOracleBracket) : GridMin(f, -kOracleBracket, 0.0);
}
inline double OracleHPlusDelta(const Surrogate& k, double eta, double p) {
  return GridMax([&](double a) { return DeltaCell(k, eta, p, a); }, -kOracleBracket,
                 kOracleBracket);
}
// Maximum over alpha (eta - p) <= 0.
inline double OracleHCircDelta(const Surrogate& k, double eta, double p) {
  const auto f = [&](double a) { return DeltaCell(k, eta, p, a); };
  return eta >= p ? GridMax(f, -kOracleBracket, 0.0) : GridMax(f, 0.0, kOracleBracket);
}

// Discrete dataset with `cells` distinct feature vectors (one-hot cell
// index) and per-cell group/label rates drawn at random.
inline Dataset RandomCellDataset(std::mt19937_64& rng, int cells, int rows) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<double> weight(cells), plus_rate(cells), label_rate(cells);
  for (int c = 0; c < cells; ++c) {
    weight[c] = 0.05 + unit(rng);
    plus_rate[c] = unit(rng);
    label_rate[c] = unit(rng);
  }
  std::discrete_distribution<int> pick(weight.begin(), weight.end());
  Eigen::MatrixXd x = Eigen::MatrixXd::Zero(rows, cells);
  std::vector<int> labels(rows);
  std::vector<Group> sensitive(rows);
  for (int i = 0; i < rows; ++i) {
    const int c = i < 2 ? 0 : pick(rng);
    x(i, c) = 1.0;
    labels[i] = unit(rng) < label_rate[c] ? 1 : -1;
    sensitive[i] = unit(rng) < plus_rate[c] ? Group::kPlus : Group::kMinus;
  }
  // Both groups must be present.
  sensitive[0] = Group::kPlus;
  sensitive[1] = Group::kMinus;
  std::vector<std::string> names;
  for (int c = 0; c < cells; ++c) names.push_back("cell" + std::to_string(c));
  return Dataset(std::move(x), std::move(labels), std::move(sensitive), names);
}

inline int CellOf(const Dataset& d, std::size_t row) {
  Eigen::Index c = 0;
  d.features().row(static_cast<Eigen::Index>(row)).maxCoeff(&c);
  return static_cast<int>(c);
}

}  // namespace fairbound::testing

#endif  // FAIRBOUND_TESTS_TEST_UTIL_H_
