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

#ifndef FAIRBOUND_ETA_H_
#define FAIRBOUND_ETA_H_

#include <span>
#include <vector>

#include "fairbound/dataset.h"

namespace fairbound {

// How eta(x) = P(S = s+ | x) is estimated.
struct EtaEstimator {
  EtaMethod method = EtaMethod::kGroupFrequency;
  // Laplace pseudo-count for group-frequency; the prior mass is placed at p.
  double smoothing = 0.0;
  // L2 strength of the log-linear model of S on the features.
  double regularization = 1e-3;
  // Estimates are clipped to [clip, 1 - clip].
  double clip = 1e-4;
  // Group-frequency refuses columns with more distinct values than this.
  std::size_t max_levels_per_feature = 32;
};

// True when every feature column has at most `max_levels` distinct values.
bool HasDiscreteFeatures(const Dataset& data, std::size_t max_levels);

// Returns a copy of `data` with eta filled in. Group-frequency computes
//   eta(x) = (#s+ rows equal to x + smoothing * p) / (#rows equal to x + smoothing)
// per distinct feature row; the probabilistic model is an L2-regularized
// logistic regression of S on the features; user-supplied copies the raw eta
// column captured at ingestion. Every method then clips and recalibrates so
// that mean(eta) == p.
//
// Throws MethodError for group-frequency on continuous features or
// user-supplied without an eta column.
Dataset EstimateEta(const Dataset& data, const EtaEstimator& estimator);

// Shifts all log-odds by one common constant so that mean(eta) == p within
// 1e-12. Values already calibrated to 1e-12 are returned unchanged.
std::vector<double> CalibrateMeanOdds(std::vector<double> eta, double p);

}  // namespace fairbound

#endif  // FAIRBOUND_ETA_H_
