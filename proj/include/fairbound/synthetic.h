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

#ifndef FAIRBOUND_SYNTHETIC_H_
#define FAIRBOUND_SYNTHETIC_H_

#include <cstdint>

#include "fairbound/dataset.h"

namespace fairbound {

// The 200-applicant admissions example: Sex x GPA counts
//   Male:   High 51, Low 49
//   Female: High 48, Low 52
// Columns Sex, GPA, Admit. Admit is "Yes" exactly for GPA = High, a fixture
// label so the table is trainable; the counts are what matter.
RawTable StudentsTable();
CsvSchema StudentsSchema();
// Encoded: features "GPA=High", "GPA=Low"; s+ = Male.
Dataset StudentsDataset();

// Discrete data where feature 0 is correlated with S. Each feature is a
// standard normal latent cut into `levels` equal-probability bins and stored
// as its centered bin index. The latent of feature 0 is
// correlation * (2s - 1) + sqrt(1 - correlation^2) * noise.
// Labels follow a logistic model of all features (feature 0 weighted most).
struct BiasedSyntheticOptions {
  std::size_t rows = 2000;
  double group_rate = 0.5;
  double correlation = 0.6;
  std::size_t features = 3;
  std::size_t levels = 4;
  std::uint64_t seed = 1;
};
Dataset MakeBiasedSynthetic(const BiasedSyntheticOptions& options);

// Small random discrete data for property tests: every feature takes
// `levels` values, S depends on the features through a random log-linear
// score and labels are random. Both groups are always present.
struct RandomDiscreteOptions {
  std::size_t rows = 50;
  std::size_t features = 3;
  std::size_t levels = 3;
  std::uint64_t seed = 1;
};
Dataset MakeRandomDiscrete(const RandomDiscreteOptions& options);

}  // namespace fairbound

#endif  // FAIRBOUND_SYNTHETIC_H_
