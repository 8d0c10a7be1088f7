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

#ifndef FAIRBOUND_MODEL_IO_H_
#define FAIRBOUND_MODEL_IO_H_

#include <filesystem>
#include <string>

#include "fairbound/solver.h"

namespace fairbound {

// Versioned plain-text model file:
//
//   fairbound-model 1
//   formulation <name>
//   phi <kind>
//   kappa <kind>
//   c1 <value>
//   c2 <value>
//   config_digest <hex>
//   bias <value>
//   features <d>
//   <name>\t<weight>      (d lines)
//   end
struct ModelRecord {
  LinearModel model;
  std::string formulation = "plain";
  SurrogateKind phi = SurrogateKind::kLogistic;
  SurrogateKind kappa = SurrogateKind::kHinge;
  double c1 = 0.0;
  double c2 = 0.0;
  std::string config_digest;
};

std::string SerializeModel(const ModelRecord& record);
// Throws SchemaError on a malformed or unsupported record.
ModelRecord ParseModel(const std::string& text);

void SaveModel(const std::filesystem::path& path, const ModelRecord& record);
ModelRecord LoadModel(const std::filesystem::path& path);

}  // namespace fairbound

#endif  // FAIRBOUND_MODEL_IO_H_
