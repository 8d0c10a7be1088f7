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

#include "fairbound/model_io.h"

#include <cmath>
#include <fstream>
#include <sstream>

#include <fmt/format.h>

#include "fairbound/error.h"
#include "fairbound/report.h"

namespace fairbound {
namespace {

constexpr std::string_view kMagic = "fairbound-model 1";

std::string Exact(double v) { return fmt::format("{:.17g}", v); }

double ParseDouble(const std::string& text, const std::string& what) {
  try {
    std::size_t used = 0;
    const double v = std::stod(text, &used);
    if (used != text.size()) throw std::invalid_argument(text);
    return v;
  } catch (const std::exception&) {
    throw SchemaError(fmt::format("model file: bad {} value '{}'", what, text));
  }
}

std::string ExpectKey(std::istream& in, const std::string& key) {
  std::string line;
  if (!std::getline(in, line)) {
    throw SchemaError(fmt::format("model file: missing '{}'", key));
  }
  const std::string prefix = key + " ";
  if (line.rfind(prefix, 0) != 0) {
    throw SchemaError(fmt::format("model file: expected '{}', got '{}'", key, line));
  }
  return line.substr(prefix.size());
}

}  // namespace

std::string SerializeModel(const ModelRecord& r) {
  std::string s;
  s += fmt::format("{}\n", kMagic);
  s += fmt::format("formulation {}\n", r.formulation);
  s += fmt::format("phi {}\n", ToString(r.phi));
  s += fmt::format("kappa {}\n", ToString(r.kappa));
  s += fmt::format("c1 {}\n", Exact(r.c1));
  s += fmt::format("c2 {}\n", Exact(r.c2));
  s += fmt::format("config_digest {}\n", r.config_digest.empty() ? "-" : r.config_digest);
  s += fmt::format("bias {}\n", Exact(r.model.bias));
  s += fmt::format("features {}\n", r.model.dim());
  for (std::size_t j = 0; j < r.model.dim(); ++j) {
    const std::string name = j < r.model.feature_names.size()
                                 ? r.model.feature_names[j]
                                 : fmt::format("x{}", j);
    s += fmt::format("{}\t{}\n", name, Exact(r.model.weights(static_cast<Eigen::Index>(j))));
  }
  s += "end\n";
  return s;
}

ModelRecord ParseModel(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line) || line != kMagic) {
    throw SchemaError("model file: unsupported or missing version line");
  }
  ModelRecord r;
  r.formulation = ExpectKey(in, "formulation");
  try {
    r.phi = ParseSurrogateKind(ExpectKey(in, "phi"));
    r.kappa = ParseSurrogateKind(ExpectKey(in, "kappa"));
  } catch (const SchemaError&) {
    throw;
  } catch (const Error& e) {
    throw SchemaError(fmt::format("model file: {}", e.what()));
  }
  r.c1 = ParseDouble(ExpectKey(in, "c1"), "c1");
  r.c2 = ParseDouble(ExpectKey(in, "c2"), "c2");
  r.config_digest = ExpectKey(in, "config_digest");
  if (r.config_digest == "-") r.config_digest.clear();
  r.model.bias = ParseDouble(ExpectKey(in, "bias"), "bias");
  const std::string count_text = ExpectKey(in, "features");
  const double count = ParseDouble(count_text, "features");
  if (count < 0 || count != static_cast<double>(static_cast<std::size_t>(count))) {
    throw SchemaError("model file: bad feature count");
  }
  const auto d = static_cast<std::size_t>(count);
  r.model.weights.resize(static_cast<Eigen::Index>(d));
  for (std::size_t j = 0; j < d; ++j) {
    if (!std::getline(in, line)) throw SchemaError("model file: truncated weights");
    const auto tab = line.rfind('\t');
    if (tab == std::string::npos) throw SchemaError("model file: bad weight line");
    r.model.feature_names.push_back(line.substr(0, tab));
    r.model.weights(static_cast<Eigen::Index>(j)) =
        ParseDouble(line.substr(tab + 1), "weight");
  }
  if (!std::getline(in, line) || line != "end") {
    throw SchemaError("model file: missing 'end'");
  }
  if (!r.model.weights.allFinite() || !std::isfinite(r.model.bias)) {
    throw SchemaError("model file: non-finite parameters");
  }
  return r;
}

void SaveModel(const std::filesystem::path& path, const ModelRecord& record) {
  AtomicWrite(path, SerializeModel(record));
}

ModelRecord LoadModel(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IngestError(fmt::format("cannot open model file {}", path.string()));
  std::ostringstream buf;
  buf << in.rdbuf();
  return ParseModel(buf.str());
}

}  // namespace fairbound
