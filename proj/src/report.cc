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

#include "fairbound/report.h"

#include <cmath>
#include <fstream>
#include <random>

#include <fmt/format.h>

#include "json.hpp"

#include "fairbound/error.h"

namespace fairbound {

void AtomicWrite(const std::filesystem::path& path, const std::string& content) {
  namespace fs = std::filesystem;
  if (path.has_parent_path()) {
    std::error_code dir_ec;
    fs::create_directories(path.parent_path(), dir_ec);
    if (dir_ec) {
      throw IngestError(fmt::format("cannot create directory {}: {}",
                                    path.parent_path().string(), dir_ec.message()));
    }
  }
  std::random_device rd;
  const fs::path tmp =
      path.string() + fmt::format(".tmp-{:08x}", static_cast<unsigned>(rd()));
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IngestError(fmt::format("cannot write {}", tmp.string()));
    out << content;
    out.flush();
    if (!out) {
      std::error_code ignored;
      fs::remove(tmp, ignored);
      throw IngestError(fmt::format("write failed for {}", tmp.string()));
    }
  }
  std::error_code ec;
  fs::rename(tmp, path, ec);
  if (ec) {
    fs::remove(tmp, ec);
    throw IngestError(fmt::format("cannot replace {}", path.string()));
  }
}

std::string FormatReal(double value) {
  if (std::isnan(value)) return "nan";
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  return fmt::format("{:.12g}", value);
}

Report& Report::Set(std::string key, Value value) {
  for (auto& [k, v] : entries_) {
    if (k == key) {
      v = std::move(value);
      return *this;
    }
  }
  entries_.emplace_back(std::move(key), std::move(value));
  return *this;
}

std::string Report::ToText() const {
  std::string out;
  for (const auto& [key, value] : entries_) {
    std::string rendered = std::visit(
        [](const auto& v) -> std::string {
          using T = std::decay_t<decltype(v)>;
          if constexpr (std::is_same_v<T, std::string>) {
            return v;
          } else if constexpr (std::is_same_v<T, double>) {
            return FormatReal(v);
          } else if constexpr (std::is_same_v<T, bool>) {
            return v ? "true" : "false";
          } else {
            return fmt::format("{}", v);
          }
        },
        value);
    out += fmt::format("{} = {}\n", key, rendered);
  }
  return out;
}

std::string Report::ToJson() const {
  nlohmann::ordered_json j = nlohmann::ordered_json::object();
  for (const auto& [key, value] : entries_) {
    std::visit(
        [&j, &key = key](const auto& v) {
          using T = std::decay_t<decltype(v)>;
          if constexpr (std::is_same_v<T, double>) {
            if (std::isfinite(v)) {
              j[key] = std::stod(FormatReal(v));
            } else {
              j[key] = FormatReal(v);
            }
          } else {
            j[key] = v;
          }
        },
        value);
  }
  return j.dump(2) + "\n";
}

std::string CsvField(const std::string& field) {
  if (field.find_first_of(",\"\n") == std::string::npos) return field;
  std::string out = "\"";
  for (const char c : field) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

}  // namespace fairbound
