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

#ifndef FAIRBOUND_REPORT_H_
#define FAIRBOUND_REPORT_H_

#include <cstdint>
#include <filesystem>
#include <string>
#include <utility>
#include <variant>
#include <vector>

namespace fairbound {

// Writes to a sibling temporary file and renames it over `path`, so readers
// never observe a partial file. Throws IngestError on I/O failure.
void AtomicWrite(const std::filesystem::path& path, const std::string& content);

// %.12g, with "inf", "-inf" and "nan" for non-finite values.
std::string FormatReal(double value);

// Ordered key-value record rendered as "key = value" text or JSON.
class Report {
 public:
  using Value = std::variant<std::string, double, std::int64_t, bool>;

  Report& Set(std::string key, Value value);
  Report& Set(std::string key, const char* value) {
    return Set(std::move(key), Value(std::string(value)));
  }
  Report& Set(std::string key, std::string value) {
    return Set(std::move(key), Value(std::move(value)));
  }
  Report& Set(std::string key, double value) {
    return Set(std::move(key), Value(value));
  }
  Report& Set(std::string key, bool value) {
    return Set(std::move(key), Value(value));
  }
  Report& Set(std::string key, std::int64_t value) {
    return Set(std::move(key), Value(value));
  }
  Report& Set(std::string key, int value) {
    return Set(std::move(key), Value(static_cast<std::int64_t>(value)));
  }
  Report& Set(std::string key, std::size_t value) {
    return Set(std::move(key), Value(static_cast<std::int64_t>(value)));
  }

  const std::vector<std::pair<std::string, Value>>& entries() const {
    return entries_;
  }

  std::string ToText() const;
  // Non-finite reals become the strings "inf", "-inf", "nan".
  std::string ToJson() const;

 private:
  std::vector<std::pair<std::string, Value>> entries_;
};

// Quotes a CSV field when it holds a comma, quote or newline.
std::string CsvField(const std::string& field);

}  // namespace fairbound

#endif  // FAIRBOUND_REPORT_H_
