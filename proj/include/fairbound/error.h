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

#ifndef FAIRBOUND_ERROR_H_
#define FAIRBOUND_ERROR_H_

#include <stdexcept>
#include <string>

namespace fairbound {

// Base class of every error raised by the library. The CLI maps these to
// exit status 2.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A required column or key is missing, or a schema value is malformed.
class SchemaError : public Error {
 public:
  using Error::Error;
};

// Only one sensitive group is present where both are required.
class DegenerateGroupError : public Error {
 public:
  using Error::Error;
};

// Caller violated a precondition (length mismatch, dimension mismatch, ...).
class ContractError : public Error {
 public:
  using Error::Error;
};

// The requested estimator cannot run on this data.
class MethodError : public Error {
 public:
  using Error::Error;
};

// Input could not be read or produced no usable rows.
class IngestError : public Error {
 public:
  using Error::Error;
};

// The line search could not make progress on a finite objective.
class StepSizeError : public Error {
 public:
  using Error::Error;
};

}  // namespace fairbound

#endif  // FAIRBOUND_ERROR_H_
