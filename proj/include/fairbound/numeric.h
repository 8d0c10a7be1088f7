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

#ifndef FAIRBOUND_NUMERIC_H_
#define FAIRBOUND_NUMERIC_H_

#include <cstdint>
#include <functional>
#include <string_view>

namespace fairbound {

struct ScalarMinimum {
  double argmin = 0.0;
  double value = 0.0;
  // True when the argmin ended within one tolerance of a bracket end, i.e.
  // the infimum may lie outside the bracket.
  bool at_bracket_edge = false;
};

// Golden-section search for the minimum of a unimodal function on [lo, hi].
// Stops when the bracket is narrower than `tol`.
ScalarMinimum GoldenSectionMinimize(const std::function<double(double)>& f,
                                    double lo, double hi, double tol);

// Root of a non-decreasing function on [lo, hi] by bisection, assuming
// f(lo) <= 0 <= f(hi). Returns the midpoint of the final bracket.
double BisectIncreasing(const std::function<double(double)>& f, double lo,
                        double hi, double tol);

// Sign with the sign(0) = +1 convention used for every deterministic
// classifier in this library.
inline int SignOf(double score) { return score >= 0.0 ? 1 : -1; }

// 64-bit FNV-1a hash, used for configuration digests.
inline std::uint64_t Fnv1a64(std::string_view text) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (const unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

}  // namespace fairbound

#endif  // FAIRBOUND_NUMERIC_H_
