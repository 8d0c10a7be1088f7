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

#include "fairbound/numeric.h"

#include <cmath>

namespace fairbound {

ScalarMinimum GoldenSectionMinimize(const std::function<double(double)>& f,
                                    double lo, double hi, double tol) {
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  const double a0 = lo;
  const double b0 = hi;
  double a = lo;
  double b = hi;
  double c = b - inv_phi * (b - a);
  double d = a + inv_phi * (b - a);
  double fc = f(c);
  double fd = f(d);
  while (b - a > tol) {
    if (fc <= fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - inv_phi * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + inv_phi * (b - a);
      fd = f(d);
    }
  }
  ScalarMinimum out;
  // Compare the interior candidates with the end points so that a monotone
  // objective reports the true edge value rather than an interior point.
  out.argmin = fc <= fd ? c : d;
  out.value = fc <= fd ? fc : fd;
  for (const double edge : {a0, b0}) {
    const double fe = f(edge);
    if (fe < out.value) {
      out.value = fe;
      out.argmin = edge;
    }
  }
  out.at_bracket_edge =
      out.argmin - a0 <= 2.0 * tol || b0 - out.argmin <= 2.0 * tol;
  return out;
}

double BisectIncreasing(const std::function<double(double)>& f, double lo,
                        double hi, double tol) {
  while (hi - lo > tol) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    if (f(mid) < 0.0) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

}  // namespace fairbound
