// Copyright 2026 The wlc Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "wlc/rational.hpp"

#include <cmath>

namespace wlc {

Rat rationalize(double x, unsigned long max_den) {
  if (!std::isfinite(x)) return Rat(0);
  bool neg = x < 0;
  double v = std::fabs(x);
  unsigned long p0 = 0, q0 = 1, p1 = 1, q1 = 0;
  double frac = v;
  for (int i = 0; i < 64; ++i) {
    double fa = std::floor(frac);
    if (fa > 1e15) break;
    unsigned long a = static_cast<unsigned long>(fa);
    if (q1 != 0 && a > (max_den - q0) / q1) break;  // q2 would overflow the cap
    if (p1 != 0 && a > (1000000000000000000UL - p0) / p1) break;
    unsigned long p2 = a * p1 + p0;
    unsigned long q2 = a * q1 + q0;
    if (q2 > max_den) break;
    p0 = p1;
    q0 = q1;
    p1 = p2;
    q1 = q2;
    double rem = frac - fa;
    if (rem < 1e-13) break;
    frac = 1.0 / rem;
  }
  Rat r(static_cast<long>(p1), static_cast<long>(q1 == 0 ? 1 : q1));
  r.canonicalize();
  if (neg) r = -r;
  return r;
}

}  // namespace wlc
