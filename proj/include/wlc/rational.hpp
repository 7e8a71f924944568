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

#ifndef WLC_RATIONAL_HPP
#define WLC_RATIONAL_HPP

#include <gmpxx.h>

#include <cstdint>
#include <optional>
#include <string>

namespace wlc {

// Exact rational arithmetic. All chain analysis is exact; floats live only in
// the optimizer.
using Rat = mpq_class;

inline Rat rat(long num, long den = 1) {
  Rat r(num, den);
  r.canonicalize();
  return r;
}

// "7/3", "2" for integers.
inline std::string rat_str(const Rat& r) {
  return r.get_str();
}

inline Rat rat_parse(const std::string& s) {
  Rat r(s);
  r.canonicalize();
  return r;
}

// Nearest rational with denominator <= max_den (continued fractions). Used to
// turn optimizer policies (binary64) back into exact chain input.
Rat rationalize(double x, unsigned long max_den = 1000000);

// ECT values may be infinite; absent value means +infinity.
using MaybeRat = std::optional<Rat>;
// GCT values; absent value means infinity (no guarantee in any number of
// rounds).
using MaybeInt = std::optional<int>;

}  // namespace wlc

#endif  // WLC_RATIONAL_HPP
