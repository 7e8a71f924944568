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

#ifndef WLC_GOLDEN_HPP
#define WLC_GOLDEN_HPP

#include <string>
#include <vector>

#include "wlc/optimizer.hpp"

namespace wlc {

struct GoldenOptions {
  double tol = 1e-6;      // value comparison tolerance
  double vi_tol = 1e-10;  // value-iteration stopping threshold
  int max_states = 20000;
  int m_max = 9;
};

struct GoldenRow {
  int m = 0;
  double optimal_ect = 0;
  Rat expected_ect;
  MaybeInt optimal_gct;
  MaybeInt expected_gct;
  bool ect_ok = false;
  bool gct_ok = false;
  bool protocol_ok = false;
  std::string protocol_note;
};

struct GoldenReport {
  std::vector<GoldenRow> rows;
  std::vector<std::string> lines;  // one pass/fail line per m
  bool all_ok = true;
};

// Recomputes the CM summary table for m = 1..m_max: optimal expected and
// guaranteed coordination times, and the identity of the optimal protocol
// (policy support compared against the named protocol on every reachable
// quotient state; the m=4 row instead asserts a flat optimal interval).
GoldenReport golden_table(const GoldenOptions& opts = {});

// Does the policy's positive support coincide with the protocol's support on
// every quotient state reachable under the policy?
bool policy_support_matches(const QuotientSpace& space, const std::vector<std::vector<double>>& policy,
                            const Protocol& pr);

}  // namespace wlc

#endif  // WLC_GOLDEN_HPP
