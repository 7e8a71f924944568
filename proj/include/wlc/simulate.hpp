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

#ifndef WLC_SIMULATE_HPP
#define WLC_SIMULATE_HPP

#include <cstdint>
#include <vector>

#include "wlc/protocol.hpp"

namespace wlc {

// SplitMix64: counter-based generator. The constants are the standard ones
// (golden-ratio increment 0x9e3779b97f4a7c15, mixers 0xbf58476d1ce4e5b9 and
// 0x94d049bb133111eb). Each episode gets an independent stream keyed by
// mixing (seed, episode index), so episodes are order-independent.
struct SplitMix64 {
  uint64_t state;
  explicit SplitMix64(uint64_t s) : state(s) {}
  uint64_t next() {
    uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }
  double unit() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }
  static uint64_t mix(uint64_t seed, uint64_t episode) {
    SplitMix64 g(seed ^ (0x632be59bd9b4e019ULL * (episode + 1)));
    return g.next();
  }
};

struct SimReport {
  uint64_t episodes = 0;
  double mean = 0;        // over non-truncated episodes only
  double std_error = 0;
  std::vector<uint64_t> histogram;  // histogram[k] = episodes coordinating in round k
  uint64_t truncated = 0;           // episodes that hit max_rounds
  int max_rounds = 0;
};

// Deterministic given (seed, episodes): episode e replays the protocol with
// randomness from SplitMix64::mix(seed, e).
SimReport simulate(const Game& g, const Protocol& pr, uint64_t episodes, uint64_t seed,
                   int max_rounds = 100000);

}  // namespace wlc

#endif  // WLC_SIMULATE_HPP
