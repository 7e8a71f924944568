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

#ifndef WLC_CHAIN_HPP
#define WLC_CHAIN_HPP

#include <string>
#include <vector>

#include "wlc/protocol.hpp"
#include "wlc/rational.hpp"
#include "wlc/stage.hpp"
#include "wlc/symmetry.hpp"

namespace wlc {

struct ChainOptions {
  int max_states = 10000;
  SymmetryOptions sym;
  // When false, merge only states related by a renaming of the extended
  // stage (cross-validation mode); requires a depth cap since looping
  // protocols then never close.
  bool merge_by_partition = true;
  int depth_cap = -1;  // only honored in strict mode; -1 = none
};

// Finite absorbing chain induced by a fixed protocol: states are merged
// stages (plus protocol memory), WIN is the unique absorbing state.
struct StageChain {
  struct State {
    std::string key;
    Stage rep;
    Memory mem;
    std::vector<std::pair<int, Rat>> out;  // successor index -> probability
    Rat win = Rat(0);                      // mass routed to WIN
    bool truncated = false;                // strict mode frontier
  };
  std::vector<State> states;  // index 0 is the start state
};

StageChain build_chain(const Game& g, const Protocol& pr, const ChainOptions& opts = {});

// Expected rounds to WIN from the start, solved exactly; nullopt = infinite
// (some reachable state cannot reach WIN).
MaybeRat exact_ect(const StageChain& chain);
MaybeRat exact_ect(const Game& g, const Protocol& pr, const ChainOptions& opts = {});

// Longest WIN-avoiding path plus one; nullopt = infinity (a WIN-avoiding
// cycle has positive probability).
MaybeInt exact_gct(const StageChain& chain);
MaybeInt exact_gct(const Game& g, const Protocol& pr, const ChainOptions& opts = {});

// One-shot coordination probability from the initial stage.
Rat oscp(const Game& g, const Protocol& pr);

// Conditional expected rounds from each state (index-aligned); nullopt where
// WIN is unreachable.
std::vector<MaybeRat> exact_ect_per_state(const StageChain& chain);

std::string chain_to_json(const StageChain& chain);

}  // namespace wlc

#endif  // WLC_CHAIN_HPP
