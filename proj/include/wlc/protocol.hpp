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

#ifndef WLC_PROTOCOL_HPP
#define WLC_PROTOCOL_HPP

#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <utility>
#include <vector>

#include "wlc/rational.hpp"
#include "wlc/stage.hpp"
#include "wlc/symmetry.hpp"

namespace wlc {

struct ChoiceDistribution {
  Side player;
  std::vector<Rat> weights;  // indexed by the player's own choice index; sums to 1 exactly
};

// Per-play private state a protocol may carry (the wait-or-move commitment).
// Pairs are (left index, right index) and rename exactly like history pairs.
using Memory = std::vector<Edge>;

// A protocol maps (stage, player) to a distribution over the player's
// choices, possibly conditioned on private memory drawn at specific points
// of the play. Evaluation is pure given (stage, player, memory).
class Protocol {
 public:
  virtual ~Protocol() = default;
  virtual std::string name() const = 0;
  virtual bool has_memory() const { return false; }
  virtual ChoiceDistribution distribution(const Stage& s, Side player,
                                          const Memory& mem = {}) const = 0;
  // Distribution of the successor memory after `played` is appended to `s`
  // (s is the stage before the append). Identity by default.
  virtual std::vector<std::pair<Rat, Memory>> memory_branches(const Stage& s, const Memory& mem,
                                                              Edge played) const {
    (void)s;
    (void)played;
    return {{Rat(1), mem}};
  }
};

// Uniformly random choice every round.
std::unique_ptr<Protocol> make_uniform_protocol();

// Wait-or-move: uniform first pick, then 1/2 on the own first pick and 1/2 on
// a committed choice coordinating with the opponent's first pick. When
// several choices coordinate, the commitment is drawn uniformly at the start
// of round two and held fixed for the play.
std::unique_ptr<Protocol> make_wm_protocol();

// Loop avoidance: uniform over the choices for which no opponent reply makes
// the successor stage automorphism-equivalent to the current one; uniform
// over everything when no such choice exists.
std::unique_ptr<Protocol> make_la_protocol(SymmetryOptions opts = {});

// Table-driven structural protocol: state key -> per-class per-choice
// weights. Weights are exact rationals; spanning classes carry one shared
// weight. Throws MissingStageEntry when a stage's key is absent.
struct ClassWeightTable {
  struct Entry {
    std::vector<Rat> left;   // per canonical class: weight of each Left choice in it
    std::vector<Rat> right;  // per canonical class: weight of each Right choice in it
  };
  std::map<std::string, Entry> states;

  std::string to_json() const;
  static ClassWeightTable from_json(const std::string& text);
};

std::unique_ptr<Protocol> make_class_weight_protocol(ClassWeightTable table,
                                                     SymmetryOptions opts = {});

// Protocol by CLI name: "uniform", "wm", "la", "table:<file>".
std::unique_ptr<Protocol> make_protocol(const std::string& name, SymmetryOptions opts = {});

// True iff for every self-renaming (beta,h) of the stage (with memory pairs
// preserved) and every choice c, the probability of c equals that of h(c).
bool structurality_check(const Protocol& pr, const Stage& s, const Memory& mem = {},
                         const SymmetryOptions& opts = {});

// Canonical state key together with the mapping from a stage's literal class
// ids to the canonical class order used by ClassWeightTable entries.
struct StateKeyed {
  std::string key;
  Partition partition;
  std::vector<int> canonical_class_of;  // literal class id -> canonical class id
  // The canonicalizing symmetry exchanged the players: this stage's Left
  // choices occupy the canonical Right slots, so table entries read swapped.
  bool swapped = false;
};
StateKeyed state_key_with_classes(const Stage& s, const RenamingGroup& game_group,
                                  const SymmetryOptions& opts = {});

}  // namespace wlc

#endif  // WLC_PROTOCOL_HPP
