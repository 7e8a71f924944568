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

#ifndef WLC_SYMMETRY_HPP
#define WLC_SYMMETRY_HPP

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "wlc/game.hpp"
#include "wlc/stage.hpp"

namespace wlc {

struct SymmetryOptions {
  // Backtracking node budget (successful partial assignments). Exceeding it
  // throws SearchBudgetExceeded; there is no silent approximation.
  uint64_t node_budget = 100'000'000;
  // Explicit element-list cap for renaming groups.
  uint64_t max_elements = uint64_t{1} << 21;
};

// A renaming of a stage onto itself (or between two stages of one game):
// an optional player swap plus a bijection over all choices, given on global
// choice ids. With swap set, the map sends Left choices to Right and vice
// versa, and a played pair (c1,c2) corresponds to (h(c2),h(c1)).
struct Renaming {
  bool swap = false;
  std::vector<uint8_t> map;

  int apply(int global) const { return map[static_cast<size_t>(global)]; }
  // Image of a played (left,right) pair, again as a (left,right) pair of
  // global ids.
  std::pair<int, int> apply_pair(int gl, int gr) const {
    return swap ? std::pair<int, int>{apply(gr), apply(gl)}
                : std::pair<int, int>{apply(gl), apply(gr)};
  }
  friend bool operator==(const Renaming&, const Renaming&) = default;
};

Renaming identity_renaming(int n);
Renaming compose(const Renaming& a, const Renaming& b);  // a after b
Renaming inverse(const Renaming& a);

// Structural-equivalence classes: class_of is normalized so class ids appear
// in increasing order of their smallest member; equal partitions compare
// equal as vectors.
struct Partition {
  std::vector<int> class_of;
  int num_classes = 0;

  std::vector<std::vector<int>> classes() const;
  friend bool operator==(const Partition&, const Partition&) = default;
};

class RenamingGroup {
 public:
  RenamingGroup() = default;
  RenamingGroup(int n, std::vector<Renaming> elements)
      : n_(n), elements_(std::move(elements)) {}

  int choice_count() const { return n_; }
  size_t size() const { return elements_.size(); }
  const std::vector<Renaming>& elements() const { return elements_; }

  Partition orbits() const;
  bool contains(const Renaming& r) const;

 private:
  int n_ = 0;
  std::vector<Renaming> elements_;
};

// Full self-renaming group of a stage, by backtracking with degree and
// incidence pruning. `extra_pairs` are additional (left,right) global-id
// pairs every element must preserve like history pairs (protocol memory).
RenamingGroup stage_renaming_group(const Stage& s, const SymmetryOptions& opts = {},
                                   const std::vector<Edge>& extra_pairs = {});

// Subgroup of `g` preserving one more played pair. This is exactly the
// renaming group of the extended stage, so mid-play groups are filtered,
// never recomputed.
RenamingGroup filter_group(const RenamingGroup& g, const Game& game, Edge pair);

Partition structural_classes(const Stage& s, const SymmetryOptions& opts = {});

// Choices whose class is a singleton or lies entirely inside one winning
// edge. Returned as sorted global ids.
std::vector<int> focal_points(const Stage& s, const SymmetryOptions& opts = {});
std::vector<int> focal_points(const Game& g, const Partition& p);

// Equal structural-equivalence partitions over the same game.
bool are_automorphism_equivalent(const Stage& s1, const Stage& s2,
                                 const SymmetryOptions& opts = {});

// Searches for a game symmetry carrying one partition onto the other
// (setwise). Used to merge stages whose partitions are symmetric copies.
std::optional<Renaming> find_partition_map(const Game& g, const Partition& from,
                                           const Partition& to,
                                           const SymmetryOptions& opts = {});

// Deterministic keys. Stage keys agree exactly for stages related by a
// renaming; game keys for games whose initial stages admit a renaming
// (including the mirror); state keys for structurally similar stages
// (chains of renamings and equal partitions).
std::string canonical_stage_key(const Stage& s, const SymmetryOptions& opts = {});
std::string canonical_game_key(const Game& g);
std::string canonical_state_key(const Stage& s, const SymmetryOptions& opts = {});

// Same, given a precomputed game group (avoids re-searching per call).
std::string canonical_stage_key(const Stage& s, const RenamingGroup& game_group);
std::string canonical_state_key(const Stage& s, const RenamingGroup& game_group,
                                const SymmetryOptions& opts = {});

// Debug dump: classes as sorted lists, classes sorted by smallest element.
std::string format_partition(const Game& g, const Partition& p);

// Cheap renaming-invariant signature of (game, partition); equal for
// symmetric partitions, used to bucket candidate merges.
std::string partition_signature(const Game& g, const Partition& p);

// Minimal row-major adjacency form over column orders (within column-degree
// blocks) with rows sorted; equal exactly for games related by side-keeping
// renamings. Rows are neighbor bitmasks.
std::vector<uint32_t> canonical_bipartite_rows(int n1, int n2, const std::vector<uint32_t>& rows);

}  // namespace wlc

#endif  // WLC_SYMMETRY_HPP
