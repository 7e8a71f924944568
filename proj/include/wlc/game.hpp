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

#ifndef WLC_GAME_HPP
#define WLC_GAME_HPP

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

namespace wlc {

enum class Side : uint8_t { Left, Right };

inline Side other(Side s) { return s == Side::Left ? Side::Right : Side::Left; }

// A choice is identified by its side and a 0-based index within that side.
struct ChoiceId {
  Side side;
  int index;

  friend bool operator==(const ChoiceId&, const ChoiceId&) = default;
};

// A winning pair, stored as (left index, right index).
using Edge = std::pair<int, int>;

// Two-player win-lose coordination game: two disjoint choice sets and a
// bipartite winning relation. The two sides are kept separate by
// construction, so the disjointness of the choice sets is a type-level fact.
//
// Construction checks only structural well-formedness (index ranges);
// semantic invariants (nonempty winning relation, no surely losing choice,
// no duplicate pairs) are checked by validate().
class Game {
 public:
  Game(int left_count, int right_count, std::vector<Edge> winning);

  int left_count() const { return left_count_; }
  int right_count() const { return right_count_; }
  const std::vector<Edge>& winning() const { return winning_; }

  bool is_winning(int left, int right) const {
    return (adj_[static_cast<size_t>(left)] >> right) & 1u;
  }
  // Neighbors of a left choice as a bitmask over right indices.
  uint32_t left_adj(int left) const { return adj_[static_cast<size_t>(left)]; }
  uint32_t right_adj(int right) const { return radj_[static_cast<size_t>(right)]; }
  int degree(Side s, int index) const;

  // Global choice ids: 0..left_count-1 are Left, then Right.
  int choice_count() const { return left_count_ + right_count_; }
  int global_id(Side s, int index) const {
    return s == Side::Left ? index : left_count_ + index;
  }
  ChoiceId choice_of(int global) const {
    return global < left_count_ ? ChoiceId{Side::Left, global}
                                : ChoiceId{Side::Right, global - left_count_};
  }
  bool is_left(int global) const { return global < left_count_; }
  std::string choice_name(int global) const;

  friend bool operator==(const Game& a, const Game& b);

 private:
  int left_count_;
  int right_count_;
  std::vector<Edge> winning_;  // sorted lexicographically, as given (dups kept)
  std::vector<uint32_t> adj_;  // per left choice: bitmask of right neighbors
  std::vector<uint32_t> radj_;
};

struct ValidationReport {
  bool ok = true;
  std::vector<std::string> violations;
};

// The m disjoint winning pairs {(i,i)}: pick-the-same-choice with m options.
Game make_choice_matching(int m);

ValidationReport validate(const Game& g);

// Size of a game is the larger choice set.
int game_size(const Game& g);

// Edge-list text format:
//   left <n>
//   right <n>
//   edge <li> <ri>
// '#' starts a comment; blank lines ignored. Serialization emits edges in
// lexicographic order.
Game parse_game(const std::string& text);
std::string serialize_game(const Game& g);

// JSON mirror: {"left": n, "right": n, "edges": [[li, ri], ...]}, integers
// only, numerically identical to the text format.
std::string game_to_json(const Game& g);
Game game_from_json(const std::string& text);

}  // namespace wlc

#endif  // WLC_GAME_HPP
