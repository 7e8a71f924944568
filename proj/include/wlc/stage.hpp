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

#ifndef WLC_STAGE_HPP
#define WLC_STAGE_HPP

#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "wlc/game.hpp"

namespace wlc {

// A stage of a repeated play: the game plus the ordered history of played
// pairs. Only the last pair may be winning; a stage whose last pair wins is
// final. Stages are immutable; advance() returns a new value.
class Stage {
 public:
  explicit Stage(std::shared_ptr<const Game> game) : game_(std::move(game)) {}
  Stage(std::shared_ptr<const Game> game, std::vector<Edge> history);

  const Game& game() const { return *game_; }
  const std::shared_ptr<const Game>& game_ptr() const { return game_; }
  const std::vector<Edge>& history() const { return history_; }
  int round() const { return static_cast<int>(history_.size()); }
  bool is_final() const { return final_; }

  friend bool operator==(const Stage& a, const Stage& b) {
    return *a.game_ == *b.game_ && a.history_ == b.history_;
  }

 private:
  friend std::pair<Stage, bool> advance(const Stage&, Edge);
  std::shared_ptr<const Game> game_;
  std::vector<Edge> history_;
  bool final_ = false;
};

Stage initial_stage(const Game& g);
Stage initial_stage(std::shared_ptr<const Game> g);

// Appends the pair; the returned flag says whether it coordinated (and the
// returned stage is final). Throws AdvancePastFinal / InvalidChoice.
std::pair<Stage, bool> advance(const Stage& s, Edge pair);
// Non-const overload so unqualified calls never fall through to
// std::advance (reachable by argument lookup through std::pair).
inline std::pair<Stage, bool> advance(Stage& s, Edge pair) {
  return advance(static_cast<const Stage&>(s), pair);
}

// Winning pairs that contain at least one choice played so far.
std::vector<Edge> touched_edges(const Stage& s);

// One line per round: "round <k>: L<i> R<j> [WIN|MISS]".
std::string format_trace(const Stage& s);

}  // namespace wlc

#endif  // WLC_STAGE_HPP
