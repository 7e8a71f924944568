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

#include "wlc/stage.hpp"

#include <sstream>

#include "wlc/errors.hpp"

namespace wlc {

Stage::Stage(std::shared_ptr<const Game> game, std::vector<Edge> history)
    : game_(std::move(game)), history_(std::move(history)) {
  for (size_t i = 0; i < history_.size(); ++i) {
    const Edge& p = history_[i];
    if (p.first < 0 || p.first >= game_->left_count() || p.second < 0 ||
        p.second >= game_->right_count()) {
      throw InvalidChoice("history pair out of range");
    }
    bool wins = game_->is_winning(p.first, p.second);
    if (wins && i + 1 != history_.size()) {
      throw Error("interior winning pair in history");
    }
    if (wins) final_ = true;
  }
}

Stage initial_stage(const Game& g) { return Stage(std::make_shared<Game>(g)); }

Stage initial_stage(std::shared_ptr<const Game> g) { return Stage(std::move(g)); }

std::pair<Stage, bool> advance(const Stage& s, Edge pair) {
  if (s.is_final()) throw AdvancePastFinal("cannot advance a final stage");
  const Game& g = s.game();
  if (pair.first < 0 || pair.first >= g.left_count() || pair.second < 0 ||
      pair.second >= g.right_count()) {
    throw InvalidChoice("played pair out of range");
  }
  Stage next(s.game_ptr());
  next.history_ = s.history();
  next.history_.push_back(pair);
  next.final_ = g.is_winning(pair.first, pair.second);
  bool won = next.final_;
  return {std::move(next), won};
}

std::vector<Edge> touched_edges(const Stage& s) {
  const Game& g = s.game();
  uint32_t left_played = 0, right_played = 0;
  for (const Edge& p : s.history()) {
    left_played |= 1u << p.first;
    right_played |= 1u << p.second;
  }
  std::vector<Edge> out;
  for (const Edge& e : g.winning()) {
    if (((left_played >> e.first) & 1u) || ((right_played >> e.second) & 1u)) {
      if (out.empty() || out.back() != e) out.push_back(e);
    }
  }
  return out;
}

std::string format_trace(const Stage& s) {
  std::ostringstream out;
  const Game& g = s.game();
  for (size_t i = 0; i < s.history().size(); ++i) {
    const Edge& p = s.history()[i];
    out << "round " << (i + 1) << ": L" << p.first << " R" << p.second << " "
        << (g.is_winning(p.first, p.second) ? "WIN" : "MISS") << "\n";
  }
  return out.str();
}

}  // namespace wlc
