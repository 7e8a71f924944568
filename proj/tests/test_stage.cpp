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

#include "doctest.h"
#include "wlc/errors.hpp"
#include "wlc/simulate.hpp"
#include "wlc/stage.hpp"

using namespace wlc;

TEST_SUITE_BEGIN("stage");

TEST_CASE("initial stage") {
  Stage s = initial_stage(make_choice_matching(3));
  CHECK(s.round() == 0);
  CHECK_FALSE(s.is_final());
  CHECK(touched_edges(s).empty());
  auto [s1, won] = advance(s, {0, 1});
  CHECK(s1.round() == 1);
  CHECK_FALSE(won);
}

TEST_CASE("advance") {
  Stage s = initial_stage(make_choice_matching(2));
  auto [miss, w1] = advance(s, {0, 1});
  CHECK_FALSE(w1);
  CHECK_FALSE(miss.is_final());
  auto [hit, w2] = advance(s, {0, 0});
  CHECK(w2);
  CHECK(hit.is_final());
  CHECK_THROWS_AS(advance(hit, {0, 0}), AdvancePastFinal);
  CHECK_THROWS_AS(advance(s, {0, 5}), InvalidChoice);

  // the two-miss play of the worked CM_5 example stays non-final
  Stage c5 = initial_stage(make_choice_matching(5));
  Stage s2 = advance(advance(c5, {0, 1}).first, {1, 2}).first;
  CHECK(s2.round() == 2);
  CHECK_FALSE(s2.is_final());
}

TEST_CASE("interior winning pair is rejected") {
  auto g = std::make_shared<Game>(make_choice_matching(2));
  CHECK_THROWS_AS(Stage(g, {{0, 0}, {1, 0}}), Error);
  CHECK_NOTHROW(Stage(g, {{1, 0}, {0, 0}}));  // winning pair last is fine
}

TEST_CASE("touched edges against the definition") {
  // brute-force: an edge is touched iff one of its endpoints was played
  auto brute = [](const Stage& s) {
    std::vector<Edge> out;
    for (const Edge& e : s.game().winning()) {
      bool touched = false;
      for (const Edge& p : s.history()) {
        if (p.first == e.first || p.second == e.second) touched = true;
      }
      if (touched) out.push_back(e);
    }
    return out;
  };
  Stage s = advance(initial_stage(make_choice_matching(5)), {0, 1}).first;
  CHECK(touched_edges(s) == std::vector<Edge>{{0, 0}, {1, 1}});
  CHECK(touched_edges(s) == brute(s));
  Stage s2 = advance(s, {1, 2}).first;
  CHECK(touched_edges(s2) == std::vector<Edge>{{0, 0}, {1, 1}, {2, 2}});
  CHECK(touched_edges(s2) == brute(s2));

  // random plays: library agrees with the definition and |touched| never drops
  SplitMix64 rng(7);
  for (int trial = 0; trial < 50; ++trial) {
    Stage cur = initial_stage(make_choice_matching(4));
    size_t prev = 0;
    for (int r = 0; r < 5 && !cur.is_final(); ++r) {
      Edge pair{static_cast<int>(rng.next() % 4), static_cast<int>(rng.next() % 4)};
      cur = advance(cur, pair).first;
      CHECK(touched_edges(cur) == brute(cur));
      CHECK(touched_edges(cur).size() >= prev);
      prev = touched_edges(cur).size();
    }
  }
}

TEST_CASE("trace format") {
  Stage s = advance(advance(initial_stage(make_choice_matching(2)), {0, 1}).first, {1, 1}).first;
  CHECK(format_trace(s) == "round 1: L0 R1 MISS\nround 2: L1 R1 WIN\n");
}

TEST_SUITE_END();
