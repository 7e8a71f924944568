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

#include <set>

#include "doctest.h"
#include "wlc/errors.hpp"
#include "wlc/game.hpp"
#include "wlc/simulate.hpp"

using namespace wlc;

TEST_SUITE_BEGIN("game");

TEST_CASE("choice matching construction") {
  Game g1 = make_choice_matching(1);
  CHECK(g1.left_count() == 1);
  CHECK(g1.winning().size() == 1);

  Game g3 = make_choice_matching(3);
  CHECK(g3.winning() == std::vector<Edge>{{0, 0}, {1, 1}, {2, 2}});

  Game g5 = make_choice_matching(5);
  CHECK(g5.left_count() == 5);
  CHECK(g5.right_count() == 5);
  for (int i = 0; i < 5; ++i) CHECK(g5.is_winning(i, i));
  CHECK_FALSE(g5.is_winning(0, 1));

  CHECK_THROWS_AS(make_choice_matching(0), Error);
}

TEST_CASE("choice matching edges are pairwise disjoint") {
  for (int m = 1; m <= 9; ++m) {
    Game g = make_choice_matching(m);
    CHECK(validate(g).ok);
    CHECK(game_size(g) == m);
    std::set<int> lefts, rights;
    for (const Edge& e : g.winning()) {
      CHECK(lefts.insert(e.first).second);
      CHECK(rights.insert(e.second).second);
    }
  }
}

TEST_CASE("validation report") {
  CHECK(validate(make_choice_matching(4)).ok);

  Game isolated(3, 2, {{0, 0}, {1, 1}});  // Left#2 never wins
  ValidationReport r = validate(isolated);
  CHECK_FALSE(r.ok);
  REQUIRE(r.violations.size() == 1);
  CHECK(r.violations[0] == "surely losing choice Left#2");

  Game empty(2, 2, {});
  ValidationReport r2 = validate(empty);
  CHECK_FALSE(r2.ok);
  CHECK(r2.violations[0] == "empty winning relation");

  Game dup(1, 1, {{0, 0}, {0, 0}});
  CHECK_FALSE(validate(dup).ok);
}

TEST_CASE("game size") {
  CHECK(game_size(make_choice_matching(5)) == 5);
  CHECK(game_size(make_choice_matching(1)) == 1);
  // second graph of the 3-choice atlas: 2 left, 3 right
  Game g(2, 3, {{0, 0}, {1, 1}, {1, 2}});
  CHECK(game_size(g) == 3);
}

TEST_CASE("edge list parsing and serialization") {
  std::string text = "left 2\nright 2\nedge 0 0\nedge 1 1\n";
  Game g = parse_game(text);
  CHECK(g == make_choice_matching(2));
  CHECK(serialize_game(make_choice_matching(2)) == text);

  CHECK_THROWS_AS(parse_game("left 2\nright 3\nedge 0 5\n"), ParseError);
  try {
    parse_game("left 2\nright 3\n# fine\nedge 0 5\n");
  } catch (const ParseError& e) {
    CHECK(e.line() == 4);
  }
  CHECK_THROWS_AS(parse_game("left 2\nedge 0 0\n"), ParseError);
  CHECK_THROWS_AS(parse_game("left 2\nright 2\nedge 0 0\nbogus\n"), ParseError);
  // parses but fails validation: right#1 isolated
  CHECK_THROWS_AS(parse_game("left 2\nright 2\nedge 0 0\nedge 1 0\n"), Error);
}

TEST_CASE("parse after serialize is the identity on random valid games") {
  SplitMix64 rng(20260811);
  for (int trial = 0; trial < 200; ++trial) {
    int n1 = 1 + static_cast<int>(rng.next() % 5);
    int n2 = 1 + static_cast<int>(rng.next() % 5);
    std::set<Edge> edges;
    for (int j = 0; j < n2; ++j) edges.insert({static_cast<int>(rng.next() % n1), j});
    for (int i = 0; i < n1; ++i) edges.insert({i, static_cast<int>(rng.next() % n2)});
    int extra = static_cast<int>(rng.next() % 5);
    for (int k = 0; k < extra; ++k) {
      edges.insert({static_cast<int>(rng.next() % n1), static_cast<int>(rng.next() % n2)});
    }
    Game g(n1, n2, {edges.begin(), edges.end()});
    REQUIRE(validate(g).ok);
    CHECK(parse_game(serialize_game(g)) == g);
    CHECK(game_from_json(game_to_json(g)) == g);
  }
}

TEST_CASE("json mirror matches the text format numerically") {
  Game g(2, 3, {{0, 0}, {1, 1}, {1, 2}});
  CHECK(game_to_json(g) == R"({"edges":[[0,0],[1,1],[1,2]],"left":2,"right":3})");
}

TEST_SUITE_END();
