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
#include "nlohmann/json.hpp"
#include "oracle.hpp"
#include "wlc/chain.hpp"
#include "wlc/enumerate.hpp"
#include "wlc/errors.hpp"
#include "wlc/simulate.hpp"

using namespace wlc;

TEST_SUITE_BEGIN("chain");

TEST_CASE("wait-or-move on CM_2: two states, the miss state loops at 1/2") {
  StageChain chain = build_chain(make_choice_matching(2), *make_wm_protocol());
  REQUIRE(chain.states.size() == 2);
  const auto& miss = chain.states[1];
  REQUIRE(miss.out.size() == 1);
  CHECK(miss.out[0].first == 1);  // self loop
  CHECK(miss.out[0].second == rat(1, 2));
  CHECK(miss.win == rat(1, 2));
  CHECK(*exact_ect(chain) == 2);
  CHECK_FALSE(exact_gct(chain).has_value());  // no guarantee, ever
}

TEST_CASE("loop avoidance on CM_5: three transient states, no cycle") {
  StageChain chain = build_chain(make_choice_matching(5), *make_la_protocol());
  CHECK(chain.states.size() == 3);
  CHECK(*exact_ect(chain) == rat(7, 3));
  CHECK(exact_gct(chain) == 3);
}

TEST_CASE("uniform on CM_3 closes within four states") {
  StageChain chain = build_chain(make_choice_matching(3), *make_uniform_protocol());
  CHECK(chain.states.size() <= 4);
  CHECK(*exact_ect(chain) == 3);  // geometric with success 1/3
}

TEST_CASE("wait-or-move expected times are exactly 3 - 2/m") {
  for (int m = 2; m <= 9; ++m) {
    MaybeRat e = exact_ect(make_choice_matching(m), *make_wm_protocol());
    REQUIRE(e.has_value());
    CHECK(*e == rat(3 * m - 2, m));
  }
}

TEST_CASE("loop avoidance expected times on odd sizes") {
  auto la = make_la_protocol();
  CHECK(*exact_ect(make_choice_matching(3), *la) == rat(5, 3));
  CHECK(*exact_ect(make_choice_matching(5), *la) == rat(7, 3));
  CHECK(*exact_ect(make_choice_matching(7), *la) == rat(3));
  CHECK(*exact_ect(make_choice_matching(9), *la) == rat(11, 3));
}

TEST_CASE("guaranteed times") {
  auto la = make_la_protocol();
  CHECK(exact_gct(make_choice_matching(5), *la) == 3);
  CHECK(exact_gct(make_choice_matching(3), *la) == 2);
  for (int m = 2; m <= 8; m += 2) {
    CHECK_FALSE(exact_gct(make_choice_matching(m), *la).has_value());
  }
  CHECK_FALSE(exact_gct(make_choice_matching(2), *make_wm_protocol()).has_value());
  for (const char* name : {"uniform", "wm", "la"}) {
    CHECK(exact_gct(make_choice_matching(1), *make_protocol(name)) == 1);
  }
}

TEST_CASE("one-shot coordination probability") {
  auto uni = make_uniform_protocol();
  for (int m = 1; m <= 7; ++m) {
    CHECK(oscp(make_choice_matching(m), *uni) == rat(1, m));
  }
  CHECK(oscp(oracle::c6_game(), *uni) == rat(2, 3));  // 6 of 9 pairs win
  // w winning pairs under the product of uniforms: w/(m*n)
  SplitMix64 rng(99);
  for (int trial = 0; trial < 30; ++trial) {
    int n1 = 1 + static_cast<int>(rng.next() % 4);
    int n2 = 1 + static_cast<int>(rng.next() % 4);
    std::set<Edge> edges;
    for (int j = 0; j < n2; ++j) edges.insert({static_cast<int>(rng.next() % n1), j});
    for (int i = 0; i < n1; ++i) edges.insert({i, static_cast<int>(rng.next() % n2)});
    Game g(n1, n2, {edges.begin(), edges.end()});
    CHECK(oscp(g, *uni) == rat(static_cast<long>(edges.size()), n1 * n2));
  }
}

TEST_CASE("rows are exactly stochastic") {
  for (const char* name : {"uniform", "wm", "la"}) {
    auto pr = make_protocol(name);
    StageChain chain = build_chain(make_choice_matching(4), *pr);
    for (const auto& st : chain.states) {
      Rat total = st.win;
      for (const auto& [t, p] : st.out) {
        (void)t;
        total += p;
      }
      CHECK(total == 1);
    }
  }
}

TEST_CASE("two-touched wait-or-move states have conditional expectation 2") {
  for (int m = 2; m <= 6; ++m) {
    StageChain chain = build_chain(make_choice_matching(m), *make_wm_protocol());
    auto values = exact_ect_per_state(chain);
    bool found = false;
    for (size_t i = 0; i < chain.states.size(); ++i) {
      if (touched_edges(chain.states[i].rep).size() == 2 && !chain.states[i].rep.is_final()) {
        REQUIRE(values[i].has_value());
        CHECK(*values[i] == 2);
        found = true;
      }
    }
    CHECK(found);
  }
}

TEST_CASE("direct wait-or-move expansion agrees with the chain") {
  SplitMix64 rng(123);
  auto wm = make_wm_protocol();
  for (int trial = 0; trial < 25; ++trial) {
    int n1 = 1 + static_cast<int>(rng.next() % 4);
    int n2 = 1 + static_cast<int>(rng.next() % 4);
    std::set<Edge> edges;
    for (int j = 0; j < n2; ++j) edges.insert({static_cast<int>(rng.next() % n1), j});
    for (int i = 0; i < n1; ++i) edges.insert({i, static_cast<int>(rng.next() % n2)});
    for (uint64_t k = rng.next() % 3; k > 0; --k) {
      edges.insert({static_cast<int>(rng.next() % n1), static_cast<int>(rng.next() % n2)});
    }
    Game g(n1, n2, {edges.begin(), edges.end()});
    MaybeRat via_chain = exact_ect(g, *wm);
    REQUIRE(via_chain.has_value());
    CHECK(*via_chain == wm_ect_direct(g));
  }
}

TEST_CASE("chain dump uses rational strings") {
  StageChain chain = build_chain(make_choice_matching(3), *make_la_protocol());
  auto j = nlohmann::json::parse(chain_to_json(chain));
  CHECK(j.at("states").size() == chain.states.size());
  CHECK(j.at("states")[0].at("win").get<std::string>() == "1/3");
}

TEST_CASE("state budget is enforced") {
  ChainOptions opts;
  opts.max_states = 1;
  CHECK_THROWS_AS(build_chain(make_choice_matching(3), *make_uniform_protocol(), opts),
                  StateExplosion);
}

TEST_CASE("strict renaming-only mode needs a depth cap and refuses ECT") {
  ChainOptions strict;
  strict.merge_by_partition = false;
  strict.depth_cap = 3;
  StageChain chain = build_chain(make_choice_matching(2), *make_wm_protocol(), strict);
  bool truncated = false;
  for (const auto& st : chain.states) truncated = truncated || st.truncated;
  CHECK(truncated);
  CHECK_THROWS_AS(exact_ect(chain), Error);
  // on a protocol that terminates within the cap, values match the merged chain
  ChainOptions strict5 = strict;
  strict5.depth_cap = 5;
  StageChain la_strict = build_chain(make_choice_matching(5), *make_la_protocol(), strict5);
  CHECK(*exact_ect(la_strict) == rat(7, 3));
}

TEST_SUITE_END();
