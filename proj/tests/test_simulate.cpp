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

#include <cmath>

#include "doctest.h"
#include "wlc/chain.hpp"
#include "wlc/simulate.hpp"

using namespace wlc;

TEST_SUITE_BEGIN("simulate");

TEST_CASE("trivial game coordinates in one round") {
  SimReport r = simulate(make_choice_matching(1), *make_uniform_protocol(), 1000, 7);
  CHECK(r.mean == 1.0);
  CHECK(r.truncated == 0);
  CHECK(r.histogram[1] == 1000);
}

TEST_CASE("identical seeds give identical reports") {
  Game g = make_choice_matching(4);
  auto wm = make_wm_protocol();
  SimReport a = simulate(g, *wm, 20000, 99);
  SimReport b = simulate(g, *wm, 20000, 99);
  CHECK(a.mean == b.mean);
  CHECK(a.std_error == b.std_error);
  CHECK(a.histogram == b.histogram);
  SimReport c = simulate(g, *wm, 20000, 100);
  CHECK(a.mean != c.mean);
}

TEST_CASE("means land within four standard errors of the exact values") {
  struct Case {
    int m;
    const char* proto;
  };
  for (Case cs : {Case{5, "la"}, Case{2, "wm"}, Case{3, "uniform"}, Case{4, "wm"}}) {
    Game g = make_choice_matching(cs.m);
    auto pr = make_protocol(cs.proto);
    MaybeRat exact = exact_ect(g, *pr);
    REQUIRE(exact.has_value());
    SimReport r = simulate(g, *pr, 100000, 20260811, 10000);
    CHECK(r.truncated == 0);
    CHECK(std::fabs(r.mean - exact->get_d()) <= 4.0 * r.std_error);
  }
}

TEST_CASE("histogram masses sum to the episode count") {
  SimReport r = simulate(make_choice_matching(3), *make_la_protocol(), 5000, 3);
  uint64_t total = r.truncated;
  for (uint64_t c : r.histogram) total += c;
  CHECK(total == r.episodes);
  // loop avoidance guarantees two rounds here
  CHECK(r.histogram.size() <= 3);
}

TEST_SUITE_END();
