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

#include <deque>

#include "doctest.h"
#include "oracle.hpp"
#include "wlc/chain.hpp"
#include "wlc/errors.hpp"
#include "wlc/protocol.hpp"

using namespace wlc;

namespace {

// every stage reachable with positive probability under the protocol's own
// support, to a depth cap
void walk_support(const Game& g, const Protocol& pr, int depth,
                  const std::function<void(const Stage&, const Memory&)>& visit) {
  auto gp = std::make_shared<Game>(g);
  std::deque<std::pair<Stage, Memory>> queue;
  queue.push_back({initial_stage(gp), {}});
  while (!queue.empty()) {
    auto [s, mem] = queue.front();
    queue.pop_front();
    visit(s, mem);
    if (s.round() >= depth) continue;
    ChoiceDistribution dl = pr.distribution(s, Side::Left, mem);
    ChoiceDistribution dr = pr.distribution(s, Side::Right, mem);
    for (int l = 0; l < g.left_count(); ++l) {
      if (dl.weights[static_cast<size_t>(l)] == 0) continue;
      for (int r = 0; r < g.right_count(); ++r) {
        if (dr.weights[static_cast<size_t>(r)] == 0) continue;
        if (g.is_winning(l, r)) continue;
        for (const auto& [bp, mem2] : pr.memory_branches(s, mem, {l, r})) {
          (void)bp;
          queue.push_back({advance(s, {l, r}).first, mem2});
        }
      }
    }
  }
}

// a deliberately non-structural rule: all mass on the first choice
class PinnedProtocol final : public Protocol {
 public:
  std::string name() const override { return "pinned"; }
  ChoiceDistribution distribution(const Stage& s, Side player, const Memory&) const override {
    int count = player == Side::Left ? s.game().left_count() : s.game().right_count();
    ChoiceDistribution d{player, std::vector<Rat>(static_cast<size_t>(count), Rat(0))};
    d.weights[0] = 1;
    return d;
  }
};

}  // namespace

TEST_SUITE_BEGIN("protocol");

TEST_CASE("uniform distribution") {
  auto pr = make_uniform_protocol();
  Stage s = initial_stage(make_choice_matching(3));
  ChoiceDistribution d = pr->distribution(s, Side::Left, {});
  for (const Rat& w : d.weights) CHECK(w == rat(1, 3));
  Stage s1 = initial_stage(make_choice_matching(1));
  CHECK(pr->distribution(s1, Side::Right, {}).weights[0] == 1);
}

TEST_CASE("wait-or-move distribution in choice matching") {
  auto pr = make_wm_protocol();
  Game g = make_choice_matching(4);
  Stage s = advance(initial_stage(g), {0, 1}).first;
  // player 1 keeps its first pick or moves to the opponent's row
  ChoiceDistribution dl = pr->distribution(s, Side::Left, {});
  CHECK(dl.weights[0] == rat(1, 2));
  CHECK(dl.weights[1] == rat(1, 2));
  CHECK(dl.weights[2] == 0);
  ChoiceDistribution dr = pr->distribution(s, Side::Right, {});
  CHECK(dr.weights[1] == rat(1, 2));
  CHECK(dr.weights[0] == rat(1, 2));
  // a deeper stage still mixes the same two choices
  Stage s2 = advance(s, {1, 0}).first;
  CHECK(pr->distribution(s2, Side::Left, {}).weights[0] == rat(1, 2));
  CHECK(pr->distribution(s2, Side::Left, {}).weights[1] == rat(1, 2));
}

TEST_CASE("wait-or-move commitment branches") {
  // two coordinating choices for the left player: branch uniformly, then the
  // per-play support has exactly two choices per player
  Game g(3, 2, {{0, 0}, {1, 0}, {2, 1}});
  auto pr = make_wm_protocol();
  Stage s0 = initial_stage(g);
  auto branches = pr->memory_branches(s0, {}, {2, 0});  // miss
  REQUIRE(branches.size() == 2);  // partners of R0 = {L0, L1}; of L2 = {R1}
  Rat total(0);
  for (const auto& [p, mem] : branches) {
    total += p;
    REQUIRE(mem.size() == 1);
    Stage s1 = advance(s0, {2, 0}).first;
    ChoiceDistribution dl = pr->distribution(s1, Side::Left, mem);
    int support = 0;
    for (const Rat& w : dl.weights) support += w > 0;
    CHECK(support == 2);
    CHECK(dl.weights[2] == rat(1, 2));  // own first pick
    CHECK(dl.weights[mem[0].first] == rat(1, 2));
  }
  CHECK(total == 1);
}

TEST_CASE("wait-or-move support stays at two choices per player") {
  auto pr = make_wm_protocol();
  for (int m : {2, 3, 5}) {
    walk_support(make_choice_matching(m), *pr, 3, [&](const Stage& s, const Memory& mem) {
      if (s.round() == 0) return;
      for (Side side : {Side::Left, Side::Right}) {
        ChoiceDistribution d = pr->distribution(s, side, mem);
        int support = 0;
        for (const Rat& w : d.weights) support += w > 0;
        CHECK(support <= 2);
      }
    });
  }
}

TEST_CASE("loop avoidance on the worked CM_5 stages") {
  auto pr = make_la_protocol();
  auto g = std::make_shared<Game>(make_choice_matching(5));
  // after the miss (a1,b2): uniform over the three untouched rows
  Stage s1(g, {{0, 1}});
  ChoiceDistribution dl = pr->distribution(s1, Side::Left, {});
  CHECK(dl.weights[0] == 0);
  CHECK(dl.weights[1] == 0);
  CHECK(dl.weights[2] == rat(1, 3));
  CHECK(dl.weights[3] == rat(1, 3));
  CHECK(dl.weights[4] == rat(1, 3));
  // after a second untouched miss (c1,d2): probability 1 on the last row
  Stage s2(g, {{0, 1}, {2, 3}});
  ChoiceDistribution d2l = pr->distribution(s2, Side::Left, {});
  ChoiceDistribution d2r = pr->distribution(s2, Side::Right, {});
  CHECK(d2l.weights[4] == 1);
  CHECK(d2r.weights[4] == 1);
  // initially avoidance is impossible: uniform
  ChoiceDistribution d0 = pr->distribution(initial_stage(*g), Side::Left, {});
  for (const Rat& w : d0.weights) CHECK(w == rat(1, 5));
}

TEST_CASE("loop avoidance never touches a touched edge when m is odd") {
  auto pr = make_la_protocol();
  for (int m : {3, 5, 7}) {
    Game g = make_choice_matching(m);
    walk_support(g, *pr, (m + 1) / 2, [&](const Stage& s, const Memory&) {
      if (s.is_final()) return;
      uint32_t touched_l = 0, touched_r = 0;
      for (const Edge& e : touched_edges(s)) {
        touched_l |= 1u << e.first;
        touched_r |= 1u << e.second;
      }
      ChoiceDistribution dl = pr->distribution(s, Side::Left, {});
      ChoiceDistribution dr = pr->distribution(s, Side::Right, {});
      for (int i = 0; i < m; ++i) {
        if ((touched_l >> i) & 1u) CHECK(dl.weights[static_cast<size_t>(i)] == 0);
        if ((touched_r >> i) & 1u) CHECK(dr.weights[static_cast<size_t>(i)] == 0);
      }
    });
  }
}

TEST_CASE("structurality of the shipped protocols") {
  for (int m = 2; m <= 5; ++m) {
    Game g = make_choice_matching(m);
    for (const char* name : {"uniform", "wm"}) {
      auto pr = make_protocol(name);
      walk_support(g, *pr, 3, [&](const Stage& s, const Memory& mem) {
        if (!s.is_final()) CHECK(structurality_check(*pr, s, mem));
      });
    }
    auto la = make_la_protocol();
    walk_support(g, *la, 2, [&](const Stage& s, const Memory& mem) {
      if (!s.is_final()) CHECK(structurality_check(*la, s, mem));
    });
  }
}

TEST_CASE("a pinned rule is not structural") {
  PinnedProtocol pinned;
  CHECK_FALSE(structurality_check(pinned, initial_stage(make_choice_matching(2))));
}

TEST_CASE("class-weight tables") {
  // wait-or-move on CM_6 as a two-entry table: uniform initially, then all
  // mass on the two touched classes
  Game g = make_choice_matching(6);
  auto gp = std::make_shared<Game>(g);
  RenamingGroup gamma0 = stage_renaming_group(initial_stage(gp));
  ClassWeightTable table;
  {
    StateKeyed sk = state_key_with_classes(initial_stage(gp), gamma0);
    ClassWeightTable::Entry e;
    e.left.assign(static_cast<size_t>(sk.partition.num_classes), rat(1, 6));
    e.right = e.left;
    table.states[sk.key] = e;
  }
  {
    Stage s1(gp, {{0, 1}});
    StateKeyed sk = state_key_with_classes(s1, gamma0);
    ClassWeightTable::Entry e;
    e.left.assign(static_cast<size_t>(sk.partition.num_classes), Rat(0));
    e.right = e.left;
    // the two touched classes are those of the played choices
    int k1 = sk.canonical_class_of[static_cast<size_t>(sk.partition.class_of[0])];
    int k2 = sk.canonical_class_of[static_cast<size_t>(sk.partition.class_of[6 + 1])];
    (void)k2;
    int cls_b1 = sk.canonical_class_of[static_cast<size_t>(sk.partition.class_of[1])];
    e.left[static_cast<size_t>(k1)] = rat(1, 2);
    e.left[static_cast<size_t>(cls_b1)] = rat(1, 2);
    e.right[static_cast<size_t>(k1)] = rat(1, 2);
    e.right[static_cast<size_t>(cls_b1)] = rat(1, 2);
    table.states[sk.key] = e;
  }
  auto tp = make_class_weight_protocol(table);
  MaybeRat ect = exact_ect(g, *tp);
  REQUIRE(ect.has_value());
  CHECK(*ect == rat(8, 3));  // the wait-or-move chain value

  // round-trip through JSON
  auto tp2 = make_class_weight_protocol(ClassWeightTable::from_json(table.to_json()));
  CHECK(*exact_ect(g, *tp2) == rat(8, 3));

  // the loop-avoidance chain on CM_5 from a weight-on-untouched table
  Game g5 = make_choice_matching(5);
  auto gp5 = std::make_shared<Game>(g5);
  RenamingGroup gamma5 = stage_renaming_group(initial_stage(gp5));
  ClassWeightTable t5;
  {
    StateKeyed sk = state_key_with_classes(initial_stage(gp5), gamma5);
    ClassWeightTable::Entry e;
    e.left.assign(static_cast<size_t>(sk.partition.num_classes), rat(1, 5));
    e.right = e.left;
    t5.states[sk.key] = e;
  }
  for (std::vector<Edge> hist :
       {std::vector<Edge>{{0, 1}}, std::vector<Edge>{{0, 1}, {2, 3}}}) {
    Stage s(gp5, hist);
    StateKeyed sk = state_key_with_classes(s, gamma5);
    ClassWeightTable::Entry e;
    e.left.assign(static_cast<size_t>(sk.partition.num_classes), Rat(0));
    e.right = e.left;
    uint32_t touched_l = 0, touched_r = 0;
    for (const Edge& te : touched_edges(s)) {
      touched_l |= 1u << te.first;
      touched_r |= 1u << te.second;
    }
    int untouched = 5 - static_cast<int>(hist.size()) * 2;
    for (int i = 0; i < 5; ++i) {
      if (!((touched_l >> i) & 1u)) {
        int canon = sk.canonical_class_of[static_cast<size_t>(sk.partition.class_of[static_cast<size_t>(i)])];
        e.left[static_cast<size_t>(canon)] = rat(1, untouched);
      }
      if (!((touched_r >> i) & 1u)) {
        int canon =
            sk.canonical_class_of[static_cast<size_t>(sk.partition.class_of[static_cast<size_t>(5 + i)])];
        e.right[static_cast<size_t>(canon)] = rat(1, untouched);
      }
    }
    t5.states[sk.key] = e;
  }
  auto lp = make_class_weight_protocol(t5);
  CHECK(*exact_ect(g5, *lp) == rat(7, 3));  // the loop-avoidance value

  // an empty table has no entry for any stage
  auto empty = make_class_weight_protocol(ClassWeightTable{});
  CHECK_THROWS_AS(empty->distribution(initial_stage(g5), Side::Left, {}), MissingStageEntry);
}

TEST_CASE("protocol factory") {
  CHECK(make_protocol("uniform")->name() == "uniform");
  CHECK(make_protocol("wm")->name() == "wm");
  CHECK(make_protocol("la")->name() == "la");
  CHECK_THROWS_AS(make_protocol("nope"), Error);
}

TEST_SUITE_END();
