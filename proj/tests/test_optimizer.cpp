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
#include "oracle.hpp"
#include "wlc/chain.hpp"
#include "wlc/errors.hpp"
#include "wlc/optimizer.hpp"

using namespace wlc;

TEST_SUITE_BEGIN("optimizer");

TEST_CASE("formula for two-touched stages") {
  CHECK(formula_E(1.0, 4, 2.0, 1.5) == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(formula_E(0.0, 3, 0.0, 1.0) == doctest::Approx(5.0 / 3).epsilon(1e-12));
  for (double p = 0; p <= 1.0; p += 0.125) {
    CHECK(formula_E(p, 2, 2.0, 2.0) == doctest::Approx(2.0).epsilon(1e-12));
  }
}

TEST_CASE("closed forms") {
  CmClosedForms f5 = cm_closed_forms(5);
  CHECK(f5.wm_ect == rat(13, 5));
  CHECK(*f5.la_ect == rat(7, 3));
  CHECK(*f5.la_gct == 3);
  CHECK(f5.optimal_ect == rat(7, 3));
  CHECK(f5.optimal_gct == 3);

  CmClosedForms f7 = cm_closed_forms(7);
  CHECK(*f7.la_ect == rat(3));
  CHECK(f7.wm_ect == rat(19, 7));
  CHECK(f7.optimal_ect == rat(19, 7));

  CmClosedForms f9 = cm_closed_forms(9);
  CHECK(*f9.la_ect == rat(11, 3));
  CHECK(f9.optimal_ect == rat(25, 9));
  CHECK(f9.optimal_gct == 5);

  CmClosedForms f4 = cm_closed_forms(4);
  CHECK_FALSE(f4.la_ect.has_value());  // no loop-avoidance columns for even m
  CHECK_FALSE(f4.la_gct.has_value());
  CHECK_FALSE(f4.optimal_gct.has_value());
  CHECK(f4.optimal_ect == rat(5, 2));

  CmClosedForms f1 = cm_closed_forms(1);
  CHECK(f1.optimal_ect == 1);
  CHECK(f1.optimal_gct == 1);
  CHECK(*f1.la_ect == 1);
}

TEST_CASE("choice matching optima match the closed forms") {
  for (int m = 1; m <= 7; ++m) {
    OptimResult r = optimal_ect(make_choice_matching(m));
    CHECK(std::fabs(r.value - cm_closed_forms(m).optimal_ect.get_d()) < 1e-6);
    CHECK(r.diag.bellman_residual < 1e-8);
  }
}

TEST_CASE("guaranteed-time optima for choice matching") {
  CHECK(optimal_gct(make_choice_matching(1)).value == 1);
  CHECK(optimal_gct(make_choice_matching(3)).value == 2);
  CHECK(optimal_gct(make_choice_matching(5)).value == 3);
  CHECK(optimal_gct(make_choice_matching(7)).value == 4);
  for (int m : {2, 4, 6}) {
    CHECK_FALSE(optimal_gct(make_choice_matching(m)).value.has_value());
  }
}

TEST_CASE("guaranteed-time witness on CM_5 is the untouched support") {
  QuotientSpace space = build_quotient(make_choice_matching(5));
  GctResult gr = optimal_gct(space);
  // find the state with two touched edges; its witness must be the single
  // untouched class, exactly what loop avoidance plays
  bool checked = false;
  for (size_t s = 0; s < space.states.size(); ++s) {
    if (space.states[s].touched_count != 2) continue;
    REQUIRE(gr.support[s].size() == 1);
    const auto& var = space.states[s].vars[static_cast<size_t>(gr.support[s][0])];
    CHECK(var.lcount == 3);  // the six untouched choices in one class
    CHECK(var.rcount == 3);
    checked = true;
  }
  CHECK(checked);
}

TEST_CASE("atlas special games") {
  OptimResult z = optimal_ect(oracle::z_game());
  double expected = (1.0 + std::sqrt(4.0 + std::sqrt(17.0))) / 2.0;
  CHECK(std::fabs(z.value - expected) < 1e-6);
  OptimResult c6 = optimal_ect(oracle::c6_game());
  CHECK(std::fabs(c6.value - 1.5) < 1e-9);
}

TEST_CASE("value iteration is monotone from the uniform start") {
  for (int m = 2; m <= 6; ++m) {
    OptimResult r = optimal_ect(make_choice_matching(m));
    CHECK(r.diag.monotone);
    for (double v : r.state_values) {
      CHECK(v >= 1.0 - 1e-12);
      CHECK(v <= static_cast<double>(m) + 1e-9);  // the uniform start value
    }
  }
}

TEST_CASE("no-focal-point stages sit above three halves") {
  for (int m = 2; m <= 5; ++m) {
    QuotientSpace space = build_quotient(make_choice_matching(m));
    OptimResult r = optimal_ect(space);
    for (size_t s = 0; s < space.states.size(); ++s) {
      if (focal_points(*space.game, space.states[s].partition).empty()) {
        CHECK(r.state_values[s] >= 1.5 - 1e-9);
      }
    }
  }
}

TEST_CASE("extracted policies reproduce the optimum through the exact chain") {
  for (int m : {2, 3, 5, 6}) {
    Game g = make_choice_matching(m);
    QuotientSpace space = build_quotient(g);
    OptimResult r = optimal_ect(space);
    ClassWeightTable table = policy_to_table(space, r);
    auto pr = make_class_weight_protocol(std::move(table));
    MaybeRat e = exact_ect(g, *pr);
    REQUIRE(e.has_value());
    CHECK(*e == cm_closed_forms(m).optimal_ect);
  }
}

TEST_CASE("uniqueness probe on the two-touched states") {
  OptimOptions tight;
  tight.tol = 1e-12;
  auto probe_two_touched = [&](int m) {
    QuotientSpace space = build_quotient(make_choice_matching(m), tight);
    OptimResult r = optimal_ect(space, tight);
    ProbeReport rep = uniqueness_probe(space, r, 1e-9);
    for (const auto& st : rep.states) {
      if (st.touched_count == 2 && st.has_split) return st;
    }
    FAIL("no two-touched state found");
    return rep.states[0];
  };
  ProbeStateReport p4 = probe_two_touched(4);
  CHECK_FALSE(p4.singleton);
  CHECK(p4.p_lo == 0.0);
  CHECK(p4.p_hi == 1.0);
  CHECK(p4.objective_spread < 1e-9);

  ProbeStateReport p5 = probe_two_touched(5);
  CHECK(p5.singleton);
  CHECK(p5.best_p == 0.0);

  ProbeStateReport p6 = probe_two_touched(6);
  CHECK(p6.singleton);
  CHECK(p6.best_p == 1.0);
}

TEST_CASE("partition merging cross-checked against the unrolled tree") {
  CHECK(verify_quotient_merge(make_choice_matching(2), 4) < 1e-6);
  CHECK(verify_quotient_merge(make_choice_matching(3), 3) < 1e-6);
  CHECK(verify_quotient_merge(make_choice_matching(4), 3) < 1e-6);
  CHECK(verify_quotient_merge(oracle::z_game(), 3) < 1e-6);
}

TEST_CASE("budgets and convergence failures surface") {
  OptimOptions tiny;
  tiny.max_states = 2;
  CHECK_THROWS_AS(build_quotient(make_choice_matching(4), tiny), StateExplosion);
  OptimOptions nosweeps;
  nosweeps.max_iter = 1;
  CHECK_THROWS_AS(optimal_ect(make_choice_matching(4), nosweeps), InnerSolveFailure);
}

TEST_SUITE_END();
