# Copyright 2026 The wlc Authors
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#     http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.

from fractions import Fraction

import wlc


def frac(s):
    return Fraction(s)


def test_game_roundtrip():
    g = wlc.make_choice_matching(3)
    assert g.size() == 3
    assert g.validate() == (True, [])
    assert wlc.parse_game(g.serialize()) == g
    bad = wlc.Game(2, 2, [(0, 0)])
    ok, violations = bad.validate()
    assert not ok and "Left#1" in violations[0]


def test_exact_analysis():
    cm5 = wlc.make_choice_matching(5)
    la = wlc.analyze(cm5, "la")
    assert frac(la["ect"]) == Fraction(7, 3)
    assert la["gct"] == 3
    wm = wlc.analyze(cm5, "wm")
    assert frac(wm["ect"]) == Fraction(13, 5)
    assert wm["gct"] is None
    assert frac(wm["oscp"]) == Fraction(1, 5)


def test_optimal():
    r = wlc.optimal_ect(wlc.make_choice_matching(3))
    assert abs(r["value"] - 5 / 3) < 1e-6
    assert wlc.optimal_gct(wlc.make_choice_matching(5)) == 3
    assert wlc.optimal_gct(wlc.make_choice_matching(4)) is None


def test_closed_forms():
    f = wlc.cm_closed_forms(7)
    assert frac(f["wm_ect"]) == Fraction(19, 7)
    assert frac(f["la_ect"]) == 3
    assert f["optimal_gct"] == 4


def test_structural_classes():
    cm5 = wlc.make_choice_matching(5)
    classes = wlc.structural_classes(cm5, [(0, 1)])
    assert sorted(map(sorted, classes)) == sorted(
        map(sorted, [["L0", "R1"], ["L1", "R0"], ["L2", "L3", "L4", "R2", "R3", "R4"]])
    )
    assert wlc.focal_points(cm5) == []


def test_simulation_is_deterministic():
    g = wlc.make_choice_matching(4)
    a = wlc.simulate(g, "wm", episodes=20000, seed=5)
    b = wlc.simulate(g, "wm", episodes=20000, seed=5)
    assert a == b
    assert abs(a["mean"] - 2.5) < 4 * a["std_error"] + 1e-12


def test_enumeration():
    atlas = wlc.enumerate_games(3, nontrivial_only=True)
    assert len(atlas) == 8
