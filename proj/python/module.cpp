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

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "wlc/chain.hpp"
#include "wlc/enumerate.hpp"
#include "wlc/errors.hpp"
#include "wlc/game.hpp"
#include "wlc/golden.hpp"
#include "wlc/optimizer.hpp"
#include "wlc/protocol.hpp"
#include "wlc/simulate.hpp"

namespace py = pybind11;
using namespace wlc;

namespace {

Stage stage_of(const Game& g, const std::vector<Edge>& history) {
  return Stage(std::make_shared<Game>(g), history);
}

py::object maybe_rat_str(const MaybeRat& r) {
  if (!r) return py::none();
  return py::str(rat_str(*r));
}

py::object maybe_int(const MaybeInt& v) {
  if (!v) return py::none();
  return py::int_(*v);
}

}  // namespace

PYBIND11_MODULE(_wlc, m) {
  m.doc() = "Repeated win-lose coordination games: exact protocol analysis, "
            "optimal coordination times, enumeration.";

  py::register_exception<BudgetError>(m, "BudgetError");

  py::class_<Game>(m, "Game")
      .def(py::init([](int left, int right, const std::vector<Edge>& edges) {
             return Game(left, right, edges);
           }),
           py::arg("left"), py::arg("right"), py::arg("edges"))
      .def_property_readonly("left_count", &Game::left_count)
      .def_property_readonly("right_count", &Game::right_count)
      .def_property_readonly("edges", &Game::winning)
      .def("is_winning", &Game::is_winning)
      .def("size", [](const Game& g) { return game_size(g); })
      .def("serialize", [](const Game& g) { return serialize_game(g); })
      .def("to_json", [](const Game& g) { return game_to_json(g); })
      .def("validate",
           [](const Game& g) {
             ValidationReport r = validate(g);
             return py::make_tuple(r.ok, r.violations);
           })
      .def("canonical_key", [](const Game& g) { return canonical_game_key(g); })
      .def("__eq__", [](const Game& a, const Game& b) { return a == b; })
      .def("__repr__", [](const Game& g) {
        return "<Game " + std::to_string(g.left_count()) + "x" + std::to_string(g.right_count()) +
               " |W|=" + std::to_string(g.winning().size()) + ">";
      });

  m.def("make_choice_matching", &make_choice_matching, py::arg("m"));
  m.def("parse_game", &parse_game, py::arg("text"));

  m.def(
      "structural_classes",
      [](const Game& g, const std::vector<Edge>& history) {
        Stage s = stage_of(g, history);
        Partition p = structural_classes(s);
        std::vector<std::vector<std::string>> named;
        for (const auto& cls : p.classes()) {
          std::vector<std::string> names;
          for (int c : cls) names.push_back(g.choice_name(c));
          named.push_back(std::move(names));
        }
        return named;
      },
      py::arg("game"), py::arg("history") = std::vector<Edge>{});

  m.def(
      "focal_points",
      [](const Game& g, const std::vector<Edge>& history) {
        std::vector<std::string> names;
        for (int c : focal_points(stage_of(g, history))) names.push_back(g.choice_name(c));
        return names;
      },
      py::arg("game"), py::arg("history") = std::vector<Edge>{});

  m.def(
      "analyze",
      [](const Game& g, const std::string& protocol) {
        auto pr = make_protocol(protocol);
        StageChain chain = build_chain(g, *pr);
        py::dict out;
        out["oscp"] = rat_str(oscp(g, *pr));
        out["ect"] = maybe_rat_str(exact_ect(chain));
        out["gct"] = maybe_int(exact_gct(chain));
        out["chain_states"] = chain.states.size();
        return out;
      },
      py::arg("game"), py::arg("protocol"),
      "Exact one-shot probability, expected and guaranteed coordination time "
      "for a fixed protocol (uniform, wm, la, table:<file>). Rationals come "
      "back as strings; None means infinite.");

  m.def(
      "optimal_ect",
      [](const Game& g, double tol) {
        OptimOptions opts;
        opts.tol = tol;
        OptimResult r = optimal_ect(g, opts);
        py::dict out;
        out["value"] = r.value;
        out["states"] = r.diag.states;
        out["sweeps"] = r.diag.sweeps;
        out["bellman_residual"] = r.diag.bellman_residual;
        return out;
      },
      py::arg("game"), py::arg("tol") = 1e-9);

  m.def(
      "optimal_gct",
      [](const Game& g) { return maybe_int(optimal_gct(g).value); },
      py::arg("game"));

  m.def(
      "cm_closed_forms",
      [](int mm) {
        CmClosedForms f = cm_closed_forms(mm);
        py::dict out;
        out["wm_ect"] = rat_str(f.wm_ect);
        out["la_ect"] = maybe_rat_str(f.la_ect);
        out["la_gct"] = maybe_int(f.la_gct);
        out["optimal_ect"] = rat_str(f.optimal_ect);
        out["optimal_gct"] = maybe_int(f.optimal_gct);
        return out;
      },
      py::arg("m"));

  m.def(
      "simulate",
      [](const Game& g, const std::string& protocol, uint64_t episodes, uint64_t seed,
         int max_rounds) {
        SimReport r = simulate(g, *make_protocol(protocol), episodes, seed, max_rounds);
        py::dict out;
        out["episodes"] = r.episodes;
        out["mean"] = r.mean;
        out["std_error"] = r.std_error;
        out["truncated"] = r.truncated;
        out["histogram"] = r.histogram;
        return out;
      },
      py::arg("game"), py::arg("protocol"), py::arg("episodes") = 100000, py::arg("seed") = 1,
      py::arg("max_rounds") = 100000);

  m.def(
      "enumerate_games",
      [](int mm, std::optional<int> max_edges, bool nontrivial) {
        EnumOptions opts;
        opts.max_edges = max_edges;
        opts.nontrivial_only = nontrivial;
        return enumerate_games(mm, opts);
      },
      py::arg("m"), py::arg("max_edges") = py::none(), py::arg("nontrivial_only") = false);

  m.def("golden_table", []() {
    GoldenReport rep = golden_table();
    return py::make_tuple(rep.all_ok, rep.lines);
  });
}
