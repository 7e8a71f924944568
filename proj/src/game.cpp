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

#include "wlc/game.hpp"

#include <algorithm>
#include <sstream>

#include "nlohmann/json.hpp"
#include "wlc/errors.hpp"

namespace wlc {

Game::Game(int left_count, int right_count, std::vector<Edge> winning)
    : left_count_(left_count), right_count_(right_count), winning_(std::move(winning)) {
  if (left_count_ < 1 || right_count_ < 1) {
    throw Error("game needs at least one choice per player");
  }
  if (left_count_ > 31 || right_count_ > 31) {
    throw Error("choice sets larger than 31 are not supported");
  }
  for (const Edge& e : winning_) {
    if (e.first < 0 || e.first >= left_count_ || e.second < 0 || e.second >= right_count_) {
      throw InvalidChoice("edge (" + std::to_string(e.first) + "," + std::to_string(e.second) +
                          ") is out of range");
    }
  }
  std::sort(winning_.begin(), winning_.end());
  adj_.assign(static_cast<size_t>(left_count_), 0);
  radj_.assign(static_cast<size_t>(right_count_), 0);
  for (const Edge& e : winning_) {
    adj_[static_cast<size_t>(e.first)] |= 1u << e.second;
    radj_[static_cast<size_t>(e.second)] |= 1u << e.first;
  }
}

int Game::degree(Side s, int index) const {
  uint32_t m = s == Side::Left ? adj_[static_cast<size_t>(index)] : radj_[static_cast<size_t>(index)];
  return __builtin_popcount(m);
}

std::string Game::choice_name(int global) const {
  ChoiceId c = choice_of(global);
  return (c.side == Side::Left ? "L" : "R") + std::to_string(c.index);
}

bool operator==(const Game& a, const Game& b) {
  return a.left_count_ == b.left_count_ && a.right_count_ == b.right_count_ &&
         a.winning_ == b.winning_;
}

Game make_choice_matching(int m) {
  if (m < 1) throw Error("choice matching game needs m >= 1");
  std::vector<Edge> edges;
  edges.reserve(static_cast<size_t>(m));
  for (int i = 0; i < m; ++i) edges.emplace_back(i, i);
  return Game(m, m, std::move(edges));
}

ValidationReport validate(const Game& g) {
  ValidationReport r;
  if (g.winning().empty()) {
    r.violations.push_back("empty winning relation");
  }
  for (size_t i = 1; i < g.winning().size(); ++i) {
    if (g.winning()[i] == g.winning()[i - 1]) {
      r.violations.push_back("duplicate pair (" + std::to_string(g.winning()[i].first) + "," +
                             std::to_string(g.winning()[i].second) + ")");
    }
  }
  for (int i = 0; i < g.left_count(); ++i) {
    if (g.left_adj(i) == 0) r.violations.push_back("surely losing choice Left#" + std::to_string(i));
  }
  for (int j = 0; j < g.right_count(); ++j) {
    if (g.right_adj(j) == 0) r.violations.push_back("surely losing choice Right#" + std::to_string(j));
  }
  r.ok = r.violations.empty();
  return r;
}

int game_size(const Game& g) { return std::max(g.left_count(), g.right_count()); }

Game parse_game(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  int left = -1, right = -1;
  std::vector<Edge> edges;
  while (std::getline(in, line)) {
    ++lineno;
    size_t hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    std::istringstream ls(line);
    std::string word;
    if (!(ls >> word)) continue;
    if (word == "left" || word == "right") {
      long n;
      if (!(ls >> n) || n < 1) throw ParseError(lineno, "expected a positive count after '" + word + "'");
      (word == "left" ? left : right) = static_cast<int>(n);
    } else if (word == "edge") {
      long a, b;
      if (!(ls >> a >> b)) throw ParseError(lineno, "expected two indices after 'edge'");
      if (left < 0 || right < 0) throw ParseError(lineno, "edge before left/right counts");
      if (a < 0 || a >= left) throw ParseError(lineno, "left index " + std::to_string(a) + " out of range");
      if (b < 0 || b >= right) throw ParseError(lineno, "right index " + std::to_string(b) + " out of range");
      edges.emplace_back(static_cast<int>(a), static_cast<int>(b));
    } else {
      throw ParseError(lineno, "unknown directive '" + word + "'");
    }
    std::string extra;
    if (ls >> extra) throw ParseError(lineno, "trailing input '" + extra + "'");
  }
  if (left < 0) throw ParseError(lineno, "missing 'left' header");
  if (right < 0) throw ParseError(lineno, "missing 'right' header");
  Game g(left, right, std::move(edges));
  ValidationReport rep = validate(g);
  if (!rep.ok) {
    std::string msg = "invalid game:";
    for (const auto& v : rep.violations) msg += " " + v + ";";
    throw Error(msg);
  }
  return g;
}

std::string serialize_game(const Game& g) {
  std::ostringstream out;
  out << "left " << g.left_count() << "\n";
  out << "right " << g.right_count() << "\n";
  std::vector<Edge> edges = g.winning();
  std::sort(edges.begin(), edges.end());
  for (const Edge& e : edges) out << "edge " << e.first << " " << e.second << "\n";
  return out.str();
}

std::string game_to_json(const Game& g) {
  nlohmann::json j;
  j["left"] = g.left_count();
  j["right"] = g.right_count();
  auto edges = nlohmann::json::array();
  std::vector<Edge> sorted = g.winning();
  std::sort(sorted.begin(), sorted.end());
  for (const Edge& e : sorted) edges.push_back({e.first, e.second});
  j["edges"] = edges;
  return j.dump();
}

Game game_from_json(const std::string& text) {
  nlohmann::json j = nlohmann::json::parse(text);
  std::vector<Edge> edges;
  for (const auto& e : j.at("edges")) {
    edges.emplace_back(e.at(0).get<int>(), e.at(1).get<int>());
  }
  Game g(j.at("left").get<int>(), j.at("right").get<int>(), std::move(edges));
  ValidationReport rep = validate(g);
  if (!rep.ok) throw Error("invalid game in JSON input");
  return g;
}

}  // namespace wlc
