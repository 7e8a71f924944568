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

#include "wlc/protocol.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include "nlohmann/json.hpp"
#include "wlc/errors.hpp"

namespace wlc {

namespace {

ChoiceDistribution uniform_over(Side player, int count, const std::vector<int>& support) {
  ChoiceDistribution d{player, std::vector<Rat>(static_cast<size_t>(count), Rat(0))};
  Rat w(1, static_cast<unsigned long>(support.size()));
  w.canonicalize();
  for (int i : support) d.weights[static_cast<size_t>(i)] = w;
  return d;
}

std::vector<int> all_indices(int count) {
  std::vector<int> v(static_cast<size_t>(count));
  for (int i = 0; i < count; ++i) v[static_cast<size_t>(i)] = i;
  return v;
}

class UniformProtocol final : public Protocol {
 public:
  std::string name() const override { return "uniform"; }
  ChoiceDistribution distribution(const Stage& s, Side player, const Memory&) const override {
    int count = player == Side::Left ? s.game().left_count() : s.game().right_count();
    return uniform_over(player, count, all_indices(count));
  }
};

class WmProtocol final : public Protocol {
 public:
  std::string name() const override { return "wm"; }
  bool has_memory() const override { return true; }

  ChoiceDistribution distribution(const Stage& s, Side player, const Memory& mem) const override {
    const Game& g = s.game();
    int count = player == Side::Left ? g.left_count() : g.right_count();
    if (s.history().empty()) return uniform_over(player, count, all_indices(count));
    Edge first = s.history().front();
    int own = player == Side::Left ? first.first : first.second;
    std::vector<int> partners = coordinating_choices(g, player, first);
    if (partners.empty()) throw NoCoordinatingChoice("opponent's first choice has no partner");
    ChoiceDistribution d{player, std::vector<Rat>(static_cast<size_t>(count), Rat(0))};
    d.weights[static_cast<size_t>(own)] = Rat(1, 2);
    if (!mem.empty()) {
      int committed = player == Side::Left ? mem.front().first : mem.front().second;
      d.weights[static_cast<size_t>(committed)] += Rat(1, 2);
    } else if (partners.size() == 1) {
      d.weights[static_cast<size_t>(partners[0])] += Rat(1, 2);
    } else {
      // No commitment drawn yet: the mixture over candidate commitments.
      Rat w(1, 2 * static_cast<unsigned long>(partners.size()));
      w.canonicalize();
      for (int c : partners) d.weights[static_cast<size_t>(c)] += w;
    }
    return d;
  }

  std::vector<std::pair<Rat, Memory>> memory_branches(const Stage& s, const Memory& mem,
                                                      Edge played) const override {
    if (!s.history().empty()) return {{Rat(1), mem}};
    // Round one just resolved: draw one coordinating choice per player.
    const Game& g = s.game();
    std::vector<int> lc = coordinating_choices(g, Side::Left, played);
    std::vector<int> rc = coordinating_choices(g, Side::Right, played);
    if (lc.empty() || rc.empty()) throw NoCoordinatingChoice("first-round choice has no partner");
    std::vector<std::pair<Rat, Memory>> out;
    Rat w(1, static_cast<unsigned long>(lc.size() * rc.size()));
    w.canonicalize();
    for (int a : lc)
      for (int b : rc) out.push_back({w, Memory{Edge{a, b}}});
    return out;
  }

 private:
  // Choices of `player` coordinating with the opponent's round-one choice.
  static std::vector<int> coordinating_choices(const Game& g, Side player, Edge first) {
    std::vector<int> out;
    if (player == Side::Left) {
      for (int i = 0; i < g.left_count(); ++i)
        if (g.is_winning(i, first.second)) out.push_back(i);
    } else {
      for (int j = 0; j < g.right_count(); ++j)
        if (g.is_winning(first.first, j)) out.push_back(j);
    }
    return out;
  }
};

class LaProtocol final : public Protocol {
 public:
  explicit LaProtocol(SymmetryOptions opts) : opts_(opts) {}
  std::string name() const override { return "la"; }

  ChoiceDistribution distribution(const Stage& s, Side player, const Memory&) const override {
    const Game& g = s.game();
    int count = player == Side::Left ? g.left_count() : g.right_count();
    std::string cache_key = serialize_game(g) + "|" + format_trace(s) +
                            (player == Side::Left ? "|L" : "|R");
    {
      std::scoped_lock lock(mu_);
      auto it = cache_.find(cache_key);
      if (it != cache_.end()) return it->second;
    }
    RenamingGroup group = stage_renaming_group(s, opts_);
    Partition current = group.orbits();
    std::vector<int> allowed;
    for (int own = 0; own < count; ++own) {
      bool avoid = false;
      int reply_count = player == Side::Left ? g.right_count() : g.left_count();
      for (int reply = 0; reply < reply_count && !avoid; ++reply) {
        Edge pair = player == Side::Left ? Edge{own, reply} : Edge{reply, own};
        if (g.is_winning(pair.first, pair.second)) continue;
        if (filter_group(group, g, pair).orbits() == current) avoid = true;
      }
      if (!avoid) allowed.push_back(own);
    }
    if (allowed.empty()) allowed = all_indices(count);
    ChoiceDistribution d = uniform_over(player, count, allowed);
    std::scoped_lock lock(mu_);
    if (cache_.size() > kCacheCap) cache_.clear();
    cache_.emplace(std::move(cache_key), d);
    return d;
  }

 private:
  static constexpr size_t kCacheCap = 1 << 20;
  SymmetryOptions opts_;
  mutable std::mutex mu_;
  mutable std::map<std::string, ChoiceDistribution> cache_;
};

class ClassWeightProtocol final : public Protocol {
 public:
  ClassWeightProtocol(ClassWeightTable table, SymmetryOptions opts)
      : table_(std::move(table)), opts_(opts) {}
  std::string name() const override { return "table"; }

  ChoiceDistribution distribution(const Stage& s, Side player, const Memory&) const override {
    const Game& g = s.game();
    StateKeyed sk = state_key_with_classes(s, game_group(g), opts_);
    auto it = table_.states.find(sk.key);
    if (it == table_.states.end()) {
      throw MissingStageEntry("no table entry for state " + sk.key);
    }
    const auto& entry = it->second;
    int count = player == Side::Left ? g.left_count() : g.right_count();
    ChoiceDistribution d{player, std::vector<Rat>(static_cast<size_t>(count), Rat(0))};
    Rat total(0);
    // with a swapped canonicalization this player's choices sit in the other
    // side's canonical slots
    bool read_left = (player == Side::Left) != sk.swapped;
    for (int i = 0; i < count; ++i) {
      int global = g.global_id(player, i);
      int lit = sk.partition.class_of[static_cast<size_t>(global)];
      int canon = sk.canonical_class_of[static_cast<size_t>(lit)];
      const auto& weights = read_left ? entry.left : entry.right;
      if (canon >= static_cast<int>(weights.size())) {
        throw MissingStageEntry("table entry has too few classes for state " + sk.key);
      }
      d.weights[static_cast<size_t>(i)] = weights[static_cast<size_t>(canon)];
      total += d.weights[static_cast<size_t>(i)];
    }
    if (total != 1) throw Error("class weights do not form a distribution for state " + sk.key);
    return d;
  }

 private:
  const RenamingGroup& game_group(const Game& g) const {
    std::string key = serialize_game(g);
    std::scoped_lock lock(mu_);
    auto it = groups_.find(key);
    if (it == groups_.end()) {
      it = groups_.emplace(key, stage_renaming_group(initial_stage(g), opts_)).first;
    }
    return it->second;
  }

  ClassWeightTable table_;
  SymmetryOptions opts_;
  mutable std::mutex mu_;
  mutable std::map<std::string, RenamingGroup> groups_;
};

}  // namespace

StateKeyed state_key_with_classes(const Stage& s, const RenamingGroup& game_group,
                                  const SymmetryOptions& opts) {
  StateKeyed out;
  out.partition = structural_classes(s, opts);
  size_t n = out.partition.class_of.size();
  std::vector<uint8_t> best;
  std::vector<int> best_map;
  bool best_swap = false;
  for (const Renaming& e : game_group.elements()) {
    std::vector<int> cls2(n);
    for (size_t c = 0; c < n; ++c) cls2[e.map[c]] = out.partition.class_of[c];
    std::vector<uint8_t> bytes(n);
    std::vector<int> remap(n, -1);
    int next = 0;
    for (size_t c = 0; c < n; ++c) {
      int r = cls2[c];
      if (remap[static_cast<size_t>(r)] < 0) remap[static_cast<size_t>(r)] = next++;
      bytes[c] = static_cast<uint8_t>(remap[static_cast<size_t>(r)]);
    }
    if (best.empty() || bytes < best) {
      best = std::move(bytes);
      best_map.assign(remap.begin(), remap.begin() + out.partition.num_classes);
      best_swap = e.swap;
    }
  }
  out.swapped = best_swap;
  static const char* digits = "0123456789abcdef";
  out.key = "q:";
  for (uint8_t v : best) {
    out.key.push_back(digits[v >> 4]);
    out.key.push_back(digits[v & 15]);
  }
  out.canonical_class_of = std::move(best_map);
  return out;
}

std::unique_ptr<Protocol> make_uniform_protocol() { return std::make_unique<UniformProtocol>(); }
std::unique_ptr<Protocol> make_wm_protocol() { return std::make_unique<WmProtocol>(); }
std::unique_ptr<Protocol> make_la_protocol(SymmetryOptions opts) {
  return std::make_unique<LaProtocol>(opts);
}
std::unique_ptr<Protocol> make_class_weight_protocol(ClassWeightTable table, SymmetryOptions opts) {
  return std::make_unique<ClassWeightProtocol>(std::move(table), opts);
}

std::string ClassWeightTable::to_json() const {
  nlohmann::json j;
  j["format"] = "wlc-class-weights";
  nlohmann::json states = nlohmann::json::object();
  for (const auto& [key, entry] : this->states) {
    nlohmann::json e;
    auto dump = [](const std::vector<Rat>& v) {
      nlohmann::json a = nlohmann::json::array();
      for (const Rat& r : v) a.push_back(rat_str(r));
      return a;
    };
    e["left"] = dump(entry.left);
    e["right"] = dump(entry.right);
    states[key] = e;
  }
  j["states"] = states;
  return j.dump(2);
}

ClassWeightTable ClassWeightTable::from_json(const std::string& text) {
  nlohmann::json j = nlohmann::json::parse(text);
  ClassWeightTable t;
  for (const auto& [key, e] : j.at("states").items()) {
    ClassWeightTable::Entry entry;
    for (const auto& w : e.at("left")) entry.left.push_back(rat_parse(w.get<std::string>()));
    for (const auto& w : e.at("right")) entry.right.push_back(rat_parse(w.get<std::string>()));
    t.states[key] = std::move(entry);
  }
  return t;
}

std::unique_ptr<Protocol> make_protocol(const std::string& name, SymmetryOptions opts) {
  if (name == "uniform") return make_uniform_protocol();
  if (name == "wm") return make_wm_protocol();
  if (name == "la") return make_la_protocol(opts);
  if (name.rfind("table:", 0) == 0) {
    std::ifstream in(name.substr(6));
    if (!in) throw Error("cannot open table file " + name.substr(6));
    std::stringstream buf;
    buf << in.rdbuf();
    return make_class_weight_protocol(ClassWeightTable::from_json(buf.str()), opts);
  }
  throw Error("unknown protocol '" + name + "' (expected uniform, wm, la, or table:<file>)");
}

bool structurality_check(const Protocol& pr, const Stage& s, const Memory& mem,
                         const SymmetryOptions& opts) {
  const Game& g = s.game();
  ChoiceDistribution dl = pr.distribution(s, Side::Left, mem);
  ChoiceDistribution dr = pr.distribution(s, Side::Right, mem);
  auto weight = [&](int global) -> const Rat& {
    return g.is_left(global) ? dl.weights[static_cast<size_t>(global)]
                             : dr.weights[static_cast<size_t>(global - g.left_count())];
  };
  RenamingGroup group = stage_renaming_group(s, opts, mem);
  for (const Renaming& e : group.elements()) {
    for (int c = 0; c < g.choice_count(); ++c) {
      if (weight(c) != weight(e.apply(c))) return false;
    }
  }
  return true;
}

}  // namespace wlc
