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

#include "wlc/chain.hpp"

#include <algorithm>
#include <deque>
#include <map>

#include "nlohmann/json.hpp"
#include "wlc/errors.hpp"

namespace wlc {

namespace {

// Merge key of an extended stage. Memoryless protocols merge by the
// canonical image of the partition alone (structural similarity). Protocols
// with memory additionally pin the first-round pair and the memory pairs, so
// two merged states always induce the same continuation law.
std::string chain_state_key(const Stage& s, const Memory& mem, bool with_anchor,
                            const Partition& partition, const RenamingGroup& game_group) {
  int n1 = s.game().left_count();
  size_t n = partition.class_of.size();
  std::vector<uint8_t> best;
  for (const Renaming& e : game_group.elements()) {
    std::vector<int> cls2(n);
    for (size_t c = 0; c < n; ++c) cls2[e.map[c]] = partition.class_of[c];
    std::vector<uint8_t> bytes;
    bytes.reserve(n + 2 + mem.size() * 2);
    std::vector<int> remap(n, -1);
    int next = 0;
    for (size_t c = 0; c < n; ++c) {
      int r = cls2[c];
      if (remap[static_cast<size_t>(r)] < 0) remap[static_cast<size_t>(r)] = next++;
      bytes.push_back(static_cast<uint8_t>(remap[static_cast<size_t>(r)]));
    }
    if (with_anchor) {
      if (!s.history().empty()) {
        auto [a, b] = e.apply_pair(s.history().front().first, n1 + s.history().front().second);
        bytes.push_back(static_cast<uint8_t>(a));
        bytes.push_back(static_cast<uint8_t>(b));
      }
      for (const Edge& p : mem) {
        auto [a, b] = e.apply_pair(p.first, n1 + p.second);
        bytes.push_back(static_cast<uint8_t>(a));
        bytes.push_back(static_cast<uint8_t>(b));
      }
    }
    if (best.empty() || bytes < best) best = std::move(bytes);
  }
  static const char* digits = "0123456789abcdef";
  std::string out = "c:";
  for (uint8_t v : best) {
    out.push_back(digits[v >> 4]);
    out.push_back(digits[v & 15]);
  }
  return out;
}

std::string strict_state_key(const Stage& s, const Memory& mem, const RenamingGroup& game_group) {
  int n1 = s.game().left_count();
  std::vector<uint8_t> best;
  for (const Renaming& e : game_group.elements()) {
    std::vector<uint8_t> bytes;
    bytes.reserve((s.history().size() + mem.size()) * 2);
    for (const Edge& p : s.history()) {
      auto [a, b] = e.apply_pair(p.first, n1 + p.second);
      bytes.push_back(static_cast<uint8_t>(a));
      bytes.push_back(static_cast<uint8_t>(b));
    }
    for (const Edge& p : mem) {
      auto [a, b] = e.apply_pair(p.first, n1 + p.second);
      bytes.push_back(static_cast<uint8_t>(a));
      bytes.push_back(static_cast<uint8_t>(b));
    }
    if (best.empty() || bytes < best) best = std::move(bytes);
  }
  static const char* digits = "0123456789abcdef";
  std::string out = "h:";
  for (uint8_t v : best) {
    out.push_back(digits[v >> 4]);
    out.push_back(digits[v & 15]);
  }
  return out;
}

}  // namespace

StageChain build_chain(const Game& g, const Protocol& pr, const ChainOptions& opts) {
  auto game = std::make_shared<Game>(g);
  RenamingGroup game_group = stage_renaming_group(initial_stage(game), opts.sym);
  StageChain chain;
  std::map<std::string, int> index;

  auto key_of = [&](const Stage& s, const Memory& mem, const Partition& p) {
    if (!opts.merge_by_partition) return strict_state_key(s, mem, game_group);
    return chain_state_key(s, mem, pr.has_memory(), p, game_group);
  };

  Stage start = initial_stage(game);
  {
    Partition p0 = game_group.orbits();
    chain.states.push_back(StageChain::State{key_of(start, {}, p0), start, Memory{}, {}, Rat(0), false});
    index[chain.states[0].key] = 0;
  }

  std::deque<int> queue{0};
  while (!queue.empty()) {
    int si = queue.front();
    queue.pop_front();
    Stage rep = chain.states[static_cast<size_t>(si)].rep;
    Memory mem = chain.states[static_cast<size_t>(si)].mem;
    if (!opts.merge_by_partition && opts.depth_cap >= 0 && rep.round() >= opts.depth_cap) {
      chain.states[static_cast<size_t>(si)].truncated = true;
      continue;
    }
    ChoiceDistribution dl = pr.distribution(rep, Side::Left, mem);
    ChoiceDistribution dr = pr.distribution(rep, Side::Right, mem);
    Rat total(0);
    std::map<int, Rat> out;
    Rat win(0);
    for (int l = 0; l < g.left_count(); ++l) {
      if (dl.weights[static_cast<size_t>(l)] == 0) continue;
      for (int r = 0; r < g.right_count(); ++r) {
        if (dr.weights[static_cast<size_t>(r)] == 0) continue;
        Rat p = dl.weights[static_cast<size_t>(l)] * dr.weights[static_cast<size_t>(r)];
        total += p;
        if (g.is_winning(l, r)) {
          win += p;
          continue;
        }
        for (const auto& [bp, mem2] : pr.memory_branches(rep, mem, Edge{l, r})) {
          Stage succ = wlc::advance(rep, Edge{l, r}).first;
          RenamingGroup sg = stage_renaming_group(succ, opts.sym, mem2);
          std::string key = key_of(succ, mem2, sg.orbits());
          auto it = index.find(key);
          int ti;
          if (it == index.end()) {
            ti = static_cast<int>(chain.states.size());
            if (ti >= opts.max_states) {
              throw StateExplosion("chain closure exceeded max_states");
            }
            chain.states.push_back(StageChain::State{key, std::move(succ), mem2, {}, Rat(0), false});
            index[key] = ti;
            queue.push_back(ti);
          } else {
            ti = it->second;
          }
          Rat mass = p * bp;
          out[ti] += mass;
        }
      }
    }
    if (total != 1) throw Error("protocol distributions do not multiply to a stochastic row");
    auto& st = chain.states[static_cast<size_t>(si)];
    st.win = win;
    st.out.assign(out.begin(), out.end());
  }
  return chain;
}

std::vector<MaybeRat> exact_ect_per_state(const StageChain& chain) {
  size_t n = chain.states.size();
  // Which states reach WIN in the positive-probability support.
  std::vector<std::vector<int>> rev(n);
  std::vector<char> reaches(n, 0);
  std::deque<int> queue;
  for (size_t i = 0; i < n; ++i) {
    for (const auto& [t, p] : chain.states[i].out) {
      if (p > 0) rev[static_cast<size_t>(t)].push_back(static_cast<int>(i));
    }
    if (chain.states[i].win > 0) {
      reaches[i] = 1;
      queue.push_back(static_cast<int>(i));
    }
  }
  while (!queue.empty()) {
    int v = queue.front();
    queue.pop_front();
    for (int u : rev[static_cast<size_t>(v)]) {
      if (!reaches[static_cast<size_t>(u)]) {
        reaches[static_cast<size_t>(u)] = 1;
        queue.push_back(u);
      }
    }
  }
  std::vector<MaybeRat> result(n);
  std::vector<int> solve_idx(n, -1);
  std::vector<int> order;
  for (size_t i = 0; i < n; ++i) {
    if (reaches[i]) {
      solve_idx[i] = static_cast<int>(order.size());
      order.push_back(static_cast<int>(i));
    }
  }
  size_t m = order.size();
  if (m > 0) {
    // (I - Q) E = 1 over the states that reach WIN. A transition into a
    // no-win state contributes infinite expectation, so such rows only arise
    // when every state in them is excluded; here excluded targets simply do
    // not appear (their mass makes E infinite only if reachable, handled by
    // reaches[] above: a reaching state never feeds an excluded one with
    // positive probability unless the excluded one loops forever, in which
    // case the source state's expectation is infinite too and it would not
    // be marked reaching -- contradiction; so drop is safe).
    std::vector<std::vector<Rat>> a(m, std::vector<Rat>(m + 1, Rat(0)));
    for (size_t k = 0; k < m; ++k) {
      int i = order[k];
      a[k][k] = 1;
      a[k][m] = 1;
      for (const auto& [t, p] : chain.states[static_cast<size_t>(i)].out) {
        if (solve_idx[static_cast<size_t>(t)] >= 0) {
          a[k][static_cast<size_t>(solve_idx[static_cast<size_t>(t)])] -= p;
        } else {
          throw Error("internal: reaching state feeds a non-reaching state");
        }
      }
    }
    // Gaussian elimination, exact.
    for (size_t col = 0; col < m; ++col) {
      size_t piv = col;
      while (piv < m && a[piv][col] == 0) ++piv;
      if (piv == m) throw Error("singular chain system");
      std::swap(a[piv], a[col]);
      Rat inv = a[col][col];
      for (size_t j = col; j <= m; ++j) a[col][j] /= inv;
      for (size_t row = 0; row < m; ++row) {
        if (row == col || a[row][col] == 0) continue;
        Rat f = a[row][col];
        for (size_t j = col; j <= m; ++j) a[row][j] -= f * a[col][j];
      }
    }
    for (size_t k = 0; k < m; ++k) result[static_cast<size_t>(order[k])] = a[k][m];
  }
  return result;
}

MaybeRat exact_ect(const StageChain& chain) {
  for (const auto& st : chain.states) {
    if (st.truncated) throw Error("strict-mode chain was depth-capped; ECT undefined");
  }
  return exact_ect_per_state(chain)[0];
}

MaybeRat exact_ect(const Game& g, const Protocol& pr, const ChainOptions& opts) {
  return exact_ect(build_chain(g, pr, opts));
}

MaybeInt exact_gct(const StageChain& chain) {
  size_t n = chain.states.size();
  // Longest path in the positive-support digraph; cycle = no guarantee.
  std::vector<int> depth(n, -1);
  std::vector<char> on_stack(n, 0), done(n, 0);
  // iterative DFS computing longest path, detecting cycles
  struct Frame {
    int v;
    size_t next = 0;
  };
  std::vector<Frame> stack{{0, 0}};
  on_stack[0] = 1;
  bool cyclic = false;
  while (!stack.empty() && !cyclic) {
    Frame& f = stack.back();
    const auto& out = chain.states[static_cast<size_t>(f.v)].out;
    if (f.next < out.size()) {
      int t = out[f.next++].first;
      if (on_stack[static_cast<size_t>(t)]) {
        cyclic = true;
        break;
      }
      if (!done[static_cast<size_t>(t)]) {
        on_stack[static_cast<size_t>(t)] = 1;
        stack.push_back({t, 0});
      }
    } else {
      int best = 0;
      for (const auto& [t, p] : out) {
        (void)p;
        best = std::max(best, 1 + depth[static_cast<size_t>(t)]);
      }
      depth[static_cast<size_t>(f.v)] = best;
      done[static_cast<size_t>(f.v)] = 1;
      on_stack[static_cast<size_t>(f.v)] = 0;
      stack.pop_back();
    }
  }
  if (cyclic) return std::nullopt;
  return depth[0] + 1;
}

MaybeInt exact_gct(const Game& g, const Protocol& pr, const ChainOptions& opts) {
  return exact_gct(build_chain(g, pr, opts));
}

Rat oscp(const Game& g, const Protocol& pr) {
  Stage s = initial_stage(g);
  ChoiceDistribution dl = pr.distribution(s, Side::Left, {});
  ChoiceDistribution dr = pr.distribution(s, Side::Right, {});
  Rat p(0);
  for (const Edge& e : g.winning()) {
    p += dl.weights[static_cast<size_t>(e.first)] * dr.weights[static_cast<size_t>(e.second)];
  }
  return p;
}

std::string chain_to_json(const StageChain& chain) {
  nlohmann::json j;
  j["start"] = 0;
  nlohmann::json states = nlohmann::json::array();
  for (const auto& st : chain.states) {
    nlohmann::json s;
    s["key"] = st.key;
    s["round"] = st.rep.round();
    nlohmann::json out = nlohmann::json::array();
    for (const auto& [t, p] : st.out) out.push_back({t, rat_str(p)});
    s["transitions"] = out;
    s["win"] = rat_str(st.win);
    states.push_back(s);
  }
  j["states"] = states;
  return j.dump(2);
}

}  // namespace wlc
