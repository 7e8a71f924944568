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

#include "wlc/symmetry.hpp"

#include <algorithm>
#include <numeric>
#include <sstream>

#include "wlc/errors.hpp"

namespace wlc {

namespace {

// Side-agnostic per-choice invariant: degree plus sorted neighbor degrees.
std::vector<uint64_t> choice_invariants(const Game& g) {
  int n1 = g.left_count(), n2 = g.right_count();
  std::vector<uint64_t> inv(static_cast<size_t>(n1 + n2));
  auto hash_for = [&](Side s, int idx) {
    std::vector<int> nbr_deg;
    if (s == Side::Left) {
      uint32_t m = g.left_adj(idx);
      for (int j = 0; j < n2; ++j)
        if ((m >> j) & 1u) nbr_deg.push_back(g.degree(Side::Right, j));
    } else {
      uint32_t m = g.right_adj(idx);
      for (int i = 0; i < n1; ++i)
        if ((m >> i) & 1u) nbr_deg.push_back(g.degree(Side::Left, i));
    }
    std::sort(nbr_deg.begin(), nbr_deg.end());
    uint64_t h = 1469598103934665603ULL;
    auto mix = [&h](uint64_t v) { h ^= v + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2); };
    mix(static_cast<uint64_t>(nbr_deg.size()));
    for (int d : nbr_deg) mix(static_cast<uint64_t>(d));
    return h;
  };
  for (int i = 0; i < n1; ++i) inv[static_cast<size_t>(i)] = hash_for(Side::Left, i);
  for (int j = 0; j < n2; ++j) inv[static_cast<size_t>(n1 + j)] = hash_for(Side::Right, j);
  return inv;
}

// Backtracking over candidate bijections. Collects the full group or stops
// at the first hit, optionally constrained to carry one partition onto
// another.
class MapSearch {
 public:
  MapSearch(const Game& g, const SymmetryOptions& opts)
      : g_(g),
        n1_(g.left_count()),
        n2_(g.right_count()),
        n_(n1_ + n2_),
        opts_(opts),
        inv_(choice_invariants(g)) {}

  void set_partition_constraint(const Partition& from, const Partition& to) {
    from_class_ = &from;
    to_class_ = &to;
  }

  // forced: list of (choice, image) requirements (already swap-adjusted).
  // Returns false if constraints conflict before any search.
  bool run(bool swap, const std::vector<std::pair<int, int>>& forced,
           std::vector<Renaming>* collect, std::optional<Renaming>* first) {
    if (swap && n1_ != n2_) return true;  // no swap renamings exist
    if (from_class_ && from_class_->num_classes != to_class_->num_classes) return true;
    swap_ = swap;
    collect_ = collect;
    first_ = first;
    img_.assign(static_cast<size_t>(n_), -1);
    pre_.assign(static_cast<size_t>(n_), -1);
    if (from_class_) {
      class_map_.assign(static_cast<size_t>(from_class_->num_classes), -1);
      class_used_.assign(static_cast<size_t>(to_class_->num_classes), false);
      class_count_.assign(static_cast<size_t>(from_class_->num_classes), 0);
      build_class_sizes();
    }
    for (auto [c, t] : forced) {
      if (!try_assign(c, t)) return true;  // contradictory; nothing on this branch
    }
    order_.clear();
    for (int k = 0; k < std::max(n1_, n2_); ++k) {
      if (k < n1_ && img_[static_cast<size_t>(k)] < 0) order_.push_back(k);
      if (k < n2_ && img_[static_cast<size_t>(n1_ + k)] < 0) order_.push_back(n1_ + k);
    }
    rec(0);
    return true;
  }

  uint64_t nodes() const { return nodes_; }

 private:
  bool is_left(int c) const { return c < n1_; }

  bool edge_in_image(int gl, int gr) const {
    int il = img_[static_cast<size_t>(gl)];
    int ir = img_[static_cast<size_t>(gr)];
    if (!swap_) return g_.is_winning(il, ir - n1_);
    return g_.is_winning(ir, il - n1_);
  }

  void build_class_sizes() {
    auto sizes = [&](const Partition& p, std::vector<std::pair<int, int>>& out) {
      out.assign(static_cast<size_t>(p.num_classes), {0, 0});
      for (int c = 0; c < n_; ++c) {
        auto& s = out[static_cast<size_t>(p.class_of[static_cast<size_t>(c)])];
        (is_left(c) ? s.first : s.second)++;
      }
    };
    sizes(*from_class_, from_sizes_);
    sizes(*to_class_, to_sizes_);
  }

  bool class_ok(int c, int t) const {
    if (!from_class_) return true;
    int fk = from_class_->class_of[static_cast<size_t>(c)];
    int tk = to_class_->class_of[static_cast<size_t>(t)];
    int mapped = class_map_[static_cast<size_t>(fk)];
    if (mapped >= 0) return mapped == tk;
    if (class_used_[static_cast<size_t>(tk)]) return false;
    auto fs = from_sizes_[static_cast<size_t>(fk)];
    auto ts = to_sizes_[static_cast<size_t>(tk)];
    if (swap_) std::swap(ts.first, ts.second);
    return fs == ts;
  }

  // Assign with all checks; returns false (and rolls back nothing) on clash.
  bool try_assign(int c, int t) {
    if (img_[static_cast<size_t>(c)] >= 0) return img_[static_cast<size_t>(c)] == t;
    if (pre_[static_cast<size_t>(t)] >= 0) return false;
    bool target_left = swap_ ? !is_left(c) : is_left(c);
    if (is_left(t) != target_left) return false;
    if (inv_[static_cast<size_t>(c)] != inv_[static_cast<size_t>(t)]) return false;
    if (!class_ok(c, t)) return false;
    // adjacency vs every assigned choice of the other side
    if (is_left(c)) {
      for (int gr = n1_; gr < n_; ++gr) {
        if (img_[static_cast<size_t>(gr)] < 0) continue;
        img_[static_cast<size_t>(c)] = t;
        bool ok = g_.is_winning(c, gr - n1_) == edge_in_image(c, gr);
        img_[static_cast<size_t>(c)] = -1;
        if (!ok) return false;
      }
    } else {
      for (int gl = 0; gl < n1_; ++gl) {
        if (img_[static_cast<size_t>(gl)] < 0) continue;
        img_[static_cast<size_t>(c)] = t;
        bool ok = g_.is_winning(gl, c - n1_) == edge_in_image(gl, c);
        img_[static_cast<size_t>(c)] = -1;
        if (!ok) return false;
      }
    }
    img_[static_cast<size_t>(c)] = t;
    pre_[static_cast<size_t>(t)] = c;
    if (from_class_) {
      int fk = from_class_->class_of[static_cast<size_t>(c)];
      if (class_map_[static_cast<size_t>(fk)] < 0) {
        int tk = to_class_->class_of[static_cast<size_t>(t)];
        class_map_[static_cast<size_t>(fk)] = tk;
        class_used_[static_cast<size_t>(tk)] = true;
      }
      class_count_[static_cast<size_t>(fk)]++;
    }
    return true;
  }

  void unassign(int c) {
    int t = img_[static_cast<size_t>(c)];
    img_[static_cast<size_t>(c)] = -1;
    pre_[static_cast<size_t>(t)] = -1;
    if (from_class_) {
      int fk = from_class_->class_of[static_cast<size_t>(c)];
      if (--class_count_[static_cast<size_t>(fk)] == 0) {
        int tk = class_map_[static_cast<size_t>(fk)];
        class_map_[static_cast<size_t>(fk)] = -1;
        class_used_[static_cast<size_t>(tk)] = false;
      }
    }
  }

  bool done() const { return first_ && first_->has_value(); }

  void rec(size_t k) {
    if (done()) return;
    if (k == order_.size()) {
      Renaming r;
      r.swap = swap_;
      r.map.resize(static_cast<size_t>(n_));
      for (int c = 0; c < n_; ++c) r.map[static_cast<size_t>(c)] = static_cast<uint8_t>(img_[static_cast<size_t>(c)]);
      if (first_) {
        *first_ = std::move(r);
      } else {
        collect_->push_back(std::move(r));
        if (collect_->size() > opts_.max_elements) {
          throw SearchBudgetExceeded("renaming group exceeds max_elements");
        }
      }
      return;
    }
    int c = order_[k];
    int lo = swap_ == is_left(c) ? n1_ : 0;
    int hi = swap_ == is_left(c) ? n_ : n1_;
    for (int t = lo; t < hi; ++t) {
      if (try_assign(c, t)) {
        if (++nodes_ > opts_.node_budget) {
          unassign(c);
          throw SearchBudgetExceeded("renaming search exceeded node budget");
        }
        rec(k + 1);
        unassign(c);
        if (done()) return;
      }
    }
  }

  const Game& g_;
  int n1_, n2_, n_;
  SymmetryOptions opts_;
  std::vector<uint64_t> inv_;
  bool swap_ = false;
  std::vector<int> img_, pre_;
  std::vector<int> order_;
  std::vector<Renaming>* collect_ = nullptr;
  std::optional<Renaming>* first_ = nullptr;
  uint64_t nodes_ = 0;
  const Partition* from_class_ = nullptr;
  const Partition* to_class_ = nullptr;
  std::vector<int> class_map_;
  std::vector<char> class_used_;
  std::vector<int> class_count_;
  std::vector<std::pair<int, int>> from_sizes_, to_sizes_;
};

std::vector<std::pair<int, int>> history_constraints(const Stage& s, bool swap,
                                                     const std::vector<Edge>& extra) {
  int n1 = s.game().left_count();
  std::vector<std::pair<int, int>> forced;
  auto add = [&](const Edge& p) {
    int gl = p.first, gr = n1 + p.second;
    if (swap) {
      forced.emplace_back(gl, gr);
      forced.emplace_back(gr, gl);
    } else {
      forced.emplace_back(gl, gl);
      forced.emplace_back(gr, gr);
    }
  };
  for (const Edge& p : s.history()) add(p);
  for (const Edge& p : extra) add(p);
  return forced;
}

Partition normalize_classes(const std::vector<int>& raw) {
  Partition p;
  p.class_of.assign(raw.size(), -1);
  std::vector<int> remap(raw.size(), -1);
  int next = 0;
  for (size_t c = 0; c < raw.size(); ++c) {
    int r = raw[c];
    if (remap[static_cast<size_t>(r)] < 0) remap[static_cast<size_t>(r)] = next++;
    p.class_of[c] = remap[static_cast<size_t>(r)];
  }
  p.num_classes = next;
  return p;
}

struct UnionFind {
  std::vector<int> parent;
  explicit UnionFind(size_t n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
  int find(int x) {
    while (parent[static_cast<size_t>(x)] != x) {
      parent[static_cast<size_t>(x)] = parent[static_cast<size_t>(parent[static_cast<size_t>(x)])];
      x = parent[static_cast<size_t>(x)];
    }
    return x;
  }
  void unite(int a, int b) {
    a = find(a);
    b = find(b);
    if (a != b) parent[static_cast<size_t>(std::max(a, b))] = std::min(a, b);
  }
};

}  // namespace

Renaming identity_renaming(int n) {
  Renaming r;
  r.map.resize(static_cast<size_t>(n));
  for (int i = 0; i < n; ++i) r.map[static_cast<size_t>(i)] = static_cast<uint8_t>(i);
  return r;
}

Renaming compose(const Renaming& a, const Renaming& b) {
  Renaming r;
  r.swap = a.swap != b.swap;
  r.map.resize(b.map.size());
  for (size_t i = 0; i < b.map.size(); ++i) r.map[i] = a.map[b.map[i]];
  return r;
}

Renaming inverse(const Renaming& a) {
  Renaming r;
  r.swap = a.swap;
  r.map.resize(a.map.size());
  for (size_t i = 0; i < a.map.size(); ++i) r.map[a.map[i]] = static_cast<uint8_t>(i);
  return r;
}

std::vector<std::vector<int>> Partition::classes() const {
  std::vector<std::vector<int>> out(static_cast<size_t>(num_classes));
  for (size_t c = 0; c < class_of.size(); ++c) {
    out[static_cast<size_t>(class_of[c])].push_back(static_cast<int>(c));
  }
  return out;
}

Partition RenamingGroup::orbits() const {
  UnionFind uf(static_cast<size_t>(n_));
  for (const Renaming& e : elements_) {
    for (int c = 0; c < n_; ++c) uf.unite(c, e.apply(c));
  }
  std::vector<int> raw(static_cast<size_t>(n_));
  for (int c = 0; c < n_; ++c) raw[static_cast<size_t>(c)] = uf.find(c);
  return normalize_classes(raw);
}

bool RenamingGroup::contains(const Renaming& r) const {
  return std::find(elements_.begin(), elements_.end(), r) != elements_.end();
}

RenamingGroup stage_renaming_group(const Stage& s, const SymmetryOptions& opts,
                                   const std::vector<Edge>& extra_pairs) {
  std::vector<Renaming> elements;
  MapSearch search(s.game(), opts);
  for (bool swap : {false, true}) {
    search.run(swap, history_constraints(s, swap, extra_pairs), &elements, nullptr);
  }
  return RenamingGroup(s.game().choice_count(), std::move(elements));
}

RenamingGroup filter_group(const RenamingGroup& g, const Game& game, Edge pair) {
  int gl = pair.first, gr = game.left_count() + pair.second;
  std::vector<Renaming> kept;
  for (const Renaming& e : g.elements()) {
    if (e.apply_pair(gl, gr) == std::pair<int, int>{gl, gr}) kept.push_back(e);
  }
  return RenamingGroup(g.choice_count(), std::move(kept));
}

Partition structural_classes(const Stage& s, const SymmetryOptions& opts) {
  return stage_renaming_group(s, opts).orbits();
}

std::vector<int> focal_points(const Game& g, const Partition& p) {
  std::vector<int> out;
  for (const auto& cls : p.classes()) {
    if (cls.size() == 1) {
      out.push_back(cls[0]);
    } else if (cls.size() == 2 && g.is_left(cls[0]) && !g.is_left(cls[1]) &&
               g.is_winning(cls[0], cls[1] - g.left_count())) {
      out.push_back(cls[0]);
      out.push_back(cls[1]);
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<int> focal_points(const Stage& s, const SymmetryOptions& opts) {
  return focal_points(s.game(), structural_classes(s, opts));
}

bool are_automorphism_equivalent(const Stage& s1, const Stage& s2, const SymmetryOptions& opts) {
  if (!(s1.game() == s2.game())) throw Error("stages of different games");
  return structural_classes(s1, opts) == structural_classes(s2, opts);
}

std::optional<Renaming> find_partition_map(const Game& g, const Partition& from,
                                           const Partition& to, const SymmetryOptions& opts) {
  std::optional<Renaming> hit;
  MapSearch search(g, opts);
  search.set_partition_constraint(from, to);
  for (bool swap : {false, true}) {
    search.run(swap, {}, nullptr, &hit);
    if (hit) return hit;
  }
  return std::nullopt;
}

std::vector<uint32_t> canonical_bipartite_rows(int n1, int n2, const std::vector<uint32_t>& rows) {
  // column order candidates: degree-ascending, permuting only inside blocks
  // of equal degree (renamings preserve degrees, so the minimum over this
  // restricted set is still a complete invariant)
  std::vector<int> deg(static_cast<size_t>(n2), 0);
  for (int i = 0; i < n1; ++i) {
    for (int j = 0; j < n2; ++j) {
      if ((rows[static_cast<size_t>(i)] >> j) & 1u) deg[static_cast<size_t>(j)]++;
    }
  }
  std::vector<std::vector<int>> blocks;
  {
    std::vector<int> order(static_cast<size_t>(n2));
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](int a, int b) {
      return deg[static_cast<size_t>(a)] != deg[static_cast<size_t>(b)]
                 ? deg[static_cast<size_t>(a)] < deg[static_cast<size_t>(b)]
                 : a < b;
    });
    for (int j : order) {
      if (blocks.empty() || deg[static_cast<size_t>(blocks.back().back())] != deg[static_cast<size_t>(j)]) {
        blocks.push_back({});
      }
      blocks.back().push_back(j);
    }
  }
  std::vector<uint32_t> best;
  std::vector<uint32_t> cur(static_cast<size_t>(n1));
  std::vector<int> cols(static_cast<size_t>(n2));
  for (;;) {
    size_t at = 0;
    for (const auto& b : blocks) {
      for (int j : b) cols[at++] = j;
    }
    for (int i = 0; i < n1; ++i) {
      uint32_t v = 0;
      for (int j = 0; j < n2; ++j) {
        if ((rows[static_cast<size_t>(i)] >> cols[static_cast<size_t>(j)]) & 1u) v |= 1u << j;
      }
      cur[static_cast<size_t>(i)] = v;
    }
    std::sort(cur.begin(), cur.end());
    if (best.empty() || cur < best) best = cur;
    // odometer over the per-block permutations
    int b = static_cast<int>(blocks.size()) - 1;
    while (b >= 0 && !std::next_permutation(blocks[static_cast<size_t>(b)].begin(),
                                            blocks[static_cast<size_t>(b)].end())) {
      --b;
    }
    if (b < 0) break;
  }
  return best;
}

namespace {

std::string rows_to_hex(int n1, int n2, const std::vector<uint32_t>& rows) {
  std::ostringstream out;
  out << "g:" << n1 << "x" << n2 << ":";
  out << std::hex;
  for (size_t i = 0; i < rows.size(); ++i) {
    if (i) out << ".";
    out << rows[i];
  }
  return out.str();
}

}  // namespace

std::string canonical_game_key(const Game& g) {
  int n1 = g.left_count(), n2 = g.right_count();
  if (n2 > 16 || n1 > 16) throw SearchBudgetExceeded("canonical_game_key limited to sides <= 16");
  std::vector<uint32_t> rows(static_cast<size_t>(n1));
  for (int i = 0; i < n1; ++i) rows[static_cast<size_t>(i)] = g.left_adj(i);
  std::vector<uint32_t> trows(static_cast<size_t>(n2));
  for (int j = 0; j < n2; ++j) trows[static_cast<size_t>(j)] = g.right_adj(j);
  if (n1 > n2) return rows_to_hex(n2, n1, canonical_bipartite_rows(n2, n1, trows));
  if (n1 < n2) return rows_to_hex(n1, n2, canonical_bipartite_rows(n1, n2, rows));
  std::vector<uint32_t> a = canonical_bipartite_rows(n1, n2, rows);
  std::vector<uint32_t> b = canonical_bipartite_rows(n2, n1, trows);
  return rows_to_hex(n1, n2, std::min(a, b));
}

namespace {

std::vector<uint8_t> encode_history(const Stage& s, const Renaming& e) {
  int n1 = s.game().left_count();
  std::vector<uint8_t> bytes;
  bytes.reserve(s.history().size() * 2);
  for (const Edge& p : s.history()) {
    auto [a, b] = e.apply_pair(p.first, n1 + p.second);
    bytes.push_back(static_cast<uint8_t>(a));
    bytes.push_back(static_cast<uint8_t>(b));
  }
  return bytes;
}

std::vector<uint8_t> encode_partition(const Partition& p, const Renaming& e) {
  size_t n = p.class_of.size();
  std::vector<int> cls2(n);
  for (size_t c = 0; c < n; ++c) cls2[e.map[c]] = p.class_of[c];
  std::vector<uint8_t> bytes(n);
  std::vector<int> remap(n, -1);
  int next = 0;
  for (size_t c = 0; c < n; ++c) {
    int r = cls2[c];
    if (remap[static_cast<size_t>(r)] < 0) remap[static_cast<size_t>(r)] = next++;
    bytes[c] = static_cast<uint8_t>(remap[static_cast<size_t>(r)]);
  }
  return bytes;
}

std::string hex_bytes(const char* prefix, const std::vector<uint8_t>& b) {
  static const char* digits = "0123456789abcdef";
  std::string out(prefix);
  for (uint8_t v : b) {
    out.push_back(digits[v >> 4]);
    out.push_back(digits[v & 15]);
  }
  return out;
}

}  // namespace

std::string canonical_stage_key(const Stage& s, const RenamingGroup& game_group) {
  std::vector<uint8_t> best;
  bool have = false;
  for (const Renaming& e : game_group.elements()) {
    std::vector<uint8_t> enc = encode_history(s, e);
    if (!have || enc < best) {
      best = std::move(enc);
      have = true;
    }
  }
  return hex_bytes("s:", best);
}

std::string canonical_stage_key(const Stage& s, const SymmetryOptions& opts) {
  return canonical_stage_key(s, stage_renaming_group(initial_stage(s.game_ptr()), opts));
}

std::string canonical_state_key(const Stage& s, const RenamingGroup& game_group,
                                const SymmetryOptions& opts) {
  Partition p = structural_classes(s, opts);
  std::vector<uint8_t> best;
  bool have = false;
  for (const Renaming& e : game_group.elements()) {
    std::vector<uint8_t> enc = encode_partition(p, e);
    if (!have || enc < best) {
      best = std::move(enc);
      have = true;
    }
  }
  return hex_bytes("q:", best);
}

std::string canonical_state_key(const Stage& s, const SymmetryOptions& opts) {
  return canonical_state_key(s, stage_renaming_group(initial_stage(s.game_ptr()), opts), opts);
}

std::string format_partition(const Game& g, const Partition& p) {
  std::ostringstream out;
  bool first_cls = true;
  for (const auto& cls : p.classes()) {
    if (!first_cls) out << " ";
    first_cls = false;
    out << "{";
    for (size_t i = 0; i < cls.size(); ++i) {
      if (i) out << ",";
      out << g.choice_name(cls[i]);
    }
    out << "}";
  }
  return out.str();
}

std::string partition_signature(const Game& g, const Partition& p) {
  int n1 = g.left_count();
  int k = p.num_classes;
  auto cls = p.classes();
  auto build = [&](bool transposed) {
    std::vector<std::pair<int, int>> base(static_cast<size_t>(k), {0, 0});
    for (size_t c = 0; c < p.class_of.size(); ++c) {
      auto& b = base[static_cast<size_t>(p.class_of[c])];
      bool left = static_cast<int>(c) < n1;
      if (transposed) left = !left;
      (left ? b.first : b.second)++;
    }
    // edge counts between class pairs, ordered (left-part of a, right-part of b)
    std::vector<std::vector<int>> cnt(static_cast<size_t>(k), std::vector<int>(static_cast<size_t>(k), 0));
    for (const Edge& e : g.winning()) {
      int ka = p.class_of[static_cast<size_t>(e.first)];
      int kb = p.class_of[static_cast<size_t>(n1 + e.second)];
      if (!transposed) {
        cnt[static_cast<size_t>(ka)][static_cast<size_t>(kb)]++;
      } else {
        cnt[static_cast<size_t>(kb)][static_cast<size_t>(ka)]++;
      }
    }
    std::vector<std::string> feats;
    for (int a = 0; a < k; ++a) {
      std::vector<std::string> inter;
      for (int b = 0; b < k; ++b) {
        std::ostringstream io;
        io << base[static_cast<size_t>(b)].first << "," << base[static_cast<size_t>(b)].second << ":"
           << cnt[static_cast<size_t>(a)][static_cast<size_t>(b)] << "/"
           << cnt[static_cast<size_t>(b)][static_cast<size_t>(a)];
        inter.push_back(io.str());
      }
      std::sort(inter.begin(), inter.end());
      std::ostringstream fo;
      fo << "(" << base[static_cast<size_t>(a)].first << "," << base[static_cast<size_t>(a)].second << "|";
      for (const auto& s : inter) fo << s << ";";
      fo << ")";
      feats.push_back(fo.str());
    }
    std::sort(feats.begin(), feats.end());
    std::string out;
    for (const auto& f : feats) out += f;
    return out;
  };
  std::string a = build(false);
  std::string b = build(true);
  return a < b ? a : b;
}

}  // namespace wlc
