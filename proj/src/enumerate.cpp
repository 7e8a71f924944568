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

#include "wlc/enumerate.hpp"

#include <algorithm>
#include <atomic>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <numeric>
#include <set>
#include <sstream>
#include <thread>

#include "nlohmann/json.hpp"
#include "wlc/chain.hpp"
#include "wlc/errors.hpp"
#include "wlc/symmetry.hpp"

namespace wlc {

namespace {

std::vector<uint32_t> canonical_rows_oriented(int n1, int n2, const std::vector<uint32_t>& rows) {
  if (n1 < n2) return canonical_bipartite_rows(n1, n2, rows);
  // square: also the transpose
  std::vector<uint32_t> trows(static_cast<size_t>(n2), 0);
  for (int i = 0; i < n1; ++i) {
    for (int j = 0; j < n2; ++j) {
      if ((rows[static_cast<size_t>(i)] >> j) & 1u) trows[static_cast<size_t>(j)] |= 1u << i;
    }
  }
  return std::min(canonical_bipartite_rows(n1, n2, rows), canonical_bipartite_rows(n2, n1, trows));
}

Game game_from_rows(int n1, int n2, const std::vector<uint32_t>& rows) {
  std::vector<Edge> edges;
  for (int i = 0; i < n1; ++i) {
    for (int j = 0; j < n2; ++j) {
      if ((rows[static_cast<size_t>(i)] >> j) & 1u) edges.emplace_back(i, j);
    }
  }
  return Game(n1, n2, std::move(edges));
}

// next k-subset bitmask (Gosper)
uint64_t next_combination(uint64_t v) {
  uint64_t t = v | (v - 1);
  return (t + 1) | (((~t & (t + 1)) - 1) >> (__builtin_ctzll(v) + 1));
}

bool mask_valid(int n1, int n2, uint64_t mask) {
  // every row and column nonempty
  uint64_t colmask = 0;
  for (int i = 0; i < n1; ++i) {
    uint64_t row = (mask >> (i * n2)) & ((1u << n2) - 1);
    if (row == 0) return false;
    colmask |= row;
  }
  return colmask == ((1ull << n2) - 1);
}

std::vector<uint32_t> rows_of_mask(int n1, int n2, uint64_t mask) {
  std::vector<uint32_t> rows(static_cast<size_t>(n1));
  for (int i = 0; i < n1; ++i) {
    rows[static_cast<size_t>(i)] = static_cast<uint32_t>((mask >> (i * n2)) & ((1u << n2) - 1));
  }
  return rows;
}

}  // namespace

bool has_degree_m_choice(const Game& g) {
  int m = game_size(g);
  for (int i = 0; i < g.left_count(); ++i) {
    if (g.degree(Side::Left, i) == m) return true;
  }
  for (int j = 0; j < g.right_count(); ++j) {
    if (g.degree(Side::Right, j) == m) return true;
  }
  return false;
}

void enumerate_games(int m, const EnumOptions& opts, const std::function<void(const Game&)>& sink) {
  if (m < 1) throw Error("enumerate_games needs m >= 1");
  if (m > 6) throw Error("enumeration supported up to m = 6");
  for (int n1 = 1; n1 <= m; ++n1) {
    int bits = n1 * m;
    int lo = m;  // every right choice needs an edge
    int hi = opts.max_edges ? std::min(*opts.max_edges, bits) : bits;
    std::set<std::vector<uint32_t>> seen;
    for (int w = lo; w <= hi; ++w) {
      uint64_t mask = (1ull << w) - 1;
      uint64_t limit = 1ull << bits;
      std::vector<std::pair<std::vector<uint32_t>, Game>> found;
      while (mask < limit) {
        if (mask_valid(n1, m, mask)) {
          std::vector<uint32_t> canon = canonical_rows_oriented(n1, m, rows_of_mask(n1, m, mask));
          if (seen.insert(canon).second) {
            Game g = game_from_rows(n1, m, canon);
            if (!opts.nontrivial_only || !has_degree_m_choice(g)) {
              found.emplace_back(std::move(canon), std::move(g));
            }
          }
        }
        if (w == bits) break;
        uint64_t nm = next_combination(mask);
        if (nm <= mask) break;
        mask = nm;
      }
      std::sort(found.begin(), found.end(),
                [](const auto& a, const auto& b) { return a.first < b.first; });
      for (auto& [canon, g] : found) sink(g);
    }
  }
}

std::vector<Game> enumerate_games(int m, const EnumOptions& opts) {
  std::vector<Game> out;
  enumerate_games(m, opts, [&](const Game& g) { out.push_back(g); });
  return out;
}

Rat wm_ect_direct(const Game& g) {
  int n1 = g.left_count(), n2 = g.right_count();
  Rat total(0);
  for (int c = 0; c < n1; ++c) {
    for (int d = 0; d < n2; ++d) {
      if (g.is_winning(c, d)) {
        total += Rat(1);
        continue;
      }
      std::vector<int> lc, rc;
      for (int i = 0; i < n1; ++i)
        if (g.is_winning(i, d)) lc.push_back(i);
      for (int j = 0; j < n2; ++j)
        if (g.is_winning(c, j)) rc.push_back(j);
      Rat inner(0);
      for (int a : lc) {
        for (int b : rc) {
          int q = (g.is_winning(c, d) ? 1 : 0) + (g.is_winning(c, b) ? 1 : 0) +
                  (g.is_winning(a, d) ? 1 : 0) + (g.is_winning(a, b) ? 1 : 0);
          inner += rat(4, q);  // geometric on the fixed support {c,a} x {d,b}
        }
      }
      inner /= Rat(static_cast<unsigned long>(lc.size() * rc.size()));
      total += Rat(1) + inner;
    }
  }
  total /= Rat(static_cast<unsigned long>(n1) * static_cast<unsigned long>(n2));
  return total;
}

namespace {

// Exact check ect_wm(g) <= 57/25 in 128-bit integer arithmetic. All term
// denominators divide D = 3 * lcm(1..25) * n1 * n2.
bool wm_bound_ok_fast(int n1, int n2, uint64_t mask) {
  auto winning = [&](int c, int d) { return (mask >> (c * n2 + d)) & 1ull; };
  static const long long kLcm25 = 26771144400LL;  // lcm(1..25)
  __int128 d_all = static_cast<__int128>(3) * kLcm25;
  __int128 total = 0;  // total / (d_all * n1 * n2)
  for (int c = 0; c < n1; ++c) {
    for (int d = 0; d < n2; ++d) {
      if (winning(c, d)) {
        total += d_all;
        continue;
      }
      int lc[32], rc[32], nl = 0, nr = 0;
      for (int i = 0; i < n1; ++i)
        if (winning(i, d)) lc[nl++] = i;
      for (int j = 0; j < n2; ++j)
        if (winning(c, j)) rc[nr++] = j;
      long long s3 = 0;  // sum of 4/q in thirds: 4/q in {4,2,4/3,1} -> {12,6,4,3}/3
      for (int ai = 0; ai < nl; ++ai) {
        for (int bi = 0; bi < nr; ++bi) {
          int q = (winning(c, rc[bi]) ? 1 : 0) + (winning(lc[ai], d) ? 1 : 0) +
                  (winning(lc[ai], rc[bi]) ? 1 : 0);
          s3 += 12 / q;  // exact for q in {1,2,3,4}
        }
      }
      // inner = s3 / (3 * nl * nr); term = 1 + inner
      total += d_all + d_all / (3 * nl * nr) * s3;
    }
  }
  // ect = total / (d_all * n1 * n2) <= 57/25 ?
  return 25 * total <= static_cast<__int128>(57) * d_all * n1 * n2;
}

std::string checkpoint_path(const std::string& dir, const std::string& key) {
  std::string safe = key;
  for (char& c : safe) {
    if (c == ':' || c == '.' || c == '/') c = '_';
  }
  return dir + "/" + safe + ".json";
}

}  // namespace

GreatestEctResult greatest_optimal_ect(int m, const GreatestOptions& opts) {
  GreatestEctResult result;
  result.m = m;
  result.census.m = m;

  if (m >= 6 && opts.use_reductions) {
    // The wait-or-move bound settles every game but CM_m analytically.
    result.analytic_shortcut = true;
    Game cm = make_choice_matching(m);
    QuotientSpace space = build_quotient(cm, opts.optim);
    OptimResult r = optimal_ect(space, opts.optim);
    GctResult gr = optimal_gct(space, opts.optim);
    CensusEntry e{canonical_game_key(cm), cm, r.value, gr.value, false, wm_ect_direct(cm), 1};
    e.has_focal_point_initially = !focal_points(cm, space.states[0].partition).empty();
    result.census.filter = "analytic shortcut: only CM_m analyzed";
    result.census.entries.push_back(std::move(e));
    result.value = r.value;
    result.witnesses.push_back(result.census.entries[0].key);
    return result;
  }

  EnumOptions eopts;
  bool reduced = (m == 5 && opts.use_reductions);
  if (reduced) eopts.max_edges = 8;
  result.census.filter = reduced ? "|W| <= 8 (wait-or-move bound prunes the rest)" : "full";

  std::vector<Game> games = enumerate_games(m, eopts);
  if (!opts.checkpoint_dir.empty()) {
    std::filesystem::create_directories(opts.checkpoint_dir);
  }
  std::vector<CensusEntry> entries;
  entries.reserve(games.size());
  for (const Game& g : games) {
    CensusEntry e{canonical_game_key(g), g, 0.0, std::nullopt, false, Rat(0), 0};
    entries.push_back(std::move(e));
  }
  std::atomic<size_t> cursor{0};
  std::mutex mu;
  std::vector<std::string> errors;
  auto worker = [&]() {
    for (;;) {
      size_t i = cursor.fetch_add(1);
      if (i >= entries.size()) return;
      CensusEntry& e = entries[i];
      try {
        if (!opts.checkpoint_dir.empty()) {
          std::ifstream in(checkpoint_path(opts.checkpoint_dir, e.key));
          if (in) {
            nlohmann::json j = nlohmann::json::parse(in);
            e.optimal_ect = j.at("optimal_ect").get<double>();
            if (!j.at("optimal_gct").is_null()) e.optimal_gct = j.at("optimal_gct").get<int>();
            e.has_focal_point_initially = j.at("focal").get<bool>();
            e.wm_ect = rat_parse(j.at("wm_ect").get<std::string>());
            e.max_degree = j.at("max_degree").get<int>();
            continue;
          }
        }
        QuotientSpace space = build_quotient(e.game, opts.optim);
        OptimResult r = optimal_ect(space, opts.optim);
        GctResult gr = optimal_gct(space, opts.optim);
        e.optimal_ect = r.value;
        e.optimal_gct = gr.value;
        e.has_focal_point_initially =
            !focal_points(e.game, space.states[0].partition).empty();
        e.wm_ect = wm_ect_direct(e.game);
        for (int i2 = 0; i2 < e.game.left_count(); ++i2)
          e.max_degree = std::max(e.max_degree, e.game.degree(Side::Left, i2));
        for (int j2 = 0; j2 < e.game.right_count(); ++j2)
          e.max_degree = std::max(e.max_degree, e.game.degree(Side::Right, j2));
        if (!opts.checkpoint_dir.empty()) {
          nlohmann::json j;
          j["key"] = e.key;
          j["optimal_ect"] = e.optimal_ect;
          if (e.optimal_gct) {
            j["optimal_gct"] = *e.optimal_gct;
          } else {
            j["optimal_gct"] = nullptr;
          }
          j["focal"] = e.has_focal_point_initially;
          j["wm_ect"] = rat_str(e.wm_ect);
          j["max_degree"] = e.max_degree;
          std::ofstream out(checkpoint_path(opts.checkpoint_dir, e.key));
          out << j.dump(2);
        }
      } catch (const std::exception& ex) {
        std::scoped_lock lock(mu);
        errors.push_back(e.key + ": " + ex.what());
      }
    }
  };
  {
    std::vector<std::thread> pool;
    int nthreads = std::max(1, opts.threads);
    for (int t = 0; t < nthreads; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  if (!errors.empty()) throw Error("census failures: " + errors[0]);

  std::sort(entries.begin(), entries.end(),
            [](const CensusEntry& a, const CensusEntry& b) { return a.key < b.key; });
  result.census.entries = std::move(entries);
  for (const auto& e : result.census.entries) {
    result.value = std::max(result.value, e.optimal_ect);
  }
  for (const auto& e : result.census.entries) {
    if (e.optimal_ect >= result.value - 1e-9) result.witnesses.push_back(e.key);
  }

  if (reduced && opts.verify_pruned) {
    // Every pruned game (raw mask, |W| >= 9) satisfies ect_wm <= 2 + 7/25.
    std::atomic<uint64_t> pruned{0};
    std::atomic<bool> ok{true};
    std::vector<std::thread> pool;
    int nthreads = std::max(1, opts.threads);
    for (int t = 0; t < nthreads; ++t) {
      pool.emplace_back([&, t]() {
        for (int n1 = 1 + t; n1 <= m; n1 += nthreads) {
          int bits = n1 * m;
          uint64_t local = 0;
          for (uint64_t mask = 0; mask < (1ull << bits); ++mask) {
            if (__builtin_popcountll(mask) < 9) continue;
            if (!mask_valid(n1, m, mask)) continue;
            ++local;
            if (!wm_bound_ok_fast(n1, m, mask)) {
              ok.store(false);
              break;
            }
          }
          pruned.fetch_add(local);
        }
      });
    }
    for (auto& th : pool) th.join();
    result.pruned_games = pruned.load();
    result.pruned_bound_ok = ok.load();
  }
  return result;
}

void atlas_report(const GameCensus& census, const std::string& out_dir) {
  std::filesystem::create_directories(out_dir);
  std::ofstream csv(out_dir + "/census.csv");
  if (!csv) throw Error("cannot write census.csv in " + out_dir);
  csv << "key,left,right,edges,optimal_ect,optimal_gct,wm_ect,has_focal_point\n";
  for (const auto& e : census.entries) {
    csv << e.key << "," << e.game.left_count() << "," << e.game.right_count() << ","
        << e.game.winning().size() << "," << e.optimal_ect << ","
        << (e.optimal_gct ? std::to_string(*e.optimal_gct) : "inf") << "," << rat_str(e.wm_ect)
        << "," << (e.has_focal_point_initially ? 1 : 0) << "\n";
  }
  for (const auto& e : census.entries) {
    std::string safe = e.key;
    for (char& c : safe) {
      if (c == ':' || c == '.' || c == '/') c = '_';
    }
    std::ofstream gf(out_dir + "/" + safe + ".game");
    gf << serialize_game(e.game);
  }
}

}  // namespace wlc
