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

#ifndef WLC_ENUMERATE_HPP
#define WLC_ENUMERATE_HPP

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "wlc/game.hpp"
#include "wlc/optimizer.hpp"
#include "wlc/rational.hpp"

namespace wlc {

struct EnumOptions {
  std::optional<int> max_edges;
  // Drop games with a choice of degree m (their coordination is immediate);
  // this is the atlas comparison filter.
  bool nontrivial_only = false;
};

// All valid games with larger side exactly m, up to renamings including the
// side swap. Emits canonical representatives, ordered by min side then edge
// count then canonical form.
void enumerate_games(int m, const EnumOptions& opts, const std::function<void(const Game&)>& sink);
std::vector<Game> enumerate_games(int m, const EnumOptions& opts = {});

// Some choice is adjacent to m opposing choices (degree equals game size).
bool has_degree_m_choice(const Game& g);

// Exact wait-or-move ECT by direct expansion over first-round pairs and
// commitments; after the commitment the support is fixed, so play is
// geometric. Used both by the census and as an independent check of the
// chain route.
Rat wm_ect_direct(const Game& g);

struct CensusEntry {
  std::string key;
  Game game;
  double optimal_ect = 0;
  MaybeInt optimal_gct;
  bool has_focal_point_initially = false;
  Rat wm_ect;
  int max_degree = 0;
};

struct GameCensus {
  int m = 0;
  std::string filter;
  std::vector<CensusEntry> entries;  // sorted by canonical key
};

struct GreatestOptions {
  bool use_reductions = true;     // m=5: |W|<=8 prune with WM-bound verification
  bool verify_pruned = true;      // check every pruned game's WM ECT <= 57/25
  std::string checkpoint_dir;     // one JSON result per canonical key
  int threads = 4;
  OptimOptions optim;
};

struct GreatestEctResult {
  int m = 0;
  double value = 0;
  std::vector<std::string> witnesses;  // canonical keys within 1e-9 of the max
  GameCensus census;
  uint64_t pruned_games = 0;   // raw masks excluded by the edge-count prune
  bool pruned_bound_ok = true; // every pruned game verified <= 2+7/25
  bool analytic_shortcut = false;
};

// Greatest optimal ECT among m-choice games. Full enumeration for m <= 4,
// reduction-based enumeration for m = 5, analytic shortcut (the wait-or-move
// bound makes CM_m the maximizer) for m >= 6.
GreatestEctResult greatest_optimal_ect(int m, const GreatestOptions& opts = {});

// census.csv plus one edge-list file per game under out_dir.
void atlas_report(const GameCensus& census, const std::string& out_dir);

}  // namespace wlc

#endif  // WLC_ENUMERATE_HPP
