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

#ifndef WLC_OPTIMIZER_HPP
#define WLC_OPTIMIZER_HPP

#include <memory>
#include <string>
#include <vector>

#include "wlc/chain.hpp"
#include "wlc/protocol.hpp"
#include "wlc/rational.hpp"
#include "wlc/symmetry.hpp"

namespace wlc {

struct OptimOptions {
  double tol = 1e-9;        // value-iteration stopping threshold (sup norm)
  int max_iter = 100000;    // sweep cap
  int max_states = 10000;   // quotient closure cap
  SymmetryOptions sym;
  int pg_starts = 32;       // projected-gradient restarts per state
  int pg_max_iter = 300;
  double pg_step_tol = 1e-12;
  int full_face_limit = 12;  // exhaustive face enumeration up to this many vars
  uint64_t seed = 0x5eedu;
};

// Symmetry-quotiented stage space closed under every positive-probability
// structural action. States merge stages that are structurally similar
// (related by renamings or equal partitions); each keeps a representative
// stage, its partition, and the per-class transition structure.
struct QuotientSpace {
  // One action variable per structural class: the per-choice weight of that
  // class. A class spanning both sides carries a single shared variable.
  struct Var {
    int cls;
    bool on_left, on_right;
    int lcount, rcount;  // choices of the class on each side
  };
  // cnt losing pairs with left choice in vars[a], right choice in vars[b],
  // all landing in quotient state succ (-1 never appears; wins are tracked
  // separately since WIN contributes no value).
  struct Term {
    int a, b;
    int count;
    int succ;
  };
  struct GroupState {
    Stage rep;
    Partition partition;
    int touched_count = 0;
    std::vector<Var> vars;
    std::vector<Term> losing;
    std::vector<Term> winning;  // succ unused (-1)
  };

  std::shared_ptr<const Game> game;
  std::vector<GroupState> states;  // index 0 = initial state
};

QuotientSpace build_quotient(const Game& g, const OptimOptions& opts = {});

struct OptimDiagnostics {
  int sweeps = 0;
  int inner_restarts = 0;  // projected-gradient starts that failed to converge
  double final_delta = 0;
  double bellman_residual = 0;
  int states = 0;
  bool monotone = true;  // sweeps never raised a state value
};

struct OptimResult {
  double value = 0;
  std::vector<double> state_values;
  std::vector<std::vector<double>> policy;  // per state: per-var weights
  OptimDiagnostics diag;
};

// Minimum expected coordination time over structural protocols: value
// iteration with per-state minimization over the class-weight polytope,
// started from the uniform-protocol value (a superharmonic upper bound, so
// sweeps are monotone nonincreasing).
OptimResult optimal_ect(const QuotientSpace& space, const OptimOptions& opts = {});
OptimResult optimal_ect(const Game& g, const OptimOptions& opts = {});

struct GctResult {
  MaybeInt value;                         // nullopt = no guarantee possible
  std::vector<MaybeInt> state_values;
  std::vector<std::vector<int>> support;  // per state: var ids of a witness support
};

// Minimax guaranteed coordination time over class supports, computed as a
// monotone fixpoint; smaller supports dominate, so only single classes and
// pairs of classes are enumerated.
GctResult optimal_gct(const QuotientSpace& space, const OptimOptions& opts = {});
GctResult optimal_gct(const Game& g, const OptimOptions& opts = {});

// Expected rounds from a stage with two touched edges when both players put
// mass p on the touched edges (split evenly) and 1-p on the n untouched
// ones, with E1/E2 the continuation values after touched/touched and
// untouched/untouched misses.
double formula_E(double p, int n, double e1, double e2);

struct CmClosedForms {
  int m = 0;
  Rat wm_ect;          // 3 - 2/m
  MaybeRat la_ect;     // odd m only
  MaybeInt la_gct;     // odd m only: ceil(m/2)
  Rat optimal_ect;
  MaybeInt optimal_gct;  // nullopt = infinity (even m >= 2)
};
CmClosedForms cm_closed_forms(int m);

struct ProbeStateReport {
  int state = 0;
  int touched_count = 0;
  bool has_split = false;     // state offers a touched-vs-untouched split
  bool singleton = true;
  double p_lo = 0, p_hi = 0;  // optimal touched-mass interval within tol
  double best_p = 0;
  double objective_spread = 0;  // max-min objective along the whole p grid
  std::string description;
};
struct ProbeReport {
  std::vector<ProbeStateReport> states;
};

// Near-optimal action sets per state at the converged values.
ProbeReport uniqueness_probe(const QuotientSpace& space, const OptimResult& result,
                             double tol);
ProbeReport uniqueness_probe(const Game& g, double tol, const OptimOptions& opts = {});

// Export the argmin policy as a class-weight table keyed by canonical state
// keys; weights are rationalized (exact for 0/1/uniform vertices).
ClassWeightTable policy_to_table(const QuotientSpace& space, const OptimResult& result,
                                 const SymmetryOptions& sym = {});

// Cross-validation of partition-merging: unroll the play tree to `depth`
// with sibling-orbit merging only, take quotient values as the boundary, and
// return the largest discrepancy against the quotient values.
double verify_quotient_merge(const Game& g, int depth, const OptimOptions& opts = {});

}  // namespace wlc

#endif  // WLC_OPTIMIZER_HPP
