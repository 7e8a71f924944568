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

#include "wlc/optimizer.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <map>
#include <numeric>
#include <sstream>

#include "wlc/errors.hpp"

namespace wlc {

namespace {

uint64_t splitmix64(uint64_t& state) {
  uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

double unit_double(uint64_t& state) {
  return static_cast<double>(splitmix64(state) >> 11) * 0x1.0p-53;
}

struct PairUnionFind {
  std::vector<int> parent;
  explicit PairUnionFind(size_t n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
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

std::vector<QuotientSpace::Var> vars_from_partition(const Game& g, const Partition& p) {
  std::vector<QuotientSpace::Var> vars(static_cast<size_t>(p.num_classes));
  for (int cls = 0; cls < p.num_classes; ++cls) {
    vars[static_cast<size_t>(cls)] = {cls, false, false, 0, 0};
  }
  for (int c = 0; c < g.choice_count(); ++c) {
    auto& v = vars[static_cast<size_t>(p.class_of[static_cast<size_t>(c)])];
    if (g.is_left(c)) {
      v.on_left = true;
      v.lcount++;
    } else {
      v.on_right = true;
      v.rcount++;
    }
  }
  return vars;
}

// Expansion of one representative stage: pair orbits, class-pair terms, and
// the filtered successor groups. Shared by the quotient builder and the
// strict unrolled-tree verifier.
struct Expansion {
  std::vector<QuotientSpace::Term> losing;   // succ = index into succs
  std::vector<QuotientSpace::Term> winning;  // succ = -1
  std::vector<Stage> succs;
  std::vector<RenamingGroup> succ_groups;
  std::vector<Partition> succ_partitions;
};

Expansion expand_stage(const Stage& rep, const RenamingGroup& grp, const Partition& part) {
  const Game& g = rep.game();
  int n1 = g.left_count(), n2 = g.right_count();
  int npairs = n1 * n2;
  PairUnionFind uf(static_cast<size_t>(npairs));
  for (const Renaming& e : grp.elements()) {
    for (int l = 0; l < n1; ++l) {
      for (int r = 0; r < n2; ++r) {
        auto [a, b] = e.apply_pair(l, n1 + r);
        uf.unite(l * n2 + r, a * n2 + (b - n1));
      }
    }
  }
  std::map<int, std::vector<int>> orbits;  // root -> pair ids
  for (int pid = 0; pid < npairs; ++pid) orbits[uf.find(pid)].push_back(pid);

  Expansion ex;
  std::map<std::pair<std::pair<int, int>, int>, int> losing_acc;  // ((a,b),succ) -> count
  std::map<std::pair<int, int>, int> winning_acc;
  for (auto& [root, pids] : orbits) {
    int l = root / n2, r = root % n2;
    int a = part.class_of[static_cast<size_t>(l)];
    int b = part.class_of[static_cast<size_t>(n1 + r)];
    if (g.is_winning(l, r)) {
      winning_acc[{a, b}] += static_cast<int>(pids.size());
      continue;
    }
    Stage succ = wlc::advance(rep, Edge{l, r}).first;
    RenamingGroup sg = filter_group(grp, g, Edge{l, r});
    Partition sp = sg.orbits();
    int si = static_cast<int>(ex.succs.size());
    ex.succs.push_back(std::move(succ));
    ex.succ_groups.push_back(std::move(sg));
    ex.succ_partitions.push_back(std::move(sp));
    losing_acc[{{a, b}, si}] += static_cast<int>(pids.size());
  }
  for (const auto& [key, cnt] : losing_acc) {
    ex.losing.push_back({key.first.first, key.first.second, cnt, key.second});
  }
  for (const auto& [key, cnt] : winning_acc) {
    ex.winning.push_back({key.first, key.second, cnt, -1});
  }
  return ex;
}

}  // namespace

QuotientSpace build_quotient(const Game& g, const OptimOptions& opts) {
  ValidationReport rep = validate(g);
  if (!rep.ok) throw Error("build_quotient requires a valid game");
  QuotientSpace space;
  space.game = std::make_shared<Game>(g);
  RenamingGroup gamma0 = stage_renaming_group(initial_stage(space.game), opts.sym);

  std::map<std::string, std::vector<int>> buckets;
  std::vector<RenamingGroup> groups;
  std::deque<int> queue;

  auto find_or_add = [&](Stage s, Partition p, RenamingGroup grp) -> int {
    std::string sig = partition_signature(g, p);
    auto& bucket = buckets[sig];
    for (int t : bucket) {
      if (space.states[static_cast<size_t>(t)].partition == p) return t;
      if (find_partition_map(g, p, space.states[static_cast<size_t>(t)].partition, opts.sym)) {
        return t;
      }
    }
    int id = static_cast<int>(space.states.size());
    if (id >= opts.max_states) throw StateExplosion("quotient closure exceeded max_states");
    QuotientSpace::GroupState st{std::move(s), std::move(p), 0, {}, {}, {}};
    st.touched_count = static_cast<int>(touched_edges(st.rep).size());
    st.vars = vars_from_partition(g, st.partition);
    space.states.push_back(std::move(st));
    groups.push_back(std::move(grp));
    bucket.push_back(id);
    queue.push_back(id);
    return id;
  };

  find_or_add(initial_stage(space.game), gamma0.orbits(), gamma0);

  while (!queue.empty()) {
    int id = queue.front();
    queue.pop_front();
    RenamingGroup grp = std::move(groups[static_cast<size_t>(id)]);
    groups[static_cast<size_t>(id)] = RenamingGroup();
    Stage rep_stage = space.states[static_cast<size_t>(id)].rep;
    Partition part = space.states[static_cast<size_t>(id)].partition;
    Expansion ex = expand_stage(rep_stage, grp, part);
    std::vector<int> succ_ids(ex.succs.size());
    for (size_t i = 0; i < ex.succs.size(); ++i) {
      succ_ids[i] = find_or_add(std::move(ex.succs[i]), std::move(ex.succ_partitions[i]),
                                std::move(ex.succ_groups[i]));
    }
    auto& st = space.states[static_cast<size_t>(id)];
    st.winning = std::move(ex.winning);
    std::map<std::pair<std::pair<int, int>, int>, int> acc;
    for (const auto& t : ex.losing) {
      acc[{{t.a, t.b}, succ_ids[static_cast<size_t>(t.succ)]}] += t.count;
    }
    for (const auto& [key, cnt] : acc) {
      st.losing.push_back({key.first.first, key.first.second, cnt, key.second});
    }
    int total = 0, wins = 0;
    for (const auto& t : st.losing) total += t.count;
    for (const auto& t : st.winning) {
      total += t.count;
      wins += t.count;
    }
    if (total != g.left_count() * g.right_count()) {
      throw Error("internal: pair orbits do not cover the pair space");
    }
    // full-support play always has positive coordination probability, so the
    // optimum has no infinite states; asserted, not assumed
    if (wins == 0) throw Error("internal: state without a winning pair");
  }
  return space;
}

// ---------------------------------------------------------------------------
// Inner minimization over the class-weight polytope.

namespace {

struct InnerProblem {
  int k = 0;
  std::vector<double> lrow, rrow;          // constraint coefficients
  std::vector<std::vector<double>> m;      // objective f(x) = x^T m x
  std::vector<char> on_left, on_right;
};

InnerProblem make_inner(const std::vector<QuotientSpace::Var>& vars,
                        const std::vector<QuotientSpace::Term>& losing,
                        const std::vector<double>& v) {
  InnerProblem p;
  p.k = static_cast<int>(vars.size());
  p.lrow.assign(static_cast<size_t>(p.k), 0.0);
  p.rrow.assign(static_cast<size_t>(p.k), 0.0);
  p.on_left.assign(static_cast<size_t>(p.k), 0);
  p.on_right.assign(static_cast<size_t>(p.k), 0);
  p.m.assign(static_cast<size_t>(p.k), std::vector<double>(static_cast<size_t>(p.k), 0.0));
  for (int i = 0; i < p.k; ++i) {
    p.lrow[static_cast<size_t>(i)] = vars[static_cast<size_t>(i)].lcount;
    p.rrow[static_cast<size_t>(i)] = vars[static_cast<size_t>(i)].rcount;
    p.on_left[static_cast<size_t>(i)] = vars[static_cast<size_t>(i)].on_left;
    p.on_right[static_cast<size_t>(i)] = vars[static_cast<size_t>(i)].on_right;
  }
  for (const auto& t : losing) {
    p.m[static_cast<size_t>(t.a)][static_cast<size_t>(t.b)] +=
        t.count * v[static_cast<size_t>(t.succ)];
  }
  return p;
}

double eval_f(const InnerProblem& p, const std::vector<double>& x) {
  double f = 0;
  for (int i = 0; i < p.k; ++i) {
    if (x[static_cast<size_t>(i)] == 0) continue;
    double row = 0;
    for (int j = 0; j < p.k; ++j) row += p.m[static_cast<size_t>(i)][static_cast<size_t>(j)] * x[static_cast<size_t>(j)];
    f += x[static_cast<size_t>(i)] * row;
  }
  return f;
}

std::vector<double> grad_f(const InnerProblem& p, const std::vector<double>& x) {
  std::vector<double> g(static_cast<size_t>(p.k), 0.0);
  for (int i = 0; i < p.k; ++i) {
    double s = 0;
    for (int j = 0; j < p.k; ++j) {
      s += (p.m[static_cast<size_t>(i)][static_cast<size_t>(j)] +
            p.m[static_cast<size_t>(j)][static_cast<size_t>(i)]) *
           x[static_cast<size_t>(j)];
    }
    g[static_cast<size_t>(i)] = s;
  }
  return g;
}

// Gaussian solve of a (n x n+1) augmented system; false when singular.
bool dsolve(std::vector<std::vector<double>> a, std::vector<double>& out) {
  size_t n = a.size();
  for (size_t col = 0; col < n; ++col) {
    size_t piv = col;
    for (size_t r = col + 1; r < n; ++r) {
      if (std::fabs(a[r][col]) > std::fabs(a[piv][col])) piv = r;
    }
    if (std::fabs(a[piv][col]) < 1e-11) return false;
    std::swap(a[piv], a[col]);
    double d = a[col][col];
    for (size_t j = col; j <= n; ++j) a[col][j] /= d;
    for (size_t r = 0; r < n; ++r) {
      if (r == col || a[r][col] == 0) continue;
      double f = a[r][col];
      for (size_t j = col; j <= n; ++j) a[r][j] -= f * a[col][j];
    }
  }
  out.resize(n);
  for (size_t i = 0; i < n; ++i) out[i] = a[i][n];
  return true;
}

struct AffineProjector {
  std::vector<double> l, r;
  double ll = 0, lr = 0, rr = 0;
  bool rank1 = false;

  explicit AffineProjector(const InnerProblem& p) : l(p.lrow), r(p.rrow) {
    for (int i = 0; i < p.k; ++i) {
      ll += l[static_cast<size_t>(i)] * l[static_cast<size_t>(i)];
      lr += l[static_cast<size_t>(i)] * r[static_cast<size_t>(i)];
      rr += r[static_cast<size_t>(i)] * r[static_cast<size_t>(i)];
    }
    rank1 = std::fabs(ll * rr - lr * lr) < 1e-12 * std::max(1.0, ll * rr);
  }

  void project(std::vector<double>& y) const {
    double dl = -1, dr = -1;
    for (size_t i = 0; i < l.size(); ++i) {
      dl += l[i] * y[i];
      dr += r[i] * y[i];
    }
    if (rank1) {
      double mu = dl / ll;
      for (size_t i = 0; i < l.size(); ++i) y[i] -= mu * l[i];
      return;
    }
    double det = ll * rr - lr * lr;
    double mu1 = (dl * rr - dr * lr) / det;
    double mu2 = (dr * ll - dl * lr) / det;
    for (size_t i = 0; i < l.size(); ++i) y[i] -= mu1 * l[i] + mu2 * r[i];
  }
};

std::vector<double> project_polytope(const AffineProjector& a, std::vector<double> y) {
  size_t k = y.size();
  std::vector<double> x = y, p(k, 0.0), q(k, 0.0), z(k, 0.0);
  for (int iter = 0; iter < 300; ++iter) {
    for (size_t i = 0; i < k; ++i) z[i] = x[i] + p[i];
    a.project(z);
    for (size_t i = 0; i < k; ++i) p[i] = x[i] + p[i] - z[i];
    double diff = 0;
    for (size_t i = 0; i < k; ++i) {
      double w = z[i] + q[i];
      double nx = std::max(0.0, w);
      q[i] = w - nx;
      diff = std::max(diff, std::fabs(nx - x[i]));
      x[i] = nx;
    }
    double dz = 0;
    for (size_t i = 0; i < k; ++i) dz = std::max(dz, std::fabs(z[i] - x[i]));
    if (dz < 1e-14 && diff < 1e-14) break;
  }
  return x;
}

struct Candidate {
  double f;
  std::vector<double> x;
};

bool feasible_candidate(const InnerProblem& p, std::vector<double>& x) {
  double suml = 0, sumr = 0;
  for (int i = 0; i < p.k; ++i) {
    if (x[static_cast<size_t>(i)] < -1e-9) return false;
    if (x[static_cast<size_t>(i)] < 0) x[static_cast<size_t>(i)] = 0;
    suml += p.lrow[static_cast<size_t>(i)] * x[static_cast<size_t>(i)];
    sumr += p.rrow[static_cast<size_t>(i)] * x[static_cast<size_t>(i)];
  }
  return std::fabs(suml - 1) < 1e-7 && std::fabs(sumr - 1) < 1e-7;
}

// Stationary points of f restricted to the face supp(x) = F, via a
// particular solution plus nullspace of the two normalization rows.
void face_candidates(const InnerProblem& p, const std::vector<int>& f_vars,
                     std::vector<Candidate>& out) {
  size_t fk = f_vars.size();
  bool left_ok = false, right_ok = false;
  for (int v : f_vars) {
    left_ok = left_ok || p.on_left[static_cast<size_t>(v)];
    right_ok = right_ok || p.on_right[static_cast<size_t>(v)];
  }
  if (!left_ok || !right_ok) return;

  // reduce [A | b] over the face
  double a[2][32];
  double b[2] = {1, 1};
  for (size_t j = 0; j < fk; ++j) {
    a[0][j] = p.lrow[static_cast<size_t>(f_vars[j])];
    a[1][j] = p.rrow[static_cast<size_t>(f_vars[j])];
  }
  int pivot_col[2] = {-1, -1};
  int rank = 0;
  for (size_t col = 0; col < fk && rank < 2; ++col) {
    int prow = -1;
    for (int r = rank; r < 2; ++r) {
      if (std::fabs(a[r][col]) > 1e-12) {
        prow = r;
        break;
      }
    }
    if (prow < 0) continue;
    std::swap(a[rank], a[prow]);
    std::swap(b[rank], b[prow]);
    double d = a[rank][col];
    for (size_t j = 0; j < fk; ++j) a[rank][j] /= d;
    b[rank] /= d;
    for (int r = 0; r < 2; ++r) {
      if (r == rank) continue;
      double f = a[r][col];
      if (f == 0) continue;
      for (size_t j = 0; j < fk; ++j) a[r][j] -= f * a[rank][j];
      b[r] -= f * b[rank];
    }
    pivot_col[rank] = static_cast<int>(col);
    ++rank;
  }
  for (int r = rank; r < 2; ++r) {
    if (std::fabs(b[r]) > 1e-9) return;  // inconsistent
  }
  // particular solution: free vars zero
  std::vector<double> x0(fk, 0.0);
  for (int r = 0; r < rank; ++r) x0[static_cast<size_t>(pivot_col[r])] = b[r];
  // nullspace basis
  std::vector<std::vector<double>> basis;
  for (size_t col = 0; col < fk; ++col) {
    if (rank > 0 && static_cast<int>(col) == pivot_col[0]) continue;
    if (rank > 1 && static_cast<int>(col) == pivot_col[1]) continue;
    std::vector<double> n(fk, 0.0);
    n[col] = 1;
    for (int r = 0; r < rank; ++r) n[static_cast<size_t>(pivot_col[r])] = -a[r][col];
    basis.push_back(std::move(n));
  }
  auto emit = [&](const std::vector<double>& xf) {
    std::vector<double> full(static_cast<size_t>(p.k), 0.0);
    for (size_t j = 0; j < fk; ++j) full[static_cast<size_t>(f_vars[j])] = xf[j];
    if (!feasible_candidate(p, full)) return;
    double f = eval_f(p, full);
    out.push_back({f, std::move(full)});
  };
  size_t d = basis.size();
  if (d == 0) {
    emit(x0);
    return;
  }
  // restricted quadratic: minimize (x0 + B t)' M (x0 + B t)
  // stationary: B'(M+M') B t = -B'(M+M') x0
  std::vector<std::vector<double>> mf(fk, std::vector<double>(fk, 0.0));
  for (size_t i = 0; i < fk; ++i) {
    for (size_t j = 0; j < fk; ++j) {
      size_t gi = static_cast<size_t>(f_vars[i]), gj = static_cast<size_t>(f_vars[j]);
      mf[i][j] = p.m[gi][gj] + p.m[gj][gi];
    }
  }
  std::vector<std::vector<double>> h(d, std::vector<double>(d + 1, 0.0));
  for (size_t u = 0; u < d; ++u) {
    for (size_t v = 0; v < d; ++v) {
      double s = 0;
      for (size_t i = 0; i < fk; ++i) {
        double mi = 0;
        for (size_t j = 0; j < fk; ++j) mi += mf[i][j] * basis[v][j];
        s += basis[u][i] * mi;
      }
      h[u][v] = s;
    }
    double rhs = 0;
    for (size_t i = 0; i < fk; ++i) {
      double mi = 0;
      for (size_t j = 0; j < fk; ++j) mi += mf[i][j] * x0[j];
      rhs -= basis[u][i] * mi;
    }
    h[u][d] = rhs;
  }
  std::vector<double> t;
  if (dsolve(h, t)) {
    std::vector<double> xf = x0;
    for (size_t u = 0; u < d; ++u) {
      for (size_t j = 0; j < fk; ++j) xf[j] += t[u] * basis[u][j];
    }
    emit(xf);
  }
}

std::vector<double> uniform_action(const InnerProblem& p, const Game& g) {
  std::vector<double> x(static_cast<size_t>(p.k), 0.0);
  for (int i = 0; i < p.k; ++i) {
    if (p.on_left[static_cast<size_t>(i)]) {
      x[static_cast<size_t>(i)] = 1.0 / g.left_count();
    } else {
      x[static_cast<size_t>(i)] = 1.0 / g.right_count();
    }
  }
  return x;
}

struct InnerOutcome {
  double value;
  std::vector<double> x;
  int failed_starts = 0;
};

InnerOutcome inner_minimize(const InnerProblem& p, const Game& g, const OptimOptions& opts,
                            uint64_t seed_tag, const std::vector<double>* warm, bool full) {
  std::vector<Candidate> cands;
  {
    std::vector<double> u = uniform_action(p, g);
    if (feasible_candidate(p, u)) cands.push_back({eval_f(p, u), u});
  }
  if (warm && !warm->empty()) {
    std::vector<double> w = *warm;
    if (feasible_candidate(p, w)) cands.push_back({eval_f(p, w), w});
  }
  // Face enumeration: every support when small, otherwise supports up to 3.
  if (full && p.k <= opts.full_face_limit) {
    for (unsigned mask = 1; mask < (1u << p.k); ++mask) {
      std::vector<int> f_vars;
      for (int i = 0; i < p.k; ++i) {
        if ((mask >> i) & 1u) f_vars.push_back(i);
      }
      face_candidates(p, f_vars, cands);
    }
  } else {
    for (int i = 0; i < p.k; ++i) {
      face_candidates(p, {i}, cands);
      for (int j = i + 1; j < p.k; ++j) {
        face_candidates(p, {i, j}, cands);
        for (int l = j + 1; l < p.k && full; ++l) face_candidates(p, {i, j, l}, cands);
      }
    }
  }
  int failed = 0;
  {
    AffineProjector proj(p);
    int starts = full ? opts.pg_starts : std::max(2, opts.pg_starts / 8);
    for (int s = 0; s < starts; ++s) {
      uint64_t rng = opts.seed ^ (seed_tag * 0x9e3779b97f4a7c15ULL) ^ (uint64_t)s;
      std::vector<double> x(static_cast<size_t>(p.k));
      if (s == 0 && warm && !warm->empty()) {
        x = *warm;
      } else {
        for (int i = 0; i < p.k; ++i) x[static_cast<size_t>(i)] = 0.05 + unit_double(rng);
      }
      x = project_polytope(proj, std::move(x));
      double fx = eval_f(p, x);
      double eta = 0.25;
      bool converged = false;
      for (int it = 0; it < opts.pg_max_iter; ++it) {
        std::vector<double> grad = grad_f(p, x);
        std::vector<double> y(static_cast<size_t>(p.k));
        for (int i = 0; i < p.k; ++i) y[static_cast<size_t>(i)] = x[static_cast<size_t>(i)] - eta * grad[static_cast<size_t>(i)];
        y = project_polytope(proj, std::move(y));
        double fy = eval_f(p, y);
        if (fy < fx - 1e-15) {
          double step = 0;
          for (int i = 0; i < p.k; ++i) step = std::max(step, std::fabs(y[static_cast<size_t>(i)] - x[static_cast<size_t>(i)]));
          x = std::move(y);
          fx = fy;
          eta = std::min(1.0, eta * 1.25);
          if (step < opts.pg_step_tol) {
            converged = true;
            break;
          }
        } else {
          eta /= 2;
          if (eta < 1e-15) {
            converged = true;
            break;
          }
        }
      }
      if (!converged) ++failed;
      if (feasible_candidate(p, x)) cands.push_back({fx, std::move(x)});
    }
  }
  if (cands.empty()) throw InnerSolveFailure("no feasible action candidate");
  size_t best = 0;
  for (size_t i = 1; i < cands.size(); ++i) {
    if (cands[i].f < cands[best].f) best = i;
  }
  return {1.0 + cands[best].f, std::move(cands[best].x), failed};
}

std::vector<double> initial_values(const QuotientSpace& space) {
  const Game& g = *space.game;
  int w = 0;
  {
    std::vector<Edge> edges = g.winning();
    std::sort(edges.begin(), edges.end());
    edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
    w = static_cast<int>(edges.size());
  }
  // Exact value of the uniform protocol from any non-final stage; feasible
  // at every state, hence superharmonic: sweeps only move down.
  double v0 = static_cast<double>(g.left_count()) * g.right_count() / w;
  return std::vector<double>(space.states.size(), v0);
}

}  // namespace

OptimResult optimal_ect(const QuotientSpace& space, const OptimOptions& opts) {
  const Game& g = *space.game;
  size_t n = space.states.size();
  std::vector<InnerProblem> probs(n);
  OptimResult res;
  res.state_values = initial_values(space);
  res.policy.assign(n, {});
  res.diag.states = static_cast<int>(n);

  std::vector<double> next(n, 0.0);
  int sweep = 0;
  double delta = 0;
  for (; sweep < opts.max_iter; ++sweep) {
    bool full = (sweep % 8 == 0);
    delta = 0;
    for (size_t s = 0; s < n; ++s) {
      InnerProblem p = make_inner(space.states[s].vars, space.states[s].losing, res.state_values);
      InnerOutcome out = inner_minimize(p, g, opts, s + 1, &res.policy[s], full);
      res.diag.inner_restarts += out.failed_starts;
      next[s] = out.value;
      res.policy[s] = std::move(out.x);
      if (next[s] > res.state_values[s] + 1e-12 * (1.0 + std::fabs(res.state_values[s]))) {
        res.diag.monotone = false;
      }
      delta = std::max(delta, std::fabs(next[s] - res.state_values[s]));
    }
    res.state_values = next;
    if (delta < opts.tol && full) break;
    if (delta < opts.tol && !full) {
      // confirm against the exhaustive candidate set before stopping
      continue;
    }
  }
  if (sweep >= opts.max_iter) {
    throw InnerSolveFailure("value iteration did not converge within max_iter");
  }
  // certification pass: Bellman residual with exhaustive candidates
  double residual = 0;
  for (size_t s = 0; s < n; ++s) {
    InnerProblem p = make_inner(space.states[s].vars, space.states[s].losing, res.state_values);
    InnerOutcome out = inner_minimize(p, g, opts, s + 1, &res.policy[s], true);
    residual = std::max(residual, std::fabs(out.value - res.state_values[s]));
  }
  res.diag.sweeps = sweep + 1;
  res.diag.final_delta = delta;
  res.diag.bellman_residual = residual;
  res.value = res.state_values[0];
  return res;
}

OptimResult optimal_ect(const Game& g, const OptimOptions& opts) {
  return optimal_ect(build_quotient(g, opts), opts);
}

GctResult optimal_gct(const QuotientSpace& space, const OptimOptions& opts) {
  (void)opts;
  size_t n = space.states.size();
  GctResult res;
  res.state_values.assign(n, std::nullopt);
  res.support.assign(n, {});
  // Admissible supports: a single spanning class, or a pair of classes
  // jointly meeting both sides. Larger supports only add losing pairs, so
  // these dominate.
  auto supports_of = [&](const QuotientSpace::GroupState& st) {
    std::vector<std::vector<int>> sup;
    int k = static_cast<int>(st.vars.size());
    for (int i = 0; i < k; ++i) {
      if (st.vars[static_cast<size_t>(i)].on_left && st.vars[static_cast<size_t>(i)].on_right) {
        sup.push_back({i});
      }
      for (int j = i + 1; j < k; ++j) {
        bool l = st.vars[static_cast<size_t>(i)].on_left || st.vars[static_cast<size_t>(j)].on_left;
        bool r = st.vars[static_cast<size_t>(i)].on_right || st.vars[static_cast<size_t>(j)].on_right;
        if (l && r) sup.push_back({i, j});
      }
    }
    return sup;
  };
  bool changed = true;
  while (changed) {
    changed = false;
    for (size_t s = 0; s < n; ++s) {
      const auto& st = space.states[s];
      for (const auto& sup : supports_of(st)) {
        auto inside = [&](int v) {
          return std::find(sup.begin(), sup.end(), v) != sup.end();
        };
        int worst = 0;
        bool ok = true;
        for (const auto& t : st.losing) {
          if (!inside(t.a) || !inside(t.b)) continue;
          const auto& sv = res.state_values[static_cast<size_t>(t.succ)];
          if (!sv) {
            ok = false;
            break;
          }
          worst = std::max(worst, *sv);
        }
        if (!ok) continue;
        int cand = 1 + worst;
        if (!res.state_values[s] || cand < *res.state_values[s]) {
          res.state_values[s] = cand;
          res.support[s] = sup;
          changed = true;
        }
      }
    }
  }
  res.value = res.state_values[0];
  return res;
}

GctResult optimal_gct(const Game& g, const OptimOptions& opts) {
  return optimal_gct(build_quotient(g, opts), opts);
}

double formula_E(double p, int n, double e1, double e2) {
  double nn = n;
  return p * p * (0.5 + 0.5 * (1 + e1)) + 2 * p * (1 - p) * 2 +
         (1 - p) * (1 - p) * (1.0 / nn + ((nn - 1) / nn) * (1 + e2));
}

CmClosedForms cm_closed_forms(int m) {
  if (m < 1) throw Error("cm_closed_forms needs m >= 1");
  CmClosedForms f;
  f.m = m;
  f.wm_ect = rat(3 * m - 2, m);
  if (m % 2 == 1) {
    Rat e(0);
    for (int l = 1; l <= (m + 1) / 2; ++l) {
      Rat p = rat(1, m - 2 * l + 2);
      for (int k = 0; k <= l - 2; ++k) {
        p *= rat(m - 2 * k - 1, m - 2 * k);
      }
      e += Rat(l) * p;
    }
    f.la_ect = e;
    f.la_gct = (m + 1) / 2;
  }
  switch (m) {
    case 1: f.optimal_ect = rat(1); break;
    case 2: f.optimal_ect = rat(2); break;
    case 3: f.optimal_ect = rat(5, 3); break;
    case 4: f.optimal_ect = rat(5, 2); break;
    case 5: f.optimal_ect = rat(7, 3); break;
    default:
      f.optimal_ect = (m % 2 == 0) ? rat(3 * (m / 2) - 1, m / 2) : rat(3 * m - 2, m);
      break;
  }
  if (m == 1) {
    f.optimal_gct = 1;
  } else if (m % 2 == 1) {
    f.optimal_gct = (m + 1) / 2;
  }
  return f;
}

ProbeReport uniqueness_probe(const QuotientSpace& space, const OptimResult& result, double tol) {
  const Game& g = *space.game;
  ProbeReport report;
  for (size_t s = 0; s < space.states.size(); ++s) {
    const auto& st = space.states[s];
    ProbeStateReport r;
    r.state = static_cast<int>(s);
    r.touched_count = st.touched_count;
    // touched classes: classes containing a choice of a touched edge
    std::vector<char> touched_cls(static_cast<size_t>(st.partition.num_classes), 0);
    for (const Edge& e : touched_edges(st.rep)) {
      touched_cls[static_cast<size_t>(st.partition.class_of[static_cast<size_t>(e.first)])] = 1;
      touched_cls[static_cast<size_t>(
          st.partition.class_of[static_cast<size_t>(g.left_count() + e.second)])] = 1;
    }
    int tl = 0, tr = 0, ul = 0, ur = 0;
    for (const auto& v : st.vars) {
      if (touched_cls[static_cast<size_t>(v.cls)]) {
        tl += v.lcount;
        tr += v.rcount;
      } else {
        ul += v.lcount;
        ur += v.rcount;
      }
    }
    r.has_split = tl > 0 && ul > 0 && tl == tr && ul == ur;
    if (!r.has_split) {
      r.description = "no touched-vs-untouched split";
      report.states.push_back(std::move(r));
      continue;
    }
    InnerProblem p = make_inner(st.vars, st.losing, result.state_values);
    const int grid = 256;
    double fmin = 1e300, fmax = -1e300;
    std::vector<double> fs(grid + 1);
    for (int i = 0; i <= grid; ++i) {
      double pp = static_cast<double>(i) / grid;
      std::vector<double> x(st.vars.size(), 0.0);
      for (size_t v = 0; v < st.vars.size(); ++v) {
        x[v] = touched_cls[static_cast<size_t>(st.vars[v].cls)] ? pp / tl : (1 - pp) / ul;
      }
      fs[static_cast<size_t>(i)] = eval_f(p, x);
      fmin = std::min(fmin, fs[static_cast<size_t>(i)]);
      fmax = std::max(fmax, fs[static_cast<size_t>(i)]);
    }
    r.objective_spread = fmax - fmin;
    double lo = 2, hi = -1, best = 0, bestf = 1e300;
    for (int i = 0; i <= grid; ++i) {
      double pp = static_cast<double>(i) / grid;
      if (fs[static_cast<size_t>(i)] <= fmin + tol) {
        lo = std::min(lo, pp);
        hi = std::max(hi, pp);
      }
      if (fs[static_cast<size_t>(i)] < bestf) {
        bestf = fs[static_cast<size_t>(i)];
        best = pp;
      }
    }
    r.p_lo = lo;
    r.p_hi = hi;
    r.best_p = best;
    r.singleton = (hi - lo) < 1.5 / grid;
    std::ostringstream d;
    if (r.singleton) {
      d << "singleton p=" << best;
    } else if (lo <= 1e-12 && hi >= 1.0 - 1e-12 && r.objective_spread <= tol) {
      d << "flat interval p in [0,1]";
    } else {
      d << "optimal p in [" << lo << "," << hi << "]";
    }
    r.description = d.str();
    report.states.push_back(std::move(r));
  }
  return report;
}

ProbeReport uniqueness_probe(const Game& g, double tol, const OptimOptions& opts) {
  QuotientSpace space = build_quotient(g, opts);
  OptimResult result = optimal_ect(space, opts);
  return uniqueness_probe(space, result, tol);
}

ClassWeightTable policy_to_table(const QuotientSpace& space, const OptimResult& result,
                                 const SymmetryOptions& sym) {
  RenamingGroup gamma0 = stage_renaming_group(initial_stage(space.game), sym);
  ClassWeightTable table;
  for (size_t s = 0; s < space.states.size(); ++s) {
    const auto& st = space.states[s];
    StateKeyed sk = state_key_with_classes(st.rep, gamma0, sym);
    ClassWeightTable::Entry entry;
    entry.left.assign(static_cast<size_t>(sk.partition.num_classes), Rat(0));
    entry.right.assign(static_cast<size_t>(sk.partition.num_classes), Rat(0));
    for (size_t v = 0; v < st.vars.size(); ++v) {
      int canon = sk.canonical_class_of[static_cast<size_t>(st.vars[v].cls)];
      Rat w = rationalize(result.policy[s][v]);
      bool to_left = st.vars[v].on_left != sk.swapped;
      bool to_right = st.vars[v].on_right != sk.swapped;
      if (to_left) entry.left[static_cast<size_t>(canon)] = w;
      if (to_right) entry.right[static_cast<size_t>(canon)] = w;
    }
    // repair rounding drift so the expansion is an exact distribution
    for (bool left : {true, false}) {
      auto& weights = left ? entry.left : entry.right;
      Rat total(0);
      for (size_t v = 0; v < st.vars.size(); ++v) {
        int canon = sk.canonical_class_of[static_cast<size_t>(st.vars[v].cls)];
        bool present = (left != sk.swapped) ? st.vars[v].on_left : st.vars[v].on_right;
        int cnt = (left != sk.swapped) ? st.vars[v].lcount : st.vars[v].rcount;
        if (present) total += weights[static_cast<size_t>(canon)] * cnt;
      }
      if (total == 1 || total == 0) continue;
      for (auto& w : weights) w /= total;
    }
    table.states[sk.key] = std::move(entry);
  }
  return table;
}

double verify_quotient_merge(const Game& g, int depth, const OptimOptions& opts) {
  QuotientSpace space = build_quotient(g, opts);
  OptimResult res = optimal_ect(space, opts);
  // unrolled play tree, sibling-orbit dedup only
  struct Node {
    Stage stage;
    Partition part;
    int quot;
    std::vector<QuotientSpace::Term> losing;  // succ = child node index
    std::vector<QuotientSpace::Var> vars;
  };
  auto quot_of = [&](const Partition& p) {
    for (size_t t = 0; t < space.states.size(); ++t) {
      if (space.states[t].partition == p) return static_cast<int>(t);
    }
    for (size_t t = 0; t < space.states.size(); ++t) {
      if (find_partition_map(g, p, space.states[t].partition, opts.sym)) return static_cast<int>(t);
    }
    throw Error("stage outside the quotient closure");
  };
  std::vector<Node> nodes;
  RenamingGroup gamma0 = stage_renaming_group(initial_stage(g), opts.sym);
  std::vector<RenamingGroup> node_groups;
  nodes.push_back({initial_stage(g), gamma0.orbits(), 0, {}, {}});
  nodes[0].quot = quot_of(nodes[0].part);
  node_groups.push_back(gamma0);
  std::vector<size_t> frontier{0};
  for (int d = 0; d < depth; ++d) {
    std::vector<size_t> next_frontier;
    for (size_t ni : frontier) {
      Expansion ex = expand_stage(nodes[ni].stage, node_groups[ni], nodes[ni].part);
      nodes[ni].vars = vars_from_partition(g, nodes[ni].part);
      for (const auto& t : ex.losing) {
        size_t ci = nodes.size();
        nodes.push_back({std::move(ex.succs[static_cast<size_t>(t.succ)]),
                         std::move(ex.succ_partitions[static_cast<size_t>(t.succ)]), 0, {}, {}});
        nodes.back().quot = quot_of(nodes.back().part);
        node_groups.push_back(std::move(ex.succ_groups[static_cast<size_t>(t.succ)]));
        nodes[ni].losing.push_back({t.a, t.b, t.count, static_cast<int>(ci)});
        if (d + 1 < depth) next_frontier.push_back(ci);
      }
    }
    frontier = std::move(next_frontier);
  }
  // backward induction: leaves take the quotient value
  std::vector<double> val(nodes.size(), 0.0);
  double worst = 0;
  for (size_t i = nodes.size(); i-- > 0;) {
    if (nodes[i].losing.empty() && nodes[i].vars.empty()) {
      val[i] = res.state_values[static_cast<size_t>(nodes[i].quot)];
      continue;
    }
    InnerProblem p = make_inner(nodes[i].vars, nodes[i].losing, val);
    InnerOutcome out = inner_minimize(p, g, opts, i + 101, nullptr, true);
    val[i] = out.value;
    worst = std::max(worst, std::fabs(val[i] - res.state_values[static_cast<size_t>(nodes[i].quot)]));
  }
  return worst;
}

}  // namespace wlc
