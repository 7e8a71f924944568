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

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "nlohmann/json.hpp"
#include "wlc/chain.hpp"
#include "wlc/enumerate.hpp"
#include "wlc/errors.hpp"
#include "wlc/game.hpp"
#include "wlc/golden.hpp"
#include "wlc/optimizer.hpp"
#include "wlc/protocol.hpp"
#include "wlc/simulate.hpp"

namespace {

using namespace wlc;

Game load_game(const std::string& arg) {
  if (arg.rfind("cm", 0) == 0 && arg.size() > 2 && std::isdigit(arg[2])) {
    return make_choice_matching(std::stoi(arg.substr(2)));
  }
  std::ifstream in(arg);
  if (!in) throw Error("cannot open game file " + arg);
  std::stringstream buf;
  buf << in.rdbuf();
  std::string text = buf.str();
  if (!text.empty() && text.find_first_not_of(" \t\r\n") != std::string::npos &&
      text[text.find_first_not_of(" \t\r\n")] == '{') {
    return game_from_json(text);
  }
  return parse_game(text);
}

std::string fmt_maybe_rat(const MaybeRat& r) { return r ? rat_str(*r) : "inf"; }
std::string fmt_maybe_int(const MaybeInt& v) { return v ? std::to_string(*v) : "inf"; }

struct GlobalFlags {
  double tol = 1e-9;
  int max_states = 10000;
  bool json = false;
  std::string out_dir;
};

int cmd_analyze(const std::string& game_arg, const std::string& proto, const GlobalFlags& gf,
                bool dump_chain) {
  Game g = load_game(game_arg);
  auto pr = make_protocol(proto);
  ChainOptions copts;
  copts.max_states = gf.max_states;
  StageChain chain = build_chain(g, *pr, copts);
  Rat p = oscp(g, *pr);
  MaybeRat ect = exact_ect(chain);
  MaybeInt gct = exact_gct(chain);
  if (gf.json) {
    nlohmann::json j;
    j["protocol"] = proto;
    j["oscp"] = rat_str(p);
    j["ect"] = ect ? nlohmann::json(rat_str(*ect)) : nlohmann::json(nullptr);
    j["gct"] = gct ? nlohmann::json(*gct) : nlohmann::json(nullptr);
    j["chain_states"] = chain.states.size();
    std::cout << j.dump(2) << "\n";
  } else {
    std::cout << "protocol: " << proto << "\n";
    std::cout << "oscp: " << rat_str(p) << "\n";
    std::cout << "ect: " << fmt_maybe_rat(ect) << "\n";
    std::cout << "gct: " << fmt_maybe_int(gct) << "\n";
  }
  if (dump_chain) {
    std::string path = (gf.out_dir.empty() ? std::string(".") : gf.out_dir) + "/chain.json";
    if (!gf.out_dir.empty()) std::filesystem::create_directories(gf.out_dir);
    std::ofstream out(path);
    out << chain_to_json(chain);
    std::cerr << "chain written to " << path << "\n";
  }
  return 0;
}

int cmd_optimal(const std::string& game_arg, bool with_gct, bool probe,
                const std::string& policy_out, const GlobalFlags& gf) {
  Game g = load_game(game_arg);
  OptimOptions opts;
  opts.tol = gf.tol;
  opts.max_states = gf.max_states;
  QuotientSpace space = build_quotient(g, opts);
  OptimResult res = optimal_ect(space, opts);
  nlohmann::json j;
  j["optimal_ect"] = res.value;
  j["states"] = res.diag.states;
  j["sweeps"] = res.diag.sweeps;
  j["bellman_residual"] = res.diag.bellman_residual;
  if (!gf.json) {
    std::cout << "optimal_ect: " << res.value << "  (states=" << res.diag.states
              << " sweeps=" << res.diag.sweeps << " residual=" << res.diag.bellman_residual
              << ")\n";
  }
  if (with_gct) {
    GctResult gr = optimal_gct(space, opts);
    j["optimal_gct"] = gr.value ? nlohmann::json(*gr.value) : nlohmann::json(nullptr);
    if (!gf.json) std::cout << "optimal_gct: " << fmt_maybe_int(gr.value) << "\n";
  }
  if (probe) {
    ProbeReport rep = uniqueness_probe(space, res, std::max(gf.tol, 1e-9));
    nlohmann::json ja = nlohmann::json::array();
    for (const auto& st : rep.states) {
      nlohmann::json js;
      js["state"] = st.state;
      js["touched"] = st.touched_count;
      js["description"] = st.description;
      ja.push_back(js);
      if (!gf.json) {
        std::cout << "state " << st.state << " (touched=" << st.touched_count
                  << "): " << st.description << "\n";
      }
    }
    j["probe"] = ja;
  }
  if (!policy_out.empty()) {
    ClassWeightTable table = policy_to_table(space, res);
    std::ofstream out(policy_out);
    out << table.to_json();
    std::cerr << "policy written to " << policy_out << "\n";
  }
  if (gf.json) std::cout << j.dump(2) << "\n";
  return 0;
}

int cmd_enumerate(int m, std::optional<int> max_edges, bool deep, const GlobalFlags& gf) {
  if (m == 5 && !deep) {
    std::cerr << "the m=5 census is gated behind --deep (thousands of optimizer runs)\n";
    return 1;
  }
  GreatestOptions opts;
  opts.optim.tol = gf.tol;
  opts.optim.max_states = gf.max_states;
  if (!gf.out_dir.empty()) opts.checkpoint_dir = gf.out_dir + "/checkpoints";
  if (max_edges) {
    // plain census with an edge cap, no greatest-value bookkeeping
    EnumOptions eo;
    eo.max_edges = max_edges;
    int count = 0;
    enumerate_games(m, eo, [&](const Game& g) {
      ++count;
      if (!gf.json) std::cout << canonical_game_key(g) << "\n";
    });
    std::cerr << count << " canonical games\n";
    return 0;
  }
  GreatestEctResult res = greatest_optimal_ect(m, opts);
  if (gf.json) {
    nlohmann::json j;
    j["m"] = m;
    j["greatest_optimal_ect"] = res.value;
    j["witnesses"] = res.witnesses;
    j["census_size"] = res.census.entries.size();
    j["pruned_games"] = res.pruned_games;
    j["pruned_bound_ok"] = res.pruned_bound_ok;
    std::cout << j.dump(2) << "\n";
  } else {
    std::cout << "greatest optimal ECT at m=" << m << ": " << res.value << "\n";
    for (const auto& w : res.witnesses) std::cout << "witness: " << w << "\n";
    std::cout << "census: " << res.census.entries.size() << " games";
    if (res.pruned_games) {
      std::cout << ", pruned " << res.pruned_games
                << (res.pruned_bound_ok ? " (bound verified)" : " (BOUND FAILED)");
    }
    std::cout << "\n";
  }
  if (!gf.out_dir.empty()) atlas_report(res.census, gf.out_dir);
  return res.pruned_bound_ok ? 0 : 1;
}

int cmd_simulate(const std::string& game_arg, const std::string& proto, uint64_t episodes,
                 uint64_t seed, int max_rounds, const GlobalFlags& gf) {
  Game g = load_game(game_arg);
  auto pr = make_protocol(proto);
  SimReport rep = simulate(g, *pr, episodes, seed, max_rounds);
  if (gf.json) {
    nlohmann::json j;
    j["episodes"] = rep.episodes;
    j["mean"] = rep.mean;
    j["std_error"] = rep.std_error;
    j["truncated"] = rep.truncated;
    j["histogram"] = rep.histogram;
    std::cout << j.dump(2) << "\n";
  } else {
    std::cout << "episodes: " << rep.episodes << "\n";
    std::cout << "mean rounds: " << rep.mean << " (stderr " << rep.std_error << ")\n";
    std::cout << "truncated: " << rep.truncated << "\n";
  }
  // a run with more than 0.01% truncated episodes is a failure
  return (static_cast<double>(rep.truncated) > 1e-4 * static_cast<double>(rep.episodes)) ? 1 : 0;
}

int cmd_formulas(int m, const GlobalFlags& gf) {
  CmClosedForms f = cm_closed_forms(m);
  if (gf.json) {
    nlohmann::json j;
    j["m"] = m;
    j["wm_ect"] = rat_str(f.wm_ect);
    j["la_ect"] = f.la_ect ? nlohmann::json(rat_str(*f.la_ect)) : nlohmann::json(nullptr);
    j["la_gct"] = f.la_gct ? nlohmann::json(*f.la_gct) : nlohmann::json(nullptr);
    j["optimal_ect"] = rat_str(f.optimal_ect);
    j["optimal_gct"] = f.optimal_gct ? nlohmann::json(*f.optimal_gct) : nlohmann::json(nullptr);
    std::cout << j.dump(2) << "\n";
  } else {
    std::cout << "m=" << m << "\n";
    std::cout << "wm_ect: " << rat_str(f.wm_ect) << "\n";
    std::cout << "la_ect: " << (f.la_ect ? rat_str(*f.la_ect) : "-") << "\n";
    std::cout << "la_gct: " << (f.la_gct ? std::to_string(*f.la_gct) : "-") << "\n";
    std::cout << "optimal_ect: " << rat_str(f.optimal_ect) << "\n";
    std::cout << "optimal_gct: " << fmt_maybe_int(f.optimal_gct) << "\n";
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"win-lose coordination game analysis"};
  app.require_subcommand(1);
  GlobalFlags gf;
  app.add_option("--tol", gf.tol, "optimizer tolerance");
  app.add_option("--max-states", gf.max_states, "state budget for chains and quotients");
  app.add_flag("--json", gf.json, "JSON output");
  app.add_option("--out", gf.out_dir, "output directory");

  std::string game_arg, proto = "uniform", policy_out;
  bool with_gct = false, probe = false, dump_chain = false, deep = false;
  int m = 3, max_rounds = 100000;
  std::optional<int> max_edges;
  uint64_t episodes = 100000, seed = 1;

  auto* analyze = app.add_subcommand("analyze", "exact OSCP/ECT/GCT for a fixed protocol");
  analyze->add_option("game", game_arg, "game file or cm<m>")->required();
  analyze->add_option("--protocol", proto, "uniform|wm|la|table:<file>")->required();
  analyze->add_flag("--dump-chain", dump_chain, "write chain.json");

  auto* optimal = app.add_subcommand("optimal", "optimal ECT (and GCT) over structural protocols");
  optimal->add_option("game", game_arg, "game file or cm<m>")->required();
  optimal->add_flag("--gct", with_gct, "also compute the optimal GCT");
  optimal->add_flag("--probe-uniqueness", probe, "report near-optimal action sets");
  optimal->add_option("--export-policy", policy_out, "write the argmin policy table");

  auto* enumerate = app.add_subcommand("enumerate", "census of m-choice games");
  enumerate->add_option("m", m, "game size")->required();
  enumerate->add_option("--max-edges", max_edges, "cap |W| (keys only)");
  enumerate->add_flag("--deep", deep, "allow the m=5 census");

  auto* simulate_cmd = app.add_subcommand("simulate", "Monte Carlo estimate of the ECT");
  simulate_cmd->add_option("game", game_arg, "game file or cm<m>")->required();
  simulate_cmd->add_option("--protocol", proto, "uniform|wm|la|table:<file>")->required();
  simulate_cmd->add_option("--episodes", episodes, "episode count");
  simulate_cmd->add_option("--seed", seed, "64-bit seed");
  simulate_cmd->add_option("--max-rounds", max_rounds, "truncation horizon");

  auto* golden = app.add_subcommand("golden", "verify the CM summary table, m = 1..9");

  auto* formulas = app.add_subcommand("formulas", "closed forms for CM_m");
  formulas->add_option("m", m, "game size")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (analyze->parsed()) return cmd_analyze(game_arg, proto, gf, dump_chain);
    if (optimal->parsed()) return cmd_optimal(game_arg, with_gct, probe, policy_out, gf);
    if (enumerate->parsed()) return cmd_enumerate(m, max_edges, deep, gf);
    if (simulate_cmd->parsed()) return cmd_simulate(game_arg, proto, episodes, seed, max_rounds, gf);
    if (golden->parsed()) {
      wlc::GoldenOptions gopts;
      gopts.tol = gf.tol;
      wlc::GoldenReport rep = wlc::golden_table(gopts);
      for (const auto& line : rep.lines) std::cout << line << "\n";
      return rep.all_ok ? 0 : 1;
    }
    if (formulas->parsed()) return cmd_formulas(m, gf);
  } catch (const wlc::BudgetError& e) {
    std::cerr << "budget error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
