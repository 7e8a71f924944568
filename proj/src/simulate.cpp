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

#include "wlc/simulate.hpp"

#include <cmath>

#include "wlc/errors.hpp"

namespace wlc {

namespace {

int sample_index(const std::vector<Rat>& weights, double u) {
  double acc = 0;
  for (size_t i = 0; i < weights.size(); ++i) {
    acc += weights[i].get_d();
    if (u < acc) return static_cast<int>(i);
  }
  for (size_t i = weights.size(); i-- > 0;) {
    if (weights[i] > 0) return static_cast<int>(i);
  }
  throw Error("cannot sample from an empty distribution");
}

template <typename T>
int sample_branch(const std::vector<std::pair<Rat, T>>& branches, double u) {
  double acc = 0;
  for (size_t i = 0; i < branches.size(); ++i) {
    acc += branches[i].first.get_d();
    if (u < acc) return static_cast<int>(i);
  }
  return static_cast<int>(branches.size()) - 1;
}

}  // namespace

SimReport simulate(const Game& g, const Protocol& pr, uint64_t episodes, uint64_t seed,
                   int max_rounds) {
  if (episodes < 1) throw Error("simulate needs at least one episode");
  SimReport report;
  report.episodes = episodes;
  report.max_rounds = max_rounds;
  auto game = std::make_shared<Game>(g);
  double sum = 0, sumsq = 0;
  uint64_t counted = 0;
  for (uint64_t e = 0; e < episodes; ++e) {
    SplitMix64 rng(SplitMix64::mix(seed, e));
    Stage stage = initial_stage(game);
    Memory mem;
    int rounds = 0;
    bool won = false;
    while (rounds < max_rounds) {
      ChoiceDistribution dl = pr.distribution(stage, Side::Left, mem);
      ChoiceDistribution dr = pr.distribution(stage, Side::Right, mem);
      Edge pair{sample_index(dl.weights, rng.unit()), sample_index(dr.weights, rng.unit())};
      ++rounds;
      if (g.is_winning(pair.first, pair.second)) {
        won = true;
        break;
      }
      auto branches = pr.memory_branches(stage, mem, pair);
      if (branches.size() == 1) {
        mem = branches[0].second;
      } else {
        mem = branches[static_cast<size_t>(sample_branch(branches, rng.unit()))].second;
      }
      stage = wlc::advance(stage, pair).first;
    }
    if (!won) {
      ++report.truncated;
      continue;
    }
    if (report.histogram.size() <= static_cast<size_t>(rounds)) {
      report.histogram.resize(static_cast<size_t>(rounds) + 1, 0);
    }
    report.histogram[static_cast<size_t>(rounds)]++;
    sum += rounds;
    sumsq += static_cast<double>(rounds) * rounds;
    ++counted;
  }
  if (counted > 0) {
    report.mean = sum / static_cast<double>(counted);
    if (counted > 1) {
      double var = (sumsq - sum * sum / static_cast<double>(counted)) /
                   static_cast<double>(counted - 1);
      report.std_error = std::sqrt(std::max(0.0, var) / static_cast<double>(counted));
    }
  }
  return report;
}

}  // namespace wlc
