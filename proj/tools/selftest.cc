// Copyright 2026 The SAA-inc Authors. All rights reserved.
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

#include "tools/selftest.h"

#include <cmath>
#include <functional>
#include <string>
#include <vector>

#include "saa/auction.h"
#include "saa/bandit.h"
#include "saa/determinize.h"
#include "saa/prediction.h"
#include "saa/valuation.h"

namespace saa::tools {
namespace {

class RandomBidder : public Strategy {
 public:
  explicit RandomBidder(std::uint64_t seed) : rng_(seed) {}
  ItemSet Bid(const Observation& obs) override {
    const auto legal = LegalActions(*obs.config, *obs.state, obs.bidder,
                                    obs.own_type->budget);
    return legal[rng_.UniformInt(legal.size())];
  }

 private:
  Rng rng_;
};

bool EngineCheck(std::uint64_t seed) {
  Rng rng(seed);
  for (int t = 0; t < 300; ++t) {
    GameConfig config{2 + static_cast<int>(rng.UniformInt(3)),
                      1 + static_cast<int>(rng.UniformInt(5)), 1.0, 0};
    std::vector<BidderType> types;
    std::vector<RandomBidder> bidders;
    std::vector<Strategy*> strategies;
    std::vector<double> budgets;
    for (int i = 0; i < config.num_bidders; ++i) {
      TypeDistribution dist;
      dist.values = GenerateComplementarity(config.num_items, 0.5, 5.0, rng);
      dist.budget = GenerateBudgetDistribution(0.5, 2.0, 12.0, rng);
      types.push_back(SampleType(dist, rng, rng));
      budgets.push_back(types.back().budget);
      bidders.emplace_back(rng.NextU64());
    }
    for (auto& b : bidders) strategies.push_back(&b);
    std::vector<RoundRecord> history;
    const Outcome outcome = PlayOut(config, types, strategies, rng, &history);
    if (outcome.rounds > RoundLimit(config, budgets)) return false;
    for (std::size_t r = 1; r < history.size(); ++r) {
      const AuctionState& a = history[r - 1].before;
      const AuctionState& b = history[r].before;
      for (int j = 0; j < config.num_items; ++j) {
        if (b.prices[j] < a.prices[j]) return false;
      }
      for (int i = 0; i < config.num_bidders; ++i) {
        if (b.eligibility[i] > a.eligibility[i]) return false;
      }
    }
    ItemSet seen;
    for (int i = 0; i < config.num_bidders; ++i) {
      if (outcome.allocation[i].Intersects(seen)) return false;
      seen = seen | outcome.allocation[i];
      double spend = 0.0;
      outcome.allocation[i].ForEach(
          [&](int j) { spend += outcome.final_prices[j]; });
      if (spend > types[i].budget + 1e-9) return false;
    }
  }
  return true;
}

bool ValuationCheck(std::uint64_t seed) {
  Rng rng(seed);
  for (double eta : {0.0, 0.5, 0.8, 1.0}) {
    const auto dist = GenerateComplementarity(5, eta, 5.0, rng);
    for (int t = 0; t < 500; ++t) {
      if (!DrawValueFunction(dist, rng).IsMonotone()) return false;
    }
  }
  return true;
}

bool BanditCheck(std::uint64_t seed) {
  Rng rng(seed);
  for (int t = 0; t < 1000; ++t) {
    const int k = 1 + static_cast<int>(rng.UniformInt(12));
    InfoSetStats info;
    std::vector<char> legal(k, 1);
    for (int a = 0; a < k; ++a) {
      info.AddArm(ItemSet(static_cast<std::uint32_t>(a)));
      info.stats[a].s = rng.Uniform(-50.0, 50.0);
      info.stats[a].n = static_cast<std::int64_t>(rng.UniformInt(100));
      info.stats[a].available = info.stats[a].n + 1;
    }
    info.visits = static_cast<std::int64_t>(rng.UniformInt(1000));
    double sum = 0.0;
    for (double p : Exp3Policy(info)) sum += p;
    double sum_subset = 0.0;
    for (double p : SubsetExp3Policy(info, legal, info.visits)) sum_subset += p;
    if (std::abs(sum - 1.0) > 1e-12 || std::abs(sum_subset - 1.0) > 1e-12) {
      return false;
    }
  }
  return true;
}

bool InferenceCheck(std::uint64_t seed) {
  Rng rng(seed);
  for (int t = 0; t < 1000; ++t) {
    BudgetDistribution prior;
    prior.lower = rng.Uniform(0.0, 30.0);
    prior.upper = prior.lower + rng.Uniform(0.0, 10.0);
    const double b1 = rng.Uniform(0.0, 45.0);
    const double b2 = b1 + rng.Uniform(0.0, 5.0);
    const BudgetDistribution x = InferBudget(prior, b1);
    const BudgetDistribution y = InferBudget(prior, b2);
    if (!(InferBudget(x, b1) == x)) return false;
    if (y.lower < x.lower || y.upper > x.upper) return false;
    if (!x.contradicted && x.lower < b1) return false;
  }
  return true;
}

bool PpLegalityCheck(std::uint64_t seed) {
  Rng rng(seed);
  for (int t = 0; t < 300; ++t) {
    GameConfig config{2, 1 + static_cast<int>(rng.UniformInt(4)), 1.0, 0};
    TypeDistribution dist;
    dist.values = GenerateComplementarity(config.num_items, 0.3, 5.0, rng);
    dist.budget = GenerateBudgetDistribution(0.5, 1.0, 15.0, rng);
    const BidderType type = SampleType(dist, rng, rng);
    AuctionState state = InitialState(config);
    for (int j = 0; j < config.num_items; ++j) {
      state.prices[j] = static_cast<int>(rng.UniformInt(6));
      state.temp_winner[j] =
          state.prices[j] > 0 ? static_cast<int>(rng.UniformInt(2)) : kNoBidder;
    }
    std::vector<double> p(config.num_items);
    for (double& x : p) x = rng.Uniform(0.0, 8.0);
    const ItemSet bid = PpBid(config, state, 0, type, p);
    if (!IsLegalBid(config, state, 0, type.budget, bid)) return false;
  }
  return true;
}

}  // namespace

bool RunSelfTest(std::ostream& out, std::uint64_t seed) {
  const std::vector<std::pair<std::string, std::function<bool(std::uint64_t)>>>
      checks = {{"engine invariants", EngineCheck},
                {"free disposal", ValuationCheck},
                {"exp3 normalisation", BanditCheck},
                {"budget inference", InferenceCheck},
                {"pp legality", PpLegalityCheck}};
  bool ok = true;
  for (const auto& [name, check] : checks) {
    bool pass = false;
    try {
      pass = check(seed);
    } catch (const std::exception& e) {
      out << name << ": exception: " << e.what() << "\n";
    }
    out << (pass ? "PASS " : "FAIL ") << name << "\n";
    ok = ok && pass;
  }
  return ok;
}

}  // namespace saa::tools
