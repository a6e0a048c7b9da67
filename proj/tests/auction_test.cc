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

#include <cmath>
#include <vector>

#include "doctest.h"
#include "saa/auction.h"
#include "saa/prediction.h"
#include "tests/oracles.h"
#include "tests/test_util.h"

namespace saa {
namespace {

using testing::Additive;
using testing::Type;
using testing::ZeroType;

class PassBidder : public Strategy {
 public:
  ItemSet Bid(const Observation&) override { return ItemSet(); }
};

class SbBidder : public Strategy {
 public:
  ItemSet Bid(const Observation& obs) override {
    return SbBid(*obs.config, *obs.state, obs.bidder, *obs.own_type);
  }
};

class UniformBidder : public Strategy {
 public:
  explicit UniformBidder(std::uint64_t seed) : rng_(seed) {}
  ItemSet Bid(const Observation& obs) override {
    auto legal = LegalActions(*obs.config, *obs.state, obs.bidder,
                              obs.own_type->budget);
    return legal[rng_.UniformInt(legal.size())];
  }

 private:
  Rng rng_;
};

TEST_CASE("ItemSet algebra") {
  const ItemSet a(0b0110), b(0b0011);
  CHECK((a | b).bits() == 0b0111);
  CHECK((a & b).bits() == 0b0010);
  CHECK((a - b).bits() == 0b0100);
  CHECK(a.size() == 2);
  CHECK(a.Contains(1));
  CHECK_FALSE(a.Contains(0));
  CHECK(ItemSet(0b0010).IsSubsetOf(a));
  CHECK(a.FitsIn(3));
  CHECK_FALSE(a.FitsIn(2));
  CHECK(ItemSet::Full(4).bits() == 0b1111);
  CHECK(a.ToString() == "{1,2}");
  CHECK(ItemSet().ToString() == "{}");
}

TEST_CASE("GameConfig validation") {
  CHECK_NOTHROW(GameConfig{2, 1, 1.0, 0}.Validate());
  CHECK_THROWS(GameConfig{1, 3, 1.0, 0}.Validate());
  CHECK_THROWS(GameConfig{2, 0, 1.0, 0}.Validate());
  CHECK_THROWS(GameConfig{2, 3, 0.0, 0}.Validate());
}

TEST_CASE("legal actions: nothing binds gives every subset") {
  const GameConfig config{2, 3, 1.0, 0};
  const AuctionState s = InitialState(config);
  const auto legal = LegalActions(config, s, 0, 100.0);
  CHECK(legal.size() == 8);
  for (std::uint32_t x = 0; x < 8; ++x) CHECK(legal[x].bits() == x);
}

TEST_CASE("legal actions: holding everything leaves only the empty bid") {
  const GameConfig config{2, 3, 1.0, 0};
  AuctionState s = InitialState(config);
  for (int j = 0; j < 3; ++j) {
    s.prices[j] = 1;
    s.temp_winner[j] = 0;
  }
  const auto legal = LegalActions(config, s, 0, 100.0);
  REQUIRE(legal.size() == 1);
  CHECK(legal[0].empty());
}

TEST_CASE("legal actions: budget of one increment") {
  const GameConfig config{2, 3, 1.0, 0};
  const AuctionState s = InitialState(config);
  // Oracle enumeration of the 8 subsets.
  std::vector<std::uint32_t> expected;
  for (std::uint32_t x = 0; x < 8; ++x) {
    if (oracle::Legal(3, s.prices, s.temp_winner, 3, 0, 1.0, 1.0, x)) {
      expected.push_back(x);
    }
  }
  CHECK(expected == std::vector<std::uint32_t>{0, 1, 2, 4});
  const auto legal = LegalActions(config, s, 0, 1.0);
  std::vector<std::uint32_t> got;
  for (ItemSet x : legal) got.push_back(x.bits());
  CHECK(got == expected);
}

TEST_CASE("legal actions: bad bidder id") {
  const GameConfig config{2, 2, 1.0, 0};
  const AuctionState s = InitialState(config);
  CHECK_THROWS_AS(LegalActions(config, s, 2, 10.0), std::out_of_range);
  CHECK_THROWS_AS(LegalActions(config, s, -1, 10.0), std::out_of_range);
}

TEST_CASE("legal actions match the oracle on random states") {
  Rng rng(11);
  for (int t = 0; t < 2000; ++t) {
    const int m = 1 + static_cast<int>(rng.UniformInt(5));
    const GameConfig config{3, m, rng.Uniform01() < 0.5 ? 1.0 : 0.5, 0};
    AuctionState s = InitialState(config);
    for (int j = 0; j < m; ++j) {
      s.prices[j] = static_cast<int>(rng.UniformInt(5));
      s.temp_winner[j] =
          s.prices[j] == 0 ? kNoBidder : static_cast<int>(rng.UniformInt(3));
    }
    s.eligibility[0] = static_cast<int>(rng.UniformInt(m + 1));
    const double budget = rng.Uniform(0.0, 12.0);
    std::vector<std::uint32_t> expected;
    for (std::uint32_t x = 0; x < (1u << m); ++x) {
      if (oracle::Legal(m, s.prices, s.temp_winner, s.eligibility[0], 0,
                        budget, config.epsilon, x)) {
        expected.push_back(x);
      }
    }
    std::vector<std::uint32_t> got;
    for (ItemSet x : LegalActions(config, s, 0, budget)) got.push_back(x.bits());
    REQUIRE(got == expected);
    for (std::uint32_t x = 0; x < (1u << m); ++x) {
      const bool in = std::find(expected.begin(), expected.end(), x) !=
                      expected.end();
      REQUIRE(IsLegalBid(config, s, 0, budget, ItemSet(x)) == in);
    }
  }
}

TEST_CASE("apply round: nobody bids ends the auction") {
  const GameConfig config{2, 2, 1.0, 0};
  AuctionState s = InitialState(config);
  s.prices = {2, 0};
  s.temp_winner = {1, kNoBidder};
  Rng rng(1);
  const std::vector<ItemSet> bids(2);
  const std::vector<double> budgets(2, 10.0);
  const AuctionState next = ApplyRound(config, s, bids, budgets, rng);
  CHECK(next.terminal);
  CHECK_FALSE(next.last_round_had_bids);
  CHECK(next.prices == s.prices);
  CHECK(next.temp_winner == s.temp_winner);
  CHECK(next.eligibility == s.eligibility);
  CHECK(next.round == s.round + 1);
  CHECK_THROWS_AS(ApplyRound(config, next, bids, budgets, rng),
                  std::logic_error);
}

TEST_CASE("apply round: single bid raises the price and takes the lead") {
  const GameConfig config{2, 2, 1.0, 0};
  const AuctionState s = InitialState(config);
  Rng rng(1);
  const std::vector<ItemSet> bids = {ItemSet::Single(1), ItemSet()};
  const std::vector<double> budgets(2, 10.0);
  const AuctionState next = ApplyRound(config, s, bids, budgets, rng);
  CHECK_FALSE(next.terminal);
  CHECK(next.prices[1] == 1);
  CHECK(next.temp_winner[1] == 0);
  CHECK(next.prices[0] == 0);
  CHECK(next.temp_winner[0] == kNoBidder);
  CHECK(next.eligibility[0] == 1);
  CHECK(next.eligibility[1] == 0);
}

TEST_CASE("apply round: illegal bid names the bidder") {
  const GameConfig config{3, 2, 1.0, 0};
  const AuctionState s = InitialState(config);
  Rng rng(1);
  const std::vector<ItemSet> bids = {ItemSet(), ItemSet(), ItemSet(0b11)};
  const std::vector<double> budgets = {10.0, 10.0, 1.5};
  try {
    ApplyRound(config, s, bids, budgets, rng);
    FAIL("expected IllegalBidError");
  } catch (const IllegalBidError& e) {
    CHECK(e.bidder() == 2);
  }
}

TEST_CASE("apply round: ties are broken uniformly") {
  const GameConfig config{3, 1, 1.0, 0};
  const AuctionState s = InitialState(config);
  Rng rng(2024);
  const std::vector<double> budgets(3, 10.0);
  SUBCASE("two bidders") {
    const std::vector<ItemSet> bids = {ItemSet(1), ItemSet(1), ItemSet()};
    int wins0 = 0;
    const int trials = 10000;
    for (int t = 0; t < trials; ++t) {
      wins0 += ApplyRound(config, s, bids, budgets, rng).temp_winner[0] == 0;
    }
    CHECK(std::abs(wins0 / double(trials) - 0.5) <= 0.02);
  }
  SUBCASE("three bidders") {
    const std::vector<ItemSet> bids(3, ItemSet(1));
    std::vector<int> wins(3, 0);
    const int trials = 30000;
    for (int t = 0; t < trials; ++t) {
      ++wins[ApplyRound(config, s, bids, budgets, rng).temp_winner[0]];
    }
    const double sigma = std::sqrt(trials * (1.0 / 3) * (2.0 / 3));
    for (int w : wins) CHECK(std::abs(w - trials / 3.0) <= 3 * sigma);
  }
}

TEST_CASE("utility and risk-averse utility") {
  const ValueFunction v = Additive({4.0, 6.0});
  const std::vector<int> prices = {1, 3};
  CHECK(Utility(v, ItemSet(), prices, 1.0) == 0.0);
  CHECK(Utility(v, ItemSet(0b11), prices, 1.0) == doctest::Approx(6.0));
  const ValueFunction w = Additive({1.0, 2.0});
  CHECK(Utility(w, ItemSet(0b11), std::vector<int>{2, 3}, 1.0) ==
        doctest::Approx(-2.0));
  CHECK(RiskAverseUtility(6.0, 0.8) == 6.0);
  CHECK(RiskAverseUtility(-2.0, 0.5) == -3.0);
  CHECK(RiskAverseUtility(0.0, 0.7) == 0.0);
}

TEST_CASE("play out: nobody bids") {
  const GameConfig config{2, 3, 1.0, 0};
  std::vector<BidderType> types = {ZeroType(3, 5.0), ZeroType(3, 5.0)};
  PassBidder a, b;
  std::vector<Strategy*> strategies = {&a, &b};
  Rng rng(1);
  const Outcome out = PlayOut(config, types, strategies, rng);
  CHECK(out.rounds == 1);
  CHECK(out.final_prices == std::vector<int>{0, 0, 0});
  for (ItemSet x : out.allocation) CHECK(x.empty());
}

TEST_CASE("play out: lone straightforward bidder wins its bundle at one increment") {
  const GameConfig config{2, 2, 1.0, 0};
  std::vector<BidderType> types = {Type(Additive({5.0, 3.0}), 20.0),
                                   ZeroType(2, 20.0)};
  SbBidder a, b;
  std::vector<Strategy*> strategies = {&a, &b};
  Rng rng(1);
  const Outcome out = PlayOut(config, types, strategies, rng);
  CHECK(out.allocation[0].bits() == 0b11);
  CHECK(out.final_prices == std::vector<int>{1, 1});
  CHECK(out.utilities[0] == doctest::Approx(6.0));
  CHECK(out.rounds == 2);
}

TEST_CASE("play out: two straightforward bidders on one item") {
  // English ladder: prices climb until the next price exceeds a value or a
  // budget, so the close is at most min(value, floor(budget)) + eps.
  for (double budget : {3.5, 7.0, 20.0}) {
    const GameConfig config{2, 1, 1.0, 0};
    std::vector<BidderType> types = {Type(Additive({6.0}), budget),
                                     Type(Additive({6.0}), budget)};
    SbBidder a, b;
    std::vector<Strategy*> strategies = {&a, &b};
    Rng rng(3);
    const Outcome out = PlayOut(config, types, strategies, rng);
    const double bound = std::min(6.0, std::floor(budget)) + 1.0;
    CHECK(out.final_prices[0] <= bound);
    CHECK(out.final_prices[0] >= std::min(6.0, std::floor(budget)) - 1.0);
  }
}

TEST_CASE("play out: engine invariants on random legal play") {
  Rng rng(77);
  for (int t = 0; t < 500; ++t) {
    const int n = 2 + static_cast<int>(rng.UniformInt(3));
    const int m = 1 + static_cast<int>(rng.UniformInt(4));
    const GameConfig config{n, m, 1.0, 0};
    std::vector<BidderType> types;
    std::vector<UniformBidder> bidders;
    std::vector<Strategy*> strategies;
    std::vector<double> budgets;
    for (int i = 0; i < n; ++i) {
      types.push_back(ZeroType(m, rng.Uniform(0.0, 10.0)));
      budgets.push_back(types.back().budget);
      bidders.emplace_back(rng.NextU64());
    }
    for (auto& b : bidders) strategies.push_back(&b);
    std::vector<RoundRecord> history;
    const Outcome out = PlayOut(config, types, strategies, rng, &history);
    CHECK(out.rounds <= RoundLimit(config, budgets));
    for (std::size_t r = 0; r + 1 < history.size(); ++r) {
      const AuctionState& a = history[r].before;
      const AuctionState& b = history[r + 1].before;
      long long sa = 0, sb = 0;
      for (int j = 0; j < m; ++j) {
        REQUIRE(b.prices[j] >= a.prices[j]);
        sa += a.prices[j];
        sb += b.prices[j];
        if (b.prices[j] > 0) REQUIRE(b.temp_winner[j] != kNoBidder);
      }
      REQUIRE(sb >= sa + 1);
      for (int i = 0; i < n; ++i) {
        REQUIRE(b.eligibility[i] <= a.eligibility[i]);
        REQUIRE(CommittedSpend(config, b, i) <= types[i].budget);
      }
    }
    ItemSet seen;
    for (int i = 0; i < n; ++i) {
      REQUIRE_FALSE(out.allocation[i].Intersects(seen));
      seen = seen | out.allocation[i];
    }
  }
}

TEST_CASE("play out: round cap raises NonTerminationError") {
  const GameConfig config{2, 1, 1.0, 2};
  std::vector<BidderType> types = {Type(Additive({50.0}), 50.0),
                                   Type(Additive({50.0}), 50.0)};
  SbBidder a, b;
  std::vector<Strategy*> strategies = {&a, &b};
  Rng rng(1);
  CHECK_THROWS_AS(PlayOut(config, types, strategies, rng),
                  NonTerminationError);
}

TEST_CASE("round limit") {
  const GameConfig config{2, 1, 1.0, 0};
  const std::vector<double> budgets = {3.5, 4.0};
  CHECK(RoundLimit(config, budgets) == 1 + 8);
  const GameConfig capped{2, 1, 1.0, 5};
  CHECK(RoundLimit(capped, budgets) == 5);
}

}  // namespace
}  // namespace saa
