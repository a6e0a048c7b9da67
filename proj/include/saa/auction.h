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

#ifndef SAA_AUCTION_H_
#define SAA_AUCTION_H_

#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "saa/item_set.h"
#include "saa/random.h"
#include "saa/value_function.h"

namespace saa {

inline constexpr int kNoBidder = -1;
inline constexpr int kMaxBidders = 64;

struct GameConfig {
  int num_bidders = 3;
  int num_items = 9;
  // Bid increment. Prices live on the grid {0, eps, 2 eps, ...}.
  double epsilon = 1.0;
  // Safety cap on rounds; 0 means 1 + ceil(sum of budgets / epsilon).
  int max_rounds = 0;

  // Throws std::invalid_argument unless 2 <= n <= kMaxBidders, 1 <= m <= kMaxItems and
  // epsilon > 0.
  void Validate() const;
};

// Public state of the auction between rounds. Prices are stored as integer
// multiples of epsilon so the engine never accumulates rounding error.
struct AuctionState {
  int round = 0;
  std::vector<int> prices;
  std::vector<int> temp_winner;  // kNoBidder when nobody has bid yet
  std::vector<int> eligibility;
  bool terminal = false;
  bool last_round_had_bids = false;

  ItemSet HeldBy(int bidder) const;
  // Sum of prices over a bundle, in increments.
  long long PriceSum(ItemSet bundle) const;

  friend bool operator==(const AuctionState&, const AuctionState&) = default;
};

AuctionState InitialState(const GameConfig& config);

// Money committed by a bidder through the items it temporarily wins.
double CommittedSpend(const GameConfig& config, const AuctionState& state,
                      int bidder);

// Eligibility and budget constraints on a new bid, plus the engine's
// simplifications: bids only on items not currently held by the bidder, at
// the next price P_j + eps.
bool IsLegalBid(const GameConfig& config, const AuctionState& state,
                int bidder, double budget, ItemSet bid);

// Every legal bid for the bidder, in increasing bitmask order. The empty
// bid is always included. Throws std::out_of_range on a bad bidder id.
std::vector<ItemSet> LegalActions(const GameConfig& config,
                                  const AuctionState& state, int bidder,
                                  double budget);

class IllegalBidError : public std::invalid_argument {
 public:
  IllegalBidError(int bidder, const std::string& what)
      : std::invalid_argument(what), bidder_(bidder) {}
  int bidder() const { return bidder_; }

 private:
  int bidder_;
};

// Resolves one round of simultaneous bids. Each item that receives bids
// goes up by one increment and its temporary winner is drawn uniformly
// among the bidders on it. When nobody bids the returned state is terminal
// and otherwise identical apart from the round counter. Throws
// IllegalBidError naming the first bidder whose bid is illegal.
AuctionState ApplyRound(const GameConfig& config, const AuctionState& state,
                        std::span<const ItemSet> bids,
                        std::span<const double> budgets, Rng& rng);

// Same as ApplyRound without the legality pass. For callers that only
// ever produce legal bids (the search rollouts).
AuctionState ApplyRoundUnchecked(const GameConfig& config,
                                 const AuctionState& state,
                                 std::span<const ItemSet> bids, Rng& rng);

// Profit v(X) - sum_{j in X} P_j.
double Utility(const ValueFunction& values, ItemSet bundle,
               std::span<const int> prices, double epsilon);

// Loss-amplified utility (1 + alpha [sigma < 0]) sigma.
constexpr double RiskAverseUtility(double sigma, double alpha) {
  return sigma < 0.0 ? (1.0 + alpha) * sigma : sigma;
}

// What was disclosed after a round: the state the bids were placed against
// and every bidder's bid.
struct RoundRecord {
  AuctionState before;
  std::vector<ItemSet> bids;
};

struct Observation {
  const GameConfig* config = nullptr;
  const AuctionState* state = nullptr;
  int bidder = 0;
  const BidderType* own_type = nullptr;
  std::span<const RoundRecord> history;
};

// A bidding policy. Implementations see only the public state, the
// disclosed history and their own type.
class Strategy {
 public:
  virtual ~Strategy() = default;
  virtual ItemSet Bid(const Observation& obs) = 0;
};

struct Outcome {
  std::vector<int> final_prices;
  std::vector<ItemSet> allocation;
  std::vector<double> utilities;
  int rounds = 0;
};

// Standing allocation and quasi-linear utilities for a (usually terminal) state.
Outcome MakeOutcome(const GameConfig& config, const AuctionState& state,
                    std::span<const BidderType> types);

// 1 + ceil(sum budgets / eps) unless config.max_rounds overrides it.
int RoundLimit(const GameConfig& config, std::span<const double> budgets);

class NonTerminationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Runs the auction to completion. The engine rng only resolves ties.
// Appends one RoundRecord per round to history when given.
Outcome PlayOut(const GameConfig& config, std::span<const BidderType> types,
                std::span<Strategy* const> strategies, Rng& engine_rng,
                std::vector<RoundRecord>* history = nullptr);

}  // namespace saa

#endif  // SAA_AUCTION_H_
