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

#include "saa/auction.h"

#include <algorithm>
#include <cmath>
#include <limits>

namespace saa {

void GameConfig::Validate() const {
  if (num_bidders < 2) {
    throw std::invalid_argument("GameConfig: need at least 2 bidders");
  }
  if (num_bidders > kMaxBidders) {
    throw std::invalid_argument("GameConfig: at most " +
                                std::to_string(kMaxBidders) + " bidders");
  }
  if (num_items < 1 || num_items > kMaxItems) {
    throw std::invalid_argument("GameConfig: item count must be in [1, " +
                                std::to_string(kMaxItems) + "]");
  }
  if (!(epsilon > 0.0) || !std::isfinite(epsilon)) {
    throw std::invalid_argument("GameConfig: epsilon must be positive");
  }
  if (max_rounds < 0) {
    throw std::invalid_argument("GameConfig: max_rounds must be >= 0");
  }
}

ItemSet AuctionState::HeldBy(int bidder) const {
  std::uint32_t bits = 0;
  for (std::size_t j = 0; j < temp_winner.size(); ++j) {
    if (temp_winner[j] == bidder) bits |= 1u << j;
  }
  return ItemSet(bits);
}

long long AuctionState::PriceSum(ItemSet bundle) const {
  long long total = 0;
  bundle.ForEach([&](int j) { total += prices[j]; });
  return total;
}

AuctionState InitialState(const GameConfig& config) {
  AuctionState state;
  state.prices.assign(config.num_items, 0);
  state.temp_winner.assign(config.num_items, kNoBidder);
  state.eligibility.assign(config.num_bidders, config.num_items);
  return state;
}

double CommittedSpend(const GameConfig& config, const AuctionState& state,
                      int bidder) {
  return config.epsilon *
         static_cast<double>(state.PriceSum(state.HeldBy(bidder)));
}

namespace {

void CheckBidder(const GameConfig& config, int bidder) {
  if (bidder < 0 || bidder >= config.num_bidders) {
    throw std::out_of_range("invalid bidder id " + std::to_string(bidder));
  }
}

}  // namespace

bool IsLegalBid(const GameConfig& config, const AuctionState& state,
                int bidder, double budget, ItemSet bid) {
  CheckBidder(config, bidder);
  if (bid.empty()) return true;
  if (!bid.FitsIn(config.num_items)) return false;
  const ItemSet held = state.HeldBy(bidder);
  if (bid.Intersects(held)) return false;
  if (bid.size() + held.size() > state.eligibility[bidder]) return false;
  const long long ticks =
      state.PriceSum(bid) + bid.size() + state.PriceSum(held);
  return config.epsilon * static_cast<double>(ticks) <= budget;
}

std::vector<ItemSet> LegalActions(const GameConfig& config,
                                  const AuctionState& state, int bidder,
                                  double budget) {
  CheckBidder(config, bidder);
  const ItemSet held = state.HeldBy(bidder);
  const std::uint32_t free = (ItemSet::Full(config.num_items) - held).bits();
  const int room = state.eligibility[bidder] - held.size();
  const long long held_ticks = state.PriceSum(held);

  std::vector<ItemSet> out;
  // Enumerate subsets of the free items in increasing bitmask order.
  for (std::uint32_t x = 0;; x = (x - free) & free) {
    const ItemSet bid(x);
    if (bid.empty()) {
      out.push_back(bid);
    } else if (bid.size() <= room) {
      const long long ticks = state.PriceSum(bid) + bid.size() + held_ticks;
      if (config.epsilon * static_cast<double>(ticks) <= budget) {
        out.push_back(bid);
      }
    }
    if (x == free) break;
  }
  return out;
}

AuctionState ApplyRoundUnchecked(const GameConfig& config,
                                 const AuctionState& state,
                                 std::span<const ItemSet> bids, Rng& rng) {
  AuctionState next = state;
  ++next.round;
  bool any = false;
  for (const ItemSet& b : bids) any = any || !b.empty();
  next.last_round_had_bids = any;
  if (!any) {
    next.terminal = true;
    return next;
  }

  int bidders_on_item[kMaxBidders];
  for (int j = 0; j < config.num_items; ++j) {
    int count = 0;
    for (int i = 0; i < config.num_bidders; ++i) {
      if (bids[i].Contains(j)) bidders_on_item[count++] = i;
    }
    if (count == 0) continue;
    next.prices[j] = state.prices[j] + 1;
    next.temp_winner[j] =
        count == 1 ? bidders_on_item[0]
                   : bidders_on_item[rng.UniformInt(
                         static_cast<std::uint64_t>(count))];
  }
  for (int i = 0; i < config.num_bidders; ++i) {
    const int participation = bids[i].size() + state.HeldBy(i).size();
    next.eligibility[i] = std::min(state.eligibility[i], participation);
  }
  return next;
}

AuctionState ApplyRound(const GameConfig& config, const AuctionState& state,
                        std::span<const ItemSet> bids,
                        std::span<const double> budgets, Rng& rng) {
  if (state.terminal) {
    throw std::logic_error("ApplyRound on a terminal state");
  }
  if (bids.size() != static_cast<std::size_t>(config.num_bidders) ||
      budgets.size() != bids.size()) {
    throw std::invalid_argument("ApplyRound: expected one bid and budget per bidder");
  }
  for (int i = 0; i < config.num_bidders; ++i) {
    if (!IsLegalBid(config, state, i, budgets[i], bids[i])) {
      throw IllegalBidError(i, "illegal bid " + bids[i].ToString() +
                                   " by bidder " + std::to_string(i) +
                                   " in round " + std::to_string(state.round));
    }
  }
  return ApplyRoundUnchecked(config, state, bids, rng);
}

double Utility(const ValueFunction& values, ItemSet bundle,
               std::span<const int> prices, double epsilon) {
  long long ticks = 0;
  bundle.ForEach([&](int j) { ticks += prices[j]; });
  return values(bundle) - epsilon * static_cast<double>(ticks);
}

Outcome MakeOutcome(const GameConfig& config, const AuctionState& state,
                    std::span<const BidderType> types) {
  Outcome out;
  out.final_prices = state.prices;
  out.rounds = state.round;
  out.allocation.reserve(config.num_bidders);
  out.utilities.reserve(config.num_bidders);
  for (int i = 0; i < config.num_bidders; ++i) {
    const ItemSet won = state.HeldBy(i);
    out.allocation.push_back(won);
    out.utilities.push_back(
        Utility(types[i].values, won, state.prices, config.epsilon));
  }
  return out;
}

int RoundLimit(const GameConfig& config, std::span<const double> budgets) {
  if (config.max_rounds > 0) return config.max_rounds;
  double total = 0.0;
  for (double b : budgets) total += std::max(0.0, b);
  const double bound = 1.0 + std::ceil(total / config.epsilon);
  constexpr double kCap = 10'000'000.0;
  if (!std::isfinite(bound) || bound > kCap) return static_cast<int>(kCap);
  return static_cast<int>(bound);
}

Outcome PlayOut(const GameConfig& config, std::span<const BidderType> types,
                std::span<Strategy* const> strategies, Rng& engine_rng,
                std::vector<RoundRecord>* history) {
  config.Validate();
  if (types.size() != static_cast<std::size_t>(config.num_bidders) ||
      strategies.size() != types.size()) {
    throw std::invalid_argument("PlayOut: expected one type and strategy per bidder");
  }
  std::vector<double> budgets;
  for (const BidderType& t : types) budgets.push_back(t.budget);
  const int limit = RoundLimit(config, budgets);

  std::vector<RoundRecord> local;
  std::vector<RoundRecord>& log = history ? *history : local;
  const std::size_t first_record = log.size();

  AuctionState state = InitialState(config);
  std::vector<ItemSet> bids(config.num_bidders);
  while (!state.terminal) {
    if (state.round >= limit) {
      throw NonTerminationError("auction did not terminate within " +
                                std::to_string(limit) + " rounds");
    }
    const std::span<const RoundRecord> seen(log.data() + first_record,
                                            log.size() - first_record);
    for (int i = 0; i < config.num_bidders; ++i) {
      Observation obs{&config, &state, i, &types[i], seen};
      bids[i] = strategies[i]->Bid(obs);
    }
    AuctionState next = ApplyRound(config, state, bids, budgets, engine_rng);
    log.push_back(RoundRecord{std::move(state), bids});
    state = std::move(next);
  }
  return MakeOutcome(config, state, types);
}

}  // namespace saa
