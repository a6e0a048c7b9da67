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

#include "saa/prediction.h"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace saa {

namespace {

// Calls fn(RankedBid) for every feasible bid, empty bid first.
template <typename Fn>
void ForEachFeasibleBid(const GameConfig& config, const AuctionState& state,
                        int bidder, const BidderType& type,
                        std::span<const double> perceived, Fn&& fn) {
  const ItemSet held = state.HeldBy(bidder);
  const std::uint32_t free = (ItemSet::Full(config.num_items) - held).bits();
  const int room = state.eligibility[bidder] - held.size();
  const long long held_ticks = state.PriceSum(held);
  const double committed = config.epsilon * static_cast<double>(held_ticks);
  double held_cost = 0.0;
  held.ForEach([&](int j) { held_cost += perceived[j]; });

  thread_local std::vector<double> cost;
  thread_local std::vector<long long> ticks;
  cost.resize(NumBundles(config.num_items));
  ticks.resize(cost.size());
  cost[0] = 0.0;
  ticks[0] = 0;

  fn(RankedBid{ItemSet(), type.values(held) - held_cost, 0.0});
  for (std::uint32_t x = (0u - free) & free; x != 0; x = (x - free) & free) {
    const std::uint32_t low = x & (0u - x);
    const int item = std::countr_zero(low);
    cost[x] = cost[x ^ low] + perceived[item];
    ticks[x] = ticks[x ^ low] + state.prices[item] + 1;
    const ItemSet bid(x);
    if (bid.size() > room) continue;
    if (config.epsilon * static_cast<double>(ticks[x] + held_ticks) >
        type.budget) {
      continue;
    }
    if (committed + cost[x] > type.budget) continue;
    fn(RankedBid{bid, type.values(held | bid) - (held_cost + cost[x]),
                 cost[x]});
  }
}

}  // namespace

PriceDistribution PriceDistribution::FromSamples(
    std::span<const std::vector<double>> samples) {
  if (samples.empty()) {
    throw std::invalid_argument("PriceDistribution needs at least one sample");
  }
  PriceDistribution d;
  const std::size_t m = samples.front().size();
  const double w = 1.0 / static_cast<double>(samples.size());
  d.items.resize(m);
  for (const auto& s : samples) {
    for (std::size_t j = 0; j < m; ++j) d.items[j].emplace_back(s[j], w);
  }
  return d;
}

PriceDistribution PriceDistribution::PointMass(std::span<const double> p) {
  PriceDistribution d;
  for (double x : p) d.items.push_back({{x, 1.0}});
  return d;
}

std::vector<double> PerceivedPrices(const GameConfig& config,
                                    const AuctionState& state, int bidder,
                                    std::span<const double> prediction) {
  std::vector<double> out(config.num_items);
  for (int j = 0; j < config.num_items; ++j) {
    if (state.temp_winner[j] == bidder) {
      out[j] = config.epsilon * state.prices[j];
    } else {
      out[j] = std::max(prediction[j], config.epsilon * (state.prices[j] + 1));
    }
  }
  return out;
}

bool RanksBefore(const RankedBid& a, const RankedBid& b) {
  if (a.utility != b.utility) return a.utility > b.utility;
  if (a.cost != b.cost) return a.cost < b.cost;
  return a.bid < b.bid;
}

RankedBid BestBundle(const GameConfig& config, const AuctionState& state,
                     int bidder, const BidderType& type,
                     std::span<const double> perceived) {
  RankedBid best;
  bool have = false;
  ForEachFeasibleBid(config, state, bidder, type, perceived,
                     [&](const RankedBid& c) {
                       if (!have || RanksBefore(c, best)) {
                         best = c;
                         have = true;
                       }
                     });
  return best;
}

ItemSet PpBid(const GameConfig& config, const AuctionState& state, int bidder,
              const BidderType& type, std::span<const double> prediction) {
  const std::vector<double> perceived =
      PerceivedPrices(config, state, bidder, prediction);
  return BestBundle(config, state, bidder, type, perceived).bid;
}

std::vector<ItemSet> PpRankActions(const GameConfig& config,
                                   const AuctionState& state, int bidder,
                                   const BidderType& type,
                                   std::span<const double> prediction, int k) {
  if (k < 1) throw std::invalid_argument("PpRankActions: k must be >= 1");
  const std::vector<double> perceived =
      PerceivedPrices(config, state, bidder, prediction);
  std::vector<RankedBid> all;
  ForEachFeasibleBid(config, state, bidder, type, perceived,
                     [&](const RankedBid& c) { all.push_back(c); });
  std::sort(all.begin(), all.end(), RanksBefore);
  std::vector<ItemSet> out;
  bool has_empty = false;
  for (const RankedBid& c : all) {
    if (static_cast<int>(out.size()) == k) break;
    out.push_back(c.bid);
    has_empty = has_empty || c.bid.empty();
  }
  if (!has_empty) {
    if (static_cast<int>(out.size()) == k) out.pop_back();
    out.push_back(ItemSet());
  }
  return out;
}

ItemSet SbBid(const GameConfig& config, const AuctionState& state, int bidder,
              const BidderType& type) {
  const std::vector<double> zero(config.num_items, 0.0);
  return PpBid(config, state, bidder, type, zero);
}

ItemSet ScpdBid(const GameConfig& config, const AuctionState& state,
                int bidder, const BidderType& type,
                const PriceDistribution& dist, int samples, Rng& rng) {
  if (samples < 1) throw std::invalid_argument("ScpdBid: samples must be >= 1");
  std::vector<double> mean(config.num_items, 0.0);
  std::vector<double> draw(config.num_items);
  std::vector<double> weights;
  for (int s = 1; s <= samples; ++s) {
    for (int j = 0; j < config.num_items; ++j) {
      const auto& marginal = dist.items[j];
      if (marginal.size() == 1) {
        draw[j] = marginal[0].first;
        continue;
      }
      weights.clear();
      for (const auto& [price, w] : marginal) weights.push_back(w);
      draw[j] = marginal[rng.Categorical(weights)].first;
    }
    const std::vector<double> perceived =
        PerceivedPrices(config, state, bidder, draw);
    for (int j = 0; j < config.num_items; ++j) {
      mean[j] += (perceived[j] - mean[j]) / s;
    }
  }
  return BestBundle(config, state, bidder, type, mean).bid;
}

AuctionState PlayPerceivedPriceAuction(
    const GameConfig& config, const AuctionState& start,
    std::span<const BidderType> types,
    std::span<const PricePrediction> predictions, Rng& rng) {
  std::vector<double> budgets;
  for (const BidderType& t : types) budgets.push_back(t.budget);
  const int limit = RoundLimit(config, budgets);
  AuctionState state = start;
  std::vector<ItemSet> bids(config.num_bidders);
  std::vector<double> perceived(config.num_items);
  while (!state.terminal) {
    if (state.round >= limit + start.round) {
      throw NonTerminationError("perceived-price auction exceeded round limit");
    }
    for (int i = 0; i < config.num_bidders; ++i) {
      for (int j = 0; j < config.num_items; ++j) {
        perceived[j] = state.temp_winner[j] == i
                           ? config.epsilon * state.prices[j]
                           : std::max(predictions[i][j],
                                      config.epsilon * (state.prices[j] + 1));
      }
      bids[i] = BestBundle(config, state, i, types[i], perceived).bid;
    }
    state = ApplyRoundUnchecked(config, state, bids, rng);
  }
  return state;
}

SelfConfirmingResult SelfConfirmingPointPrices(
    const GameConfig& config, std::span<const BidderType> types,
    const SelfConfirmingOptions& options, std::uint64_t seed) {
  if (options.sims_per_iter < 1 || !(options.damping > 0.0) ||
      options.damping > 1.0 || options.tolerance < 0.0) {
    throw std::invalid_argument("SelfConfirmingPointPrices: bad options");
  }
  const int m = config.num_items;
  SelfConfirmingResult result;
  result.prices.assign(m, 0.0);
  const AuctionState start = InitialState(config);
  for (int iter = 1; iter <= options.max_iters; ++iter) {
    std::vector<PricePrediction> predictions(config.num_bidders, result.prices);
    std::vector<double> mean(m, 0.0);
    result.samples.clear();
    for (int k = 0; k < options.sims_per_iter; ++k) {
      Rng rng(DeriveSeed(seed, {static_cast<std::uint64_t>(iter),
                                static_cast<std::uint64_t>(k)}));
      const AuctionState end =
          PlayPerceivedPriceAuction(config, start, types, predictions, rng);
      std::vector<double> closing(m);
      for (int j = 0; j < m; ++j) closing[j] = config.epsilon * end.prices[j];
      for (int j = 0; j < m; ++j) mean[j] += closing[j];
      result.samples.push_back(std::move(closing));
    }
    // The first iterate is the undamped mean under p = 0, i.e. the mean
    // closing prices of straightforward bidding.
    const double lambda = iter == 1 ? 1.0 : options.damping;
    double change = 0.0;
    for (int j = 0; j < m; ++j) {
      mean[j] /= options.sims_per_iter;
      const double next =
          (1.0 - lambda) * result.prices[j] + lambda * mean[j];
      change = std::max(change, std::abs(next - result.prices[j]));
      result.prices[j] = next;
    }
    result.iterations = iter;
    if (change <= options.tolerance) {
      result.converged = true;
      break;
    }
  }
  return result;
}

PricePrediction EdpePricesFromSamples(
    const GameConfig& config,
    std::span<const std::vector<BidderType>> samples, int max_iters) {
  const int m = config.num_items;
  PricePrediction p(m, 0.0);
  if (samples.empty()) return p;
  const AuctionState start = InitialState(config);
  std::vector<double> demand(m);
  for (int iter = 0; iter < max_iters; ++iter) {
    std::fill(demand.begin(), demand.end(), 0.0);
    for (const auto& joint : samples) {
      for (int i = 0; i < config.num_bidders; ++i) {
        PpBid(config, start, i, joint[i], p).ForEach([&](int j) {
          demand[j] += 1.0;
        });
      }
    }
    bool raised = false;
    for (int j = 0; j < m; ++j) {
      if (demand[j] / static_cast<double>(samples.size()) > 1.0) {
        p[j] += config.epsilon;
        raised = true;
      }
    }
    if (!raised) break;
  }
  return p;
}

PricePrediction EdpePrices(const GameConfig& config,
                           std::span<const TypeDistribution> distributions,
                           const EdpeOptions& options, std::uint64_t seed) {
  std::vector<std::vector<BidderType>> samples;
  samples.reserve(options.type_samples);
  for (int s = 0; s < options.type_samples; ++s) {
    std::vector<BidderType> joint;
    for (std::size_t i = 0; i < distributions.size(); ++i) {
      const std::uint64_t si = static_cast<std::uint64_t>(s);
      Rng value_rng(DeriveSeed(seed, {si, i, 0}));
      Rng budget_rng(DeriveSeed(seed, {si, i, 1}));
      joint.push_back(SampleType(distributions[i], value_rng, budget_rng));
    }
    samples.push_back(std::move(joint));
  }
  return EdpePricesFromSamples(config, samples, options.max_iters);
}

ItemSet PerceivedPriceStrategy::Bid(const Observation& obs) {
  return PpBid(*obs.config, *obs.state, obs.bidder, *obs.own_type,
               prediction_);
}

ItemSet ScpdStrategy::Bid(const Observation& obs) {
  return ScpdBid(*obs.config, *obs.state, obs.bidder, *obs.own_type, dist_,
                 samples_, rng_);
}

}  // namespace saa
