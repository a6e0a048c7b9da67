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

#ifndef SAA_PREDICTION_H_
#define SAA_PREDICTION_H_

#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "saa/auction.h"
#include "saa/random.h"
#include "saa/valuation.h"

namespace saa {

// Predicted closing price per item, in money.
using PricePrediction = std::vector<double>;

// Per-item empirical law of closing prices: (price, weight) pairs whose
// weights sum to one for each item.
struct PriceDistribution {
  std::vector<std::vector<std::pair<double, double>>> items;

  // Equal-weight marginals from a list of closing price vectors.
  static PriceDistribution FromSamples(
      std::span<const std::vector<double>> samples);
  // Point mass at p.
  static PriceDistribution PointMass(std::span<const double> p);
};

// Price a bidder expects to pay per item: the current price for items it
// already holds, otherwise max(p_j, P_j + eps).
std::vector<double> PerceivedPrices(const GameConfig& config,
                                    const AuctionState& state, int bidder,
                                    std::span<const double> prediction);

// A feasible bid together with the predicted bundle utility and the
// perceived cost of the newly bid items.
struct RankedBid {
  ItemSet bid;
  double utility = 0.0;
  double cost = 0.0;
};

// Strict order used by every perceived-price decision: higher utility,
// then lower perceived cost, then smaller bitmask.
bool RanksBefore(const RankedBid& a, const RankedBid& b);

// Exhaustive search over bundles Z = held + X. Z is feasible when
// |Z| <= e_i, the bid X is legal under the engine's budget rule, and
// committed + perceived(X) <= budget. Returns the best X under RanksBefore.
RankedBid BestBundle(const GameConfig& config, const AuctionState& state,
                     int bidder, const BidderType& type,
                     std::span<const double> perceived);

// Point-price prediction bid.
ItemSet PpBid(const GameConfig& config, const AuctionState& state, int bidder,
              const BidderType& type, std::span<const double> prediction);

// The k best feasible bids in RanksBefore order. The empty bid is always
// present: when it does not rank among the first k it replaces the k-th.
std::vector<ItemSet> PpRankActions(const GameConfig& config,
                                   const AuctionState& state, int bidder,
                                   const BidderType& type,
                                   std::span<const double> prediction, int k);

// Straightforward bidding: PP with the null price vector.
ItemSet SbBid(const GameConfig& config, const AuctionState& state, int bidder,
              const BidderType& type);

// Draws `samples` price vectors from the per-item marginals of `dist` and
// picks the bundle with the best average utility. Utility is linear in the
// prices, so this is PP against the sample-mean perceived prices.
ItemSet ScpdBid(const GameConfig& config, const AuctionState& state,
                int bidder, const BidderType& type,
                const PriceDistribution& dist, int samples, Rng& rng);

// Runs an auction from `start` in which bidder i plays PP with
// predictions[i] throughout. Returns the terminal state.
AuctionState PlayPerceivedPriceAuction(
    const GameConfig& config, const AuctionState& start,
    std::span<const BidderType> types,
    std::span<const PricePrediction> predictions, Rng& rng);

struct SelfConfirmingOptions {
  int sims_per_iter = 30;  // K
  double damping = 0.5;    // lambda
  double tolerance = 0.5;  // in money; the default is eps / 2 for eps = 1
  int max_iters = 50;
};

struct SelfConfirmingResult {
  PricePrediction prices;
  int iterations = 0;
  bool converged = false;
  // Closing prices of the simulations run in the final iteration.
  std::vector<std::vector<double>> samples;
};

// Damped fixed point p <- (1 - lambda) p + lambda mean_closing(p), where
// the mean is over K auctions with every bidder playing PP(p). The first
// step starts from p = 0 and is undamped. Simulation k of iteration t uses a
// stream derived from (seed, t, k).
SelfConfirmingResult SelfConfirmingPointPrices(
    const GameConfig& config, std::span<const BidderType> types,
    const SelfConfirmingOptions& options, std::uint64_t seed);

struct EdpeOptions {
  int type_samples = 50;
  int max_iters = 10'000;
};

// Tatonnement on expected demand at the opening state: every item whose
// expected number of demanding bidders exceeds one goes up by eps, until no
// item is over-demanded.
PricePrediction EdpePrices(const GameConfig& config,
                           std::span<const TypeDistribution> distributions,
                           const EdpeOptions& options, std::uint64_t seed);

// Expected-demand variant driven by explicit type samples; samples[s][i] is
// bidder i's type in joint sample s.
PricePrediction EdpePricesFromSamples(
    const GameConfig& config,
    std::span<const std::vector<BidderType>> samples, int max_iters);

// PP with a fixed prediction (SB when the prediction is zero).
class PerceivedPriceStrategy : public Strategy {
 public:
  explicit PerceivedPriceStrategy(PricePrediction prediction)
      : prediction_(std::move(prediction)) {}
  ItemSet Bid(const Observation& obs) override;

 private:
  PricePrediction prediction_;
};

class ScpdStrategy : public Strategy {
 public:
  ScpdStrategy(PriceDistribution dist, int samples, std::uint64_t seed)
      : dist_(std::move(dist)), samples_(samples), rng_(seed) {}
  ItemSet Bid(const Observation& obs) override;

 private:
  PriceDistribution dist_;
  int samples_;
  Rng rng_;
};

}  // namespace saa

#endif  // SAA_PREDICTION_H_
