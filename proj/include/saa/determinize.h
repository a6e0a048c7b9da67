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

#ifndef SAA_DETERMINIZE_H_
#define SAA_DETERMINIZE_H_

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <vector>

#include "json.hpp"
#include "saa/auction.h"
#include "saa/prediction.h"
#include "saa/search.h"
#include "saa/valuation.h"

namespace saa {

// The opponent type obtained from the mean of its distribution: the delta =
// 0 profile.
BidderType ExpectationType(const TypeMoments& moments);

// Money a bidder committed in one disclosed round: its new bids at the
// asking price plus the standing prices of the items it held going in.
double RoundExposure(const GameConfig& config, const AuctionState& before,
                     ItemSet bids, int bidder);

// Running maximum of RoundExposure per bidder.
class BidExposureTracker {
 public:
  explicit BidExposureTracker(int num_bidders)
      : exposure_(num_bidders, 0.0) {}

  void Update(const GameConfig& config, const RoundRecord& round);
  // Standing commitments of the current state count as a round without
  // new bids.
  void UpdateHoldings(const GameConfig& config, const AuctionState& state);

  double exposure(int bidder) const { return exposure_[bidder]; }
  const std::vector<double>& exposures() const { return exposure_; }

 private:
  std::vector<double> exposure_;
};

// Tracker replayed over the whole disclosed history and the current state.
BidExposureTracker TrackExposure(const GameConfig& config,
                                 std::span<const RoundRecord> history,
                                 const AuctionState& current);

// Conditions a uniform budget law on b >= b_hat: U([max(lower, b_hat),
// upper]). An observation above the support yields a point mass at the
// upper bound with `contradicted` set.
BudgetDistribution InferBudget(const BudgetDistribution& prior, double b_hat);

// Recomputes the profile budgets of every opponent from its (truncated)
// budget law. Values stay as they are.
void RefreshProfileBudgets(std::span<const double> deltas,
                           const BudgetDistribution& budget,
                           std::span<BidderType> profiles);

enum class DeciderKind { kExpectation, kDsms, kSdsms, kCsms };

const char* DeciderName(DeciderKind kind);

struct DeciderParams {
  double alpha = 0.0;
  int max_actions = 20;
  SearchBudget budget = SearchBudget::Iterations(1000);
  // DSMS only: iterations or seconds per tree. Defaults to `budget` split
  // evenly across the trees.
  std::optional<SearchBudget> per_tree_budget;
  std::vector<double> deltas = {-1.0, 0.0, 1.0};
  bool infer_budgets = true;
  SelfConfirmingOptions prediction;
};

// What the bidder knows going into the auction. `moments` and `budgets`
// hold the public prior per bidder (the own entries are not read);
// `true_types` is only read by the cheating decider.
struct DeciderSetup {
  GameConfig config;
  int bidder = 0;
  BidderType own_type;
  std::vector<TypeMoments> moments;
  std::vector<BudgetDistribution> budgets;
  std::vector<BidderType> true_types;
  // Seeds the closing-price prediction of every determinization.
  std::uint64_t prediction_seed = 0;
};

struct Decision {
  ItemSet action;
  MixedStrategy policy;
  // DSMS only: votes and exploration-corrected visits per root arm.
  std::vector<ItemSet> vote_arms;
  std::vector<int> votes;
  std::vector<double> visits;
  std::vector<BudgetDistribution> inferred;
  std::int64_t iterations = 0;

  nlohmann::json ToJson() const;
};

// Most votes, then most visits among the tied arms, then smallest bitmask.
ItemSet SelectByVotes(std::span<const ItemSet> arms, std::span<const int> votes,
                      std::span<const double> visits);

// Builds determinizations for one bidder and runs the chosen search.
// Closing-price predictions are computed once per determinization from the
// prior and are kept when budget inference later moves the budgets.
class SmsDecider {
 public:
  SmsDecider(DeciderKind kind, DeciderSetup setup, DeciderParams params);

  Decision Decide(const AuctionState& state,
                  std::span<const RoundRecord> history, Rng& rng);

  DeciderKind kind() const { return kind_; }
  // Determinized games for the current budget laws, with their predictions.
  std::vector<Determinization> Determinizations() const;
  const std::vector<ProfileCombination>& combinations() const {
    return combinations_;
  }
  const std::vector<BudgetDistribution>& budgets() const {
    return budgets_;
  }

 private:
  std::vector<BidderType> TypesFor(
      int combination, std::span<const BudgetDistribution> budgets) const;
  const PricePrediction& PredictionFor(int combination);
  void InferFromHistory(const AuctionState& state,
                        std::span<const RoundRecord> history);

  Decision DecideSingle(const AuctionState& state, Rng& rng);
  Decision DecideDsms(const AuctionState& state, Rng& rng);
  Decision DecideSdsms(const AuctionState& state, Rng& rng);

  DeciderKind kind_;
  DeciderSetup setup_;
  DeciderParams params_;
  std::vector<ProfileCombination> combinations_;
  std::vector<BudgetDistribution> budgets_;
  std::map<int, PricePrediction> predictions_;
};

// Strategy adapter. Budget inference is replayed from the disclosed
// history on every call.
class SmsStrategy : public Strategy {
 public:
  SmsStrategy(DeciderKind kind, DeciderSetup setup, DeciderParams params,
              std::uint64_t seed)
      : decider_(kind, std::move(setup), std::move(params)), rng_(seed) {}

  ItemSet Bid(const Observation& obs) override;

  // Every decision made so far, in order.
  const std::vector<Decision>& log() const { return log_; }
  void set_keep_log(bool keep) { keep_log_ = keep; }

 private:
  SmsDecider decider_;
  Rng rng_;
  bool keep_log_ = false;
  std::vector<Decision> log_;
};

}  // namespace saa

#endif  // SAA_DETERMINIZE_H_
