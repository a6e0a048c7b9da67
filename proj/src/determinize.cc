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

#include "saa/determinize.h"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace saa {

BidderType ExpectationType(const TypeMoments& moments) {
  return MakeProfile(moments, 0.0).type;
}

double RoundExposure(const GameConfig& config, const AuctionState& before,
                     ItemSet bids, int bidder) {
  long long ticks = 0;
  bids.ForEach([&](int j) { ticks += before.prices[j] + 1; });
  before.HeldBy(bidder).ForEach([&](int j) { ticks += before.prices[j]; });
  return config.epsilon * static_cast<double>(ticks);
}

void BidExposureTracker::Update(const GameConfig& config,
                                const RoundRecord& round) {
  for (std::size_t i = 0; i < exposure_.size(); ++i) {
    const ItemSet bid = i < round.bids.size() ? round.bids[i] : ItemSet();
    exposure_[i] = std::max(
        exposure_[i],
        RoundExposure(config, round.before, bid, static_cast<int>(i)));
  }
}

void BidExposureTracker::UpdateHoldings(const GameConfig& config,
                                        const AuctionState& state) {
  for (std::size_t i = 0; i < exposure_.size(); ++i) {
    exposure_[i] = std::max(
        exposure_[i],
        RoundExposure(config, state, ItemSet(), static_cast<int>(i)));
  }
}

BidExposureTracker TrackExposure(const GameConfig& config,
                                 std::span<const RoundRecord> history,
                                 const AuctionState& current) {
  BidExposureTracker tracker(config.num_bidders);
  for (const RoundRecord& round : history) tracker.Update(config, round);
  tracker.UpdateHoldings(config, current);
  return tracker;
}

BudgetDistribution InferBudget(const BudgetDistribution& prior, double b_hat) {
  if (b_hat < 0.0) throw std::invalid_argument("negative bid exposure");
  BudgetDistribution out = prior;
  if (b_hat > prior.upper) {
    out.lower = prior.upper;
    out.contradicted = true;
    return out;
  }
  out.lower = std::max(prior.lower, b_hat);
  return out;
}

void RefreshProfileBudgets(std::span<const double> deltas,
                           const BudgetDistribution& budget,
                           std::span<BidderType> profiles) {
  const double sd = std::sqrt(budget.Variance());
  for (std::size_t k = 0; k < profiles.size(); ++k) {
    profiles[k].budget = budget.Mean() + deltas[k] * sd;
  }
}

const char* DeciderName(DeciderKind kind) {
  switch (kind) {
    case DeciderKind::kExpectation:
      return "expect_sms";
    case DeciderKind::kDsms:
      return "dsms";
    case DeciderKind::kSdsms:
      return "sdsms";
    case DeciderKind::kCsms:
      return "csms";
  }
  return "?";
}

nlohmann::json Decision::ToJson() const {
  nlohmann::json out;
  out["action"] = action.bits();
  nlohmann::json policy_json = nlohmann::json::array();
  for (std::size_t a = 0; a < policy.arms.size(); ++a) {
    policy_json.push_back({policy.arms[a].bits(), policy.probabilities[a]});
  }
  out["policy"] = std::move(policy_json);
  if (!votes.empty()) {
    nlohmann::json v = nlohmann::json::array();
    for (std::size_t a = 0; a < vote_arms.size(); ++a) {
      v.push_back({vote_arms[a].bits(), votes[a], visits[a]});
    }
    out["votes"] = std::move(v);
  }
  nlohmann::json budgets = nlohmann::json::array();
  for (const BudgetDistribution& b : inferred) {
    budgets.push_back({b.lower, b.upper, b.contradicted});
  }
  out["budgets"] = std::move(budgets);
  out["iterations"] = iterations;
  return out;
}

ItemSet SelectByVotes(std::span<const ItemSet> arms, std::span<const int> votes,
                      std::span<const double> visits) {
  if (arms.empty()) throw std::invalid_argument("no arms to vote on");
  std::size_t best = 0;
  for (std::size_t a = 1; a < arms.size(); ++a) {
    if (votes[a] != votes[best]) {
      if (votes[a] > votes[best]) best = a;
      continue;
    }
    if (visits[a] != visits[best]) {
      if (visits[a] > visits[best]) best = a;
      continue;
    }
    if (arms[a].bits() < arms[best].bits()) best = a;
  }
  return arms[best];
}

SmsDecider::SmsDecider(DeciderKind kind, DeciderSetup setup,
                       DeciderParams params)
    : kind_(kind), setup_(std::move(setup)), params_(std::move(params)) {
  const GameConfig& config = setup_.config;
  config.Validate();
  const int n = config.num_bidders;
  if (setup_.bidder < 0 || setup_.bidder >= n) {
    throw std::out_of_range("decider seat out of range");
  }
  if (kind_ == DeciderKind::kCsms) {
    if (setup_.true_types.size() != static_cast<std::size_t>(n)) {
      throw std::invalid_argument("cheating decider needs every true type");
    }
  } else if (setup_.moments.size() != static_cast<std::size_t>(n) ||
             setup_.budgets.size() != static_cast<std::size_t>(n)) {
    throw std::invalid_argument("decider needs a prior for every bidder");
  }
  if (kind_ == DeciderKind::kDsms || kind_ == DeciderKind::kSdsms) {
    combinations_ = EnumerateProfileCombinations(params_.deltas, n - 1);
  } else {
    combinations_.push_back(ProfileCombination{});
  }
  budgets_ = setup_.budgets;
}

std::vector<BidderType> SmsDecider::TypesFor(
    int combination, std::span<const BudgetDistribution> budgets) const {
  const int n = setup_.config.num_bidders;
  if (kind_ == DeciderKind::kCsms) {
    std::vector<BidderType> types = setup_.true_types;
    types[setup_.bidder] = setup_.own_type;
    return types;
  }
  std::vector<BidderType> types;
  types.reserve(n);
  int opponent = 0;
  for (int i = 0; i < n; ++i) {
    if (i == setup_.bidder) {
      types.push_back(setup_.own_type);
      continue;
    }
    TypeMoments moments = setup_.moments[i];
    SetBudgetMoments(moments, budgets[i]);
    if (kind_ == DeciderKind::kExpectation) {
      types.push_back(ExpectationType(moments));
    } else {
      types.push_back(
          MakeProfile(moments, combinations_[combination].deltas[opponent])
              .type);
    }
    ++opponent;
  }
  return types;
}

const PricePrediction& SmsDecider::PredictionFor(int combination) {
  auto it = predictions_.find(combination);
  if (it != predictions_.end()) return it->second;
  // The prior game fixes the prediction; later budget inference does not
  // move it. The seed does not depend on the combination, so identical
  // games get identical predictions.
  const std::vector<BidderType> types = TypesFor(
      combination, kind_ == DeciderKind::kCsms
                       ? std::span<const BudgetDistribution>()
                       : std::span<const BudgetDistribution>(setup_.budgets));
  SelfConfirmingResult result = SelfConfirmingPointPrices(
      setup_.config, types, params_.prediction, setup_.prediction_seed);
  return predictions_.emplace(combination, std::move(result.prices))
      .first->second;
}

std::vector<Determinization> SmsDecider::Determinizations() const {
  std::vector<Determinization> out;
  out.reserve(combinations_.size());
  for (std::size_t l = 0; l < combinations_.size(); ++l) {
    Determinization d;
    d.types = TypesFor(static_cast<int>(l), budgets_);
    auto it = predictions_.find(static_cast<int>(l));
    if (it != predictions_.end()) d.p_star = it->second;
    out.push_back(std::move(d));
  }
  return out;
}

void SmsDecider::InferFromHistory(const AuctionState& state,
                                  std::span<const RoundRecord> history) {
  budgets_ = setup_.budgets;
  if (kind_ == DeciderKind::kCsms || !params_.infer_budgets) return;
  const BidExposureTracker tracker =
      TrackExposure(setup_.config, history, state);
  for (int i = 0; i < setup_.config.num_bidders; ++i) {
    if (i == setup_.bidder) continue;
    budgets_[i] = InferBudget(setup_.budgets[i], tracker.exposure(i));
  }
}

Decision SmsDecider::Decide(const AuctionState& state,
                            std::span<const RoundRecord> history, Rng& rng) {
  if (state.terminal) {
    throw std::invalid_argument("cannot decide in a terminal state");
  }
  for (std::size_t l = 0; l < combinations_.size(); ++l) {
    PredictionFor(static_cast<int>(l));
  }
  InferFromHistory(state, history);
  Decision decision;
  switch (kind_) {
    case DeciderKind::kExpectation:
    case DeciderKind::kCsms:
      decision = DecideSingle(state, rng);
      break;
    case DeciderKind::kDsms:
      decision = DecideDsms(state, rng);
      break;
    case DeciderKind::kSdsms:
      decision = DecideSdsms(state, rng);
      break;
  }
  if (kind_ != DeciderKind::kCsms) decision.inferred = budgets_;
  return decision;
}

namespace {

SearchOptions MakeOptions(const DeciderParams& params,
                          const SearchBudget& budget) {
  SearchOptions options;
  options.alpha = params.alpha;
  options.max_actions = params.max_actions;
  options.budget = budget;
  return options;
}

}  // namespace

Decision SmsDecider::DecideSingle(const AuctionState& state, Rng& rng) {
  const std::uint64_t seed = rng.NextU64();
  SmsSearch search(setup_.config, state, setup_.bidder, Determinizations(),
                   MakeOptions(params_, params_.budget), seed);
  search.Run();
  Decision decision;
  decision.policy = search.RootPolicy();
  decision.iterations = search.iterations();
  decision.action = decision.policy.Sample(rng);
  return decision;
}

Decision SmsDecider::DecideSdsms(const AuctionState& state, Rng& rng) {
  // Same code path as the single-tree search; merged duplicates make it
  // collapse to it when every profile coincides.
  return DecideSingle(state, rng);
}

Decision SmsDecider::DecideDsms(const AuctionState& state, Rng& rng) {
  const std::uint64_t seed = rng.NextU64();
  const std::vector<Determinization> dets = Determinizations();
  const std::size_t trees = dets.size();

  PricePrediction mean(setup_.config.num_items, 0.0);
  for (std::size_t l = 0; l < trees; ++l) {
    for (std::size_t j = 0; j < mean.size(); ++j) {
      mean[j] += (dets[l].p_star[j] - mean[j]) / static_cast<double>(l + 1);
    }
  }
  SearchOptions options;
  options.alpha = params_.alpha;
  options.max_actions = params_.max_actions;
  options.root_actions =
      PpRankActions(setup_.config, state, setup_.bidder, setup_.own_type, mean,
                    params_.max_actions);
  if (params_.per_tree_budget) {
    options.budget = *params_.per_tree_budget;
  } else {
    const SearchBudget& total = params_.budget;
    if (total.iterations) {
      options.budget.iterations =
          std::max<std::int64_t>(1, *total.iterations /
                                        static_cast<std::int64_t>(trees));
    } else {
      options.budget.iterations.reset();
    }
    if (total.seconds) {
      options.budget.seconds = *total.seconds / static_cast<double>(trees);
    }
  }

  Decision decision;
  const std::vector<ItemSet>& arms = options.root_actions;
  decision.vote_arms = arms;
  decision.votes.assign(arms.size(), 0);
  decision.visits.assign(arms.size(), 0.0);
  decision.policy.arms = arms;
  decision.policy.probabilities.assign(arms.size(), 0.0);

  // Trees for identical determinizations are identical (every tree gets
  // the same search seed), so they are run once.
  std::vector<std::pair<std::size_t, MixedStrategy>> done;
  std::vector<std::vector<double>> done_visits;
  for (std::size_t l = 0; l < trees; ++l) {
    std::size_t hit = done.size();
    for (std::size_t k = 0; k < done.size(); ++k) {
      if (dets[done[k].first] == dets[l]) hit = k;
    }
    if (hit == done.size()) {
      SmsSearch search(setup_.config, state, setup_.bidder, {dets[l]}, options,
                       seed);
      search.Run();
      decision.iterations += search.iterations();
      const InfoSetStats& info = search.root().info[setup_.bidder];
      std::vector<double> corrected(arms.size(), 0.0);
      for (std::size_t a = 0; a < arms.size(); ++a) {
        const ArmStats& st = info.stats[a];
        corrected[a] =
            std::max(0.0, static_cast<double>(st.n) - st.exploration);
      }
      done.emplace_back(l, search.RootPolicy());
      done_visits.push_back(std::move(corrected));
    }
    const MixedStrategy& tree_policy = done[hit].second;
    for (std::size_t a = 0; a < arms.size(); ++a) {
      decision.visits[a] += done_visits[hit][a];
      double& p = decision.policy.probabilities[a];
      p += (tree_policy.probabilities[a] - p) / static_cast<double>(l + 1);
    }
    const std::size_t vote = rng.Categorical(tree_policy.probabilities);
    ++decision.votes[vote];
  }
  decision.action = SelectByVotes(arms, decision.votes, decision.visits);
  return decision;
}

ItemSet SmsStrategy::Bid(const Observation& obs) {
  Decision decision = decider_.Decide(*obs.state, obs.history, rng_);
  const ItemSet action = decision.action;
  if (keep_log_) log_.push_back(std::move(decision));
  return action;
}

}  // namespace saa
