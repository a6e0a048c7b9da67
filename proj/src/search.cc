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

#include "saa/search.h"

#include <algorithm>
#include <chrono>
#include <cstring>

namespace saa {

double MixedStrategy::Probability(ItemSet bid) const {
  for (std::size_t a = 0; a < arms.size(); ++a) {
    if (arms[a] == bid) return probabilities[a];
  }
  return 0.0;
}

ItemSet MixedStrategy::Sample(Rng& rng) const {
  return arms[rng.Categorical(probabilities)];
}

std::string PublicStateKey(const AuctionState& state) {
  std::string key;
  const std::size_t count =
      state.prices.size() + state.temp_winner.size() + state.eligibility.size();
  key.resize(count * sizeof(std::int32_t));
  char* out = key.data();
  auto put = [&](const std::vector<int>& v) {
    for (int x : v) {
      const std::int32_t y = x;
      std::memcpy(out, &y, sizeof y);
      out += sizeof y;
    }
  };
  put(state.prices);
  put(state.temp_winner);
  put(state.eligibility);
  return key;
}

void Backpropagate(std::vector<SearchNode>& nodes,
                   std::span<const PathStep> path,
                   std::span<const double> values, bool first_visit_rule) {
  for (const PathStep& step : path) {
    SearchNode& node = nodes[step.node];
    ++node.visits;
    for (std::size_t i = 0; i < step.arm.size(); ++i) {
      Exp3Update(node.info[i], step.arm[i], values[i], step.probability[i],
                 first_visit_rule);
    }
  }
}

MixedStrategy FinalPolicy(const InfoSetStats& info) {
  MixedStrategy out;
  out.arms = info.arms;
  out.probabilities.assign(info.size(), 0.0);
  double total = 0.0;
  for (std::size_t a = 0; a < info.size(); ++a) {
    const double corrected = std::max(
        0.0, static_cast<double>(info.stats[a].n) - info.stats[a].exploration);
    out.probabilities[a] = corrected;
    total += corrected;
  }
  if (total <= 0.0) {
    for (std::size_t a = 0; a < info.size(); ++a) {
      out.probabilities[a] = static_cast<double>(info.stats[a].n);
      total += out.probabilities[a];
    }
  }
  if (total <= 0.0) {
    std::fill(out.probabilities.begin(), out.probabilities.end(), 1.0);
    total = static_cast<double>(info.size());
  }
  for (double& p : out.probabilities) p /= total;
  return out;
}

std::vector<double> Rollout(const GameConfig& config, const AuctionState& state,
                            std::span<const BidderType> types,
                            std::span<const double> p_star, double alpha,
                            Rng& rng) {
  std::vector<PricePrediction> predictions(config.num_bidders);
  for (int i = 0; i < config.num_bidders; ++i) {
    predictions[i].resize(config.num_items);
    for (int j = 0; j < config.num_items; ++j) {
      const double noise = rng.Uniform(-config.epsilon, config.epsilon);
      predictions[i][j] = std::max(0.0, p_star[j] + noise);
    }
  }
  const AuctionState end =
      PlayPerceivedPriceAuction(config, state, types, predictions, rng);
  std::vector<double> values(config.num_bidders);
  for (int i = 0; i < config.num_bidders; ++i) {
    const double sigma = Utility(types[i].values, end.HeldBy(i), end.prices,
                                 config.epsilon);
    values[i] = RiskAverseUtility(sigma, alpha);
  }
  return values;
}

std::vector<ItemSet> ExpandActions(const GameConfig& config,
                                   const AuctionState& state, int bidder,
                                   const BidderType& type,
                                   std::span<const double> p_star,
                                   int max_actions) {
  std::vector<ItemSet> arms =
      PpRankActions(config, state, bidder, type, p_star, max_actions);
  std::erase_if(arms, [&](ItemSet x) {
    return !IsLegalBid(config, state, bidder, type.budget, x);
  });
  return arms;
}

SmsSearch::SmsSearch(const GameConfig& config, AuctionState root,
                     int root_bidder,
                     std::vector<Determinization> determinizations,
                     SearchOptions options, std::uint64_t seed)
    : config_(config),
      root_bidder_(root_bidder),
      options_(std::move(options)),
      rng_(DeriveSeed(seed, {0})),
      draw_rng_(DeriveSeed(seed, {1})) {
  config_.Validate();
  if (root.terminal) {
    throw std::invalid_argument("search root must be a non-terminal state");
  }
  if (root_bidder < 0 || root_bidder >= config_.num_bidders) {
    throw std::out_of_range("search root bidder out of range");
  }
  if (determinizations.empty()) {
    throw std::invalid_argument("search needs at least one determinization");
  }
  if (options_.max_actions < 1) {
    throw std::invalid_argument("N_act must be at least 1");
  }
  for (Determinization& d : determinizations) {
    if (d.types.size() != static_cast<std::size_t>(config_.num_bidders) ||
        d.p_star.size() != static_cast<std::size_t>(config_.num_items)) {
      throw std::invalid_argument("determinization does not match the game");
    }
    auto it = std::find(determinizations_.begin(), determinizations_.end(), d);
    if (it == determinizations_.end()) {
      determinizations_.push_back(std::move(d));
      weights_.push_back(1.0);
    } else {
      weights_[it - determinizations_.begin()] += 1.0;
    }
  }
  CreateNode(root, determinizations_.front());
}

const SearchNode* SmsSearch::Find(const AuctionState& state) const {
  auto it = index_.find(PublicStateKey(state));
  return it == index_.end() ? nullptr : &nodes_[it->second];
}

int SmsSearch::CreateNode(const AuctionState& state,
                          const Determinization& det) {
  const int id = static_cast<int>(nodes_.size());
  SearchNode node;
  node.state = state;
  node.info.resize(config_.num_bidders);
  const bool is_root = nodes_.empty();
  for (int i = 0; i < config_.num_bidders; ++i) {
    InfoSetStats& info = node.info[i];
    if (is_root && i == root_bidder_ && !options_.root_actions.empty()) {
      for (ItemSet x : options_.root_actions) info.AddArm(x);
    } else if (!subset_armed()) {
      for (ItemSet x : ExpandActions(config_, state, i, det.types[i],
                                     det.p_star, options_.max_actions)) {
        info.AddArm(x);
      }
    }
  }
  index_.emplace(PublicStateKey(state), id);
  nodes_.push_back(std::move(node));
  return id;
}

int SmsSearch::TryExpand(InfoSetStats& info, const AuctionState& state,
                         int bidder, const Determinization& det) {
  const int cap = options_.max_actions;
  if (static_cast<int>(info.size()) >= cap) return -1;
  const BidderType& type = det.types[bidder];
  const bool reserve_empty =
      static_cast<int>(info.size()) == cap - 1 && info.Find(ItemSet()) < 0;
  if (reserve_empty) return info.AddArm(ItemSet());
  const std::vector<ItemSet> ranked = PpRankActions(
      config_, state, bidder, type, det.p_star,
      static_cast<int>(NumBundles(config_.num_items)));
  for (ItemSet x : ranked) {
    if (info.Find(x) < 0) return info.AddArm(x);
  }
  return -1;
}

void SmsSearch::Iterate() {
  const int n = config_.num_bidders;
  int drawn = 0;
  if (subset_armed()) {
    drawn = static_cast<int>(draw_rng_.Categorical(weights_));
    draws_.push_back(drawn);
  }
  const Determinization& det = determinizations_[drawn];
  const bool multi = subset_armed();

  path_.clear();
  AuctionState state = nodes_.front().state;
  std::vector<ItemSet> bids(n);
  std::vector<char> legal;
  while (!state.terminal) {
    auto it = index_.find(PublicStateKey(state));
    const bool fresh = it == index_.end();
    const int id = fresh ? CreateNode(state, det) : it->second;

    PathStep step;
    step.node = id;
    step.arm.resize(n);
    step.probability.resize(n);
    for (int i = 0; i < n; ++i) {
      InfoSetStats& info = nodes_[id].info[i];
      const bool opponent_subset = multi && i != root_bidder_;
      legal.assign(info.size(), 1);
      if (opponent_subset) {
        for (std::size_t a = 0; a < info.size(); ++a) {
          legal[a] = IsLegalBid(config_, state, i, det.types[i].budget,
                                info.arms[a]);
        }
      }
      if (multi) {
        const int added = TryExpand(info, state, i, det);
        if (added >= 0) {
          // Existing legal arms count this step as available; the new
          // arm starts at N = 1.
          AvailabilityTick(info, legal);
          step.arm[i] = added;
          step.probability[i] = 1.0;
          bids[i] = info.arms[added];
          continue;
        }
      }
      std::vector<double> policy;
      Exp3Params params;
      if (opponent_subset) {
        params = SubsetExp3Params(legal, info.visits);
        policy = SubsetExp3Policy(info, legal, info.visits);
      } else {
        params = ComputeExp3Params(static_cast<int>(info.size()), info.visits);
        policy = Exp3Policy(info);
      }
      const double floor =
          params.gamma /
          static_cast<double>(std::count(legal.begin(), legal.end(), 1));
      for (std::size_t a = 0; a < info.size(); ++a) {
        if (legal[a]) info.stats[a].exploration += floor;
      }
      const std::size_t a = rng_.Categorical(policy);
      if (opponent_subset) AvailabilityTick(info, legal);
      step.arm[i] = static_cast<int>(a);
      step.probability[i] = policy[a];
      bids[i] = info.arms[a];
    }
    path_.push_back(std::move(step));
    state = ApplyRoundUnchecked(config_, state, bids, rng_);
    if (fresh) break;
  }

  const std::vector<double> values =
      Rollout(config_, state, det.types, det.p_star, options_.alpha, rng_);
  Backpropagate(nodes_, path_, values, /*first_visit_rule=*/multi);
  ++iterations_;
}

void SmsSearch::RunIterations(std::int64_t count) {
  for (std::int64_t k = 0; k < count; ++k) Iterate();
}

void SmsSearch::Run() {
  const SearchBudget& budget = options_.budget;
  if (!budget.iterations && !budget.seconds) {
    throw std::invalid_argument("search budget has no limit set");
  }
  using Clock = std::chrono::steady_clock;
  const Clock::time_point start = Clock::now();
  const std::int64_t before = iterations_;
  while (true) {
    if (budget.iterations && iterations_ - before >= *budget.iterations) break;
    if (budget.seconds) {
      const std::chrono::duration<double> elapsed = Clock::now() - start;
      if (elapsed.count() >= *budget.seconds) break;
    }
    Iterate();
  }
  if (iterations_ == 0) {
    throw SearchBudgetError("search budget too small: no iteration completed");
  }
}

MixedStrategy SmsSearch::RootPolicy() const {
  return FinalPolicy(nodes_.front().info[root_bidder_]);
}

bool SmsSearch::ArmsAreLegal() const {
  for (const SearchNode& node : nodes_) {
    for (int i = 0; i < config_.num_bidders; ++i) {
      for (ItemSet x : node.info[i].arms) {
        bool ok = false;
        for (const Determinization& d : determinizations_) {
          ok = ok || IsLegalBid(config_, node.state, i, d.types[i].budget, x);
        }
        if (!ok) return false;
      }
    }
  }
  return true;
}

nlohmann::json SmsSearch::Dump() const {
  nlohmann::json out;
  out["iterations"] = iterations_;
  out["root_bidder"] = root_bidder_;
  out["determinizations"] = determinizations_.size();
  nlohmann::json nodes = nlohmann::json::array();
  for (const SearchNode& node : nodes_) {
    nlohmann::json jn;
    jn["prices"] = node.state.prices;
    jn["temp_winner"] = node.state.temp_winner;
    jn["eligibility"] = node.state.eligibility;
    jn["visits"] = node.visits;
    nlohmann::json bidders = nlohmann::json::array();
    for (const InfoSetStats& info : node.info) {
      nlohmann::json jb;
      jb["n_I"] = info.visits;
      nlohmann::json arms = nlohmann::json::array();
      for (std::size_t a = 0; a < info.size(); ++a) {
        const ArmStats& st = info.stats[a];
        arms.push_back({{"bid", info.arms[a].bits()},
                        {"s", st.s},
                        {"n", st.n},
                        {"N", st.available},
                        {"E", st.exploration}});
      }
      jb["arms"] = std::move(arms);
      bidders.push_back(std::move(jb));
    }
    jn["bidders"] = std::move(bidders);
    nodes.push_back(std::move(jn));
  }
  out["nodes"] = std::move(nodes);
  return out;
}

MixedStrategy RunSms(const GameConfig& config, const AuctionState& root,
                     int root_bidder, std::span<const BidderType> types,
                     double alpha, int max_actions,
                     std::span<const double> p_star,
                     const SearchBudget& budget, std::uint64_t seed) {
  Determinization det;
  det.types.assign(types.begin(), types.end());
  det.p_star.assign(p_star.begin(), p_star.end());
  SearchOptions options;
  options.alpha = alpha;
  options.max_actions = max_actions;
  options.budget = budget;
  SmsSearch search(config, root, root_bidder, {std::move(det)}, options, seed);
  search.Run();
  return search.RootPolicy();
}

}  // namespace saa
