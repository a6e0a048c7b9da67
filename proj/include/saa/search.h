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

#ifndef SAA_SEARCH_H_
#define SAA_SEARCH_H_

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "json.hpp"
#include "saa/auction.h"
#include "saa/bandit.h"
#include "saa/prediction.h"
#include "saa/random.h"

namespace saa {

// Anytime budget. At least one limit must be set; the search stops at
// whichever is hit first.
struct SearchBudget {
  std::optional<std::int64_t> iterations;
  std::optional<double> seconds;

  static SearchBudget Iterations(std::int64_t n) { return {n, std::nullopt}; }
  static SearchBudget Seconds(double s) { return {std::nullopt, s}; }
};

struct MixedStrategy {
  std::vector<ItemSet> arms;
  std::vector<double> probabilities;

  double Probability(ItemSet bid) const;
  ItemSet Sample(Rng& rng) const;
  friend bool operator==(const MixedStrategy&, const MixedStrategy&) = default;
};

class SearchBudgetError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A complete-information game: one type per bidder and the closing-price
// prediction that drives expansion and rollouts in it.
struct Determinization {
  std::vector<BidderType> types;
  PricePrediction p_star;

  friend bool operator==(const Determinization&,
                         const Determinization&) = default;
};

struct SearchOptions {
  double alpha = 0.0;    // risk aversion in backed-up utilities
  int max_actions = 20;  // N_act, arms per information set
  SearchBudget budget = SearchBudget::Iterations(1000);
  // When non-empty, the root player's arms at the root node (DSMS pins the
  // same set in every tree).
  std::vector<ItemSet> root_actions;
};

// Node of the search tree, identified by the disclosed public state.
struct SearchNode {
  AuctionState state;
  std::vector<InfoSetStats> info;  // one per bidder
  std::int64_t visits = 0;
};

// One recorded decision along a selected path: for each bidder, the arm
// played and the probability it had when it was drawn.
struct PathStep {
  int node = 0;
  std::vector<int> arm;
  std::vector<double> probability;
};

// Applies Exp3Update for every bidder at every step of the path.
void Backpropagate(std::vector<SearchNode>& nodes,
                   std::span<const PathStep> path,
                   std::span<const double> values, bool first_visit_rule);

// Final move selection: n'_x = max(0, n_x - E_x), normalised. Falls back
// to raw visit counts when every corrected count is zero.
MixedStrategy FinalPolicy(const InfoSetStats& info);

// Noisy PP rollout: bidder i plays PP with p_star + U([-eps, eps]^m),
// clamped at zero, until the auction ends. Returns risk-averse utilities.
std::vector<double> Rollout(const GameConfig& config, const AuctionState& state,
                            std::span<const BidderType> types,
                            std::span<const double> p_star, double alpha,
                            Rng& rng);

// The arms an information set gets when a node is created in
// complete-information search: the N_act best PP bids with the empty bid
// always among them.
std::vector<ItemSet> ExpandActions(const GameConfig& config,
                                   const AuctionState& state, int bidder,
                                   const BidderType& type,
                                   std::span<const double> p_star,
                                   int max_actions);

// Simultaneous-move MCTS with EXP3 selection.
//
// With a single distinct determinization this is the complete-information
// search: every node expands its N_act arms on creation and all bidders
// select with plain EXP3. With several distinct determinizations it is the
// single-tree variant: each iteration draws one determinization uniformly,
// opponents only see arms whose bids are legal under that draw and select
// with subset-armed EXP3, arms are added one per visit in PP order, and
// backpropagation initialises a fresh arm with its first return.
// Identical determinizations are merged up front (keeping their draw
// weight), so a list of copies behaves exactly like one element.
class SmsSearch {
 public:
  SmsSearch(const GameConfig& config, AuctionState root, int root_bidder,
            std::vector<Determinization> determinizations,
            SearchOptions options, std::uint64_t seed);

  // Runs iterations until the budget is exhausted. Throws
  // SearchBudgetError when not a single iteration completed.
  void Run();
  void RunIterations(std::int64_t count);

  std::int64_t iterations() const { return iterations_; }
  bool subset_armed() const { return determinizations_.size() > 1; }
  std::size_t distinct_determinizations() const {
    return determinizations_.size();
  }

  const SearchNode& root() const { return nodes_.front(); }
  const std::vector<SearchNode>& nodes() const { return nodes_; }
  const SearchNode* Find(const AuctionState& state) const;

  // Determinization drawn in each iteration, in order (empty when there is
  // only one).
  const std::vector<int>& draws() const { return draws_; }
  const Determinization& determinization(int index) const {
    return determinizations_[index];
  }

  MixedStrategy RootPolicy() const;

  // Steps selected in the most recent iteration.
  const std::vector<PathStep>& last_path() const { return path_; }

  // Node keys with per-bidder (arm, s, n, N, E) for debugging.
  nlohmann::json Dump() const;

  // True when every stored arm is a legal bid at its node's state under
  // at least one of the determinizations.
  bool ArmsAreLegal() const;

 private:
  void Iterate();
  int CreateNode(const AuctionState& state, const Determinization& det);
  // Adds the best unexpanded PP bid for the bidder, or returns -1 when the
  // information set is full or every feasible bid is already present.
  int TryExpand(InfoSetStats& info, const AuctionState& state, int bidder,
                const Determinization& det);

  GameConfig config_;
  int root_bidder_;
  SearchOptions options_;
  std::vector<Determinization> determinizations_;
  std::vector<double> weights_;
  Rng rng_;
  Rng draw_rng_;
  std::vector<SearchNode> nodes_;
  std::unordered_map<std::string, int> index_;
  std::vector<int> draws_;
  std::int64_t iterations_ = 0;
  std::vector<PathStep> path_;
};

// Complete-information search from `root` for `root_bidder`; returns the
// root player's final mixed strategy.
MixedStrategy RunSms(const GameConfig& config, const AuctionState& root,
                     int root_bidder, std::span<const BidderType> types,
                     double alpha, int max_actions,
                     std::span<const double> p_star,
                     const SearchBudget& budget, std::uint64_t seed);

// Binary key of the disclosed state: prices, temporary winners and
// eligibilities.
std::string PublicStateKey(const AuctionState& state);

}  // namespace saa

#endif  // SAA_SEARCH_H_
