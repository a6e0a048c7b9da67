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

#ifndef SAA_HARNESS_H_
#define SAA_HARNESS_H_

#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "saa/auction.h"
#include "saa/determinize.h"
#include "saa/prediction.h"
#include "saa/valuation.h"

namespace saa {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Risk aversion and N_act per search strategy, by certainty level. Rows
// are looked up at the level nearest to eta_v.
struct Presets {
  std::vector<double> eta_levels;
  std::map<std::string, std::vector<double>> alpha;
  std::map<std::string, int> max_actions;
  int default_max_actions = 20;

  double Alpha(const std::string& strategy, double eta) const;
  int MaxActions(const std::string& strategy) const;

  static Presets FromJson(const nlohmann::json& j);
  static Presets Load(const std::filesystem::path& path);
  // config/presets.json of the source tree.
  static Presets Default();
};

struct ExperimentConfig {
  GameConfig game{3, 5, 1.0, 0};
  double eta_v = 0.5;
  double eta_b = 0.5;
  double max_surplus = 5.0;
  double b_min = 10.0;
  double b_max = 40.0;
  int instances = 10;
  std::uint64_t seed = 1;
  int moment_samples = 20000;
  std::optional<std::int64_t> iterations = 2000;
  std::optional<double> seconds;
  std::vector<double> deltas = {-1.0, 0.0, 1.0};
  int scpd_samples = 10;
  bool infer_budgets = true;
  bool rotate_seats = true;
  SelfConfirmingOptions prediction;
  EdpeOptions edpe;
  Presets presets = Presets::Default();

  void Validate() const;
  SearchBudget Budget() const;
  nlohmann::json ToJson() const;
  // Missing keys keep their defaults. A "presets" string is a path
  // resolved against `base_dir`.
  static ExperimentConfig FromJson(const nlohmann::json& j,
                                   const std::filesystem::path& base_dir = {});
  static ExperimentConfig Load(const std::filesystem::path& path);
};

// One auction setting: the public type distributions, the private true
// types drawn from them and the value/budget moments of each distribution.
struct Instance {
  int id = 0;
  std::uint64_t seed = 0;
  GameConfig game;
  double eta_v = 0.0;
  double eta_b = 0.0;
  double max_surplus = 0.0;
  double b_min = 0.0;
  double b_max = 0.0;
  int moment_samples = 0;
  std::vector<TypeDistribution> distributions;
  std::vector<BidderType> true_types;
  std::vector<TypeMoments> moments;

  nlohmann::json ToJson() const;
  static Instance FromJson(const nlohmann::json& j);
};

Instance GenerateInstance(const ExperimentConfig& config, int id);

// Offline predictions shared by every seat of an instance.
struct InstancePredictions {
  int instance_id = 0;
  PricePrediction epe;
  int epe_iterations = 0;
  bool epe_converged = false;
  PricePrediction edpe;
  // Closing prices of the final self-confirming iteration; the SCPD law.
  std::vector<std::vector<double>> scpd_samples;

  nlohmann::json ToJson() const;
  static InstancePredictions FromJson(const nlohmann::json& j);
};

InstancePredictions ComputePredictions(const ExperimentConfig& config,
                                       const Instance& instance);

const std::vector<std::string>& StrategyNames();
bool IsKnownStrategy(const std::string& name);

// What a search decider in `seat` knows: its true type, the public prior
// and, for the cheating decider, every true type. The prediction seed
// depends on (instance seed, seat) only.
DeciderSetup MakeDeciderSetup(const Instance& instance, int seat,
                              DeciderKind kind);

// Builds the strategy for `seat`. Throws ConfigError for unknown names.
std::unique_ptr<Strategy> MakeStrategy(const std::string& name,
                                       const ExperimentConfig& config,
                                       const Instance& instance,
                                       const InstancePredictions& predictions,
                                       int seat, std::uint64_t seed);

// One CSV row per (instance, composition, seat).
struct ResultRow {
  int instance_id = 0;
  std::string composition;
  int seat = 0;
  std::string strategy;
  double utility = 0.0;
  bool exposed = false;
  int items_won = 0;
  double spend = 0.0;
  int rounds = 0;

  friend bool operator==(const ResultRow&, const ResultRow&) = default;
};

// Strategy names joined with '+', listed by role (before any rotation).
using Composition = std::vector<std::string>;
std::string CompositionLabel(const Composition& composition);
Composition ParseComposition(const std::string& label);

// (A,B,...,B), (A,A,B,...), ..., with k copies of A for k in `counts`.
std::vector<Composition> MatchupCompositions(const std::string& a,
                                             const std::string& b,
                                             int num_bidders,
                                             const std::vector<int>& counts);

// Plays one instance under one composition. When seats rotate, seat s
// plays composition[(s + id) mod n].
std::vector<ResultRow> PlayComposition(const ExperimentConfig& config,
                                       const Instance& instance,
                                       const InstancePredictions& predictions,
                                       const Composition& composition);

struct SkippedCell {
  int instance_id = 0;
  std::string composition;
  std::string reason;
};

struct MatchupResults {
  std::vector<ResultRow> rows;
  std::vector<SkippedCell> skipped;
  std::int64_t played = 0;
};

// Every (instance, composition) cell, over `jobs` workers. Rows come back
// ordered by composition, instance and seat whatever the scheduling.
MatchupResults RunMatchups(const ExperimentConfig& config,
                           const std::vector<Instance>& instances,
                           const std::vector<InstancePredictions>& predictions,
                           const std::vector<Composition>& compositions,
                           int jobs);

void WriteResultsCsv(const std::vector<ResultRow>& rows,
                     const std::filesystem::path& path);
std::vector<ResultRow> ReadResultsCsv(const std::filesystem::path& path);

struct Indicators {
  std::int64_t uses = 0;
  double expected_utility = 0.0;
  double utility_half_width = 0.0;  // 95% normal approximation
  double expected_exposure = 0.0;
  double exposure_frequency = 0.0;
  double exposure_half_width = 0.0;
  double average_price_per_item = 0.0;
  std::int64_t uses_without_items = 0;  // excluded from the average price
  double ratio_items_won = 0.0;
};

// Indicators over the rows played by `strategy` (all rows when empty).
Indicators ComputeIndicators(const std::vector<ResultRow>& rows,
                             const std::string& strategy,
                             int num_items);

// Per strategy of a two-strategy matchup: expected utility per
// composition and the other indicators averaged over the mixed
// compositions.
struct MatchupReport {
  std::string a;
  std::string b;
  // indicators[k] for the compositions with k copies of A, for A and B.
  std::map<int, Indicators> a_by_count;
  std::map<int, Indicators> b_by_count;
  Indicators a_mixed;
  Indicators b_mixed;
};

MatchupReport ReportMatchup(const std::vector<ResultRow>& rows,
                            const std::string& a, const std::string& b,
                            int num_bidders, int num_items);

// Mean and standard error of per-instance differences.
struct PairedTest {
  std::int64_t pairs = 0;
  double mean = 0.0;
  double standard_error = 0.0;
  // Lower one-sided 95% bound of the mean difference.
  double lower_bound() const { return mean - 1.6448536269514722 * standard_error; }
  double upper_bound() const { return mean + 1.6448536269514722 * standard_error; }
};

// u(A deviating into all-B) - u(B in all-B), paired by instance and seat.
PairedTest DeviationGain(const std::vector<ResultRow>& rows,
                         const std::string& a, const std::string& b,
                         int num_bidders);

struct EmpiricalGame {
  std::string a;
  std::string b;
  int num_bidders = 0;
  // Expected utility of an A seat and a B seat with k copies of A.
  std::vector<std::optional<double>> a_payoff;
  std::vector<std::optional<double>> b_payoff;
  PairedTest deviation_to_a;  // from all-B
  PairedTest deviation_to_b;  // from all-A
  // All-A is an equilibrium unless deviating to B is significantly
  // profitable.
  bool all_a_is_equilibrium = false;
  bool all_b_is_equilibrium = false;

  nlohmann::json ToJson() const;
};

EmpiricalGame AnalyzeEmpiricalGame(const std::vector<ResultRow>& rows,
                                   const std::string& a, const std::string& b,
                                   int num_bidders);

// Two-proportion z statistic for p1 < p2 (positive when p1 is smaller).
double TwoProportionZ(std::int64_t hits1, std::int64_t n1, std::int64_t hits2,
                      std::int64_t n2);

// Runs fn(0..count-1) on `jobs` threads.
void ParallelFor(int count, int jobs, const std::function<void(int)>& fn);

}  // namespace saa

#endif  // SAA_HARNESS_H_
