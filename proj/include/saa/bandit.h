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

#ifndef SAA_BANDIT_H_
#define SAA_BANDIT_H_

#include <cstdint>
#include <span>
#include <vector>

#include "saa/item_set.h"

namespace saa {

// Statistics of one arm (a bid) at one information set.
struct ArmStats {
  double s = 0.0;             // importance-weighted sum of risk-averse utilities
  std::int64_t n = 0;         // times the arm was played
  std::int64_t available = 1; // times the arm was legal (subset-armed mode)
  double exploration = 0.0;   // accumulated gamma / K while selectable
};

struct InfoSetStats {
  std::vector<ItemSet> arms;
  std::vector<ArmStats> stats;
  std::int64_t visits = 0;  // n_I

  std::size_t size() const { return arms.size(); }
  // Index of `bid` among the arms, or -1.
  int Find(ItemSet bid) const;
  int AddArm(ItemSet bid);
};

struct Exp3Params {
  double gamma = 0.0;
  double eta = 0.0;
};

// gamma = min(1, sqrt(K ln K / ((e - 1) max(1, total_pulls)))), eta = gamma / K.
Exp3Params ComputeExp3Params(int num_arms, std::int64_t total_pulls);

// P(x) = gamma / K + (1 - gamma) / sum_x' exp(eta (s_x' - s_x)), evaluated
// as a max-shifted softmax.
std::vector<double> Exp3Policy(std::span<const double> scores,
                               const Exp3Params& params);

// Plain EXP3 over every arm of the information set, with total_pulls = n_I.
std::vector<double> Exp3Policy(const InfoSetStats& info);

// Subset-armed EXP3: only arms flagged in `legal` compete, each with score
// (n_I / N_x) s_x; gamma and eta use K = number of legal arms and
// total_pulls = n_I. Illegal arms get probability 0.
std::vector<double> SubsetExp3Policy(const InfoSetStats& info,
                                     std::span<const char> legal,
                                     std::int64_t info_visits);

// Parameters the subset policy uses for a given legality mask.
Exp3Params SubsetExp3Params(std::span<const char> legal,
                            std::int64_t info_visits);

// Backpropagation rule. With first_visit set and n == 0 the estimate is
// initialised to v; otherwise s += v / p_played. Always n += 1 and n_I += 1.
// Throws std::logic_error when p_played <= 0.
void Exp3Update(InfoSetStats& info, int arm, double value, double p_played,
                bool first_visit);

// N_x += 1 for every arm flagged legal.
void AvailabilityTick(InfoSetStats& info, std::span<const char> legal);

}  // namespace saa

#endif  // SAA_BANDIT_H_
