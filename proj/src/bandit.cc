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

#include "saa/bandit.h"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace saa {

int InfoSetStats::Find(ItemSet bid) const {
  for (std::size_t a = 0; a < arms.size(); ++a) {
    if (arms[a] == bid) return static_cast<int>(a);
  }
  return -1;
}

int InfoSetStats::AddArm(ItemSet bid) {
  arms.push_back(bid);
  stats.push_back(ArmStats{});
  return static_cast<int>(arms.size()) - 1;
}

Exp3Params ComputeExp3Params(int num_arms, std::int64_t total_pulls) {
  if (num_arms < 1) throw std::invalid_argument("EXP3 needs at least one arm");
  const double k = num_arms;
  const double pulls = static_cast<double>(std::max<std::int64_t>(1, total_pulls));
  Exp3Params p;
  p.gamma = std::min(1.0, std::sqrt(k * std::log(k) /
                                    ((std::numbers::e - 1.0) * pulls)));
  p.eta = p.gamma / k;
  return p;
}

std::vector<double> Exp3Policy(std::span<const double> scores,
                               const Exp3Params& params) {
  const std::size_t k = scores.size();
  if (k == 0) throw std::invalid_argument("EXP3 policy over zero arms");
  std::vector<double> out(k);
  const double top = *std::max_element(scores.begin(), scores.end());
  double total = 0.0;
  for (std::size_t a = 0; a < k; ++a) {
    out[a] = std::exp(params.eta * (scores[a] - top));
    total += out[a];
  }
  const double floor = params.gamma / static_cast<double>(k);
  for (double& p : out) p = floor + (1.0 - params.gamma) * (p / total);
  return out;
}

std::vector<double> Exp3Policy(const InfoSetStats& info) {
  std::vector<double> scores;
  scores.reserve(info.size());
  for (const ArmStats& a : info.stats) scores.push_back(a.s);
  return Exp3Policy(scores, ComputeExp3Params(info.size(), info.visits));
}

Exp3Params SubsetExp3Params(std::span<const char> legal,
                            std::int64_t info_visits) {
  const int k = static_cast<int>(std::count(legal.begin(), legal.end(), 1));
  return ComputeExp3Params(k, info_visits);
}

std::vector<double> SubsetExp3Policy(const InfoSetStats& info,
                                     std::span<const char> legal,
                                     std::int64_t info_visits) {
  std::vector<double> scores;
  std::vector<std::size_t> index;
  for (std::size_t a = 0; a < info.size(); ++a) {
    if (!legal[a]) continue;
    const ArmStats& st = info.stats[a];
    if (st.available < 1) {
      throw std::logic_error("subset EXP3: arm with zero availability count");
    }
    const double scale = static_cast<double>(info_visits) /
                         static_cast<double>(st.available);
    scores.push_back(scale * st.s);
    index.push_back(a);
  }
  const std::vector<double> p =
      Exp3Policy(scores, SubsetExp3Params(legal, info_visits));
  std::vector<double> out(info.size(), 0.0);
  for (std::size_t i = 0; i < index.size(); ++i) out[index[i]] = p[i];
  return out;
}

void Exp3Update(InfoSetStats& info, int arm, double value, double p_played,
                bool first_visit) {
  if (!(p_played > 0.0)) {
    throw std::logic_error("EXP3 update with non-positive selection probability");
  }
  ArmStats& a = info.stats[arm];
  if (first_visit && a.n == 0) {
    a.s = value;
  } else {
    a.s += value / p_played;
  }
  ++a.n;
  ++info.visits;
}

void AvailabilityTick(InfoSetStats& info, std::span<const char> legal) {
  // Arms added after `legal` was computed are not ticked.
  for (std::size_t a = 0; a < std::min(info.size(), legal.size()); ++a) {
    if (legal[a]) ++info.stats[a].available;
  }
}

}  // namespace saa
