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

#include "saa/valuation.h"

#include <cmath>
#include <stdexcept>
#include <string>

namespace saa {

namespace {

void CheckUnitInterval(double x, const char* name) {
  if (!(x >= 0.0 && x <= 1.0)) {
    throw std::invalid_argument(std::string(name) + " must lie in [0, 1], got " +
                                std::to_string(x));
  }
}

}  // namespace

double ComplementarityDistribution::Width(ItemSet bundle) const {
  const double width = (1.0 - eta_v) * max_surplus;
  return bundle.size() == 1 ? width : 2.0 * width;
}

ComplementarityDistribution GenerateComplementarity(int num_items,
                                                    double eta_v,
                                                    double max_surplus,
                                                    Rng& rng) {
  CheckUnitInterval(eta_v, "eta_v");
  if (!(max_surplus > 0.0)) {
    throw std::invalid_argument("V must be positive");
  }
  if (num_items < 1 || num_items > kMaxItems) {
    throw std::invalid_argument("item count out of range");
  }
  ComplementarityDistribution dist;
  dist.num_items = num_items;
  dist.eta_v = eta_v;
  dist.max_surplus = max_surplus;
  dist.anchors.assign(NumBundles(num_items), 0.0);
  for (std::uint32_t x = 1; x < dist.anchors.size(); ++x) {
    const double span = ItemSet(x).size() == 1 ? eta_v * max_surplus
                                               : 2.0 * eta_v * max_surplus;
    dist.anchors[x] = rng.Uniform(0.0, span);
  }
  return dist;
}

ValueFunction BuildValueFunction(int num_items,
                                 std::span<const double> surplus) {
  std::vector<double> v(NumBundles(num_items), 0.0);
  if (surplus.size() != v.size()) {
    throw std::invalid_argument("surplus vector must have 2^m entries");
  }
  for (std::uint32_t x = 1; x < v.size(); ++x) {
    double best = 0.0;
    for (std::uint32_t rest = x; rest != 0; rest &= rest - 1) {
      const double sub = v[x & ~(rest & -rest)];
      if (sub > best) best = sub;
    }
    v[x] = best + surplus[x];
  }
  return ValueFunction(num_items, std::move(v));
}

ValueFunction DrawValueFunction(const ComplementarityDistribution& dist,
                                Rng& rng) {
  std::vector<double> surplus(dist.anchors.size(), 0.0);
  for (std::uint32_t x = 1; x < surplus.size(); ++x) {
    surplus[x] = rng.Uniform(dist.Lower(ItemSet(x)), dist.Upper(ItemSet(x)));
  }
  return BuildValueFunction(dist.num_items, surplus);
}

BudgetDistribution GenerateBudgetDistribution(double eta_b, double b_min,
                                              double b_max, Rng& rng) {
  CheckUnitInterval(eta_b, "eta_b");
  if (!(b_min < b_max)) {
    throw std::invalid_argument("budget range requires b_min < b_max");
  }
  const double width = (1.0 - eta_b) * (b_max - b_min);
  BudgetDistribution dist;
  dist.lower = rng.Uniform(b_min, b_max - width);
  dist.upper = dist.lower + width;
  return dist;
}

double DrawBudget(const BudgetDistribution& dist, Rng& rng) {
  return rng.Uniform(dist.lower, dist.upper);
}

BidderType SampleType(const TypeDistribution& dist, Rng& value_rng,
                      Rng& budget_rng) {
  BidderType t;
  t.values = DrawValueFunction(dist.values, value_rng);
  t.budget = DrawBudget(dist.budget, budget_rng);
  return t;
}

TypeMoments EstimateMoments(const TypeDistribution& dist, int n_samples,
                            Rng& rng) {
  if (n_samples < 2) {
    throw std::invalid_argument("EstimateMoments needs at least 2 samples");
  }
  const std::size_t size = dist.values.anchors.size();
  TypeMoments out;
  out.value_mean.assign(size, 0.0);
  std::vector<double> m2(size, 0.0);
  // Welford updates keep the mean exact when every draw is identical.
  for (int k = 1; k <= n_samples; ++k) {
    const ValueFunction v = DrawValueFunction(dist.values, rng);
    for (std::size_t x = 0; x < size; ++x) {
      const double value = v.table()[x];
      const double delta = value - out.value_mean[x];
      out.value_mean[x] += delta / k;
      m2[x] += delta * (value - out.value_mean[x]);
    }
  }
  out.value_variance.resize(size);
  for (std::size_t x = 0; x < size; ++x) {
    out.value_variance[x] = std::max(0.0, m2[x] / (n_samples - 1));
  }
  SetBudgetMoments(out, dist.budget);
  return out;
}

void SetBudgetMoments(TypeMoments& moments, const BudgetDistribution& budget) {
  moments.budget_mean = budget.Mean();
  moments.budget_variance = budget.Variance();
}

std::vector<double> RawProfileValues(const TypeMoments& moments, double delta) {
  std::vector<double> v(moments.value_mean.size());
  for (std::size_t x = 0; x < v.size(); ++x) {
    v[x] = moments.value_mean[x] + delta * std::sqrt(moments.value_variance[x]);
  }
  if (!v.empty()) v[0] = 0.0;
  return v;
}

Profile MakeProfile(const TypeMoments& moments, double delta) {
  std::vector<double> v = RawProfileValues(moments, delta);
  // A negative delta can push small bundles below zero.
  for (double& x : v) x = std::max(0.0, x);
  RepairFreeDisposal(v);
  const int m = std::countr_zero(v.size());
  Profile p;
  p.delta = delta;
  p.type.values = ValueFunction(m, std::move(v));
  p.type.budget = moments.budget_mean + delta * std::sqrt(moments.budget_variance);
  return p;
}

std::vector<ProfileCombination> EnumerateProfileCombinations(
    std::span<const double> deltas, int opponent_count) {
  if (deltas.empty()) {
    throw std::invalid_argument("at least one delta is required");
  }
  if (opponent_count < 0) {
    throw std::invalid_argument("negative opponent count");
  }
  std::vector<ProfileCombination> out{ProfileCombination{}};
  for (int k = 0; k < opponent_count; ++k) {
    std::vector<ProfileCombination> next;
    next.reserve(out.size() * deltas.size());
    for (const ProfileCombination& prefix : out) {
      for (double d : deltas) {
        ProfileCombination c = prefix;
        c.deltas.push_back(d);
        next.push_back(std::move(c));
      }
    }
    out = std::move(next);
  }
  return out;
}

boost::multiprecision::cpp_int InfosetCountBound(
    int num_bidders, int num_items, int rounds,
    std::span<const std::uint64_t> support_sizes) {
  if (num_bidders <= 0 || num_items <= 0 || rounds <= 0 ||
      support_sizes.size() != static_cast<std::size_t>(num_bidders)) {
    throw std::invalid_argument(
        "InfosetCountBound: positive n, m, R and one support size per bidder");
  }
  using boost::multiprecision::cpp_int;
  cpp_int total_support = 0;
  for (std::uint64_t s : support_sizes) {
    if (s == 0) throw std::invalid_argument("support sizes must be positive");
    total_support += s;
  }
  const cpp_int base = cpp_int(rounds) * num_bidders + 1;
  return total_support * boost::multiprecision::pow(base, num_items);
}

}  // namespace saa
