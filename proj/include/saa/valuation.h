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

#ifndef SAA_VALUATION_H_
#define SAA_VALUATION_H_

#include <cstdint>
#include <span>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "saa/item_set.h"
#include "saa/random.h"
#include "saa/value_function.h"

namespace saa {

// Per-bundle uniform laws U([c_X, c_X + w_X]) for the complementarity
// surplus. Singletons have w = (1 - eta_v) V with c in [0, eta_v V]; larger
// bundles have twice both.
struct ComplementarityDistribution {
  int num_items = 0;
  double eta_v = 1.0;
  double max_surplus = 0.0;     // V
  std::vector<double> anchors;  // c_X by bitmask; anchors[0] is unused (0)

  double Width(ItemSet bundle) const;
  double Lower(ItemSet bundle) const { return anchors[bundle.bits()]; }
  double Upper(ItemSet bundle) const { return Lower(bundle) + Width(bundle); }
};

ComplementarityDistribution GenerateComplementarity(int num_items,
                                                    double eta_v,
                                                    double max_surplus,
                                                    Rng& rng);

// v(X) = max_{j in X} v(X \ {j}) + surplus[X], built in increasing bitmask
// order so every subset is ready before its supersets. surplus[0] is
// ignored and v(empty) = 0.
ValueFunction BuildValueFunction(int num_items, std::span<const double> surplus);

// One surplus vector C ~ G drawn in bitmask order, then BuildValueFunction.
ValueFunction DrawValueFunction(const ComplementarityDistribution& dist,
                                Rng& rng);

// Uniform law on [lower, upper]. `contradicted` is set when budget
// inference received an observation above the whole support.
struct BudgetDistribution {
  double lower = 0.0;
  double upper = 0.0;
  bool contradicted = false;

  double Width() const { return upper - lower; }
  double Mean() const { return 0.5 * (lower + upper); }
  double Variance() const { return Width() * Width() / 12.0; }

  friend bool operator==(const BudgetDistribution&,
                         const BudgetDistribution&) = default;
};

// Draws B ~ U([b_min, b_max - d]) with d = (1 - eta_b)(b_max - b_min) and
// returns U([B, B + d]).
BudgetDistribution GenerateBudgetDistribution(double eta_b, double b_min,
                                              double b_max, Rng& rng);

double DrawBudget(const BudgetDistribution& dist, Rng& rng);

// Public prior over one bidder's type: product of the value law and the
// budget law.
struct TypeDistribution {
  ComplementarityDistribution values;
  BudgetDistribution budget;
};

// Values and budget come from separate streams so that one never perturbs
// the other.
BidderType SampleType(const TypeDistribution& dist, Rng& value_rng,
                      Rng& budget_rng);

struct TypeMoments {
  std::vector<double> value_mean;      // by bitmask
  std::vector<double> value_variance;  // by bitmask, unbiased estimator
  double budget_mean = 0.0;
  double budget_variance = 0.0;

  friend bool operator==(const TypeMoments&, const TypeMoments&) = default;
};

// Value moments by Monte-Carlo over DrawValueFunction, budget moments in
// closed form. Requires n_samples >= 2.
TypeMoments EstimateMoments(const TypeDistribution& dist, int n_samples,
                            Rng& rng);

// Replaces the budget moments with those of a (possibly truncated) law.
void SetBudgetMoments(TypeMoments& moments, const BudgetDistribution& budget);

struct Profile {
  double delta = 0.0;
  BidderType type;
};

// v(X) = mean(X) + delta sd(X) and b = mean_b + delta sd_b. The value table
// is then passed through RepairFreeDisposal.
Profile MakeProfile(const TypeMoments& moments, double delta);

// Same value table without the repair pass, for checking monotonicity in
// delta.
std::vector<double> RawProfileValues(const TypeMoments& moments, double delta);

// One delta per opponent, opponents listed in increasing bidder id with the
// concerned player skipped.
struct ProfileCombination {
  std::vector<double> deltas;
  friend bool operator==(const ProfileCombination&,
                         const ProfileCombination&) = default;
};

// Cartesian product, first opponent varying slowest.
std::vector<ProfileCombination> EnumerateProfileCombinations(
    std::span<const double> deltas, int opponent_count);

// Lower bound on the number of information sets with unlimited budgets and
// no activity rule: sum_i |supp T_i| (R n + 1)^m.
boost::multiprecision::cpp_int InfosetCountBound(
    int num_bidders, int num_items, int rounds,
    std::span<const std::uint64_t> support_sizes);

}  // namespace saa

#endif  // SAA_VALUATION_H_
