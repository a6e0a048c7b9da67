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

#ifndef SAA_VALUE_FUNCTION_H_
#define SAA_VALUE_FUNCTION_H_

#include <span>
#include <vector>

#include "saa/item_set.h"

namespace saa {

// Monetary value of every bundle over m items, tabulated by bitmask.
// Invariants checked by Validate(): v(empty) = 0, values finite and
// non-negative, and free disposal (X subset of Y implies v(X) <= v(Y)).
class ValueFunction {
 public:
  ValueFunction() = default;
  // Zero everywhere.
  explicit ValueFunction(int num_items);
  // Takes ownership of a table of size 2^num_items.
  ValueFunction(int num_items, std::vector<double> table);

  int num_items() const { return num_items_; }
  double operator()(ItemSet bundle) const { return table_[bundle.bits()]; }
  std::span<const double> table() const { return table_; }

  // Throws std::invalid_argument describing the first violated invariant.
  void Validate() const;
  // True when v(X) <= v(X + j) holds for every X and j, which is equivalent
  // to free disposal over the whole lattice.
  bool IsMonotone() const;

  friend bool operator==(const ValueFunction&, const ValueFunction&) = default;

 private:
  int num_items_ = 0;
  std::vector<double> table_;
};

// A bidder's private information: value function and budget.
struct BidderType {
  ValueFunction values;
  double budget = 0.0;

  friend bool operator==(const BidderType&, const BidderType&) = default;
};

// Raises each entry to the maximum over its one-item-smaller subsets, in
// increasing bitmask order, so the table satisfies free disposal. Entries
// that already satisfy it are left bit-identical.
void RepairFreeDisposal(std::span<double> table);

}  // namespace saa

#endif  // SAA_VALUE_FUNCTION_H_
