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

#ifndef SAA_TESTS_TEST_UTIL_H_
#define SAA_TESTS_TEST_UTIL_H_

#include <vector>

#include "saa/auction.h"
#include "saa/value_function.h"

namespace saa::testing {

// Additive value function with per-item values.
inline ValueFunction Additive(const std::vector<double>& item_values) {
  const int m = static_cast<int>(item_values.size());
  std::vector<double> table(NumBundles(m), 0.0);
  for (std::uint32_t x = 1; x < table.size(); ++x) {
    ItemSet(x).ForEach([&](int j) { table[x] += item_values[j]; });
  }
  return ValueFunction(m, std::move(table));
}

inline BidderType Type(ValueFunction v, double budget) {
  return BidderType{std::move(v), budget};
}

inline BidderType ZeroType(int m, double budget = 0.0) {
  return BidderType{ValueFunction(m), budget};
}

// Plays a fixed bid every round it is legal, otherwise passes.
class FixedBidder : public Strategy {
 public:
  explicit FixedBidder(ItemSet bid) : bid_(bid) {}
  ItemSet Bid(const Observation& obs) override {
    return IsLegalBid(*obs.config, *obs.state, obs.bidder, obs.own_type->budget,
                      bid_)
               ? bid_
               : ItemSet();
  }

 private:
  ItemSet bid_;
};

}  // namespace saa::testing

#endif  // SAA_TESTS_TEST_UTIL_H_
