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

#include "saa/value_function.h"

#include <cmath>
#include <stdexcept>
#include <string>

namespace saa {

std::string ItemSet::ToString() const {
  std::string out = "{";
  bool first = true;
  ForEach([&](int j) {
    if (!first) out += ',';
    out += std::to_string(j);
    first = false;
  });
  out += '}';
  return out;
}

ValueFunction::ValueFunction(int num_items)
    : ValueFunction(num_items, std::vector<double>(
                                   num_items >= 0 && num_items <= kMaxItems
                                       ? NumBundles(num_items)
                                       : 0,
                                   0.0)) {}

ValueFunction::ValueFunction(int num_items, std::vector<double> table)
    : num_items_(num_items), table_(std::move(table)) {
  if (num_items < 0 || num_items > kMaxItems) {
    throw std::invalid_argument("ValueFunction: item count out of range: " +
                                std::to_string(num_items));
  }
  if (table_.size() != NumBundles(num_items)) {
    throw std::invalid_argument("ValueFunction: table size " +
                                std::to_string(table_.size()) +
                                " does not match 2^" +
                                std::to_string(num_items));
  }
}

bool ValueFunction::IsMonotone() const {
  for (std::uint32_t x = 0; x < table_.size(); ++x) {
    for (int j = 0; j < num_items_; ++j) {
      if ((x >> j) & 1u) continue;
      if (table_[x] > table_[x | (1u << j)]) return false;
    }
  }
  return true;
}

void ValueFunction::Validate() const {
  if (table_.empty() || table_[0] != 0.0) {
    throw std::invalid_argument("ValueFunction: v(empty) must be 0");
  }
  for (std::size_t x = 0; x < table_.size(); ++x) {
    if (!std::isfinite(table_[x]) || table_[x] < 0.0) {
      throw std::invalid_argument("ValueFunction: bundle " +
                                  ItemSet(x).ToString() +
                                  " has a negative or non-finite value");
    }
  }
  if (!IsMonotone()) {
    throw std::invalid_argument("ValueFunction: free disposal violated");
  }
}

void RepairFreeDisposal(std::span<double> table) {
  for (std::uint32_t x = 1; x < table.size(); ++x) {
    double best = table[x];
    for (std::uint32_t rest = x; rest != 0; rest &= rest - 1) {
      const std::uint32_t sub = x & ~(rest & -rest);
      if (table[sub] > best) best = table[sub];
    }
    table[x] = best;
  }
}

}  // namespace saa
