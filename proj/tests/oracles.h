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

// Reference implementations used only by tests. They are written straight
// from the rule definitions, without sharing code paths with the library.

#ifndef SAA_TESTS_ORACLES_H_
#define SAA_TESTS_ORACLES_H_

#include <cmath>
#include <cstdint>
#include <vector>

#include "saa/auction.h"
#include "saa/value_function.h"

namespace saa::oracle {

inline bool InSet(std::uint32_t mask, int j) { return (mask >> j) & 1u; }

inline int Popcount(std::uint32_t mask) {
  int c = 0;
  for (; mask; mask >>= 1) c += mask & 1u;
  return c;
}

// Bid legality from the activity rule and the budget rule: X disjoint from
// the held set Y, |X| + |Y| <= e, sum_X (P_j + eps) <= b - sum_Y P_j.
inline bool Legal(int m, const std::vector<int>& prices,
                  const std::vector<int>& winners, int eligibility,
                  int bidder, double budget, double eps, std::uint32_t x) {
  if (x == 0) return true;
  std::uint32_t held = 0;
  for (int j = 0; j < m; ++j) {
    if (winners[j] == bidder) held |= 1u << j;
  }
  if (x & held) return false;
  if (x >> m) return false;
  if (Popcount(x) + Popcount(held) > eligibility) return false;
  long long bid_ticks = 0, held_ticks = 0;
  for (int j = 0; j < m; ++j) {
    if (InSet(x, j)) bid_ticks += prices[j] + 1;
    if (InSet(held, j)) held_ticks += prices[j];
  }
  return eps * static_cast<double>(bid_ticks) <=
         budget - eps * static_cast<double>(held_ticks);
}

struct PpChoice {
  std::uint32_t bid = 0;
  double utility = 0.0;
  double cost = 0.0;
};

// Exhaustive PP argmax over bundles Z containing the held set: utility
// v(Z) - sum_{Z} perceived, ties to the lower cost of the new items, then to
// the smaller bid bitmask.
inline PpChoice PpArgmax(int m, const std::vector<int>& prices,
                         const std::vector<int>& winners, int eligibility,
                         int bidder, double budget, double eps,
                         const ValueFunction& v,
                         const std::vector<double>& prediction) {
  std::uint32_t held = 0;
  for (int j = 0; j < m; ++j) {
    if (winners[j] == bidder) held |= 1u << j;
  }
  std::vector<double> perceived(m);
  for (int j = 0; j < m; ++j) {
    perceived[j] = InSet(held, j)
                       ? eps * prices[j]
                       : std::max(prediction[j], eps * (prices[j] + 1));
  }
  double committed = 0.0;
  for (int j = 0; j < m; ++j) {
    if (InSet(held, j)) committed += eps * prices[j];
  }
  bool have = false;
  PpChoice best;
  for (std::uint32_t z = 0; z < (1u << m); ++z) {
    if ((z & held) != held) continue;
    const std::uint32_t x = z & ~held;
    if (!Legal(m, prices, winners, eligibility, bidder, budget, eps, x)) {
      continue;
    }
    double cost = 0.0;
    for (int j = 0; j < m; ++j) {
      if (InSet(x, j)) cost += perceived[j];
    }
    if (committed + cost > budget) continue;
    double total = 0.0;
    for (int j = 0; j < m; ++j) {
      if (InSet(z, j)) total += perceived[j];
    }
    const double u = v(ItemSet(z)) - total;
    bool better = !have;
    if (have) {
      if (u != best.utility) {
        better = u > best.utility;
      } else if (cost != best.cost) {
        better = cost < best.cost;
      } else {
        better = x < best.bid;
      }
    }
    if (better) {
      best = {x, u, cost};
      have = true;
    }
  }
  return best;
}

// Plain Gibbs form of the EXP3 policy, no max shift.
inline std::vector<double> Exp3(const std::vector<double>& s, double gamma,
                                double eta) {
  const double k = static_cast<double>(s.size());
  std::vector<double> p(s.size());
  for (std::size_t x = 0; x < s.size(); ++x) {
    double denom = 0.0;
    for (std::size_t y = 0; y < s.size(); ++y) {
      denom += std::exp(eta * (s[y] - s[x]));
    }
    p[x] = gamma / k + (1.0 - gamma) / denom;
  }
  return p;
}

inline double Exp3Gamma(int k, double pulls) {
  const double e = std::exp(1.0);
  return std::min(1.0, std::sqrt(k * std::log(static_cast<double>(k)) /
                                 ((e - 1.0) * std::max(1.0, pulls))));
}

}  // namespace saa::oracle

#endif  // SAA_TESTS_ORACLES_H_
