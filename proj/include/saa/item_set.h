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

#ifndef SAA_ITEM_SET_H_
#define SAA_ITEM_SET_H_

#include <bit>
#include <cstdint>
#include <string>

namespace saa {

// Largest supported item count. Value functions are tabulated over all 2^m
// bundles, so this is a memory bound as much as a representation bound.
inline constexpr int kMaxItems = 24;

// A subset of the items 0..m-1 stored as a bitmask. Bit j set means item j
// belongs to the set.
class ItemSet {
 public:
  constexpr ItemSet() = default;
  constexpr explicit ItemSet(std::uint32_t bits) : bits_(bits) {}

  static constexpr ItemSet Full(int num_items) {
    return ItemSet(num_items >= 32 ? ~0u : ((1u << num_items) - 1u));
  }
  static constexpr ItemSet Single(int item) { return ItemSet(1u << item); }

  constexpr std::uint32_t bits() const { return bits_; }
  constexpr bool empty() const { return bits_ == 0; }
  constexpr int size() const { return std::popcount(bits_); }
  constexpr bool Contains(int item) const { return (bits_ >> item) & 1u; }
  constexpr bool IsSubsetOf(ItemSet other) const {
    return (bits_ & ~other.bits_) == 0;
  }
  constexpr bool Intersects(ItemSet other) const {
    return (bits_ & other.bits_) != 0;
  }
  // True when every member index lies in [0, num_items).
  constexpr bool FitsIn(int num_items) const {
    return IsSubsetOf(Full(num_items));
  }

  constexpr ItemSet With(int item) const { return ItemSet(bits_ | (1u << item)); }
  constexpr ItemSet Without(int item) const {
    return ItemSet(bits_ & ~(1u << item));
  }

  friend constexpr ItemSet operator|(ItemSet a, ItemSet b) {
    return ItemSet(a.bits_ | b.bits_);
  }
  friend constexpr ItemSet operator&(ItemSet a, ItemSet b) {
    return ItemSet(a.bits_ & b.bits_);
  }
  // Set difference.
  friend constexpr ItemSet operator-(ItemSet a, ItemSet b) {
    return ItemSet(a.bits_ & ~b.bits_);
  }
  friend constexpr bool operator==(ItemSet, ItemSet) = default;
  friend constexpr auto operator<=>(ItemSet a, ItemSet b) {
    return a.bits_ <=> b.bits_;
  }

  // Calls fn(item) for each member in increasing index order.
  template <typename Fn>
  constexpr void ForEach(Fn&& fn) const {
    for (std::uint32_t rest = bits_; rest != 0; rest &= rest - 1) {
      fn(std::countr_zero(rest));
    }
  }

  // "{0,2,3}" style rendering for logs and CSV cells.
  std::string ToString() const;

 private:
  std::uint32_t bits_ = 0;
};

// Number of bundles over num_items items (2^m).
constexpr std::size_t NumBundles(int num_items) {
  return std::size_t{1} << num_items;
}

}  // namespace saa

#endif  // SAA_ITEM_SET_H_
