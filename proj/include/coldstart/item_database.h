/*
 * Copyright 2026 The Coldstart Authors.
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#ifndef COLDSTART_ITEM_DATABASE_H_
#define COLDSTART_ITEM_DATABASE_H_

#include <cstdint>
#include <span>
#include <vector>

namespace coldstart {

// The analyst's item profiles, already integer-encoded. Item 0 is the fake
// item with the all-zero profile used to pad rating batches.
struct ItemDatabase {
  uint32_t dim = 0;
  uint64_t bound_v = 1;
  std::vector<std::vector<int64_t>> profiles;

  uint32_t items() const { return static_cast<uint32_t>(profiles.size()); }
  // Checks shapes, |entries| <= bound_v and the zero fake item.
  void Validate() const;

  friend bool operator==(const ItemDatabase&, const ItemDatabase&) = default;
};

inline constexpr uint32_t kFakeItem = 0;

struct Rating {
  uint32_t item = 0;
  int64_t value = 0;

  friend bool operator==(const Rating&, const Rating&) = default;
};

// A user's ratings padded with (kFakeItem, 0) up to the batch size S.
struct RatingBatch {
  std::vector<Rating> entries;
  uint32_t real_count = 0;

  // Throws RangeError if more than batch_size ratings are given.
  static RatingBatch Pad(std::span<const Rating> ratings, uint32_t batch_size);
};

}  // namespace coldstart

#endif  // COLDSTART_ITEM_DATABASE_H_
