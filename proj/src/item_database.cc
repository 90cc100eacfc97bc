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

#include "coldstart/item_database.h"

#include <string>

#include "coldstart/errors.h"

namespace coldstart {

void ItemDatabase::Validate() const {
  if (dim == 0) throw InvalidArgumentError("item dimension must be >= 1");
  if (profiles.size() < 2) {
    throw InvalidArgumentError("database needs the fake item and >= 1 item");
  }
  if (bound_v == 0 || bound_v > static_cast<uint64_t>(INT64_MAX)) {
    throw InvalidArgumentError("B_V must lie in [1, 2^63)");
  }
  for (size_t j = 0; j < profiles.size(); ++j) {
    if (profiles[j].size() != dim) {
      throw InvalidArgumentError("item " + std::to_string(j) +
                                 " has the wrong dimension");
    }
    for (int64_t v : profiles[j]) {
      const uint64_t magnitude = v < 0 ? 0 - static_cast<uint64_t>(v)
                                       : static_cast<uint64_t>(v);
      if (magnitude > bound_v) {
        throw RangeError("item " + std::to_string(j) + " exceeds B_V");
      }
    }
  }
  for (int64_t v : profiles[kFakeItem]) {
    if (v != 0) throw InvalidArgumentError("fake item 0 must be all zero");
  }
}

RatingBatch RatingBatch::Pad(std::span<const Rating> ratings,
                             uint32_t batch_size) {
  if (ratings.size() > batch_size) {
    throw RangeError("more ratings than the batch size S = " +
                     std::to_string(batch_size));
  }
  RatingBatch batch;
  batch.entries.assign(ratings.begin(), ratings.end());
  batch.real_count = static_cast<uint32_t>(ratings.size());
  batch.entries.resize(batch_size, Rating{kFakeItem, 0});
  return batch;
}

}  // namespace coldstart
