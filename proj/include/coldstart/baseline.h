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

#ifndef COLDSTART_BASELINE_H_
#define COLDSTART_BASELINE_H_

#include <cstdint>
#include <vector>

#include "coldstart/item_database.h"
#include "coldstart/numeric.h"

// Plaintext ground truth for the private protocol.
namespace coldstart {

// Columns of V_S and the matching ratings, all integer-encoded.
struct PlaintextInstance {
  std::vector<std::vector<int64_t>> columns;  // s columns of length d
  std::vector<int64_t> ratings;               // length s
  uint32_t scale_bits = 0;

  size_t dim() const { return columns.empty() ? 0 : columns.front().size(); }
};

PlaintextInstance InstanceFromBatch(const ItemDatabase& db,
                                    const RatingBatch& batch,
                                    uint32_t scale_bits = 0);

// u = (V_S V_S^T)^{-1} V_S r over the rationals. Fraction-free (Bareiss)
// elimination followed by rational back substitution. Throws RankError when
// the Gram matrix is singular.
RationalVector LsqExact(const PlaintextInstance& instance);

// Same normal equations in double precision with partial pivoting.
std::vector<double> LsqFloat(const PlaintextInstance& instance);

// Deterministic synthetic profiles: item 0 is zero, the rest uniform in
// [-bound_v, bound_v], resampled until items 1..M-1 span Q^d.
ItemDatabase GenerateProfiles(uint32_t items, uint32_t dim, uint64_t bound_v,
                              uint64_t seed);

// Rank over Q of the given integer rows.
size_t IntegerRank(const std::vector<std::vector<int64_t>>& rows);

}  // namespace coldstart

#endif  // COLDSTART_BASELINE_H_
