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

#ifndef COLDSTART_OT_H_
#define COLDSTART_OT_H_

#include <gmpxx.h>

#include <array>
#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "coldstart/ec_group.h"
#include "coldstart/paillier.h"
#include "coldstart/random.h"

// 1-out-of-M oblivious transfer with O(sqrt(M)) communication: a Paillier
// PIR over a sqrt(M) x sqrt(M) grid whose rows are masked by pads, plus a
// 1-out-of-rows Naor-Pinkas OT that hands the receiver her row's pad seed.
namespace coldstart {

using PadSeed = std::array<uint8_t, 32>;

// Grid placement of M records: item j sits at (j / cols, j % cols). Cells at
// index >= items are null records.
struct OtLayout {
  uint32_t items = 0;
  uint32_t rows = 0;
  uint32_t cols = 0;
  uint32_t chunks = 0;  // Z_n slots per record

  // rows = cols = ceil(sqrt(items)).
  static OtLayout For(uint32_t items, uint32_t chunks);

  uint32_t RowOf(uint32_t item) const { return item / cols; }
  uint32_t ColOf(uint32_t item) const { return item % cols; }

  friend bool operator==(const OtLayout&, const OtLayout&) = default;
};

// ---- Base OT ---------------------------------------------------------------

struct BaseOtReply {
  std::vector<uint8_t> sender_point;   // g^r
  std::vector<PadSeed> masked_records; // H(PK_i^r, i) xor record_i
};

// Receiver side of a two-message Naor-Pinkas 1-out-of-m OT. The sender's
// C_1..C_{m-1} are hashed to the curve, so the receiver speaks first.
class BaseOtReceiver {
 public:
  // Returns the receiver state and its message PK_0.
  static std::pair<BaseOtReceiver, std::vector<uint8_t>> Start(
      const EcGroup& group, uint32_t choices, uint32_t choice,
      RandomSource& rng);

  PadSeed Finish(const EcGroup& group, const BaseOtReply& reply) const;

  uint32_t choice() const { return choice_; }

 private:
  BaseOtReceiver(uint32_t choices, uint32_t choice, mpz_class secret)
      : choices_(choices), choice_(choice), secret_(std::move(secret)) {}

  uint32_t choices_;
  uint32_t choice_;
  mpz_class secret_;
};

BaseOtReply BaseOtRespond(const EcGroup& group,
                          std::span<const uint8_t> receiver_message,
                          std::span<const PadSeed> records, RandomSource& rng);

// ---- PIR -------------------------------------------------------------------

// Encrypted selection vector: slot `col` holds `selector`, the rest hold 0.
std::vector<Ciphertext> PirQuery(const PaillierPublicKey& pk, uint32_t col,
                                 uint32_t cols, const mpz_class& selector,
                                 RandomSource& rng);

// SHAKE256(domain || seed || row || chunk) reduced into Z_n.
mpz_class ExpandPad(const PadSeed& seed, uint32_t row, uint32_t chunk,
                    const mpz_class& n);

struct PirRespondOptions {
  unsigned workers = 1;
  // Added to every row's mask in chunk t; the receiver keeps it.
  std::span<const mpz_class> chunk_offsets;
};

// cells[r * chunks + t] =
//   (prod_c query[c]^{records[r*cols+c][t]}) * Enc(pad(r,t) + offset[t]).
// An empty `row_seeds` means all pads are zero (test hook).
std::vector<Ciphertext> PirRespond(
    const PaillierPublicKey& pk, const OtLayout& layout,
    std::span<const Ciphertext> query,
    std::span<const std::vector<mpz_class>> records,
    std::span<const PadSeed> row_seeds, RandomSource& rng,
    const PirRespondOptions& options = {});

// ---- Composed OT -----------------------------------------------------------

struct OtQuery {
  std::vector<Ciphertext> selection;
  std::vector<uint8_t> base_ot_message;
};

struct OtResponse {
  uint32_t rows = 0;
  uint32_t chunks = 0;
  std::vector<Ciphertext> cells;  // row-major rows x chunks
  BaseOtReply base_ot;
};

class OtReceiver {
 public:
  static std::pair<OtReceiver, OtQuery> Start(const PaillierPublicKey& pk,
                                              const EcGroup& group,
                                              const OtLayout& layout,
                                              uint32_t index,
                                              const mpz_class& selector,
                                              RandomSource& rng);

  // Returns selector * record[index][t] + offset[t] mod n for every chunk.
  std::vector<mpz_class> Finish(const PaillierSecretKey& sk,
                                const EcGroup& group,
                                const OtResponse& response) const;

  const OtLayout& layout() const { return layout_; }
  uint32_t index() const { return index_; }

 private:
  OtReceiver(OtLayout layout, uint32_t index, BaseOtReceiver base)
      : layout_(layout), index_(index), base_(std::move(base)) {}

  OtLayout layout_;
  uint32_t index_;
  BaseOtReceiver base_;
};

OtResponse OtRespond(const PaillierPublicKey& pk, const EcGroup& group,
                     const OtLayout& layout, const OtQuery& query,
                     std::span<const std::vector<mpz_class>> records,
                     RandomSource& rng, const PirRespondOptions& options = {});

}  // namespace coldstart

#endif  // COLDSTART_OT_H_
