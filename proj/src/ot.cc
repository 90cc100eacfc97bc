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

#include "coldstart/ot.h"

#include <openssl/evp.h>
#include <openssl/sha.h>

#include <cstring>
#include <memory>
#include <string>
#include <string_view>

#include "coldstart/bigint.h"
#include "coldstart/errors.h"
#include "coldstart/parallel.h"

namespace coldstart {

namespace {

constexpr std::string_view kBaseOtPointDomain = "coldstart/base-ot/C";
constexpr std::string_view kBaseOtKeyDomain = "coldstart/base-ot/key";
constexpr std::string_view kPadDomain = "coldstart/pir-pad";

void AppendU32(std::vector<uint8_t>& out, uint32_t v) {
  for (int shift = 24; shift >= 0; shift -= 8) {
    out.push_back(static_cast<uint8_t>((v >> shift) & 0xFF));
  }
}

PadSeed KeyMask(const EcGroup& group, const EC_POINT* key, uint32_t index) {
  std::vector<uint8_t> input(kBaseOtKeyDomain.begin(), kBaseOtKeyDomain.end());
  const std::vector<uint8_t> encoded = group.Encode(key);
  input.insert(input.end(), encoded.begin(), encoded.end());
  AppendU32(input, index);
  PadSeed out;
  SHA256(input.data(), input.size(), out.data());
  return out;
}

PadSeed Xor(const PadSeed& a, const PadSeed& b) {
  PadSeed out;
  for (size_t i = 0; i < out.size(); ++i) out[i] = a[i] ^ b[i];
  return out;
}

}  // namespace

OtLayout OtLayout::For(uint32_t items, uint32_t chunks) {
  if (items == 0) throw InvalidArgumentError("OT database is empty");
  if (chunks == 0) throw InvalidArgumentError("records need >= 1 chunk");
  mpz_class side = CeilSqrt(mpz_class(static_cast<unsigned long>(items)));
  OtLayout layout;
  layout.items = items;
  layout.rows = static_cast<uint32_t>(side.get_ui());
  layout.cols = layout.rows;
  layout.chunks = chunks;
  return layout;
}

// ---- Base OT ---------------------------------------------------------------

std::pair<BaseOtReceiver, std::vector<uint8_t>> BaseOtReceiver::Start(
    const EcGroup& group, uint32_t choices, uint32_t choice,
    RandomSource& rng) {
  if (choices == 0 || choice >= choices) {
    throw InvalidArgumentError("base OT choice out of range");
  }
  mpz_class secret = group.RandomScalar(rng);
  EcPoint chosen_key = group.MulGenerator(secret);  // PK_choice = g^k
  EcPoint first;
  if (choice == 0) {
    first = std::move(chosen_key);
  } else {
    // PK_0 = C_choice - PK_choice.
    const EcPoint c = group.HashToPoint(kBaseOtPointDomain, choice);
    first = group.Subtract(c.get(), chosen_key.get());
  }
  std::vector<uint8_t> message = group.Encode(first.get());
  return {BaseOtReceiver(choices, choice, std::move(secret)),
          std::move(message)};
}

PadSeed BaseOtReceiver::Finish(const EcGroup& group,
                               const BaseOtReply& reply) const {
  if (reply.masked_records.size() != choices_) {
    throw ProtocolError("base OT reply has the wrong record count");
  }
  const EcPoint r = group.Decode(reply.sender_point);
  const EcPoint key = group.Mul(r.get(), secret_);  // g^{rk} = PK_choice^r
  return Xor(reply.masked_records[choice_], KeyMask(group, key.get(), choice_));
}

BaseOtReply BaseOtRespond(const EcGroup& group,
                          std::span<const uint8_t> receiver_message,
                          std::span<const PadSeed> records,
                          RandomSource& rng) {
  if (records.empty()) throw InvalidArgumentError("base OT needs >= 1 record");
  const EcPoint pk0 = group.Decode(receiver_message);
  const mpz_class r = group.RandomScalar(rng);
  BaseOtReply reply;
  reply.sender_point = group.Encode(group.MulGenerator(r).get());
  const EcPoint key0 = group.Mul(pk0.get(), r);
  reply.masked_records.reserve(records.size());
  reply.masked_records.push_back(Xor(records[0], KeyMask(group, key0.get(), 0)));
  for (uint32_t i = 1; i < records.size(); ++i) {
    // PK_i^r = C_i^r - PK_0^r.
    const EcPoint c = group.HashToPoint(kBaseOtPointDomain, i);
    const EcPoint ci_r = group.Mul(c.get(), r);
    const EcPoint key = group.Subtract(ci_r.get(), key0.get());
    reply.masked_records.push_back(
        Xor(records[i], KeyMask(group, key.get(), i)));
  }
  return reply;
}

// ---- PIR -------------------------------------------------------------------

std::vector<Ciphertext> PirQuery(const PaillierPublicKey& pk, uint32_t col,
                                 uint32_t cols, const mpz_class& selector,
                                 RandomSource& rng) {
  if (col >= cols) throw InvalidArgumentError("PIR column out of range");
  std::vector<Ciphertext> query;
  query.reserve(cols);
  for (uint32_t c = 0; c < cols; ++c) {
    query.push_back(Encrypt(pk, c == col ? selector : mpz_class(0), rng));
  }
  return query;
}

mpz_class ExpandPad(const PadSeed& seed, uint32_t row, uint32_t chunk,
                    const mpz_class& n) {
  std::vector<uint8_t> input(kPadDomain.begin(), kPadDomain.end());
  input.insert(input.end(), seed.begin(), seed.end());
  AppendU32(input, row);
  AppendU32(input, chunk);
  // 128 extra bits make the bias of the final reduction negligible.
  std::vector<uint8_t> output(ByteLength(n) + 16);
  std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx(
      EVP_MD_CTX_new(), &EVP_MD_CTX_free);
  if (!ctx || EVP_DigestInit_ex(ctx.get(), EVP_shake256(), nullptr) != 1 ||
      EVP_DigestUpdate(ctx.get(), input.data(), input.size()) != 1 ||
      EVP_DigestFinalXOF(ctx.get(), output.data(), output.size()) != 1) {
    throw Error("SHAKE256 pad expansion failed");
  }
  return Mod(FromBigEndian(output), n);
}

std::vector<Ciphertext> PirRespond(
    const PaillierPublicKey& pk, const OtLayout& layout,
    std::span<const Ciphertext> query,
    std::span<const std::vector<mpz_class>> records,
    std::span<const PadSeed> row_seeds, RandomSource& rng,
    const PirRespondOptions& options) {
  if (query.size() != layout.cols) {
    throw ProtocolError("PIR query has " + std::to_string(query.size()) +
                        " slots, layout expects " +
                        std::to_string(layout.cols));
  }
  if (records.size() != layout.items) {
    throw ProtocolError("PIR database size does not match the layout");
  }
  for (const auto& record : records) {
    if (record.size() != layout.chunks) {
      throw ProtocolError("PIR record has the wrong chunk count");
    }
    for (const mpz_class& value : record) {
      if (value < 0 || value >= pk.n()) {
        throw ProtocolError("PIR record value outside [0, n)");
      }
    }
  }
  if (!row_seeds.empty() && row_seeds.size() != layout.rows) {
    throw ProtocolError("one pad seed per row is required");
  }
  if (!options.chunk_offsets.empty() &&
      options.chunk_offsets.size() != layout.chunks) {
    throw ProtocolError("chunk offsets must cover every chunk");
  }
  for (const Ciphertext& c : query) {
    if (c.value <= 0 || c.value >= pk.n_squared()) {
      throw ProtocolError("PIR query slot is not a valid ciphertext");
    }
  }

  const uint32_t chunks = layout.chunks;
  const size_t cell_count = static_cast<size_t>(layout.rows) * chunks;
  std::vector<mpz_class> accumulators(cell_count, mpz_class(1));

  // Column by column so only one fixed-base table is alive at a time.
  for (uint32_t col = 0; col < layout.cols; ++col) {
    std::vector<uint32_t> rows_with_items;
    for (uint32_t row = 0; row < layout.rows; ++row) {
      if (static_cast<uint64_t>(row) * layout.cols + col < layout.items) {
        rows_with_items.push_back(row);
      }
    }
    if (rows_with_items.empty()) continue;
    const FixedBaseExponentiator base(pk, query[col],
                                      rows_with_items.size() * chunks);
    ParallelFor(rows_with_items.size() * chunks, options.workers,
                [&](size_t job) {
                  const uint32_t row = rows_with_items[job / chunks];
                  const uint32_t t = static_cast<uint32_t>(job % chunks);
                  const auto& record = records[row * layout.cols + col];
                  base.MultiplyPower(accumulators[row * chunks + t],
                                     record[t]);
                });
  }

  // Randomness is drawn sequentially so the output does not depend on the
  // worker count.
  std::vector<mpz_class> masks(cell_count);
  std::vector<mpz_class> rhos(cell_count);
  for (uint32_t row = 0; row < layout.rows; ++row) {
    for (uint32_t t = 0; t < chunks; ++t) {
      mpz_class mask = row_seeds.empty()
                           ? mpz_class(0)
                           : ExpandPad(row_seeds[row], row, t, pk.n());
      if (!options.chunk_offsets.empty()) mask += options.chunk_offsets[t];
      masks[row * chunks + t] = Mod(mask, pk.n());
      mpz_class rho;
      do {
        rho = rng.UniformInRange(1, pk.n() - 1);
      } while (Gcd(rho, pk.n()) != 1);
      rhos[row * chunks + t] = std::move(rho);
    }
  }
  std::vector<Ciphertext> cells(cell_count);
  ParallelFor(cell_count, options.workers, [&](size_t i) {
    const Ciphertext mask = EncryptWithRandomness(pk, masks[i], rhos[i]);
    cells[i] = Ciphertext{Mod(accumulators[i] * mask.value, pk.n_squared())};
  });
  return cells;
}

// ---- Composed OT -----------------------------------------------------------

std::pair<OtReceiver, OtQuery> OtReceiver::Start(const PaillierPublicKey& pk,
                                                 const EcGroup& group,
                                                 const OtLayout& layout,
                                                 uint32_t index,
                                                 const mpz_class& selector,
                                                 RandomSource& rng) {
  if (index >= layout.items) throw InvalidArgumentError("OT index out of range");
  OtQuery query;
  query.selection = PirQuery(pk, layout.ColOf(index), layout.cols, selector, rng);
  auto [base, message] =
      BaseOtReceiver::Start(group, layout.rows, layout.RowOf(index), rng);
  query.base_ot_message = std::move(message);
  return {OtReceiver(layout, index, std::move(base)), std::move(query)};
}

std::vector<mpz_class> OtReceiver::Finish(const PaillierSecretKey& sk,
                                          const EcGroup& group,
                                          const OtResponse& response) const {
  if (response.rows != layout_.rows || response.chunks != layout_.chunks ||
      response.cells.size() !=
          static_cast<size_t>(layout_.rows) * layout_.chunks) {
    throw ProtocolError("OT response shape does not match the layout");
  }
  const PadSeed seed = base_.Finish(group, response.base_ot);
  const uint32_t row = layout_.RowOf(index_);
  std::vector<mpz_class> out(layout_.chunks);
  for (uint32_t t = 0; t < layout_.chunks; ++t) {
    const mpz_class value =
        Decrypt(sk, response.cells[static_cast<size_t>(row) * layout_.chunks + t]);
    out[t] = Mod(value - ExpandPad(seed, row, t, sk.n), sk.n);
  }
  return out;
}

OtResponse OtRespond(const PaillierPublicKey& pk, const EcGroup& group,
                     const OtLayout& layout, const OtQuery& query,
                     std::span<const std::vector<mpz_class>> records,
                     RandomSource& rng, const PirRespondOptions& options) {
  std::vector<PadSeed> seeds(layout.rows);
  for (PadSeed& seed : seeds) seed = rng.NextSeed();
  OtResponse response;
  response.rows = layout.rows;
  response.chunks = layout.chunks;
  response.base_ot = BaseOtRespond(group, query.base_ot_message, seeds, rng);
  response.cells =
      PirRespond(pk, layout, query.selection, records, seeds, rng, options);
  return response;
}

}  // namespace coldstart
