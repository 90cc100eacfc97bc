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

#include "coldstart/protocol.h"

#include <memory>
#include <set>
#include <string>

#include "coldstart/bigint.h"
#include "coldstart/errors.h"
#include "coldstart/parallel.h"

namespace coldstart {

namespace {

mpz_class Z(int64_t v) {
  mpz_class out;
  mpz_set_si(out.get_mpz_t(), v);
  return out;
}

ModMatrix UniformMatrix(uint32_t dim, const mpz_class& n, RandomSource& rng) {
  ModMatrix m(dim, dim);
  for (mpz_class& e : m.entries()) e = rng.UniformBelow(n);
  return m;
}

ModVector UniformVector(uint32_t dim, const mpz_class& n, RandomSource& rng) {
  ModVector v(dim);
  for (mpz_class& e : v) e = rng.UniformBelow(n);
  return v;
}

bool IsInvertible(const ModMatrix& m, const mpz_class& n) {
  try {
    ModInverse(m, n);
    return true;
  } catch (const SingularMatrixError&) {
    return false;
  } catch (const FactorFoundError&) {
    return false;
  }
}

void CheckMaskShape(const MaskSet& masks, uint32_t dim, uint32_t batch) {
  const bool ok = masks.r0.rows() == dim && masks.r0.cols() == dim &&
                  masks.r.size() == batch && masks.rho.size() == batch;
  if (!ok) throw InvalidArgumentError("forced masks have the wrong shape");
  for (uint32_t k = 0; k < batch; ++k) {
    if (masks.r[k].rows() != dim || masks.r[k].cols() != dim ||
        masks.rho[k].size() != dim) {
      throw InvalidArgumentError("forced masks have the wrong shape");
    }
  }
}

// Ciphertext in [0, n^2) written as two base-n digits (low, high).
std::pair<mpz_class, mpz_class> SplitCiphertext(const Ciphertext& c,
                                                const mpz_class& n) {
  mpz_class high, low;
  mpz_fdiv_qr(high.get_mpz_t(), low.get_mpz_t(), c.value.get_mpz_t(),
              n.get_mpz_t());
  return {low, high};
}

}  // namespace

std::string_view VariantName(Variant variant) {
  return variant == Variant::kGeneric ? "generic" : "fused";
}

Variant VariantFromName(std::string_view name) {
  if (name == "generic") return Variant::kGeneric;
  if (name == "fused") return Variant::kFused;
  throw InvalidArgumentError("unknown variant " + std::string(name));
}

uint32_t GramChunks(uint32_t dim) { return dim * dim; }
uint32_t AlphaChunks(uint32_t dim) { return dim; }
uint32_t GenericChunks(uint32_t dim) { return dim * dim + 2 * dim; }

MaskSet SampleMasks(uint32_t dim, uint32_t batch, const mpz_class& n,
                    RandomSource& rng) {
  if (dim == 0 || batch == 0) {
    throw InvalidArgumentError("masks need d >= 1 and S >= 1");
  }
  MaskSet masks;
  do {
    masks.r0 = UniformMatrix(dim, n, rng);
  } while (!IsInvertible(masks.r0, n));

  ModMatrix r_sum(dim, dim);
  ModVector rho_sum(dim);
  for (uint32_t k = 0; k + 1 < batch; ++k) {
    masks.r.push_back(UniformMatrix(dim, n, rng));
    masks.rho.push_back(UniformVector(dim, n, rng));
    r_sum = ModMatAdd(r_sum, masks.r.back(), n);
    rho_sum = ModVecAdd(rho_sum, masks.rho.back(), n);
  }
  ModMatrix last_r(dim, dim);
  for (size_t i = 0; i < last_r.entries().size(); ++i) {
    last_r.entries()[i] = Mod(-r_sum.entries()[i], n);
  }
  ModVector last_rho(dim);
  for (size_t i = 0; i < dim; ++i) last_rho[i] = Mod(-rho_sum[i], n);
  masks.r.push_back(std::move(last_r));
  masks.rho.push_back(std::move(last_rho));
  return masks;
}

ModVector MaskedProfile(const ModMatrix& r0, std::span<const int64_t> v,
                        const mpz_class& n) {
  if (r0.cols() != v.size()) throw InvalidArgumentError("profile size mismatch");
  ModVector out(r0.rows());
  for (size_t i = 0; i < r0.rows(); ++i) {
    mpz_class acc = 0;
    for (size_t k = 0; k < v.size(); ++k) acc += r0(i, k) * Z(v[k]);
    out[i] = Mod(acc, n);
  }
  return out;
}

ModMatrix MaskedGram(const MaskSet& masks, size_t k, std::span<const int64_t> v,
                     const mpz_class& n) {
  if (k >= masks.r.size()) throw InvalidArgumentError("mask index out of range");
  const ModVector w = MaskedProfile(masks.r0, v, n);
  const size_t d = w.size();
  ModMatrix out(d, d);
  for (size_t i = 0; i < d; ++i) {
    for (size_t j = 0; j < d; ++j) {
      out(i, j) = Mod(w[i] * Z(v[j]) + masks.r[k](i, j), n);
    }
  }
  return out;
}

std::pair<Round1Message, UserState> UserRound1(
    const Announcement& announcement, const RatingBatch& batch, Variant variant,
    PaillierKeyPair keys, RandomSource& rng, const UserOptions& options) {
  const ProtocolParams& params = announcement.params;
  params.Validate();
  if (batch.entries.size() != params.batch_size) {
    throw RangeError("rating batch must be padded to S = " +
                     std::to_string(params.batch_size));
  }
  if (batch.real_count > params.batch_size) {
    throw RangeError("more real ratings than S");
  }
  std::set<uint32_t> seen;
  for (size_t k = 0; k < batch.entries.size(); ++k) {
    const Rating& rating = batch.entries[k];
    if (rating.item >= params.items) {
      throw RangeError("item " + std::to_string(rating.item) +
                       " is not in the database");
    }
    const uint64_t magnitude = rating.value < 0
                                   ? 0 - static_cast<uint64_t>(rating.value)
                                   : static_cast<uint64_t>(rating.value);
    if (magnitude > params.bound_r) {
      throw RangeError("rating " + std::to_string(rating.value) +
                       " exceeds B_r = " + std::to_string(params.bound_r));
    }
    if (k < batch.real_count) {
      if (rating.item == kFakeItem) {
        throw RangeError("item 0 is reserved for padding");
      }
      if (!seen.insert(rating.item).second) {
        throw RangeError("item " + std::to_string(rating.item) +
                         " is rated twice");
      }
    } else if (rating.item != kFakeItem || rating.value != 0) {
      throw RangeError("padding entries must be (0, 0)");
    }
  }
  const PaillierPublicKey& pk = keys.public_key;
  if (!options.skip_bound_check &&
      pk.modulus_bits() < params.min_modulus_bits) {
    throw RangeError("Paillier modulus of " +
                     std::to_string(pk.modulus_bits()) +
                     " bits is below the correctness bound of " +
                     std::to_string(params.min_modulus_bits) + " bits");
  }

  const EcGroup group(announcement.curve);
  Round1Message message;
  message.variant = variant;
  message.modulus = pk.n();
  UserState state{announcement, variant, std::move(keys), {}, {}};
  const PaillierPublicKey& key = state.keys.public_key;
  for (const Rating& rating : batch.entries) {
    state.indices.push_back(rating.item);
    const mpz_class r = ToResidue(rating.value, key.n());
    if (variant == Variant::kFused) {
      auto [gram_rx, gram_query] =
          OtReceiver::Start(key, group, OtLayout::For(params.items, GramChunks(params.dim)),
                            rating.item, 1, rng);
      auto [alpha_rx, alpha_query] =
          OtReceiver::Start(key, group, OtLayout::For(params.items, AlphaChunks(params.dim)),
                            rating.item, r, rng);
      state.receivers.push_back(std::move(gram_rx));
      state.receivers.push_back(std::move(alpha_rx));
      message.queries.push_back(std::move(gram_query));
      message.queries.push_back(std::move(alpha_query));
    } else {
      message.rating_ciphertexts.push_back(Encrypt(key, r, rng));
      auto [rx, query] = OtReceiver::Start(
          key, group, OtLayout::For(params.items, GenericChunks(params.dim)),
          rating.item, 1, rng);
      state.receivers.push_back(std::move(rx));
      message.queries.push_back(std::move(query));
    }
  }
  return {std::move(message), std::move(state)};
}

Round2Message AnalystRound2(const ItemDatabase& db,
                            const Announcement& announcement,
                            const Round1Message& message, RandomSource& rng,
                            const AnalystOptions& options,
                            AnalystStats* stats) {
  const ExponentiationCounts before = ReadExponentiationCounts();
  const ProtocolParams& params = announcement.params;
  db.Validate();
  if (db.dim != params.dim || db.items() != params.items) {
    throw ProtocolError("database does not match the announced parameters");
  }
  std::unique_ptr<PaillierPublicKey> pk_holder;
  try {
    pk_holder = std::make_unique<PaillierPublicKey>(message.modulus);
  } catch (const InvalidArgumentError& e) {
    throw ProtocolError(std::string("unusable Paillier key: ") + e.what());
  }
  const PaillierPublicKey& pk = *pk_holder;
  const mpz_class& n = pk.n();
  const uint32_t d = params.dim;
  const uint32_t batch = params.batch_size;
  const bool fused = message.variant == Variant::kFused;
  const size_t expected_queries = fused ? 2 * size_t{batch} : batch;
  if (message.queries.size() != expected_queries) {
    throw ProtocolError("round 1 carries " +
                        std::to_string(message.queries.size()) +
                        " OT queries, expected " +
                        std::to_string(expected_queries));
  }
  if (message.rating_ciphertexts.size() != (fused ? 0 : batch)) {
    throw ProtocolError("round 1 carries the wrong number of rating ciphertexts");
  }
  for (const Ciphertext& c : message.rating_ciphertexts) {
    if (c.value <= 0 || c.value >= pk.n_squared()) {
      throw ProtocolError("rating ciphertext outside [1, n^2)");
    }
  }

  MaskSet masks;
  if (options.forced_masks != nullptr) {
    CheckMaskShape(*options.forced_masks, d, batch);
    masks = *options.forced_masks;
  } else {
    masks = SampleMasks(d, batch, n, rng);
  }
  if (options.captured_masks != nullptr) *options.captured_masks = masks;

  const EcGroup group(announcement.curve);
  const uint32_t items = params.items;
  // R_0 v_j is shared by every k.
  std::vector<ModVector> masked_profiles(items);
  for (uint32_t j = 0; j < items; ++j) {
    masked_profiles[j] = MaskedProfile(masks.r0, db.profiles[j], n);
  }
  auto gram_record = [&](uint32_t k, uint32_t j, std::vector<mpz_class>& out) {
    const ModVector& w = masked_profiles[j];
    const auto& v = db.profiles[j];
    for (uint32_t a = 0; a < d; ++a) {
      for (uint32_t b = 0; b < d; ++b) {
        out.push_back(Mod(w[a] * Z(v[b]) + masks.r[k](a, b), n));
      }
    }
  };

  PirRespondOptions pir_options;
  pir_options.workers = options.workers;
  Round2Message reply;
  if (fused) {
    const OtLayout gram_layout = OtLayout::For(items, GramChunks(d));
    const OtLayout alpha_layout = OtLayout::For(items, AlphaChunks(d));
    for (uint32_t k = 0; k < batch; ++k) {
      std::vector<std::vector<mpz_class>> gram_records(items);
      for (uint32_t j = 0; j < items; ++j) {
        gram_records[j].reserve(GramChunks(d));
        gram_record(k, j, gram_records[j]);
      }
      reply.responses.push_back(OtRespond(pk, group, gram_layout,
                                          message.queries[2 * k], gram_records,
                                          rng, pir_options));
      // The selector already carries r_k; rho_k rides on the row masks.
      PirRespondOptions alpha_options = pir_options;
      alpha_options.chunk_offsets = masks.rho[k];
      reply.responses.push_back(OtRespond(pk, group, alpha_layout,
                                          message.queries[2 * k + 1],
                                          masked_profiles, rng, alpha_options));
    }
  } else {
    const OtLayout layout = OtLayout::For(items, GenericChunks(d));
    for (uint32_t k = 0; k < batch; ++k) {
      const FixedBaseExponentiator rating_power(
          pk, message.rating_ciphertexts[k], size_t{items} * d);
      std::vector<std::unique_ptr<RandomSource>> item_rngs;
      item_rngs.reserve(items);
      for (uint32_t j = 0; j < items; ++j) item_rngs.push_back(rng.Fork());
      std::vector<std::vector<mpz_class>> records(items);
      ParallelFor(items, options.workers, [&](size_t j) {
        std::vector<mpz_class>& record = records[j];
        record.reserve(GenericChunks(d));
        gram_record(k, static_cast<uint32_t>(j), record);
        for (uint32_t t = 0; t < d; ++t) {
          // Enc(alpha) = (R_0 v_j)_t (.) c_k (+) Enc(rho_{k,t}).
          const Ciphertext fresh = Encrypt(pk, masks.rho[k][t], *item_rngs[j]);
          const Ciphertext alpha{Mod(
              rating_power.Power(masked_profiles[j][t]) * fresh.value,
              pk.n_squared())};
          auto [low, high] = SplitCiphertext(alpha, n);
          record.push_back(std::move(low));
          record.push_back(std::move(high));
        }
      });
      reply.responses.push_back(OtRespond(pk, group, layout, message.queries[k],
                                          records, rng, pir_options));
    }
  }
  if (stats != nullptr) {
    stats->exponentiations = ReadExponentiationCounts() - before;
  }
  return reply;
}

RationalVector UserFinalize(const UserState& state, const Round2Message& message,
                            FinalizeDetails* details) {
  const ProtocolParams& params = state.announcement.params;
  const uint32_t d = params.dim;
  const PaillierSecretKey& sk = state.keys.secret_key;
  const mpz_class& n = sk.n;
  if (message.responses.size() != state.receivers.size()) {
    throw ProtocolError("round 2 carries " +
                        std::to_string(message.responses.size()) +
                        " OT answers, expected " +
                        std::to_string(state.receivers.size()));
  }
  const EcGroup group(state.announcement.curve);
  const bool fused = state.variant == Variant::kFused;

  FinalizeDetails local;
  FinalizeDetails& out = details != nullptr ? *details : local;
  out = FinalizeDetails{};
  out.sum_a = ModMatrix(d, d);
  out.sum_alpha = ModVector(d);
  for (size_t k = 0; k < params.batch_size; ++k) {
    ModMatrix a(d, d);
    ModVector alpha(d);
    if (fused) {
      const auto gram = state.receivers[2 * k].Finish(sk, group,
                                                      message.responses[2 * k]);
      const auto moment = state.receivers[2 * k + 1].Finish(
          sk, group, message.responses[2 * k + 1]);
      a.entries() = gram;
      alpha = moment;
    } else {
      const auto record =
          state.receivers[k].Finish(sk, group, message.responses[k]);
      std::copy(record.begin(), record.begin() + GramChunks(d),
                a.entries().begin());
      for (uint32_t t = 0; t < d; ++t) {
        const mpz_class& low = record[GramChunks(d) + 2 * t];
        const mpz_class& high = record[GramChunks(d) + 2 * t + 1];
        const Ciphertext c{high * n + low};
        alpha[t] = Decrypt(sk, c);
      }
    }
    out.sum_a = ModMatAdd(out.sum_a, a, n);
    out.sum_alpha = ModVecAdd(out.sum_alpha, alpha, n);
    out.a.push_back(std::move(a));
    out.alpha.push_back(std::move(alpha));
  }
  const ModMatrix inverse = ModInverse(out.sum_a, n);
  out.profile_residues = ModMatVec(inverse, out.sum_alpha, n);
  const ReconstructionBounds bounds = ComputeReconstructionBounds(
      d, params.batch_size, params.bound_v, params.bound_r);
  if (2 * bounds.numerator * bounds.denominator >= n) {
    throw ReconstructionError("modulus too small for rational reconstruction");
  }
  return DecodeProfile(out.profile_residues, n, bounds);
}

mpq_class PredictRatingExact(const RationalVector& u, std::span<const int64_t> v,
                             uint32_t scale_bits) {
  if (u.size() != v.size()) {
    throw InvalidArgumentError("profile dimensions differ");
  }
  mpq_class acc = 0;
  for (size_t i = 0; i < u.size(); ++i) acc += u[i] * mpq_class(Z(v[i]));
  mpq_class scale(mpz_class(1) << scale_bits);
  acc /= scale;
  acc.canonicalize();
  return acc;
}

double PredictRating(const RationalVector& u, std::span<const int64_t> v,
                     uint32_t scale_bits) {
  return PredictRatingExact(u, v, scale_bits).get_d();
}

}  // namespace coldstart
