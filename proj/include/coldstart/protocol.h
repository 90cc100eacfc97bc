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

#ifndef COLDSTART_PROTOCOL_H_
#define COLDSTART_PROTOCOL_H_

#include <gmpxx.h>

#include <cstdint>
#include <span>
#include <string_view>
#include <utility>
#include <vector>

#include "coldstart/ec_group.h"
#include "coldstart/item_database.h"
#include "coldstart/numeric.h"
#include "coldstart/ot.h"
#include "coldstart/paillier.h"
#include "coldstart/random.h"

// The two-round profile-learning protocol.
//
//   user    -> analyst : Paillier key, OT queries for the indices j_1..j_S
//                        (generic variant: also Enc(r_k))
//   analyst -> user    : OT answers over the records
//                          A_{k,j}     = R_0 v_j v_j^T + R_k
//                          Enc(alpha)  = (R_0 v_j) * Enc(r_k) + Enc(rho_k)
//   user               : u = (sum_k A_k)^{-1} (sum_k alpha_k) mod n, then
//                        rational reconstruction.
//
// The R_k and rho_k sum to zero and R_0 is invertible, so the sums telescope
// to R_0 V_S V_S^T and R_0 V_S r and R_0 cancels in the solve.
namespace coldstart {

enum class Variant : uint8_t {
  // One OT per rating carrying (A_k, Enc(alpha_k)); ratings sent as Enc(r_k).
  kGeneric = 0,
  // Two OTs per rating; the alpha OT selector encrypts r_k instead of 1.
  kFused = 1,
};

std::string_view VariantName(Variant variant);
Variant VariantFromName(std::string_view name);

// Everything the analyst publishes before a session.
struct Announcement {
  ProtocolParams params;
  CurveId curve = CurveId::kP256;

  friend bool operator==(const Announcement&, const Announcement&) = default;
};

struct MaskSet {
  ModMatrix r0;                // uniform in GL(d, Z_n)
  std::vector<ModMatrix> r;    // R_1..R_S, sum to zero
  std::vector<ModVector> rho;  // rho_1..rho_S, sum to zero
};

// The first S-1 masks are uniform, the last ones are the negated sums; R_0 is
// resampled until it lies in GL(d, Z_n).
MaskSet SampleMasks(uint32_t dim, uint32_t batch, const mpz_class& n,
                    RandomSource& rng);

// R_0 v mod n.
ModVector MaskedProfile(const ModMatrix& r0, std::span<const int64_t> v,
                        const mpz_class& n);
// A_{k,j} = R_0 v v^T + R_k mod n, k is 0-based.
ModMatrix MaskedGram(const MaskSet& masks, size_t k, std::span<const int64_t> v,
                     const mpz_class& n);

struct Round1Message {
  Variant variant = Variant::kFused;
  mpz_class modulus;                          // Paillier public key n
  std::vector<Ciphertext> rating_ciphertexts; // generic variant only
  // Generic: one query per rating. Fused: (A query, alpha query) per rating.
  std::vector<OtQuery> queries;
};

struct Round2Message {
  std::vector<OtResponse> responses;  // aligned with Round1Message::queries
};

// Number of Z_n chunks per OT record.
uint32_t GramChunks(uint32_t dim);
uint32_t AlphaChunks(uint32_t dim);
uint32_t GenericChunks(uint32_t dim);  // d^2 + 2d: alpha ciphertexts as 2 digits

struct UserState {
  Announcement announcement;
  Variant variant = Variant::kFused;
  PaillierKeyPair keys;
  std::vector<uint32_t> indices;
  std::vector<OtReceiver> receivers;
};

struct UserOptions {
  // Lets a session run with a modulus below the correctness bound (tests).
  bool skip_bound_check = false;
};

// Validates the batch against the announcement (RangeError before anything is
// produced) and builds the first message.
std::pair<Round1Message, UserState> UserRound1(
    const Announcement& announcement, const RatingBatch& batch, Variant variant,
    PaillierKeyPair keys, RandomSource& rng, const UserOptions& options = {});

struct AnalystOptions {
  unsigned workers = 1;
  // Test hooks.
  const MaskSet* forced_masks = nullptr;
  MaskSet* captured_masks = nullptr;
};

struct AnalystStats {
  ExponentiationCounts exponentiations;
};

Round2Message AnalystRound2(const ItemDatabase& db,
                            const Announcement& announcement,
                            const Round1Message& message, RandomSource& rng,
                            const AnalystOptions& options = {},
                            AnalystStats* stats = nullptr);

// Intermediate values of the final step, exposed for tests and tooling.
struct FinalizeDetails {
  std::vector<ModMatrix> a;
  std::vector<ModVector> alpha;
  ModMatrix sum_a;
  ModVector sum_alpha;
  ModVector profile_residues;
};

// Throws SingularMatrixError for a rank-deficient design and
// ReconstructionError when the modulus was too small.
RationalVector UserFinalize(const UserState& state, const Round2Message& message,
                            FinalizeDetails* details = nullptr);

// <u, v> / 2^scale_bits, exact until the final conversion.
mpq_class PredictRatingExact(const RationalVector& u, std::span<const int64_t> v,
                             uint32_t scale_bits);
double PredictRating(const RationalVector& u, std::span<const int64_t> v,
                     uint32_t scale_bits);

}  // namespace coldstart

#endif  // COLDSTART_PROTOCOL_H_
