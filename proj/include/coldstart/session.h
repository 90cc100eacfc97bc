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

#ifndef COLDSTART_SESSION_H_
#define COLDSTART_SESSION_H_

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string>

#include "coldstart/channel.h"
#include "coldstart/errors.h"
#include "coldstart/item_database.h"
#include "coldstart/paillier.h"
#include "coldstart/protocol.h"
#include "coldstart/random.h"
#include "coldstart/wire.h"

// Message-level drivers for both roles. The analyst announces, the user sends
// Round 1, the analyst answers with Round 2. Either side may send Abort
// instead of its next message; the receiver then raises AbortedError.
namespace coldstart {

// Abort codes, aligned with the command-line exit codes.
enum class AbortCode : uint8_t {
  kInternal = 1,
  kBound = 3,
  kSingular = 4,
  kReconstruction = 5,
  kTransport = 6,
};

AbortCode AbortCodeFor(const std::exception& error);

class AbortedError : public ProtocolError {
 public:
  explicit AbortedError(const AbortMessage& message);
  const AbortMessage& message() const { return message_; }

 private:
  AbortMessage message_;
};

struct AnalystSessionReport {
  AnalystStats stats;
  double round2_seconds = 0;
};

// Runs one session on `channel`. Errors are reported to the peer with Abort
// and rethrown.
AnalystSessionReport ServeAnalystSession(MessageChannel& channel,
                                         const ItemDatabase& db,
                                         const Announcement& announcement,
                                         RandomSource& rng,
                                         const AnalystOptions& options = {});

struct UserSessionConfig {
  Variant variant = Variant::kFused;
  // Generated after the announcement when absent.
  std::optional<PaillierKeyPair> keys;
  // Key size when generating; 0 picks the smallest admissible size.
  unsigned modulus_bits = 0;
  UserOptions options;
};

struct UserSessionReport {
  Announcement announcement;
  RationalVector profile;
  unsigned modulus_bits = 0;
  double keygen_seconds = 0;
  double round1_seconds = 0;
  double finalize_seconds = 0;
};

// Smallest even key size, at least 16, meeting the announced bound.
unsigned DefaultModulusBits(const ProtocolParams& params);

UserSessionReport RunUserSession(MessageChannel& channel,
                                 std::span<const Rating> ratings,
                                 const UserSessionConfig& config,
                                 RandomSource& rng);

struct InProcessReport {
  UserSessionReport user;
  AnalystSessionReport analyst;
  Transcript transcript;
  std::array<uint8_t, 32> transcript_sha256{};
};

// Both roles over a loopback pair, the analyst on a second thread. The
// transcript is recorded at the user's end.
InProcessReport RunInProcess(const ItemDatabase& db,
                             const Announcement& announcement,
                             std::span<const Rating> ratings,
                             const UserSessionConfig& config,
                             RandomSource& user_rng, RandomSource& analyst_rng,
                             const AnalystOptions& analyst_options = {});

}  // namespace coldstart

#endif  // COLDSTART_SESSION_H_
