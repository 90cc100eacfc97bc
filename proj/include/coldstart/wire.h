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

#ifndef COLDSTART_WIRE_H_
#define COLDSTART_WIRE_H_

#include <gmpxx.h>

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "coldstart/item_database.h"
#include "coldstart/paillier.h"
#include "coldstart/protocol.h"

// Canonical binary encodings. Layouts are documented in docs/wire_format.md.
// All integers are big-endian; byte strings and big naturals carry a 4-byte
// length prefix; ciphertexts are left-padded to the byte length of n^2 so that
// message sizes never depend on their values.
namespace coldstart {

inline constexpr std::array<uint8_t, 4> kEnvelopeMagic = {'C', 'S', 'R', 'S'};
inline constexpr uint8_t kWireVersion = 1;
inline constexpr size_t kEnvelopeHeaderSize = 10;

enum class MessageType : uint8_t {
  kParamsAnnounce = 1,
  kRound1 = 2,
  kRound2 = 3,
  kAbort = 4,
};

std::string_view MessageTypeName(MessageType type);

struct Envelope {
  MessageType type = MessageType::kAbort;
  std::vector<uint8_t> body;
};

struct EnvelopeHeader {
  MessageType type;
  uint32_t body_length;
};

std::vector<uint8_t> EncodeEnvelope(const Envelope& envelope);
// Parses exactly one envelope occupying all of `bytes`.
Envelope DecodeEnvelope(std::span<const uint8_t> bytes);
EnvelopeHeader DecodeEnvelopeHeader(std::span<const uint8_t> header);

struct AbortMessage {
  uint8_t code = 0;
  std::string reason;

  friend bool operator==(const AbortMessage&, const AbortMessage&) = default;
};

std::vector<uint8_t> EncodeAnnouncement(const Announcement& announcement);
Announcement DecodeAnnouncement(std::span<const uint8_t> body);

std::vector<uint8_t> EncodeRound1(const Round1Message& message);
Round1Message DecodeRound1(std::span<const uint8_t> body);

// Ciphertext widths come from the user's key, so decoding needs it.
std::vector<uint8_t> EncodeRound2(const Round2Message& message,
                                  const PaillierPublicKey& pk);
Round2Message DecodeRound2(std::span<const uint8_t> body,
                           const PaillierPublicKey& pk);

std::vector<uint8_t> EncodeAbort(const AbortMessage& message);
AbortMessage DecodeAbort(std::span<const uint8_t> body);

// Key file: "CSKY" | version | n | lambda | mu.
std::vector<uint8_t> EncodeKeyPair(const PaillierKeyPair& keys);
PaillierKeyPair DecodeKeyPair(std::span<const uint8_t> bytes);

// Database file: "CSDB" | version | d | M | B_V | M*d signed integers.
std::vector<uint8_t> EncodeItemDatabase(const ItemDatabase& db);
ItemDatabase DecodeItemDatabase(std::span<const uint8_t> bytes);

// Ratings text file: one "item rating" pair per line, '#' starts a comment.
std::vector<Rating> ParseRatingsText(std::string_view text);

std::vector<uint8_t> ReadFileBytes(const std::string& path);
void WriteFileBytes(const std::string& path, std::span<const uint8_t> bytes);

enum class Direction : uint8_t {
  kAnalystToUser = 0,
  kUserToAnalyst = 1,
};

struct TranscriptEntry {
  Direction direction;
  MessageType type;
  size_t bytes;  // whole envelope, header included
};

// Exact byte accounting of every envelope exchanged in a session.
struct Transcript {
  std::vector<TranscriptEntry> entries;

  void Record(Direction direction, MessageType type, size_t bytes);
  size_t TotalBytes() const;
  size_t BytesFrom(Direction direction) const;
};

}  // namespace coldstart

#endif  // COLDSTART_WIRE_H_
