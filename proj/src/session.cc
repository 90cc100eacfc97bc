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

#include "coldstart/session.h"

#include <algorithm>
#include <chrono>
#include <exception>
#include <thread>
#include <utility>
#include <vector>

#include "coldstart/errors.h"

namespace coldstart {

namespace {

double SecondsSince(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
      .count();
}

// Sends an Abort describing `error`; a dead channel is ignored.
void TrySendAbort(MessageChannel& channel, const std::exception& error) {
  try {
    channel.Send({MessageType::kAbort,
                  EncodeAbort({static_cast<uint8_t>(AbortCodeFor(error)),
                               error.what()})});
  } catch (const Error&) {
  }
}

Envelope ReceiveExpecting(MessageChannel& channel, MessageType expected) {
  Envelope envelope = channel.Receive();
  if (envelope.type == MessageType::kAbort) {
    throw AbortedError(DecodeAbort(envelope.body));
  }
  if (envelope.type != expected) {
    throw ProtocolError(std::string("expected ") +
                        std::string(MessageTypeName(expected)) + ", got " +
                        std::string(MessageTypeName(envelope.type)));
  }
  return envelope;
}

}  // namespace

AbortCode AbortCodeFor(const std::exception& error) {
  if (const auto* aborted = dynamic_cast<const AbortedError*>(&error)) {
    return static_cast<AbortCode>(aborted->message().code);
  }
  if (dynamic_cast<const RangeError*>(&error)) return AbortCode::kBound;
  if (dynamic_cast<const SingularMatrixError*>(&error)) {
    return AbortCode::kSingular;
  }
  if (dynamic_cast<const ReconstructionError*>(&error) ||
      dynamic_cast<const FactorFoundError*>(&error)) {
    return AbortCode::kReconstruction;
  }
  if (dynamic_cast<const TransportError*>(&error) ||
      dynamic_cast<const ParseError*>(&error) ||
      dynamic_cast<const ProtocolError*>(&error)) {
    return AbortCode::kTransport;
  }
  return AbortCode::kInternal;
}

AbortedError::AbortedError(const AbortMessage& message)
    : ProtocolError("peer aborted (code " + std::to_string(message.code) +
                    "): " + message.reason),
      message_(message) {}

AnalystSessionReport ServeAnalystSession(MessageChannel& channel,
                                         const ItemDatabase& db,
                                         const Announcement& announcement,
                                         RandomSource& rng,
                                         const AnalystOptions& options) {
  AnalystSessionReport report;
  channel.Send({MessageType::kParamsAnnounce, EncodeAnnouncement(announcement)});
  const Envelope request = ReceiveExpecting(channel, MessageType::kRound1);
  try {
    const Round1Message round1 = DecodeRound1(request.body);
    const PaillierPublicKey pk(round1.modulus);
    const auto start = std::chrono::steady_clock::now();
    const Round2Message round2 =
        AnalystRound2(db, announcement, round1, rng, options, &report.stats);
    report.round2_seconds = SecondsSince(start);
    channel.Send({MessageType::kRound2, EncodeRound2(round2, pk)});
  } catch (const Error& error) {
    TrySendAbort(channel, error);
    throw;
  }
  return report;
}

unsigned DefaultModulusBits(const ProtocolParams& params) {
  unsigned bits = std::max(16u, params.min_modulus_bits);
  return bits + (bits % 2);
}

UserSessionReport RunUserSession(MessageChannel& channel,
                                 std::span<const Rating> ratings,
                                 const UserSessionConfig& config,
                                 RandomSource& rng) {
  UserSessionReport report;
  bool round1_sent = false;
  const Envelope announce =
      ReceiveExpecting(channel, MessageType::kParamsAnnounce);
  try {
    report.announcement = DecodeAnnouncement(announce.body);
    const ProtocolParams& params = report.announcement.params;
    const RatingBatch batch = RatingBatch::Pad(ratings, params.batch_size);

    const auto keygen_start = std::chrono::steady_clock::now();
    PaillierKeyPair keys =
        config.keys ? *config.keys
                    : GeneratePaillierKeyPair(config.modulus_bits != 0
                                                  ? config.modulus_bits
                                                  : DefaultModulusBits(params),
                                              rng);
    report.keygen_seconds = SecondsSince(keygen_start);
    report.modulus_bits = keys.public_key.modulus_bits();

    const auto round1_start = std::chrono::steady_clock::now();
    auto [round1, state] = UserRound1(report.announcement, batch,
                                      config.variant, std::move(keys), rng,
                                      config.options);
    std::vector<uint8_t> body = EncodeRound1(round1);
    report.round1_seconds = SecondsSince(round1_start);
    channel.Send({MessageType::kRound1, std::move(body)});
    round1_sent = true;

    const Envelope answer = ReceiveExpecting(channel, MessageType::kRound2);
    const auto finalize_start = std::chrono::steady_clock::now();
    const Round2Message round2 = DecodeRound2(answer.body, state.keys.public_key);
    report.profile = UserFinalize(state, round2);
    report.finalize_seconds = SecondsSince(finalize_start);
  } catch (const AbortedError&) {
    throw;
  } catch (const Error& error) {
    // Once Round 2 is in hand the analyst is no longer listening.
    if (!round1_sent) TrySendAbort(channel, error);
    throw;
  }
  return report;
}

InProcessReport RunInProcess(const ItemDatabase& db,
                             const Announcement& announcement,
                             std::span<const Rating> ratings,
                             const UserSessionConfig& config,
                             RandomSource& user_rng, RandomSource& analyst_rng,
                             const AnalystOptions& analyst_options) {
  InProcessReport report;
  auto [user_end, analyst_end] = CreateLoopbackPair();

  std::exception_ptr analyst_error;
  std::thread analyst([&, channel = std::move(analyst_end)] {
    try {
      report.analyst = ServeAnalystSession(*channel, db, announcement,
                                           analyst_rng, analyst_options);
    } catch (...) {
      analyst_error = std::current_exception();
    }
  });

  std::exception_ptr user_error;
  {
    RecordingChannel recorder(*user_end, Direction::kUserToAnalyst,
                              report.transcript);
    try {
      report.user = RunUserSession(recorder, ratings, config, user_rng);
    } catch (...) {
      user_error = std::current_exception();
    }
    report.transcript_sha256 = recorder.Digest();
  }
  user_end.reset();
  analyst.join();

  // The user's view decides the outcome; an abort it received carries the
  // analyst's failure, which is the more informative one to surface.
  if (user_error) {
    try {
      std::rethrow_exception(user_error);
    } catch (const AbortedError&) {
      if (analyst_error) std::rethrow_exception(analyst_error);
      throw;
    }
  }
  if (analyst_error) std::rethrow_exception(analyst_error);
  return report;
}

}  // namespace coldstart
