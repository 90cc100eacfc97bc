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

#ifndef COLDSTART_CHANNEL_H_
#define COLDSTART_CHANNEL_H_

#include <openssl/evp.h>

#include <array>
#include <cstdint>
#include <memory>
#include <string>
#include <utility>

#include "coldstart/wire.h"

namespace coldstart {

// Ordered, reliable delivery of envelopes between the two parties.
class MessageChannel {
 public:
  virtual ~MessageChannel() = default;
  virtual void Send(const Envelope& envelope) = 0;
  // Blocks until an envelope arrives. TransportError when the peer is gone.
  virtual Envelope Receive() = 0;
};

// In-memory pair; what one end sends the other receives.
std::pair<std::unique_ptr<MessageChannel>, std::unique_ptr<MessageChannel>>
CreateLoopbackPair();

// Length-framed envelopes over a connected TCP socket.
class SocketChannel final : public MessageChannel {
 public:
  // address is "host:port".
  static std::unique_ptr<SocketChannel> Connect(const std::string& address);

  explicit SocketChannel(int fd) : fd_(fd) {}
  SocketChannel(const SocketChannel&) = delete;
  SocketChannel& operator=(const SocketChannel&) = delete;
  ~SocketChannel() override;

  void Send(const Envelope& envelope) override;
  Envelope Receive() override;

 private:
  int fd_;
};

// Listening TCP socket that hands out one channel per accepted connection.
class SocketListener {
 public:
  // address is "host:port"; port 0 picks a free port.
  explicit SocketListener(const std::string& address);
  SocketListener(const SocketListener&) = delete;
  SocketListener& operator=(const SocketListener&) = delete;
  ~SocketListener();

  uint16_t port() const { return port_; }
  std::unique_ptr<SocketChannel> Accept();

 private:
  int fd_ = -1;
  uint16_t port_ = 0;
};

// Decorator recording byte counts (and a running SHA-256 of the bytes) of
// everything crossing the wrapped channel.
class RecordingChannel final : public MessageChannel {
 public:
  // `outgoing` is the direction of envelopes this end sends.
  RecordingChannel(MessageChannel& inner, Direction outgoing,
                   Transcript& transcript);
  RecordingChannel(const RecordingChannel&) = delete;
  RecordingChannel& operator=(const RecordingChannel&) = delete;
  ~RecordingChannel() override;

  void Send(const Envelope& envelope) override;
  Envelope Receive() override;

  std::array<uint8_t, 32> Digest() const;

 private:
  void Account(Direction direction, const Envelope& envelope);

  MessageChannel& inner_;
  Direction outgoing_;
  Transcript& transcript_;
  EVP_MD_CTX* hash_;
};

}  // namespace coldstart

#endif  // COLDSTART_CHANNEL_H_
