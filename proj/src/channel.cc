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

#include "coldstart/channel.h"

#include <netdb.h>
#include <netinet/in.h>
#include <sys/socket.h>
#include <unistd.h>

#include <cerrno>
#include <condition_variable>
#include <cstring>
#include <deque>
#include <mutex>
#include <vector>

#include "coldstart/errors.h"

namespace coldstart {

namespace {

// Upper bound on a single message body read from the network.
constexpr uint32_t kMaxBodyBytes = 1u << 30;

struct LoopbackQueue {
  std::mutex mutex;
  std::condition_variable ready;
  std::deque<Envelope> messages;
  bool closed = false;
};

class LoopbackChannel final : public MessageChannel {
 public:
  LoopbackChannel(std::shared_ptr<LoopbackQueue> inbox,
                  std::shared_ptr<LoopbackQueue> outbox)
      : inbox_(std::move(inbox)), outbox_(std::move(outbox)) {}

  ~LoopbackChannel() override {
    std::lock_guard<std::mutex> lock(outbox_->mutex);
    outbox_->closed = true;
    outbox_->ready.notify_all();
  }

  void Send(const Envelope& envelope) override {
    std::lock_guard<std::mutex> lock(outbox_->mutex);
    outbox_->messages.push_back(envelope);
    outbox_->ready.notify_all();
  }

  Envelope Receive() override {
    std::unique_lock<std::mutex> lock(inbox_->mutex);
    inbox_->ready.wait(lock, [&] {
      return !inbox_->messages.empty() || inbox_->closed;
    });
    if (inbox_->messages.empty()) throw TransportError("peer closed channel");
    Envelope out = std::move(inbox_->messages.front());
    inbox_->messages.pop_front();
    return out;
  }

 private:
  std::shared_ptr<LoopbackQueue> inbox_;
  std::shared_ptr<LoopbackQueue> outbox_;
};

std::pair<std::string, std::string> SplitAddress(const std::string& address) {
  const size_t colon = address.rfind(':');
  if (colon == std::string::npos || colon + 1 == address.size()) {
    throw InvalidArgumentError("address must be host:port, got " + address);
  }
  std::string host = address.substr(0, colon);
  if (host.empty()) host = "127.0.0.1";
  return {host, address.substr(colon + 1)};
}

[[noreturn]] void ThrowErrno(const std::string& what) {
  throw TransportError(what + ": " + std::strerror(errno));
}

void WriteAll(int fd, const uint8_t* data, size_t size) {
  while (size > 0) {
    const ssize_t n = ::send(fd, data, size, MSG_NOSIGNAL);
    if (n < 0) {
      if (errno == EINTR) continue;
      ThrowErrno("send failed");
    }
    data += n;
    size -= static_cast<size_t>(n);
  }
}

void ReadAll(int fd, uint8_t* data, size_t size) {
  while (size > 0) {
    const ssize_t n = ::recv(fd, data, size, 0);
    if (n == 0) throw TransportError("connection closed by peer");
    if (n < 0) {
      if (errno == EINTR) continue;
      ThrowErrno("recv failed");
    }
    data += n;
    size -= static_cast<size_t>(n);
  }
}

}  // namespace

std::pair<std::unique_ptr<MessageChannel>, std::unique_ptr<MessageChannel>>
CreateLoopbackPair() {
  auto a_to_b = std::make_shared<LoopbackQueue>();
  auto b_to_a = std::make_shared<LoopbackQueue>();
  return {std::make_unique<LoopbackChannel>(b_to_a, a_to_b),
          std::make_unique<LoopbackChannel>(a_to_b, b_to_a)};
}

std::unique_ptr<SocketChannel> SocketChannel::Connect(
    const std::string& address) {
  const auto [host, port] = SplitAddress(address);
  addrinfo hints{};
  hints.ai_family = AF_UNSPEC;
  hints.ai_socktype = SOCK_STREAM;
  addrinfo* results = nullptr;
  if (const int rc = ::getaddrinfo(host.c_str(), port.c_str(), &hints, &results);
      rc != 0) {
    throw TransportError("cannot resolve " + address + ": " + gai_strerror(rc));
  }
  int fd = -1;
  for (addrinfo* ai = results; ai != nullptr; ai = ai->ai_next) {
    fd = ::socket(ai->ai_family, ai->ai_socktype, ai->ai_protocol);
    if (fd < 0) continue;
    if (::connect(fd, ai->ai_addr, ai->ai_addrlen) == 0) break;
    ::close(fd);
    fd = -1;
  }
  ::freeaddrinfo(results);
  if (fd < 0) throw TransportError("cannot connect to " + address);
  return std::make_unique<SocketChannel>(fd);
}

SocketChannel::~SocketChannel() {
  if (fd_ >= 0) ::close(fd_);
}

void SocketChannel::Send(const Envelope& envelope) {
  const std::vector<uint8_t> bytes = EncodeEnvelope(envelope);
  WriteAll(fd_, bytes.data(), bytes.size());
}

Envelope SocketChannel::Receive() {
  std::vector<uint8_t> bytes(kEnvelopeHeaderSize);
  ReadAll(fd_, bytes.data(), bytes.size());
  const EnvelopeHeader header = DecodeEnvelopeHeader(bytes);
  if (header.body_length > kMaxBodyBytes) {
    throw ParseError("message body too large", kEnvelopeHeaderSize - 4);
  }
  bytes.resize(kEnvelopeHeaderSize + header.body_length);
  ReadAll(fd_, bytes.data() + kEnvelopeHeaderSize, header.body_length);
  return DecodeEnvelope(bytes);
}

SocketListener::SocketListener(const std::string& address) {
  const auto [host, port] = SplitAddress(address);
  addrinfo hints{};
  hints.ai_family = AF_INET;
  hints.ai_socktype = SOCK_STREAM;
  hints.ai_flags = AI_PASSIVE;
  addrinfo* results = nullptr;
  if (const int rc = ::getaddrinfo(host.c_str(), port.c_str(), &hints, &results);
      rc != 0) {
    throw TransportError("cannot resolve " + address + ": " + gai_strerror(rc));
  }
  fd_ = ::socket(results->ai_family, results->ai_socktype,
                 results->ai_protocol);
  if (fd_ < 0) {
    ::freeaddrinfo(results);
    ThrowErrno("socket failed");
  }
  const int one = 1;
  ::setsockopt(fd_, SOL_SOCKET, SO_REUSEADDR, &one, sizeof(one));
  const int bound = ::bind(fd_, results->ai_addr, results->ai_addrlen);
  ::freeaddrinfo(results);
  if (bound != 0 || ::listen(fd_, 1) != 0) {
    const int saved = errno;
    ::close(fd_);
    errno = saved;
    ThrowErrno("cannot listen on " + address);
  }
  sockaddr_in local{};
  socklen_t length = sizeof(local);
  ::getsockname(fd_, reinterpret_cast<sockaddr*>(&local), &length);
  port_ = ntohs(local.sin_port);
}

SocketListener::~SocketListener() {
  if (fd_ >= 0) ::close(fd_);
}

std::unique_ptr<SocketChannel> SocketListener::Accept() {
  while (true) {
    const int fd = ::accept(fd_, nullptr, nullptr);
    if (fd >= 0) return std::make_unique<SocketChannel>(fd);
    if (errno != EINTR) ThrowErrno("accept failed");
  }
}

RecordingChannel::RecordingChannel(MessageChannel& inner, Direction outgoing,
                                   Transcript& transcript)
    : inner_(inner),
      outgoing_(outgoing),
      transcript_(transcript),
      hash_(EVP_MD_CTX_new()) {
  if (hash_ == nullptr || EVP_DigestInit_ex(hash_, EVP_sha256(), nullptr) != 1) {
    EVP_MD_CTX_free(hash_);
    throw Error("SHA-256 initialisation failed");
  }
}

RecordingChannel::~RecordingChannel() { EVP_MD_CTX_free(hash_); }

void RecordingChannel::Account(Direction direction, const Envelope& envelope) {
  const std::vector<uint8_t> bytes = EncodeEnvelope(envelope);
  EVP_DigestUpdate(hash_, bytes.data(), bytes.size());
  transcript_.Record(direction, envelope.type, bytes.size());
}

void RecordingChannel::Send(const Envelope& envelope) {
  Account(outgoing_, envelope);
  inner_.Send(envelope);
}

Envelope RecordingChannel::Receive() {
  Envelope envelope = inner_.Receive();
  Account(outgoing_ == Direction::kUserToAnalyst ? Direction::kAnalystToUser
                                                 : Direction::kUserToAnalyst,
          envelope);
  return envelope;
}

std::array<uint8_t, 32> RecordingChannel::Digest() const {
  std::array<uint8_t, 32> out{};
  EVP_MD_CTX* copy = EVP_MD_CTX_new();
  if (copy == nullptr || EVP_MD_CTX_copy_ex(copy, hash_) != 1 ||
      EVP_DigestFinal_ex(copy, out.data(), nullptr) != 1) {
    EVP_MD_CTX_free(copy);
    throw Error("SHA-256 finalisation failed");
  }
  EVP_MD_CTX_free(copy);
  return out;
}

}  // namespace coldstart
