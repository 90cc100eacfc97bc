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

#include "coldstart/random.h"

#include <openssl/rand.h>
#include <openssl/sha.h>

#include <cstring>
#include <stdexcept>
#include <string_view>
#include <utility>

#include "coldstart/bigint.h"
#include "coldstart/errors.h"

namespace coldstart {

namespace {

constexpr size_t kKeystreamBlock = 4096;

}  // namespace

mpz_class RandomSource::UniformBelow(const mpz_class& bound) {
  if (bound <= 0) throw InvalidArgumentError("UniformBelow: bound must be > 0");
  if (bound == 1) return 0;
  const size_t bits = mpz_sizeinbase(mpz_class(bound - 1).get_mpz_t(), 2);
  const size_t bytes = (bits + 7) / 8;
  const unsigned excess = static_cast<unsigned>(bytes * 8 - bits);
  std::vector<uint8_t> buf(bytes);
  while (true) {
    Fill(buf);
    buf[0] &= static_cast<uint8_t>(0xFFu >> excess);
    mpz_class candidate = FromBigEndian(buf);
    if (candidate < bound) return candidate;
  }
}

mpz_class RandomSource::UniformInRange(const mpz_class& lo,
                                       const mpz_class& hi) {
  if (hi < lo) throw InvalidArgumentError("UniformInRange: empty range");
  return lo + UniformBelow(hi - lo + 1);
}

uint64_t RandomSource::UniformU64Below(uint64_t bound) {
  if (bound == 0) throw InvalidArgumentError("UniformU64Below: bound is 0");
  // Rejection on the largest multiple of bound.
  const uint64_t limit = UINT64_MAX - (UINT64_MAX % bound);
  while (true) {
    uint64_t v = 0;
    Fill(std::span<uint8_t>(reinterpret_cast<uint8_t*>(&v), sizeof(v)));
    if (v < limit) return v % bound;
  }
}

int64_t RandomSource::UniformInt(int64_t lo, int64_t hi) {
  if (hi < lo) throw InvalidArgumentError("UniformInt: empty range");
  const uint64_t span = static_cast<uint64_t>(hi) - static_cast<uint64_t>(lo);
  if (span == UINT64_MAX) {
    uint64_t v = 0;
    Fill(std::span<uint8_t>(reinterpret_cast<uint8_t*>(&v), sizeof(v)));
    return static_cast<int64_t>(v);
  }
  return static_cast<int64_t>(static_cast<uint64_t>(lo) +
                              UniformU64Below(span + 1));
}

Seed RandomSource::NextSeed() {
  Seed seed;
  Fill(seed);
  return seed;
}

std::unique_ptr<RandomSource> RandomSource::Fork() {
  return std::make_unique<SeededRandom>(NextSeed());
}

void SystemRandom::Fill(std::span<uint8_t> out) {
  if (out.empty()) return;
  if (RAND_bytes(out.data(), static_cast<int>(out.size())) != 1) {
    throw Error("RAND_bytes failed");
  }
}

SeededRandom::SeededRandom(const Seed& seed) {
  ctx_ = EVP_CIPHER_CTX_new();
  if (ctx_ == nullptr) throw Error("EVP_CIPHER_CTX_new failed");
  // ChaCha20 IV: 32-bit block counter followed by a 96-bit nonce, all zero.
  const std::array<uint8_t, 16> iv{};
  if (EVP_EncryptInit_ex(ctx_, EVP_chacha20(), nullptr, seed.data(),
                         iv.data()) != 1) {
    EVP_CIPHER_CTX_free(ctx_);
    throw Error("ChaCha20 init failed");
  }
  buffer_.resize(kKeystreamBlock);
  position_ = buffer_.size();
}

SeededRandom SeededRandom::FromLabel(std::string_view label) {
  Seed seed;
  SHA256(reinterpret_cast<const uint8_t*>(label.data()), label.size(),
         seed.data());
  return SeededRandom(seed);
}

SeededRandom SeededRandom::FromU64(uint64_t value) {
  return FromLabel("coldstart-seed:" + std::to_string(value));
}

SeededRandom::SeededRandom(SeededRandom&& other) noexcept
    : ctx_(std::exchange(other.ctx_, nullptr)),
      buffer_(std::move(other.buffer_)),
      position_(other.position_) {}

SeededRandom& SeededRandom::operator=(SeededRandom&& other) noexcept {
  if (this != &other) {
    if (ctx_ != nullptr) EVP_CIPHER_CTX_free(ctx_);
    ctx_ = std::exchange(other.ctx_, nullptr);
    buffer_ = std::move(other.buffer_);
    position_ = other.position_;
  }
  return *this;
}

SeededRandom::~SeededRandom() {
  if (ctx_ != nullptr) EVP_CIPHER_CTX_free(ctx_);
}

void SeededRandom::Refill() {
  std::vector<uint8_t> zeros(buffer_.size(), 0);
  int len = 0;
  if (EVP_EncryptUpdate(ctx_, buffer_.data(), &len, zeros.data(),
                        static_cast<int>(zeros.size())) != 1 ||
      static_cast<size_t>(len) != buffer_.size()) {
    throw Error("ChaCha20 keystream generation failed");
  }
  position_ = 0;
}

void SeededRandom::Fill(std::span<uint8_t> out) {
  size_t written = 0;
  while (written < out.size()) {
    if (position_ == buffer_.size()) Refill();
    const size_t take =
        std::min(out.size() - written, buffer_.size() - position_);
    std::memcpy(out.data() + written, buffer_.data() + position_, take);
    position_ += take;
    written += take;
  }
}

}  // namespace coldstart
