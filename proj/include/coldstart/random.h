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

#ifndef COLDSTART_RANDOM_H_
#define COLDSTART_RANDOM_H_

#include <gmpxx.h>
#include <openssl/evp.h>

#include <array>
#include <cstdint>
#include <memory>
#include <span>
#include <vector>

namespace coldstart {

using Seed = std::array<uint8_t, 32>;

// Source of uniform random bytes. Every randomized operation in the library
// takes one explicitly; instances are not thread safe, so each thread owns
// its own (see Fork()).
class RandomSource {
 public:
  virtual ~RandomSource() = default;

  virtual void Fill(std::span<uint8_t> out) = 0;

  // Uniform in [0, bound). bound must be positive.
  mpz_class UniformBelow(const mpz_class& bound);
  // Uniform in [lo, hi].
  mpz_class UniformInRange(const mpz_class& lo, const mpz_class& hi);
  uint64_t UniformU64Below(uint64_t bound);
  int64_t UniformInt(int64_t lo, int64_t hi);
  Seed NextSeed();

  // Independent deterministic child stream seeded from this one.
  std::unique_ptr<RandomSource> Fork();
};

// Operating system entropy via OpenSSL's DRBG.
class SystemRandom final : public RandomSource {
 public:
  void Fill(std::span<uint8_t> out) override;
};

// Deterministic ChaCha20 keystream. Same seed, same byte stream.
class SeededRandom final : public RandomSource {
 public:
  explicit SeededRandom(const Seed& seed);
  // Seed is SHA-256 of the label; convenient for tests and --seed flags.
  static SeededRandom FromLabel(std::string_view label);
  static SeededRandom FromU64(uint64_t seed);

  SeededRandom(SeededRandom&& other) noexcept;
  SeededRandom& operator=(SeededRandom&& other) noexcept;
  SeededRandom(const SeededRandom&) = delete;
  SeededRandom& operator=(const SeededRandom&) = delete;
  ~SeededRandom() override;

  void Fill(std::span<uint8_t> out) override;

 private:
  void Refill();

  EVP_CIPHER_CTX* ctx_ = nullptr;
  std::vector<uint8_t> buffer_;
  size_t position_ = 0;
};

}  // namespace coldstart

#endif  // COLDSTART_RANDOM_H_
