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

#ifndef COLDSTART_EC_GROUP_H_
#define COLDSTART_EC_GROUP_H_

#include <gmpxx.h>
#include <openssl/ec.h>

#include <cstdint>
#include <memory>
#include <span>
#include <string_view>
#include <vector>

#include "coldstart/random.h"

namespace coldstart {

// Prime-order groups usable for the base OT. Values are wire identifiers.
enum class CurveId : uint8_t {
  kP256 = 1,
  kSecp256k1 = 2,
};

std::string_view CurveName(CurveId id);
CurveId CurveFromName(std::string_view name);

struct EcPointDeleter {
  void operator()(EC_POINT* p) const { EC_POINT_free(p); }
};
using EcPoint = std::unique_ptr<EC_POINT, EcPointDeleter>;

// Thin RAII wrapper over an OpenSSL curve. Not thread safe (owns a BN_CTX).
class EcGroup {
 public:
  explicit EcGroup(CurveId id);
  EcGroup(EcGroup&&) noexcept;
  EcGroup& operator=(EcGroup&&) noexcept;
  ~EcGroup();

  CurveId id() const { return id_; }
  const mpz_class& order() const { return order_; }
  // Compressed SEC1 encoding length.
  size_t encoded_size() const { return encoded_size_; }

  // Uniform in [1, order).
  mpz_class RandomScalar(RandomSource& rng) const;

  EcPoint MulGenerator(const mpz_class& k) const;
  EcPoint Mul(const EC_POINT* p, const mpz_class& k) const;
  EcPoint Add(const EC_POINT* a, const EC_POINT* b) const;
  EcPoint Subtract(const EC_POINT* a, const EC_POINT* b) const;

  std::vector<uint8_t> Encode(const EC_POINT* p) const;
  // Rejects malformed encodings, off-curve points and the identity with
  // ProtocolError.
  EcPoint Decode(std::span<const uint8_t> bytes) const;

  // Try-and-increment map to a point whose discrete log nobody knows.
  EcPoint HashToPoint(std::string_view domain, uint32_t index) const;

 private:
  EcPoint NewPoint() const;

  CurveId id_;
  EC_GROUP* group_ = nullptr;
  BN_CTX* ctx_ = nullptr;
  mpz_class order_;
  size_t encoded_size_ = 0;
};

}  // namespace coldstart

#endif  // COLDSTART_EC_GROUP_H_
