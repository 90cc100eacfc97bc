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

#include "coldstart/ec_group.h"

#include <openssl/bn.h>
#include <openssl/err.h>
#include <openssl/obj_mac.h>
#include <openssl/sha.h>

#include <string>
#include <utility>

#include "coldstart/bigint.h"
#include "coldstart/errors.h"

namespace coldstart {

namespace {

struct BnDeleter {
  void operator()(BIGNUM* b) const { BN_clear_free(b); }
};
using Bn = std::unique_ptr<BIGNUM, BnDeleter>;

Bn ToBn(const mpz_class& x) {
  const std::vector<uint8_t> bytes = ToBigEndian(x);
  BIGNUM* out = BN_bin2bn(bytes.data(), static_cast<int>(bytes.size()),
                          nullptr);
  if (out == nullptr) throw Error("BN_bin2bn failed");
  return Bn(out);
}

mpz_class FromBn(const BIGNUM* b) {
  std::vector<uint8_t> bytes(BN_num_bytes(b));
  BN_bn2bin(b, bytes.data());
  return FromBigEndian(bytes);
}

void Check(int ok, const char* what) {
  if (ok != 1) {
    ERR_clear_error();
    throw Error(std::string("OpenSSL EC operation failed: ") + what);
  }
}

}  // namespace

std::string_view CurveName(CurveId id) {
  switch (id) {
    case CurveId::kP256:
      return "P-256";
    case CurveId::kSecp256k1:
      return "secp256k1";
  }
  return "unknown";
}

CurveId CurveFromName(std::string_view name) {
  if (name == "P-256" || name == "prime256v1") return CurveId::kP256;
  if (name == "secp256k1") return CurveId::kSecp256k1;
  throw InvalidArgumentError("unknown curve " + std::string(name));
}

EcGroup::EcGroup(CurveId id) : id_(id) {
  int nid = 0;
  switch (id) {
    case CurveId::kP256:
      nid = NID_X9_62_prime256v1;
      break;
    case CurveId::kSecp256k1:
      nid = NID_secp256k1;
      break;
    default:
      throw InvalidArgumentError("unsupported curve id");
  }
  group_ = EC_GROUP_new_by_curve_name(nid);
  ctx_ = BN_CTX_new();
  if (group_ == nullptr || ctx_ == nullptr) {
    EC_GROUP_free(group_);
    BN_CTX_free(ctx_);
    throw Error("cannot instantiate curve");
  }
  order_ = FromBn(EC_GROUP_get0_order(group_));
  encoded_size_ = 1 + (EC_GROUP_get_degree(group_) + 7) / 8;
}

EcGroup::EcGroup(EcGroup&& other) noexcept
    : id_(other.id_),
      group_(std::exchange(other.group_, nullptr)),
      ctx_(std::exchange(other.ctx_, nullptr)),
      order_(std::move(other.order_)),
      encoded_size_(other.encoded_size_) {}

EcGroup& EcGroup::operator=(EcGroup&& other) noexcept {
  if (this != &other) {
    EC_GROUP_free(group_);
    BN_CTX_free(ctx_);
    id_ = other.id_;
    group_ = std::exchange(other.group_, nullptr);
    ctx_ = std::exchange(other.ctx_, nullptr);
    order_ = std::move(other.order_);
    encoded_size_ = other.encoded_size_;
  }
  return *this;
}

EcGroup::~EcGroup() {
  EC_GROUP_free(group_);
  BN_CTX_free(ctx_);
}

mpz_class EcGroup::RandomScalar(RandomSource& rng) const {
  return rng.UniformInRange(1, order_ - 1);
}

EcPoint EcGroup::NewPoint() const {
  EC_POINT* p = EC_POINT_new(group_);
  if (p == nullptr) throw Error("EC_POINT_new failed");
  return EcPoint(p);
}

EcPoint EcGroup::MulGenerator(const mpz_class& k) const {
  EcPoint out = NewPoint();
  const Bn scalar = ToBn(k);
  Check(EC_POINT_mul(group_, out.get(), scalar.get(), nullptr, nullptr, ctx_),
        "generator multiplication");
  return out;
}

EcPoint EcGroup::Mul(const EC_POINT* p, const mpz_class& k) const {
  EcPoint out = NewPoint();
  const Bn scalar = ToBn(k);
  Check(EC_POINT_mul(group_, out.get(), nullptr, p, scalar.get(), ctx_),
        "point multiplication");
  return out;
}

EcPoint EcGroup::Add(const EC_POINT* a, const EC_POINT* b) const {
  EcPoint out = NewPoint();
  Check(EC_POINT_add(group_, out.get(), a, b, ctx_), "point addition");
  return out;
}

EcPoint EcGroup::Subtract(const EC_POINT* a, const EC_POINT* b) const {
  EcPoint negated = NewPoint();
  Check(EC_POINT_copy(negated.get(), b), "point copy");
  Check(EC_POINT_invert(group_, negated.get(), ctx_), "point inversion");
  return Add(a, negated.get());
}

std::vector<uint8_t> EcGroup::Encode(const EC_POINT* p) const {
  std::vector<uint8_t> out(encoded_size_);
  const size_t written =
      EC_POINT_point2oct(group_, p, POINT_CONVERSION_COMPRESSED, out.data(),
                         out.size(), ctx_);
  if (written != out.size()) {
    ERR_clear_error();
    throw Error("cannot encode EC point");
  }
  return out;
}

EcPoint EcGroup::Decode(std::span<const uint8_t> bytes) const {
  if (bytes.size() != encoded_size_) {
    throw ProtocolError("EC point has wrong encoded length");
  }
  EcPoint out = NewPoint();
  if (EC_POINT_oct2point(group_, out.get(), bytes.data(), bytes.size(),
                         ctx_) != 1) {
    ERR_clear_error();
    throw ProtocolError("malformed EC point");
  }
  if (EC_POINT_is_at_infinity(group_, out.get()) == 1 ||
      EC_POINT_is_on_curve(group_, out.get(), ctx_) != 1) {
    ERR_clear_error();
    throw ProtocolError("EC point is the identity or off the curve");
  }
  return out;
}

EcPoint EcGroup::HashToPoint(std::string_view domain, uint32_t index) const {
  const Bn field_prime = [&] {
    BIGNUM* p = BN_new();
    if (p == nullptr) throw Error("BN_new failed");
    Check(EC_GROUP_get_curve(group_, p, nullptr, nullptr, ctx_),
          "curve parameters");
    return Bn(p);
  }();
  EcPoint out = NewPoint();
  for (uint32_t counter = 0;; ++counter) {
    std::string input(domain);
    for (uint32_t v : {index, counter}) {
      for (int shift = 24; shift >= 0; shift -= 8) {
        input.push_back(static_cast<char>((v >> shift) & 0xFF));
      }
    }
    uint8_t digest[SHA256_DIGEST_LENGTH];
    SHA256(reinterpret_cast<const uint8_t*>(input.data()), input.size(),
           digest);
    const Bn x(BN_bin2bn(digest, sizeof(digest), nullptr));
    if (!x) throw Error("BN_bin2bn failed");
    if (BN_cmp(x.get(), field_prime.get()) >= 0) continue;
    if (EC_POINT_set_compressed_coordinates(group_, out.get(), x.get(), 0,
                                            ctx_) == 1) {
      return out;
    }
    ERR_clear_error();
  }
}

}  // namespace coldstart
