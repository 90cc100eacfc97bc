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

#include "coldstart/bigint.h"

#include <algorithm>

#include "coldstart/errors.h"

namespace coldstart {

size_t BitLength(const mpz_class& x) {
  if (x == 0) return 0;
  return mpz_sizeinbase(x.get_mpz_t(), 2);
}

size_t ByteLength(const mpz_class& x) { return (BitLength(x) + 7) / 8; }

mpz_class FromBigEndian(std::span<const uint8_t> bytes) {
  mpz_class out;
  if (!bytes.empty()) {
    mpz_import(out.get_mpz_t(), bytes.size(), 1, 1, 1, 0, bytes.data());
  }
  return out;
}

std::vector<uint8_t> ToBigEndian(const mpz_class& x) {
  if (x < 0) throw RangeError("ToBigEndian: negative value");
  std::vector<uint8_t> out(ByteLength(x));
  if (!out.empty()) {
    size_t count = 0;
    mpz_export(out.data(), &count, 1, 1, 1, 0, x.get_mpz_t());
  }
  return out;
}

std::vector<uint8_t> ToBigEndianFixed(const mpz_class& x, size_t width) {
  std::vector<uint8_t> minimal = ToBigEndian(x);
  if (minimal.size() > width) {
    throw RangeError("value does not fit in " + std::to_string(width) +
                     " bytes");
  }
  std::vector<uint8_t> out(width - minimal.size(), 0);
  out.insert(out.end(), minimal.begin(), minimal.end());
  return out;
}

mpz_class Mod(const mpz_class& x, const mpz_class& n) {
  mpz_class r;
  mpz_mod(r.get_mpz_t(), x.get_mpz_t(), n.get_mpz_t());
  return r;
}

mpz_class ToResidue(int64_t x, const mpz_class& n) {
  mpz_class v;
  mpz_set_si(v.get_mpz_t(), x);
  return Mod(v, n);
}

mpz_class Centered(const mpz_class& x, const mpz_class& n) {
  mpz_class r = Mod(x, n);
  if (2 * r > n) r -= n;
  return r;
}

mpz_class Gcd(const mpz_class& a, const mpz_class& b) {
  mpz_class g;
  mpz_gcd(g.get_mpz_t(), a.get_mpz_t(), b.get_mpz_t());
  return g;
}

mpz_class Pow(const mpz_class& base, unsigned long exponent) {
  mpz_class out;
  mpz_pow_ui(out.get_mpz_t(), base.get_mpz_t(), exponent);
  return out;
}

mpz_class CeilSqrt(const mpz_class& x) {
  if (x < 0) throw RangeError("CeilSqrt of negative value");
  mpz_class root;
  mpz_sqrt(root.get_mpz_t(), x.get_mpz_t());
  if (root * root < x) ++root;
  return root;
}

}  // namespace coldstart
