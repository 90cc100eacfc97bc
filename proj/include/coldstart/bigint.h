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

#ifndef COLDSTART_BIGINT_H_
#define COLDSTART_BIGINT_H_

#include <gmpxx.h>

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

// Small helpers around GMP integers shared by every module.
namespace coldstart {

size_t BitLength(const mpz_class& x);
// Bytes needed for the magnitude of x; 0 for x == 0.
size_t ByteLength(const mpz_class& x);

mpz_class FromBigEndian(std::span<const uint8_t> bytes);
// Minimal big-endian magnitude (empty for zero). x must be >= 0.
std::vector<uint8_t> ToBigEndian(const mpz_class& x);
// Left-zero-padded to exactly `width` bytes. Throws RangeError if x does not
// fit.
std::vector<uint8_t> ToBigEndianFixed(const mpz_class& x, size_t width);

// Least non-negative residue.
mpz_class Mod(const mpz_class& x, const mpz_class& n);
// Signed integer to its residue in [0, n).
mpz_class ToResidue(int64_t x, const mpz_class& n);
// Centered representative: residues above n/2 map to negatives.
mpz_class Centered(const mpz_class& x, const mpz_class& n);

mpz_class Gcd(const mpz_class& a, const mpz_class& b);
mpz_class Pow(const mpz_class& base, unsigned long exponent);
mpz_class CeilSqrt(const mpz_class& x);

}  // namespace coldstart

#endif  // COLDSTART_BIGINT_H_
