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

#include "coldstart/paillier.h"

#include <atomic>
#include <limits>
#include <utility>

#include "coldstart/bigint.h"
#include "coldstart/errors.h"

namespace coldstart {

namespace {

constexpr int kMillerRabinRounds = 40;
constexpr unsigned kMaxWindowBits = 8;

std::atomic<uint64_t> g_scalar_exps{0};
std::atomic<uint64_t> g_randomizer_exps{0};
std::atomic<uint64_t> g_decryption_exps{0};

mpz_class PowMod(const mpz_class& base, const mpz_class& exponent,
                 const mpz_class& modulus) {
  mpz_class out;
  mpz_powm(out.get_mpz_t(), base.get_mpz_t(), exponent.get_mpz_t(),
           modulus.get_mpz_t());
  return out;
}

mpz_class Randomizer(const PaillierPublicKey& pk, const mpz_class& rho) {
  g_randomizer_exps.fetch_add(1, std::memory_order_relaxed);
  return PowMod(rho, pk.n(), pk.n_squared());
}

// Uniform in [1, n) and coprime to n.
mpz_class SampleUnit(const mpz_class& n, RandomSource& rng) {
  while (true) {
    mpz_class r = rng.UniformInRange(1, n - 1);
    if (Gcd(r, n) == 1) return r;
  }
}

mpz_class RandomPrime(unsigned bits, RandomSource& rng) {
  while (true) {
    mpz_class candidate = rng.UniformBelow(mpz_class(1) << bits);
    mpz_setbit(candidate.get_mpz_t(), bits - 1);
    mpz_setbit(candidate.get_mpz_t(), bits - 2);
    mpz_setbit(candidate.get_mpz_t(), 0);
    if (mpz_probab_prime_p(candidate.get_mpz_t(), kMillerRabinRounds) > 0) {
      return candidate;
    }
  }
}

void CheckCiphertext(const PaillierPublicKey& pk, const Ciphertext& c) {
  if (c.value <= 0 || c.value >= pk.n_squared()) {
    throw RangeError("ciphertext outside [1, n^2)");
  }
}

void CheckPlaintext(const PaillierPublicKey& pk, const mpz_class& x) {
  if (x < 0 || x >= pk.n()) throw RangeError("plaintext outside [0, n)");
}

// w-bit digit of k starting at bit `offset`.
unsigned long Digit(const mpz_class& k, size_t offset, unsigned w) {
  constexpr size_t kLimbBits = std::numeric_limits<mp_limb_t>::digits;
  const size_t limb = offset / kLimbBits;
  const size_t shift = offset % kLimbBits;
  const size_t size = mpz_size(k.get_mpz_t());
  if (limb >= size) return 0;
  mp_limb_t value = mpz_getlimbn(k.get_mpz_t(), limb) >> shift;
  if (shift + w > kLimbBits && limb + 1 < size) {
    value |= mpz_getlimbn(k.get_mpz_t(), limb + 1) << (kLimbBits - shift);
  }
  return static_cast<unsigned long>(value & ((mp_limb_t{1} << w) - 1));
}

}  // namespace

PaillierPublicKey::PaillierPublicKey(mpz_class n)
    : n_(std::move(n)), n_squared_(n_ * n_) {
  if (n_ < 3 || mpz_even_p(n_.get_mpz_t())) {
    throw InvalidArgumentError("Paillier modulus must be odd and >= 3");
  }
}

size_t PaillierPublicKey::modulus_bits() const { return BitLength(n_); }
size_t PaillierPublicKey::plaintext_bytes() const { return ByteLength(n_); }
size_t PaillierPublicKey::ciphertext_bytes() const {
  return ByteLength(n_squared_);
}

PaillierKeyPair GeneratePaillierKeyPair(unsigned bits, RandomSource& rng) {
  if (bits < 16 || bits % 2 != 0) {
    throw InvalidArgumentError("Paillier key size must be even and >= 16");
  }
  while (true) {
    mpz_class p = RandomPrime(bits / 2, rng);
    mpz_class q = RandomPrime(bits / 2, rng);
    if (p == q) continue;
    const mpz_class n = p * q;
    if (BitLength(n) != bits) continue;
    if (Gcd(n, (p - 1) * (q - 1)) != 1) continue;
    return PaillierKeyPairFromPrimes(p, q);
  }
}

PaillierKeyPair PaillierKeyPairFromPrimes(const mpz_class& p,
                                          const mpz_class& q) {
  if (p == q || mpz_probab_prime_p(p.get_mpz_t(), kMillerRabinRounds) == 0 ||
      mpz_probab_prime_p(q.get_mpz_t(), kMillerRabinRounds) == 0) {
    throw InvalidArgumentError("Paillier primes must be distinct primes");
  }
  PaillierSecretKey sk;
  sk.n = p * q;
  const mpz_class p1 = p - 1;
  const mpz_class q1 = q - 1;
  mpz_lcm(sk.lambda.get_mpz_t(), p1.get_mpz_t(), q1.get_mpz_t());
  if (mpz_invert(sk.mu.get_mpz_t(), sk.lambda.get_mpz_t(),
                 sk.n.get_mpz_t()) == 0) {
    throw InvalidArgumentError("lambda is not invertible modulo n");
  }
  return PaillierKeyPairFromSecret(std::move(sk));
}

PaillierKeyPair PaillierKeyPairFromSecret(PaillierSecretKey sk) {
  PaillierPublicKey pk(sk.n);
  if (sk.lambda <= 0 || sk.mu <= 0 || sk.mu >= sk.n ||
      Mod(sk.lambda * sk.mu, sk.n) != 1) {
    throw InvalidArgumentError("inconsistent Paillier secret key");
  }
  return PaillierKeyPair{std::move(pk), std::move(sk)};
}

Ciphertext Encrypt(const PaillierPublicKey& pk, const mpz_class& x,
                   RandomSource& rng) {
  CheckPlaintext(pk, x);
  return EncryptWithRandomness(pk, x, SampleUnit(pk.n(), rng));
}

Ciphertext EncryptWithRandomness(const PaillierPublicKey& pk,
                                 const mpz_class& x, const mpz_class& rho) {
  CheckPlaintext(pk, x);
  if (rho < 1 || rho >= pk.n() || Gcd(rho, pk.n()) != 1) {
    throw InvalidArgumentError("rho must be a unit in [1, n)");
  }
  const mpz_class g_x = 1 + x * pk.n();
  return Ciphertext{Mod(g_x * Randomizer(pk, rho), pk.n_squared())};
}

mpz_class Decrypt(const PaillierSecretKey& sk, const Ciphertext& c) {
  const mpz_class n_squared = sk.n * sk.n;
  if (c.value <= 0 || c.value >= n_squared) {
    throw DecryptionError("ciphertext outside [1, n^2)");
  }
  if (Gcd(c.value, sk.n) != 1) {
    throw DecryptionError("ciphertext shares a factor with n");
  }
  g_decryption_exps.fetch_add(1, std::memory_order_relaxed);
  const mpz_class a = PowMod(c.value, sk.lambda, n_squared);
  const mpz_class a_minus_one = a - 1;
  if (!mpz_divisible_p(a_minus_one.get_mpz_t(), sk.n.get_mpz_t())) {
    throw DecryptionError("L(c^lambda) is not an integer: malformed ciphertext");
  }
  const mpz_class l = a_minus_one / sk.n;
  return Mod(l * sk.mu, sk.n);
}

Ciphertext HomAdd(const PaillierPublicKey& pk, const Ciphertext& a,
                  const Ciphertext& b, RandomSource& rng) {
  return HomAddWithRandomness(pk, a, b, SampleUnit(pk.n(), rng));
}

Ciphertext HomAddWithRandomness(const PaillierPublicKey& pk,
                                const Ciphertext& a, const Ciphertext& b,
                                const mpz_class& theta) {
  if (theta < 1 || theta >= pk.n() || Gcd(theta, pk.n()) != 1) {
    throw InvalidArgumentError("theta must be a unit in [1, n)");
  }
  const Ciphertext sum = MultiplyRaw(pk, a, b);
  return Ciphertext{Mod(sum.value * Randomizer(pk, theta), pk.n_squared())};
}

Ciphertext HomScale(const PaillierPublicKey& pk, const mpz_class& k,
                    const Ciphertext& a, RandomSource& rng) {
  const Ciphertext scaled = ScaleRaw(pk, k, a);
  return Ciphertext{Mod(scaled.value * Randomizer(pk, SampleUnit(pk.n(), rng)),
                        pk.n_squared())};
}

Ciphertext ScaleRaw(const PaillierPublicKey& pk, const mpz_class& k,
                    const Ciphertext& a) {
  CheckPlaintext(pk, k);
  CheckCiphertext(pk, a);
  g_scalar_exps.fetch_add(1, std::memory_order_relaxed);
  return Ciphertext{PowMod(a.value, k, pk.n_squared())};
}

Ciphertext MultiplyRaw(const PaillierPublicKey& pk, const Ciphertext& a,
                       const Ciphertext& b) {
  CheckCiphertext(pk, a);
  CheckCiphertext(pk, b);
  return Ciphertext{Mod(a.value * b.value, pk.n_squared())};
}

FixedBaseExponentiator::FixedBaseExponentiator(const PaillierPublicKey& pk,
                                               const Ciphertext& base,
                                               size_t expected_uses)
    : modulus_(pk.n_squared()) {
  CheckCiphertext(pk, base);
  const size_t exponent_bits = std::max<size_t>(pk.modulus_bits(), 1);
  // Cost in modular multiplications: table build plus per-use evaluation.
  double best_cost = 0;
  window_bits_ = 1;
  for (unsigned w = 1; w <= kMaxWindowBits; ++w) {
    const double windows = static_cast<double>((exponent_bits + w - 1) / w);
    const double cost = windows * static_cast<double>((1u << w) - 1) +
                        static_cast<double>(expected_uses) * windows;
    if (w == 1 || cost < best_cost) {
      best_cost = cost;
      window_bits_ = w;
    }
  }
  windows_ = (exponent_bits + window_bits_ - 1) / window_bits_;
  const size_t entries = (size_t{1} << window_bits_) - 1;
  table_.resize(windows_);
  mpz_class current = base.value;
  for (size_t i = 0; i < windows_; ++i) {
    std::vector<mpz_class>& row = table_[i];
    row.resize(entries);
    row[0] = current;
    for (size_t v = 1; v < entries; ++v) {
      mpz_mul(row[v].get_mpz_t(), row[v - 1].get_mpz_t(),
              current.get_mpz_t());
      mpz_mod(row[v].get_mpz_t(), row[v].get_mpz_t(), modulus_.get_mpz_t());
    }
    // current^(2^w) = current^(2^w - 1) * current.
    mpz_mul(current.get_mpz_t(), row[entries - 1].get_mpz_t(),
            current.get_mpz_t());
    mpz_mod(current.get_mpz_t(), current.get_mpz_t(), modulus_.get_mpz_t());
  }
}

mpz_class FixedBaseExponentiator::Power(const mpz_class& k) const {
  mpz_class accumulator = 1;
  MultiplyPower(accumulator, k);
  return accumulator;
}

void FixedBaseExponentiator::MultiplyPower(mpz_class& accumulator,
                                           const mpz_class& k) const {
  if (k < 0 || BitLength(k) > windows_ * window_bits_) {
    throw RangeError("fixed-base exponent out of range");
  }
  g_scalar_exps.fetch_add(1, std::memory_order_relaxed);
  for (size_t i = 0; i < windows_; ++i) {
    const unsigned long digit = Digit(k, i * window_bits_, window_bits_);
    if (digit == 0) continue;
    mpz_mul(accumulator.get_mpz_t(), accumulator.get_mpz_t(),
            table_[i][digit - 1].get_mpz_t());
    mpz_mod(accumulator.get_mpz_t(), accumulator.get_mpz_t(),
            modulus_.get_mpz_t());
  }
}

ExponentiationCounts ReadExponentiationCounts() {
  return {g_scalar_exps.load(std::memory_order_relaxed),
          g_randomizer_exps.load(std::memory_order_relaxed),
          g_decryption_exps.load(std::memory_order_relaxed)};
}

}  // namespace coldstart
