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

#ifndef COLDSTART_PAILLIER_H_
#define COLDSTART_PAILLIER_H_

#include <gmpxx.h>

#include <cstdint>
#include <vector>

#include "coldstart/random.h"

namespace coldstart {

class PaillierPublicKey {
 public:
  explicit PaillierPublicKey(mpz_class n);

  const mpz_class& n() const { return n_; }
  const mpz_class& n_squared() const { return n_squared_; }
  size_t modulus_bits() const;
  // Fixed encoding widths of Z_n elements and of ciphertexts.
  size_t plaintext_bytes() const;
  size_t ciphertext_bytes() const;

  friend bool operator==(const PaillierPublicKey& a,
                         const PaillierPublicKey& b) {
    return a.n_ == b.n_;
  }

 private:
  mpz_class n_;
  mpz_class n_squared_;
};

struct PaillierSecretKey {
  mpz_class n;
  mpz_class lambda;  // lcm(p - 1, q - 1)
  mpz_class mu;      // lambda^{-1} mod n
};

struct PaillierKeyPair {
  PaillierPublicKey public_key;
  PaillierSecretKey secret_key;
};

struct Ciphertext {
  mpz_class value;

  friend bool operator==(const Ciphertext& a, const Ciphertext& b) {
    return a.value == b.value;
  }
};

// Two random primes of bits/2 bits each with the top two bits set, so that
// n = pq has exactly `bits` bits. bits must be even and >= 16.
PaillierKeyPair GeneratePaillierKeyPair(unsigned bits, RandomSource& rng);

// Known-answer hook: builds the key from caller-chosen primes.
PaillierKeyPair PaillierKeyPairFromPrimes(const mpz_class& p,
                                          const mpz_class& q);

// Rebuilds a key pair from (n, lambda, mu); checks lambda * mu == 1 mod n.
PaillierKeyPair PaillierKeyPairFromSecret(PaillierSecretKey sk);

Ciphertext Encrypt(const PaillierPublicKey& pk, const mpz_class& x,
                   RandomSource& rng);
// c = (1 + x n) rho^n mod n^2 with caller-supplied rho in [1, n).
Ciphertext EncryptWithRandomness(const PaillierPublicKey& pk,
                                 const mpz_class& x, const mpz_class& rho);

mpz_class Decrypt(const PaillierSecretKey& sk, const Ciphertext& c);

// The ⊞ operator: a * b * theta^n mod n^2.
Ciphertext HomAdd(const PaillierPublicKey& pk, const Ciphertext& a,
                  const Ciphertext& b, RandomSource& rng);
Ciphertext HomAddWithRandomness(const PaillierPublicKey& pk,
                                const Ciphertext& a, const Ciphertext& b,
                                const mpz_class& theta);

// The ⊡ operator: a^k * theta^n mod n^2, k in [0, n).
Ciphertext HomScale(const PaillierPublicKey& pk, const mpz_class& k,
                    const Ciphertext& a, RandomSource& rng);

// Unrandomized building blocks. The output is NOT a fresh encryption; callers
// must finish with HomAdd or a product with a fresh Encrypt().
Ciphertext ScaleRaw(const PaillierPublicKey& pk, const mpz_class& k,
                    const Ciphertext& a);
Ciphertext MultiplyRaw(const PaillierPublicKey& pk, const Ciphertext& a,
                       const Ciphertext& b);

// Fixed-base windowed exponentiation of one ciphertext to many plaintext
// scalars. Every Power() call is counted as one scalar exponentiation.
class FixedBaseExponentiator {
 public:
  // `expected_uses` picks the window width that minimizes table build plus
  // evaluation cost.
  FixedBaseExponentiator(const PaillierPublicKey& pk, const Ciphertext& base,
                         size_t expected_uses);

  // base^k mod n^2 for k in [0, n).
  mpz_class Power(const mpz_class& k) const;
  // accumulator = accumulator * base^k mod n^2.
  void MultiplyPower(mpz_class& accumulator, const mpz_class& k) const;

  unsigned window_bits() const { return window_bits_; }

 private:
  mpz_class modulus_;
  unsigned window_bits_;
  size_t windows_;
  // table_[i][v - 1] = base^(v * 2^(i * w)) for v in [1, 2^w).
  std::vector<std::vector<mpz_class>> table_;
};

// Process-wide instrumentation of modular exponentiations mod n^2.
struct ExponentiationCounts {
  // ciphertext^plaintext: the ⊡ operator and its raw/fixed-base forms.
  uint64_t scalar = 0;
  // rho^n / theta^n randomizers of encryption and re-randomization.
  uint64_t randomizer = 0;
  // c^lambda in decryption.
  uint64_t decryption = 0;

  friend ExponentiationCounts operator-(const ExponentiationCounts& a,
                                        const ExponentiationCounts& b) {
    return {a.scalar - b.scalar, a.randomizer - b.randomizer,
            a.decryption - b.decryption};
  }
};

ExponentiationCounts ReadExponentiationCounts();

}  // namespace coldstart

#endif  // COLDSTART_PAILLIER_H_
