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

#ifndef COLDSTART_NUMERIC_H_
#define COLDSTART_NUMERIC_H_

#include <gmpxx.h>

#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

namespace coldstart {

// Public parameters the analyst announces before a session.
struct ProtocolParams {
  uint32_t dim = 0;         // d
  uint32_t items = 0;       // M, including the fake item 0
  uint32_t batch_size = 0;  // S, ratings per session after padding
  uint64_t bound_v = 1;     // B_V, bound on |profile entries|
  uint64_t bound_r = 1;     // B_r, bound on |ratings|
  uint32_t scale_bits = 0;  // fixed-point shift applied to reals
  uint32_t min_modulus_bits = 0;

  // Fills min_modulus_bits from the correctness bound.
  static ProtocolParams Make(uint32_t dim, uint32_t items, uint32_t batch_size,
                             uint64_t bound_v, uint64_t bound_r,
                             uint32_t scale_bits = 0);
  // Throws InvalidArgumentError / RangeError on broken invariants.
  void Validate() const;

  friend bool operator==(const ProtocolParams&,
                         const ProtocolParams&) = default;
};

using ModVector = std::vector<mpz_class>;

// Dense row-major square or rectangular matrix of residues.
class ModMatrix {
 public:
  ModMatrix() = default;
  ModMatrix(size_t rows, size_t cols);

  static ModMatrix Identity(size_t dim);

  size_t rows() const { return rows_; }
  size_t cols() const { return cols_; }
  mpz_class& operator()(size_t r, size_t c) { return entries_[r * cols_ + c]; }
  const mpz_class& operator()(size_t r, size_t c) const {
    return entries_[r * cols_ + c];
  }
  const std::vector<mpz_class>& entries() const { return entries_; }
  std::vector<mpz_class>& entries() { return entries_; }

  friend bool operator==(const ModMatrix&, const ModMatrix&) = default;

 private:
  size_t rows_ = 0;
  size_t cols_ = 0;
  std::vector<mpz_class> entries_;
};

using RationalVector = std::vector<mpq_class>;

// round(x * 2^scale_bits), ties away from zero. Throws RangeError when the
// result exceeds `bound` in absolute value or does not fit in int64.
int64_t EncodeFixed(double x, unsigned scale_bits,
                    std::optional<uint64_t> bound = std::nullopt);

// 2 * ceil(d^{d+1/2}) * s^{2d+1} * B_V^{4d+1} * B_r, evaluated exactly.
mpz_class CorrectnessBound(uint64_t dim, uint64_t batch, uint64_t bound_v,
                           uint64_t bound_r);
// Smallest k with 2^{k-1} > CorrectnessBound(...): every k-bit modulus
// exceeds the bound.
unsigned BoundBits(uint64_t dim, uint64_t batch, uint64_t bound_v,
                   uint64_t bound_r);

struct ReconstructionBounds {
  mpz_class numerator;    // P
  mpz_class denominator;  // Q
};

// Q bounds det(V_S V_S^T) by Hadamard, P bounds the entries of
// adj(V_S V_S^T) V_S r.
ReconstructionBounds ComputeReconstructionBounds(uint64_t dim, uint64_t batch,
                                                 uint64_t bound_v,
                                                 uint64_t bound_r);

ModMatrix ModMatMul(const ModMatrix& a, const ModMatrix& b,
                    const mpz_class& n);
ModVector ModMatVec(const ModMatrix& a, const ModVector& v,
                    const mpz_class& n);
ModMatrix ModMatAdd(const ModMatrix& a, const ModMatrix& b,
                    const mpz_class& n);
ModVector ModVecAdd(const ModVector& a, const ModVector& b,
                    const mpz_class& n);

// Gauss-Jordan inverse over Z_n with unit pivots. Throws SingularMatrixError
// when a column has no non-zero candidate, FactorFoundError when candidates
// exist but neither one of them nor a sum of two is a unit.
ModMatrix ModInverse(const ModMatrix& m, const mpz_class& n);

// Finds p/q with p = q c (mod n), |p| <= P, 0 < q <= Q via the half-extended
// Euclidean algorithm. Requires 2PQ < n for uniqueness.
mpq_class RationalReconstruct(const mpz_class& c, const mpz_class& n,
                              const mpz_class& numerator_bound,
                              const mpz_class& denominator_bound);

// Component-wise RationalReconstruct; errors name the failing coordinate.
RationalVector DecodeProfile(const ModVector& v, const mpz_class& n,
                             const ReconstructionBounds& bounds);

}  // namespace coldstart

#endif  // COLDSTART_NUMERIC_H_
