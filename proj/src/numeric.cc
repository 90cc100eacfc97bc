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

#include "coldstart/numeric.h"

#include <cmath>
#include <limits>
#include <string>
#include <utility>

#include "coldstart/bigint.h"
#include "coldstart/errors.h"

namespace coldstart {

namespace {

void CheckBoundInputs(uint64_t dim, uint64_t batch, uint64_t bound_v,
                      uint64_t bound_r) {
  if (dim == 0 || batch == 0 || bound_v == 0 || bound_r == 0) {
    throw InvalidArgumentError("bound inputs must all be >= 1");
  }
}

mpz_class FromU64(uint64_t v) {
  mpz_class out;
  mpz_import(out.get_mpz_t(), 1, 1, sizeof(v), 0, 0, &v);
  return out;
}

void CheckSameShape(const ModMatrix& a, const ModMatrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw InvalidArgumentError("matrix shape mismatch");
  }
}

}  // namespace

ProtocolParams ProtocolParams::Make(uint32_t dim, uint32_t items,
                                    uint32_t batch_size, uint64_t bound_v,
                                    uint64_t bound_r, uint32_t scale_bits) {
  ProtocolParams params;
  params.dim = dim;
  params.items = items;
  params.batch_size = batch_size;
  params.bound_v = bound_v;
  params.bound_r = bound_r;
  params.scale_bits = scale_bits;
  params.min_modulus_bits = BoundBits(dim, batch_size, bound_v, bound_r);
  params.Validate();
  return params;
}

void ProtocolParams::Validate() const {
  if (dim < 1) throw InvalidArgumentError("dimension must be >= 1");
  if (batch_size < dim) {
    throw InvalidArgumentError("batch size S must be >= dimension d");
  }
  if (items < 2) {
    throw InvalidArgumentError("need the fake item plus at least one item");
  }
  if (items < batch_size) {
    throw InvalidArgumentError("item count M must be >= batch size S");
  }
  constexpr uint64_t kMaxBound =
      static_cast<uint64_t>(std::numeric_limits<int64_t>::max());
  if (bound_v < 1 || bound_r < 1 || bound_v > kMaxBound ||
      bound_r > kMaxBound) {
    throw InvalidArgumentError("bounds must lie in [1, 2^63)");
  }
  if (min_modulus_bits < BoundBits(dim, batch_size, bound_v, bound_r)) {
    throw RangeError("announced minimum modulus size is below the bound");
  }
}

ModMatrix::ModMatrix(size_t rows, size_t cols)
    : rows_(rows), cols_(cols), entries_(rows * cols) {}

ModMatrix ModMatrix::Identity(size_t dim) {
  ModMatrix m(dim, dim);
  for (size_t i = 0; i < dim; ++i) m(i, i) = 1;
  return m;
}

int64_t EncodeFixed(double x, unsigned scale_bits,
                    std::optional<uint64_t> bound) {
  if (!std::isfinite(x)) throw RangeError("cannot encode a non-finite value");
  const double scaled = std::ldexp(x, static_cast<int>(scale_bits));
  const double rounded = std::round(scaled);
  // 2^63 is exactly representable; anything at or beyond it overflows.
  if (!(std::fabs(rounded) < 9223372036854775808.0)) {
    throw RangeError("fixed-point value overflows int64");
  }
  const auto value = static_cast<int64_t>(rounded);
  if (bound) {
    const uint64_t magnitude =
        value < 0 ? static_cast<uint64_t>(-(value + 1)) + 1
                  : static_cast<uint64_t>(value);
    if (magnitude > *bound) {
      throw RangeError("fixed-point value exceeds bound " +
                       std::to_string(*bound));
    }
  }
  return value;
}

mpz_class CorrectnessBound(uint64_t dim, uint64_t batch, uint64_t bound_v,
                           uint64_t bound_r) {
  CheckBoundInputs(dim, batch, bound_v, bound_r);
  const mpz_class d = FromU64(dim);
  const mpz_class d_power = CeilSqrt(Pow(d, 2 * dim + 1));  // d^{d+1/2}
  return 2 * d_power * Pow(FromU64(batch), 2 * dim + 1) *
         Pow(FromU64(bound_v), 4 * dim + 1) * FromU64(bound_r);
}

unsigned BoundBits(uint64_t dim, uint64_t batch, uint64_t bound_v,
                   uint64_t bound_r) {
  const mpz_class bound = CorrectnessBound(dim, batch, bound_v, bound_r);
  // 2^{k-1} > bound  <=>  k - 1 >= BitLength(bound).
  return static_cast<unsigned>(BitLength(bound) + 1);
}

ReconstructionBounds ComputeReconstructionBounds(uint64_t dim, uint64_t batch,
                                                 uint64_t bound_v,
                                                 uint64_t bound_r) {
  CheckBoundInputs(dim, batch, bound_v, bound_r);
  const mpz_class d = FromU64(dim);
  const mpz_class s = FromU64(batch);
  const mpz_class bv = FromU64(bound_v);
  // Floors of d^{d/2} s^d B_V^{2d} and d^{(d+1)/2} s^{d+1} B_V^{2d+1} B_r.
  // Both bound integers, and 2PQ never exceeds CorrectnessBound.
  const mpz_class q_factor = Pow(s, dim) * Pow(bv, 2 * dim);
  const mpz_class p_factor =
      Pow(s, dim + 1) * Pow(bv, 2 * dim + 1) * FromU64(bound_r);
  ReconstructionBounds out;
  mpz_sqrt(out.denominator.get_mpz_t(),
           mpz_class(Pow(d, dim) * q_factor * q_factor).get_mpz_t());
  mpz_sqrt(out.numerator.get_mpz_t(),
           mpz_class(Pow(d, dim + 1) * p_factor * p_factor).get_mpz_t());
  return out;
}

ModMatrix ModMatMul(const ModMatrix& a, const ModMatrix& b,
                    const mpz_class& n) {
  if (a.cols() != b.rows()) throw InvalidArgumentError("matmul shape mismatch");
  ModMatrix out(a.rows(), b.cols());
  for (size_t i = 0; i < a.rows(); ++i) {
    for (size_t j = 0; j < b.cols(); ++j) {
      mpz_class acc = 0;
      for (size_t k = 0; k < a.cols(); ++k) acc += a(i, k) * b(k, j);
      out(i, j) = Mod(acc, n);
    }
  }
  return out;
}

ModVector ModMatVec(const ModMatrix& a, const ModVector& v,
                    const mpz_class& n) {
  if (a.cols() != v.size()) throw InvalidArgumentError("matvec shape mismatch");
  ModVector out(a.rows());
  for (size_t i = 0; i < a.rows(); ++i) {
    mpz_class acc = 0;
    for (size_t k = 0; k < a.cols(); ++k) acc += a(i, k) * v[k];
    out[i] = Mod(acc, n);
  }
  return out;
}

ModMatrix ModMatAdd(const ModMatrix& a, const ModMatrix& b,
                    const mpz_class& n) {
  CheckSameShape(a, b);
  ModMatrix out(a.rows(), a.cols());
  for (size_t i = 0; i < a.entries().size(); ++i) {
    out.entries()[i] = Mod(a.entries()[i] + b.entries()[i], n);
  }
  return out;
}

ModVector ModVecAdd(const ModVector& a, const ModVector& b,
                    const mpz_class& n) {
  if (a.size() != b.size()) throw InvalidArgumentError("vector size mismatch");
  ModVector out(a.size());
  for (size_t i = 0; i < a.size(); ++i) out[i] = Mod(a[i] + b[i], n);
  return out;
}

ModMatrix ModInverse(const ModMatrix& m, const mpz_class& n) {
  if (m.rows() != m.cols()) throw InvalidArgumentError("matrix is not square");
  if (n < 2) throw InvalidArgumentError("modulus must be >= 2");
  const size_t dim = m.rows();
  ModMatrix work(dim, dim);
  for (size_t i = 0; i < m.entries().size(); ++i) {
    work.entries()[i] = Mod(m.entries()[i], n);
  }
  ModMatrix inverse = ModMatrix::Identity(dim);

  auto add_row = [&](size_t target, size_t source) {
    for (size_t c = 0; c < dim; ++c) {
      work(target, c) = Mod(work(target, c) + work(source, c), n);
      inverse(target, c) = Mod(inverse(target, c) + inverse(source, c), n);
    }
  };
  for (size_t col = 0; col < dim; ++col) {
    std::optional<size_t> pivot_row;
    std::optional<size_t> first_nonzero;
    for (size_t r = col; r < dim && !pivot_row; ++r) {
      if (work(r, col) == 0) continue;
      if (!first_nonzero) first_nonzero = r;
      if (Gcd(work(r, col), n) == 1) pivot_row = r;
    }
    if (!first_nonzero) {
      throw SingularMatrixError("matrix is singular modulo n (column " +
                                std::to_string(col) + ")");
    }
    // Only non-units remain. Over Z_pq a row vanishing mod p plus a row
    // vanishing mod q is a unit.
    for (size_t a = col; a < dim && !pivot_row; ++a) {
      for (size_t b = col; b < dim && !pivot_row; ++b) {
        if (a == b || work(b, col) == 0) continue;
        if (Gcd(work(a, col) + work(b, col), n) == 1) {
          add_row(a, b);
          pivot_row = a;
        }
      }
    }
    if (!pivot_row) throw FactorFoundError(Gcd(work(*first_nonzero, col), n));
    if (*pivot_row != col) {
      for (size_t c = 0; c < dim; ++c) {
        std::swap(work(col, c), work(*pivot_row, c));
        std::swap(inverse(col, c), inverse(*pivot_row, c));
      }
    }
    mpz_class pivot_inv;
    mpz_invert(pivot_inv.get_mpz_t(), work(col, col).get_mpz_t(),
               n.get_mpz_t());
    for (size_t c = 0; c < dim; ++c) {
      work(col, c) = Mod(work(col, c) * pivot_inv, n);
      inverse(col, c) = Mod(inverse(col, c) * pivot_inv, n);
    }
    for (size_t r = 0; r < dim; ++r) {
      if (r == col || work(r, col) == 0) continue;
      const mpz_class factor = work(r, col);
      for (size_t c = 0; c < dim; ++c) {
        work(r, c) = Mod(work(r, c) - factor * work(col, c), n);
        inverse(r, c) = Mod(inverse(r, c) - factor * inverse(col, c), n);
      }
    }
  }
  return inverse;
}

mpq_class RationalReconstruct(const mpz_class& c, const mpz_class& n,
                              const mpz_class& numerator_bound,
                              const mpz_class& denominator_bound) {
  if (c < 0 || c >= n) throw RangeError("residue outside [0, n)");
  if (numerator_bound < 0 || denominator_bound < 1) {
    throw InvalidArgumentError("reconstruction bounds must be P >= 0, Q >= 1");
  }
  if (2 * numerator_bound * denominator_bound >= n) {
    throw InvalidArgumentError("reconstruction requires 2PQ < n");
  }
  // Invariant: r_i = t_i * c (mod n).
  mpz_class r0 = n, r1 = c;
  mpz_class t0 = 0, t1 = 1;
  mpz_class quotient, next;
  while (r1 > numerator_bound) {
    mpz_fdiv_q(quotient.get_mpz_t(), r0.get_mpz_t(), r1.get_mpz_t());
    next = r0 - quotient * r1;
    r0 = std::move(r1);
    r1 = std::move(next);
    next = t0 - quotient * t1;
    t0 = std::move(t1);
    t1 = std::move(next);
  }
  mpz_class p = r1;
  mpz_class q = t1;
  if (q < 0) {
    p = -p;
    q = -q;
  }
  if (q == 0 || q > denominator_bound) {
    throw ReconstructionError("no fraction within bounds matches the residue");
  }
  const mpz_class g = Gcd(q, n);
  if (g != 1) throw FactorFoundError(g);
  if (Gcd(p, q) != 1) {
    throw ReconstructionError("reconstructed fraction is not in lowest terms");
  }
  mpq_class out(p, q);
  out.canonicalize();
  return out;
}

RationalVector DecodeProfile(const ModVector& v, const mpz_class& n,
                             const ReconstructionBounds& bounds) {
  RationalVector out;
  out.reserve(v.size());
  for (size_t i = 0; i < v.size(); ++i) {
    try {
      out.push_back(RationalReconstruct(Mod(v[i], n), n, bounds.numerator,
                                        bounds.denominator));
    } catch (const ReconstructionError& e) {
      throw ReconstructionError("profile reconstruction failed", i);
    }
  }
  return out;
}

}  // namespace coldstart
