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

#include <gtest/gtest.h>

#include <cmath>
#include <cstdint>
#include <optional>
#include <vector>

#include "coldstart/bigint.h"
#include "coldstart/errors.h"
#include "coldstart/random.h"

namespace coldstart {
namespace {

TEST(EncodeFixedTest, RoundsHalfAwayFromZero) {
  EXPECT_EQ(EncodeFixed(0.0, 0), 0);
  EXPECT_EQ(EncodeFixed(0.0, 20), 0);
  EXPECT_EQ(EncodeFixed(1.5, 1), 3);
  EXPECT_EQ(EncodeFixed(-0.3, 4), -5);  // -4.8
  EXPECT_EQ(EncodeFixed(0.25, 1), 1);   // tie 0.5
  EXPECT_EQ(EncodeFixed(-0.25, 1), -1);
  EXPECT_EQ(EncodeFixed(2.5, 0), 3);
  EXPECT_EQ(EncodeFixed(-2.5, 0), -3);
}

TEST(EncodeFixedTest, RejectsOverflow) {
  EXPECT_THROW(EncodeFixed(5.0, 0, 4), RangeError);
  EXPECT_EQ(EncodeFixed(-4.0, 0, 4), -4);
  EXPECT_THROW(EncodeFixed(1.0, 63), RangeError);
  EXPECT_THROW(EncodeFixed(NAN, 0), RangeError);
  EXPECT_THROW(EncodeFixed(INFINITY, 0), RangeError);
}

// Direct evaluation of 2 d^{d+1/2} s^{2d+1} B_V^{4d+1} B_r with the half
// power rounded up.
mpz_class ReferenceBound(unsigned d, unsigned s, uint64_t bv, uint64_t br) {
  mpz_class half;
  const mpz_class d_pow = Pow(d, 2 * d + 1);
  mpz_sqrt(half.get_mpz_t(), d_pow.get_mpz_t());
  if (half * half != d_pow) ++half;
  return 2 * half * Pow(s, 2 * d + 1) * Pow(mpz_class(std::to_string(bv)), 4 * d + 1) *
         mpz_class(std::to_string(br));
}

TEST(BoundTest, ReferenceInstantiationFitsInto806Bits) {
  const unsigned bits = BoundBits(8, 10, uint64_t{1} << 20, 4);
  EXPECT_LE(bits, 806u);
  EXPECT_EQ(bits, 746u);
}

TEST(BoundTest, TrivialParameters) {
  EXPECT_EQ(CorrectnessBound(1, 1, 1, 1), 2);
  EXPECT_EQ(BoundBits(1, 1, 1, 1), 3u);
}

TEST(BoundTest, SmallExactValue) {
  EXPECT_EQ(CorrectnessBound(2, 3, 2, 1), 1492992);
  EXPECT_EQ(BoundBits(2, 3, 2, 1), 22u);
}

TEST(BoundTest, BitsAreSmallestStrictlyAboveBound) {
  for (unsigned d = 1; d <= 5; ++d) {
    for (unsigned s = d; s <= d + 3; ++s) {
      for (uint64_t bv : {1u, 2u, 7u, 16u}) {
        for (uint64_t br : {1u, 3u, 8u}) {
          const mpz_class bound = ReferenceBound(d, s, bv, br);
          ASSERT_EQ(CorrectnessBound(d, s, bv, br), bound);
          const unsigned k = BoundBits(d, s, bv, br);
          const mpz_class smallest_k_bit = mpz_class(1) << (k - 1);
          EXPECT_GT(smallest_k_bit, bound);
          EXPECT_LE(smallest_k_bit / 2, bound);
        }
      }
    }
  }
}

TEST(BoundTest, RejectsZeroInputs) {
  EXPECT_THROW(BoundBits(0, 1, 1, 1), InvalidArgumentError);
  EXPECT_THROW(ComputeReconstructionBounds(1, 1, 0, 1), InvalidArgumentError);
}

TEST(ReconstructionBoundsTest, KnownValues) {
  const ReconstructionBounds trivial = ComputeReconstructionBounds(1, 1, 1, 1);
  EXPECT_EQ(trivial.numerator, 1);
  EXPECT_EQ(trivial.denominator, 1);
  // sqrt(8) * 2^3 * 3^5 * 2 = 10996.9..., 2^1 * 2^2 * 3^4 = 648.
  const ReconstructionBounds small = ComputeReconstructionBounds(2, 2, 3, 2);
  EXPECT_EQ(small.numerator, 10996);
  EXPECT_EQ(small.denominator, 648);
  const ReconstructionBounds odd = ComputeReconstructionBounds(3, 4, 2, 1);
  EXPECT_EQ(odd.numerator, 294912);
  EXPECT_EQ(odd.denominator, 21283);
}

TEST(ReconstructionBoundsTest, TwoPqNeverExceedsCorrectnessBound) {
  for (unsigned d = 1; d <= 8; ++d) {
    for (unsigned s = d; s <= d + 3; ++s) {
      for (uint64_t bv : {1u, 3u, 16u, 1u << 20}) {
        for (uint64_t br : {1u, 4u, 8u}) {
          const ReconstructionBounds b =
              ComputeReconstructionBounds(d, s, bv, br);
          const mpz_class two_pq = 2 * b.numerator * b.denominator;
          const mpz_class bound = CorrectnessBound(d, s, bv, br);
          ASSERT_LE(two_pq, bound);
          // Only rounding separates them: one ceiling in the bound and one
          // floor in each of P and Q.
          mpz_class half;
          const mpz_class d_pow = Pow(d, 2 * d + 1);
          mpz_sqrt(half.get_mpz_t(), d_pow.get_mpz_t());
          const double slack = 1.0 / half.get_d() + 1.0 / b.numerator.get_d() +
                               1.0 / b.denominator.get_d();
          ASSERT_LE(bound.get_d() / two_pq.get_d(), 1.0 + 1.01 * slack);
        }
      }
    }
  }
  const ReconstructionBounds reference =
      ComputeReconstructionBounds(8, 10, uint64_t{1} << 20, 4);
  EXPECT_LE(BitLength(2 * reference.numerator * reference.denominator), 806u);
}

TEST(ModMatrixTest, InverseOfIdentityAndDiagonal) {
  EXPECT_EQ(ModInverse(ModMatrix::Identity(3), 101), ModMatrix::Identity(3));
  ModMatrix two(2, 2);
  two(0, 0) = 2;
  two(1, 1) = 2;
  ModMatrix expected(2, 2);
  expected(0, 0) = 51;
  expected(1, 1) = 51;
  EXPECT_EQ(ModInverse(two, 101), expected);
}

TEST(ModMatrixTest, SingularMatrixIsReported) {
  ModMatrix ones(2, 2);
  for (auto& e : ones.entries()) e = 1;
  EXPECT_THROW(ModInverse(ones, 101), SingularMatrixError);
  EXPECT_THROW(ModInverse(ModMatrix(2, 2), 101), SingularMatrixError);
}

TEST(ModMatrixTest, NonUnitPivotRevealsFactor) {
  ModMatrix m(1, 1);
  m(0, 0) = 14;
  try {
    ModInverse(m, 35);
    FAIL() << "expected FactorFoundError";
  } catch (const FactorFoundError& e) {
    EXPECT_EQ(e.factor(), 7);
  }
}

TEST(ModMatrixTest, PrefersUnitPivots) {
  // Column 0 starts with 5, which shares a factor with 35; row 1 holds a unit.
  ModMatrix m(2, 2);
  m(0, 0) = 5;
  m(0, 1) = 1;
  m(1, 0) = 1;
  m(1, 1) = 0;
  const ModMatrix inverse = ModInverse(m, 35);
  EXPECT_EQ(ModMatMul(m, inverse, 35), ModMatrix::Identity(2));
}

TEST(ModMatrixTest, CombinesRowsWhenNoSingleUnitPivot) {
  // Column 0 holds 7 and 5, neither a unit mod 35; their sum 12 is. det = 2.
  ModMatrix m(2, 2);
  m(0, 0) = 7;
  m(0, 1) = 1;
  m(1, 0) = 5;
  m(1, 1) = 1;
  const ModMatrix inverse = ModInverse(m, 35);
  EXPECT_EQ(ModMatMul(m, inverse, 35), ModMatrix::Identity(2));
  EXPECT_EQ(ModMatMul(inverse, m, 35), ModMatrix::Identity(2));
}

TEST(ModMatrixTest, RandomInversesOverSmallComposite) {
  const mpz_class n = 35;
  SeededRandom rng = SeededRandom::FromU64(22);
  int inverted = 0;
  for (int i = 0; i < 2000; ++i) {
    const size_t d = 1 + rng.UniformU64Below(3);
    ModMatrix m(d, d);
    for (auto& e : m.entries()) e = rng.UniformBelow(n);
    // Reference: invertible iff the determinant is a unit.
    mpz_class det;
    if (d == 1) det = m(0, 0);
    if (d == 2) det = m(0, 0) * m(1, 1) - m(0, 1) * m(1, 0);
    if (d == 3) {
      det = m(0, 0) * (m(1, 1) * m(2, 2) - m(1, 2) * m(2, 1)) -
            m(0, 1) * (m(1, 0) * m(2, 2) - m(1, 2) * m(2, 0)) +
            m(0, 2) * (m(1, 0) * m(2, 1) - m(1, 1) * m(2, 0));
    }
    if (Gcd(Mod(det, n), n) == 1) {
      const ModMatrix inverse = ModInverse(m, n);
      ASSERT_EQ(ModMatMul(m, inverse, n), ModMatrix::Identity(d));
      ++inverted;
    } else {
      ASSERT_ANY_THROW(ModInverse(m, n));
    }
  }
  EXPECT_GT(inverted, 500);
}

TEST(ModMatrixTest, PivotingHandlesLeadingZero) {
  ModMatrix m(2, 2);
  m(0, 1) = 1;
  m(1, 0) = 1;
  EXPECT_EQ(ModInverse(m, 101), m);
}

TEST(ModMatrixTest, RandomInversesAtSixtyOneBits) {
  const mpz_class n = (mpz_class(1) << 61) - 1;  // prime
  SeededRandom rng = SeededRandom::FromU64(21);
  int checked = 0;
  while (checked < 500) {
    const size_t d = 1 + rng.UniformU64Below(4);
    ModMatrix m(d, d);
    for (auto& e : m.entries()) e = rng.UniformBelow(n);
    ModMatrix inverse;
    try {
      inverse = ModInverse(m, n);
    } catch (const SingularMatrixError&) {
      continue;
    }
    ASSERT_EQ(ModMatMul(inverse, m, n), ModMatrix::Identity(d));
    ASSERT_EQ(ModMatMul(m, inverse, n), ModMatrix::Identity(d));
    ++checked;
  }
}

TEST(ModMatrixTest, ArithmeticHelpers) {
  ModMatrix a(2, 2);
  a(0, 0) = 1;
  a(0, 1) = 2;
  a(1, 0) = 3;
  a(1, 1) = 4;
  const ModVector v = {5, 6};
  EXPECT_EQ(ModMatVec(a, v, 7), (ModVector{3, 4}));  // (17, 39) mod 7
  const ModMatrix sum = ModMatAdd(a, a, 7);
  EXPECT_EQ(sum(1, 1), 1);
  EXPECT_EQ(ModVecAdd(v, v, 7), (ModVector{3, 5}));
  EXPECT_THROW(ModMatMul(a, ModMatrix(3, 1), 7), InvalidArgumentError);
  EXPECT_THROW(ModMatVec(a, ModVector{1}, 7), InvalidArgumentError);
  EXPECT_THROW(ModInverse(ModMatrix(2, 3), 7), InvalidArgumentError);
}

TEST(RationalReconstructTest, KnownAnswers) {
  EXPECT_EQ(RationalReconstruct(5, 1009, 10, 10), mpq_class(5));
  // 3 * 4^{-1} mod 101 = 3 * 76 mod 101 = 26; 2 * 7 * 7 < 101.
  EXPECT_EQ(RationalReconstruct(26, 101, 7, 7), mpq_class(3, 4));
  EXPECT_EQ(RationalReconstruct(0, 101, 10, 4), mpq_class(0));
  EXPECT_EQ(RationalReconstruct(100, 101, 10, 4), mpq_class(-1));
}

TEST(RationalReconstructTest, BruteForceAgreesOnSmallModulus) {
  const mpz_class n = 1009;
  const mpz_class p_bound = 15, q_bound = 12;
  for (int c = 0; c < 1009; ++c) {
    std::optional<mpq_class> expected;
    for (int q = 1; q <= 12 && !expected; ++q) {
      for (int p = -15; p <= 15; ++p) {
        if (Mod(mpz_class(q) * c - p, n) == 0) {
          expected = mpq_class(p, q);
          expected->canonicalize();
          break;
        }
      }
    }
    if (expected) {
      ASSERT_EQ(RationalReconstruct(c, n, p_bound, q_bound), *expected) << c;
    } else {
      ASSERT_THROW(RationalReconstruct(c, n, p_bound, q_bound),
                   ReconstructionError)
          << c;
    }
  }
}

TEST(RationalReconstructTest, RandomRoundTrips) {
  SeededRandom rng = SeededRandom::FromU64(31);
  const mpz_class n = (mpz_class(1) << 127) - 1;  // prime
  const mpz_class p_bound = mpz_class(1) << 60;
  const mpz_class q_bound = mpz_class(1) << 60;
  for (int i = 0; i < 1000; ++i) {
    const mpz_class p = rng.UniformInRange(-p_bound, p_bound);
    const mpz_class q = rng.UniformInRange(1, q_bound);
    mpq_class expected(p, q);
    expected.canonicalize();
    mpz_class q_inv;
    mpz_invert(q_inv.get_mpz_t(), q.get_mpz_t(), n.get_mpz_t());
    ASSERT_EQ(RationalReconstruct(Mod(p * q_inv, n), n, p_bound, q_bound),
              expected);
  }
}

TEST(RationalReconstructTest, Preconditions) {
  EXPECT_THROW(RationalReconstruct(5, 200, 10, 10), InvalidArgumentError);
  EXPECT_THROW(RationalReconstruct(1009, 1009, 10, 10), RangeError);
  EXPECT_THROW(RationalReconstruct(-1, 1009, 10, 10), RangeError);
}

TEST(RationalReconstructTest, DenominatorSharingFactorIsReported) {
  // 5 * 401 = 0 mod 2005, so the expansion of 401 stops at 0 / 5.
  try {
    RationalReconstruct(401, 2005, 3, 5);
    FAIL() << "expected FactorFoundError";
  } catch (const FactorFoundError& e) {
    EXPECT_EQ(e.factor(), 5);
  }
}

TEST(DecodeProfileTest, ZeroVectorAndKnownFractions) {
  const ReconstructionBounds bounds{10, 10};
  EXPECT_EQ(DecodeProfile({0, 0, 0}, 1009, bounds),
            (RationalVector{0, 0, 0}));
  // 1/3 and -2/5 modulo 1009.
  const mpz_class third = 673;                 // 3 * 673 = 2 * 1009 + 1
  const mpz_class minus_two_fifths = 1009 - 404;  // 5 * 202 = 1009 + 1
  ASSERT_EQ(Mod(mpz_class(3) * third, 1009), 1);
  ASSERT_EQ(Mod(mpz_class(5) * minus_two_fifths, 1009), 1009 - 2);
  EXPECT_EQ(DecodeProfile({third, minus_two_fifths}, 1009, bounds),
            (RationalVector{mpq_class(1, 3), mpq_class(-2, 5)}));
}

TEST(DecodeProfileTest, FailureNamesTheCoordinate) {
  const ReconstructionBounds bounds{10, 10};
  // 1/13 mod 1009 has no representative with |p|, q <= 10.
  mpz_class c;
  mpz_invert(c.get_mpz_t(), mpz_class(13).get_mpz_t(), mpz_class(1009).get_mpz_t());
  for (int q = 1; q <= 10; ++q) {
    for (int p = -10; p <= 10; ++p) {
      ASSERT_NE(Mod(mpz_class(q) * c - p, 1009), 0);
    }
  }
  try {
    DecodeProfile({1, c, 2}, 1009, bounds);
    FAIL() << "expected ReconstructionError";
  } catch (const ReconstructionError& e) {
    ASSERT_TRUE(e.index().has_value());
    EXPECT_EQ(*e.index(), 1u);
  }
}

TEST(ProtocolParamsTest, MakeFillsMinimumAndValidates) {
  const ProtocolParams params =
      ProtocolParams::Make(8, 100, 10, uint64_t{1} << 20, 4, 0);
  EXPECT_EQ(params.min_modulus_bits, 746u);
  EXPECT_THROW(ProtocolParams::Make(0, 10, 1, 1, 1), InvalidArgumentError);
  EXPECT_THROW(ProtocolParams::Make(3, 10, 2, 1, 1), InvalidArgumentError);
  EXPECT_THROW(ProtocolParams::Make(1, 1, 1, 1, 1), InvalidArgumentError);
  EXPECT_THROW(ProtocolParams::Make(1, 4, 5, 1, 1), InvalidArgumentError);
  ProtocolParams low = params;
  low.min_modulus_bits = 700;
  EXPECT_THROW(low.Validate(), RangeError);
}

}  // namespace
}  // namespace coldstart
